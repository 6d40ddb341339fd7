"""Model backends: question generation, machine translation, NP chunking.

The pipeline composes three external model roles behind one protocol so
real neural systems can be swapped in without linking ML runtimes here.
Transport is line-delimited JSON over a child process's standard streams
(``exec:<command line>``), HTTP POST with the same JSON bodies
(``http:<url>``), or a deterministic in-process stub (``stub:<name>``).

Wire schemas:
  qg      request {"sentence": str}
          response {"candidates": [{"question": str, "answer": str,
                                    "answer_char_start": int?}]}
  mt      request {"text": str, "mode": "vanilla"|"constrained"|"external",
                   "constraints": [{"src": str, "tgt": str}],
                   "src_lang": str, "tgt_lang": str}
          response {"translation": str}
  chunker request {"tokens": [str]}
          response {"phrases": [{"start": int, "end_exclusive": int}]}
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
import unicodedata
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Sequence

import httpx

from .errors import BackendTimeout, BackendUnavailable, ProtocolViolation

ROLES = ("qg", "mt", "chunker")
MT_MODES = ("vanilla", "constrained", "external")
DEFAULT_TIMEOUT = 30.0


def encode_message(obj: dict) -> str:
    """Canonical one-line wire encoding (sorted keys, raw UTF-8)."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def decode_message(line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolViolation(f"not valid JSON: {line!r}") from exc
    if not isinstance(obj, dict):
        raise ProtocolViolation(f"expected a JSON object, got: {line!r}")
    return obj


def _require(payload: dict, key: str, types: type | tuple, context: str) -> Any:
    if key not in payload:
        raise ProtocolViolation(f"{context}: missing {key!r} in {encode_message(payload)}")
    value = payload[key]
    if not isinstance(value, types):
        raise ProtocolViolation(f"{context}: bad type for {key!r} in {encode_message(payload)}")
    return value


def validate_request(role: str, request: dict) -> None:
    if role == "qg":
        _require(request, "sentence", str, "qg request")
    elif role == "mt":
        _require(request, "text", str, "mt request")
        mode = _require(request, "mode", str, "mt request")
        if mode not in MT_MODES:
            raise ProtocolViolation(f"mt request: unknown mode {mode!r}")
        constraints = request.get("constraints", [])
        if not isinstance(constraints, list):
            raise ProtocolViolation("mt request: constraints must be a list")
        if constraints and mode != "constrained":
            raise ProtocolViolation(f"mt request: constraints given in {mode} mode")
        for item in constraints:
            _require(item, "src", str, "mt constraint")
            _require(item, "tgt", str, "mt constraint")
        _require(request, "src_lang", str, "mt request")
        _require(request, "tgt_lang", str, "mt request")
    elif role == "chunker":
        tokens = _require(request, "tokens", list, "chunker request")
        if not all(isinstance(t, str) for t in tokens):
            raise ProtocolViolation("chunker request: tokens must be strings")
    else:
        raise ProtocolViolation(f"unknown backend role {role!r}")


def validate_response(role: str, request: dict, response: dict) -> None:
    if role == "qg":
        candidates = _require(response, "candidates", list, "qg response")
        sentence = request["sentence"]
        for cand in candidates:
            question = _require(cand, "question", str, "qg candidate")
            answer = _require(cand, "answer", str, "qg candidate")
            if not question.strip():
                raise ProtocolViolation("qg candidate: empty question")
            start = cand.get("answer_char_start")
            if start is not None:
                if not isinstance(start, int) or isinstance(start, bool):
                    raise ProtocolViolation("qg candidate: answer_char_start must be int")
                if sentence[start : start + len(answer)] != answer:
                    raise ProtocolViolation(
                        f"qg candidate: answer {answer!r} not at offset {start} of sentence"
                    )
    elif role == "mt":
        _require(response, "translation", str, "mt response")
    elif role == "chunker":
        phrases = _require(response, "phrases", list, "chunker response")
        n = len(request["tokens"])
        for phrase in phrases:
            start = _require(phrase, "start", int, "chunker phrase")
            end = _require(phrase, "end_exclusive", int, "chunker phrase")
            if not (0 <= start < end <= n):
                raise ProtocolViolation(f"chunker phrase: bad span ({start},{end}) for {n} tokens")
    else:
        raise ProtocolViolation(f"unknown backend role {role!r}")


class Backend:
    """A configured model endpoint for one role."""

    role: str = ""
    spec: str = ""

    def call(self, request: dict) -> dict:
        validate_request(self.role, request)
        response = self._call(request)
        validate_response(self.role, request, response)
        return response

    def _call(self, request: dict) -> dict:
        raise NotImplementedError

    def close(self) -> None:
        pass


# ---------------------------------------------------------------------------
# Deterministic stubs. These are total, pure functions of their request and
# carry small built-in fixture tables so end-to-end pipeline tests are
# reproducible without any model.
# ---------------------------------------------------------------------------

ARCHAEOPTERYX_EN = (
    "The first discovery of archaeopteryx was in 1862 in the state of Bavaria , Germany ."
)
ARCHAEOPTERYX_QUESTION = "Where was archaeopteryx first discovered ?"
CENTRIFUGE_EN = "the scientists used a centrifuge to obtain high purity silicon ."
CENTRIFUGE_QUESTION = "What did the scientists use to obtain high purity silicon ?"
COMMITTEE_EN = "the committee met in Geneva on Monday to review the report ."

DEFAULT_QG_TABLE: dict[str, list[dict]] = {
    ARCHAEOPTERYX_EN: [
        {"question": ARCHAEOPTERYX_QUESTION, "answer": "the state of Bavaria"},
    ],
    CENTRIFUGE_EN: [
        {"question": CENTRIFUGE_QUESTION, "answer": "a centrifuge"},
    ],
    COMMITTEE_EN: [
        {"question": "Where did the committee meet ?", "answer": "Geneva"},
        {"question": "What is the answer to this question ?", "answer": "Geneva"},
    ],
    "Yes .": [
        {"question": "Is this affirmative ?", "answer": "Yes"},
    ],
}

# Recorded outputs for the "external" MT mode, standing in for a black-box
# commercial system whose outputs were captured once.
RECORDED_EXTERNAL_MT: dict[str, str] = {
    ARCHAEOPTERYX_QUESTION: "最早发现的最早的考古学是哪里？",
    CENTRIFUGE_QUESTION: "科学家用什么来获得高纯度硅？",
}

# Tiny per-target-language dictionaries covering the fixture questions, for
# pipeline runs that need fully non-English stub translations.
FIXTURE_MT_DICTIONARIES: dict[str, dict[str, str]] = {
    "zh": {
        "Where": "哪里",
        "What": "什么",
        "scientists": "科学家们",
        "Is": "是",
        "was": "是",
        "did": "做",
        "this": "这",
        "first": "最早",
        "discovered": "发现",
        "use": "用",
        "to": "来",
        "obtain": "获得",
        "meet": "开会",
        "affirmative": "肯定",
        "the": "该",
        "committee": "委员会",
        "?": "？",
    },
    "ar": {
        "Where": "أين",
        "What": "ما",
        "scientists": "العلماء",
        "Is": "هل",
        "was": "كان",
        "did": "فعل",
        "this": "هذا",
        "first": "أولا",
        "discovered": "اكتشف",
        "use": "استخدم",
        "to": "كي",
        "obtain": "الحصول",
        "meet": "اجتمع",
        "affirmative": "إيجابي",
        "the": "ال",
        "committee": "اللجنة",
        "?": "؟",
    },
}

# Function words that never start a content chunk in the stub chunker.
_STUB_STOPLIST = frozenset(
    """
    a an the this that these those some any no
    and or but nor so yet
    of in on at by for with from into onto over under between among during
    to as about against through after before above below up down out off
    is are was were be been being am do does did done has have had having
    will would shall should can could may might must
    i you he she it we they me him her us them my your his its our their
    not than then there here when where who whom whose which what why how
    if because while although though unless until
    """.split()
)


def _is_punct_only(token: str) -> bool:
    return bool(token) and all(unicodedata.category(ch).startswith("P") for ch in token)


class StubQG(Backend):
    """Emits question/answer candidates from a lookup table keyed by sentence."""

    role = "qg"

    def __init__(self, table: dict[str, list[dict]] | None = None, spec: str = "stub:qg"):
        self.table = DEFAULT_QG_TABLE if table is None else table
        self.spec = spec

    def _call(self, request: dict) -> dict:
        candidates = self.table.get(request["sentence"], [])
        return {"candidates": [dict(c) for c in candidates]}


class StubMT(Backend):
    """Copies source text, splicing constraint targets over matched sources.

    Unconstrained words pass through a word-by-word dictionary (identity
    for unknown words). In "external" mode a recorded-translation table is
    consulted first, mimicking a black-box MT service.
    """

    role = "mt"

    def __init__(
        self,
        dictionaries: dict[str, dict[str, str]] | None = None,
        recorded: dict[str, str] | None = None,
        spec: str = "stub:mt",
    ):
        self.dictionaries = dictionaries or {}
        self.recorded = RECORDED_EXTERNAL_MT if recorded is None else recorded
        self.spec = spec

    def _call(self, request: dict) -> dict:
        text = request["text"]
        mode = request["mode"]
        lexicon = self.dictionaries.get(request["tgt_lang"], {})
        if mode == "external":
            hit = self.recorded.get(text)
            if hit is not None:
                return {"translation": hit}
        tokens = text.split()
        # Each slot holds (text, is_constraint_target) or None once consumed.
        slots: list[tuple[str, bool] | None] = [(t, False) for t in tokens]
        if mode == "constrained":
            # Longest sources first so nested constraints cannot clobber a
            # wider match; each token position is consumed at most once.
            constraints = sorted(
                request.get("constraints", []),
                key=lambda c: -len(c["src"].split()),
            )
            for constraint in constraints:
                src_tokens = constraint["src"].split()
                if not src_tokens:
                    continue
                for i in range(len(tokens) - len(src_tokens) + 1):
                    window = slots[i : i + len(src_tokens)]
                    if any(w is None or w[1] for w in window):
                        continue
                    if [w[0] for w in window] == src_tokens:  # type: ignore[index]
                        slots[i] = (constraint["tgt"], True)
                        for k in range(i + 1, i + len(src_tokens)):
                            slots[k] = None
                        break
        pieces = []
        for slot in slots:
            if slot is None:
                continue
            piece, is_constraint = slot
            pieces.append(piece if is_constraint else lexicon.get(piece, piece))
        return {"translation": " ".join(pieces)}


class StubChunker(Backend):
    """Phrase spans: maximal capitalized runs plus maximal non-stopword runs."""

    role = "chunker"

    def __init__(self, spec: str = "stub:chunker"):
        self.spec = spec

    def _call(self, request: dict) -> dict:
        tokens = request["tokens"]
        spans: list[tuple[int, int]] = []
        spans.extend(_maximal_runs(tokens, lambda t: bool(t) and t[0].isupper()))
        spans.extend(
            _maximal_runs(
                tokens,
                lambda t: t.lower() not in _STUB_STOPLIST and not _is_punct_only(t),
            )
        )
        unique = sorted(set(spans), key=lambda s: (s[0], -(s[1] - s[0])))
        return {"phrases": [{"start": s, "end_exclusive": e} for s, e in unique]}


def _maximal_runs(tokens: Sequence[str], predicate: Callable[[str], bool]) -> list[tuple[int, int]]:
    runs = []
    start = None
    for i, token in enumerate(tokens):
        if predicate(token):
            if start is None:
                start = i
        elif start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(tokens)))
    return runs


# ---------------------------------------------------------------------------
# Subprocess and HTTP transports
# ---------------------------------------------------------------------------


class ExecBackend(Backend):
    """Line-delimited JSON over a child process's stdin/stdout.

    Requests are serialized through a lock; the child sees one request
    line per call and must answer with exactly one response line.
    """

    def __init__(self, role: str, command: str, timeout: float = DEFAULT_TIMEOUT, spec: str | None = None):
        self.role = role
        self.spec = spec or f"exec:{command}"
        self.timeout = timeout
        self._lock = threading.Lock()
        self._queue: queue.Queue[str | None] = queue.Queue()
        try:
            self._proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise BackendUnavailable(f"cannot start backend {command!r}: {exc}") from exc
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()

    def _pump(self) -> None:
        assert self._proc.stdout is not None
        for line in self._proc.stdout:
            self._queue.put(line)
        self._queue.put(None)

    def _call(self, request: dict) -> dict:
        with self._lock:
            if self._proc.poll() is not None:
                raise BackendUnavailable(f"backend process exited: {self.spec}")
            assert self._proc.stdin is not None
            try:
                self._proc.stdin.write(encode_message(request) + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, ValueError) as exc:
                raise BackendUnavailable(f"backend pipe closed: {self.spec}") from exc
            try:
                line = self._queue.get(timeout=self.timeout)
            except queue.Empty:
                # A late reply would desynchronize request/response pairing,
                # so the process is not reusable after a timeout.
                self._proc.kill()
                raise BackendTimeout(f"no response within {self.timeout}s: {self.spec}") from None
            if line is None:
                raise BackendUnavailable(f"backend closed its output: {self.spec}")
            return decode_message(line)

    def close(self) -> None:
        if self._proc.poll() is None:
            if self._proc.stdin is not None:
                self._proc.stdin.close()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()


class HttpBackend(Backend):
    """HTTP POST with JSON bodies; non-2xx responses mean the backend is down."""

    def __init__(self, role: str, url: str, timeout: float = DEFAULT_TIMEOUT, spec: str | None = None):
        self.role = role
        self.url = url
        self.spec = spec or f"http:{url}"
        self.timeout = timeout
        self._client = httpx.Client(timeout=timeout)

    def _call(self, request: dict) -> dict:
        try:
            response = self._client.post(self.url, json=request)
        except httpx.TimeoutException as exc:
            raise BackendTimeout(f"{self.url}: {exc}") from exc
        except httpx.HTTPError as exc:
            raise BackendUnavailable(f"{self.url}: {exc}") from exc
        if not (200 <= response.status_code < 300):
            raise BackendUnavailable(f"{self.url}: HTTP {response.status_code}")
        return decode_message(response.text)

    def close(self) -> None:
        self._client.close()


_STUB_FACTORIES: dict[str, Callable[[], Backend]] = {
    "qg": lambda: StubQG(),
    "mt": lambda: StubMT(),
    "mt-fixture": lambda: StubMT(dictionaries=FIXTURE_MT_DICTIONARIES, spec="stub:mt-fixture"),
    "chunker": lambda: StubChunker(),
}


def resolve_backend(role: str, spec: str, timeout: float = DEFAULT_TIMEOUT) -> Backend:
    """Build a backend from a spec string: stub:<name>, exec:<cmd> or http:<url>."""
    if role not in ROLES:
        raise ProtocolViolation(f"unknown backend role {role!r}")
    if spec.startswith("stub:"):
        name = spec[len("stub:") :]
        factory = _STUB_FACTORIES.get(name)
        if factory is None:
            raise BackendUnavailable(f"no stub named {name!r}")
        backend = factory()
        if backend.role != role:
            raise BackendUnavailable(f"stub {name!r} serves role {backend.role!r}, not {role!r}")
        return backend
    if spec.startswith("exec:"):
        return ExecBackend(role, spec[len("exec:") :], timeout=timeout)
    if spec.startswith(("http://", "https://")):
        return HttpBackend(role, spec, timeout=timeout)
    if spec.startswith("http:"):
        return HttpBackend(role, spec[len("http:") :], timeout=timeout)
    raise BackendUnavailable(f"cannot interpret backend spec {spec!r}")


def run_requests(backend: Backend, requests: Sequence[dict], jobs: int = 4) -> list[dict]:
    """Issue requests through a bounded worker pool; results keep input order."""
    if jobs <= 1 or len(requests) <= 1:
        return [backend.call(r) for r in requests]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(backend.call, requests))
