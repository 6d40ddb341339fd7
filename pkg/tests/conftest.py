"""Shared fixtures: two hand-aligned sentence pairs (en-zh and en-ar) plus a
small three-way toy corpus written to disk for pipeline-level tests."""

from __future__ import annotations

from pathlib import Path

import pytest

from alignqa.backends import ARCHAEOPTERYX_EN, CENTRIFUGE_EN, COMMITTEE_EN
from alignqa.corpus import Corpus, SentencePair, WordAlignment

ARCH_ZH = "始祖鸟 的 首次 发现 是 1862 年 在 德国 巴伐利亚 州 。"
ARCH_ZH_LINKS = {(1, 2), (2, 3), (4, 0), (5, 4), (7, 5), (12, 9), (14, 8), (15, 11)}
ARCH_ANSWER_SPAN = (9, 13)  # "the state of Bavaria"

ARCH_AR = "أول اكتشاف لـ أركيوبتركس كان في 1862 في ولاية بافاريا بألمانيا ."
ARCH_AR_LINKS = {(1, 0), (2, 1), (4, 3), (5, 4), (7, 6), (10, 8), (12, 9), (14, 10), (15, 11)}

CENT_ZH = "科学家们 使用 离心机 来 获得 最高纯度的硅 。"
CENT_ZH_LINKS = {
    (0, 0), (1, 0), (2, 1), (4, 2), (5, 3), (6, 4), (7, 5), (8, 5), (9, 5), (10, 6),
}
CENT_ANSWER_SPAN = (3, 5)  # "a centrifuge"

CENT_AR = "استخدم العلماء جهاز الطرد المركزي للحصول على السيليكون عالي النقاء ."
CENT_AR_LINKS = {
    (0, 1), (1, 1), (2, 0), (3, 2), (4, 2), (4, 3), (4, 4),
    (5, 5), (6, 5), (7, 8), (8, 9), (9, 7), (10, 10),
}

FOSSIL_EN = "It was a remarkable fossil ."
FOSSIL_ZH = "它 是 非常 了不起 的 化石 。"
FOSSIL_ZH_LINKS = "0-0 1-1 3-3 4-5 5-6"
FOSSIL_AR = "كانت أحفورة رائعة ."
FOSSIL_AR_LINKS = "1-0 3-2 4-1 5-3"

COMMITTEE_ZH = "委员会 星期一 在 日内瓦 开会 以 审查 报告 。"
COMMITTEE_ZH_LINKS = "0-0 1-0 2-4 3-2 4-3 5-1 6-1 8-6 10-7 11-8"
COMMITTEE_AR = "اجتمعت اللجنة في جنيف يوم الاثنين لمراجعة التقرير ."
COMMITTEE_AR_LINKS = "0-1 1-1 2-0 3-2 4-3 5-4 6-5 8-6 10-7 11-8"

YES_EN = "Yes ."
YES_ZH = "是 。"
YES_AR = "نعم ."

TOY_EN_LINES = [ARCHAEOPTERYX_EN, FOSSIL_EN, "", CENTRIFUGE_EN, COMMITTEE_EN, YES_EN]
TOY_ZH_LINES = [ARCH_ZH, FOSSIL_ZH, "", CENT_ZH, COMMITTEE_ZH, YES_ZH]
TOY_AR_LINES = [ARCH_AR, FOSSIL_AR, "", CENT_AR, COMMITTEE_AR, YES_AR]


def links_line(links: set[tuple[int, int]]) -> str:
    return " ".join(f"{i}-{j}" for i, j in sorted(links))


TOY_ZH_ALIGN_LINES = [
    links_line(ARCH_ZH_LINKS),
    FOSSIL_ZH_LINKS,
    links_line(CENT_ZH_LINKS),
    COMMITTEE_ZH_LINKS,
    "0-0 1-1",
]
TOY_AR_ALIGN_LINES = [
    links_line(ARCH_AR_LINKS),
    FOSSIL_AR_LINKS,
    links_line(CENT_AR_LINKS),
    COMMITTEE_AR_LINKS,
    "0-0 1-1",
]


def make_pair(
    pair_id: str,
    src: str,
    tgt: str,
    doc_id: str = "d0",
    paragraph_index: int = 0,
    lang_pair: tuple[str, str] = ("en", "zh"),
) -> SentencePair:
    return SentencePair(
        id=pair_id,
        doc_id=doc_id,
        paragraph_index=paragraph_index,
        src_tokens=tuple(src.split()),
        tgt_tokens=tuple(tgt.split()),
        lang_pair=lang_pair,
    )


@pytest.fixture
def arch_pair_zh() -> SentencePair:
    return make_pair("arch:0", ARCHAEOPTERYX_EN, ARCH_ZH)


@pytest.fixture
def arch_wa_zh() -> WordAlignment:
    return WordAlignment("arch:0", frozenset(ARCH_ZH_LINKS), origin="human")


@pytest.fixture
def cent_pair_zh() -> SentencePair:
    return make_pair("cent:0", CENTRIFUGE_EN, CENT_ZH)


@pytest.fixture
def cent_wa_zh() -> WordAlignment:
    return WordAlignment("cent:0", frozenset(CENT_ZH_LINKS), origin="human")


@pytest.fixture
def arch_corpus(arch_pair_zh) -> Corpus:
    return Corpus([arch_pair_zh])


def write_toy_bitext(
    tmp_path: Path, tgt: str = "zh"
) -> tuple[Path, Path, Path]:
    """Write the toy 6-line bitext and its alignment file; returns the paths."""
    tgt_lines = TOY_ZH_LINES if tgt == "zh" else TOY_AR_LINES
    align_lines = TOY_ZH_ALIGN_LINES if tgt == "zh" else TOY_AR_ALIGN_LINES
    src_file = tmp_path / f"toy.en-{tgt}.en"
    tgt_file = tmp_path / f"toy.en-{tgt}.{tgt}"
    align_file = tmp_path / f"toy.en-{tgt}.align"
    src_file.write_text("\n".join(TOY_EN_LINES) + "\n", encoding="utf-8")
    tgt_file.write_text("\n".join(tgt_lines) + "\n", encoding="utf-8")
    align_file.write_text("\n".join(align_lines) + "\n", encoding="utf-8")
    return src_file, tgt_file, align_file
