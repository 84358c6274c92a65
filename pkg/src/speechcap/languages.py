"""Supported-language registry and syllable-nucleus counting.

Speaking rate needs a syllable count per transcript. Syllables are
approximated by vowel nuclei:

* Brahmic scripts (Devanagari, Bengali, Tamil, ...): one nucleus per
  independent vowel, per dependent vowel sign (matra), and per consonant
  that carries its inherent vowel (i.e. is not followed by a virama or a
  matra). The nine major Indic blocks share the same internal layout, so
  one offset table covers them all.
* Latin script: one nucleus per maximal run of vowel letters
  (a, e, i, o, u, y) after stripping diacritics.
* Arabic-script languages (Urdu, Kashmiri, Sindhi): vowels are mostly
  unwritten, so this counts long-vowel carriers and explicit short-vowel
  diacritics with a minimum of one nucleus per word. A rough proxy only.
* Ol Chiki (Santali): one nucleus per vowel letter.
* Meetei Mayek (Manipuri): Brahmic-like rule with its own ranges.

Counters also count Latin vowel runs embedded in non-Latin transcripts,
since real Indic corpora are code-mixed.
"""

from __future__ import annotations

import re
import unicodedata

# Brahmic block bases with a shared internal layout.
_BRAHMIC_BASES = (
    0x0900,  # Devanagari
    0x0980,  # Bengali
    0x0A00,  # Gurmukhi
    0x0A80,  # Gujarati
    0x0B00,  # Oriya
    0x0B80,  # Tamil
    0x0C00,  # Telugu
    0x0C80,  # Kannada
    0x0D00,  # Malayalam
)

_INDEPENDENT_OFF = frozenset(range(0x04, 0x15)) | {0x60, 0x61}
_CONSONANT_OFF = frozenset(range(0x15, 0x3A)) | frozenset(range(0x58, 0x60))
_MATRA_OFF = frozenset(range(0x3E, 0x4D)) | {0x55, 0x56, 0x57, 0x62, 0x63}
_VIRAMA_OFF = 0x4D
_NUKTA_OFF = 0x3C

_LATIN_RUN_RE = re.compile(r"[A-Za-zÀ-ɏ]+")
_LATIN_VOWEL_RUN_RE = re.compile(r"[aeiouy]+")

# Arabic-script long-vowel carriers and short-vowel diacritics.
_ARABIC_NUCLEI = frozenset(
    [0x0622, 0x0623, 0x0625, 0x0627, 0x0648, 0x0649, 0x064A, 0x06CC, 0x06D2]
    + [0x064E, 0x064F, 0x0650, 0x0670]
)
_ARABIC_LETTER_RE = re.compile(r"[؀-ۿ]+")

# Ol Chiki vowel letters: first letter of each of the six rows.
_OL_CHIKI_VOWELS = frozenset({0x1C5A, 0x1C5F, 0x1C64, 0x1C69, 0x1C6E, 0x1C73})

# Meetei Mayek: letters carry an inherent vowel unless killed or replaced.
_MEETEI_LETTERS = frozenset(range(0xABC0, 0xABE3))
_MEETEI_MATRAS = frozenset(range(0xABE3, 0xABEB))
_MEETEI_KILLER = 0xABED


def _brahmic_base(cp: int) -> int | None:
    for base in _BRAHMIC_BASES:
        if base <= cp < base + 0x80:
            return base
    return None


def _latin_nuclei(text: str) -> int:
    count = 0
    for run in _LATIN_RUN_RE.findall(text):
        stripped = "".join(
            ch
            for ch in unicodedata.normalize("NFD", run)
            if not unicodedata.combining(ch)
        ).casefold()
        count += len(_LATIN_VOWEL_RUN_RE.findall(stripped))
    return count


def _brahmic_nuclei(text: str) -> int:
    count = 0
    n = len(text)
    for i, ch in enumerate(text):
        base = _brahmic_base(ord(ch))
        if base is None:
            continue
        off = ord(ch) - base
        if off in _INDEPENDENT_OFF or off in _MATRA_OFF:
            count += 1
        elif off in _CONSONANT_OFF:
            j = i + 1
            while j < n and _brahmic_base(ord(text[j])) == base and ord(text[j]) - base == _NUKTA_OFF:
                j += 1
            nxt = None
            if j < n and _brahmic_base(ord(text[j])) == base:
                nxt = ord(text[j]) - base
            if nxt is not None and (nxt in _MATRA_OFF or nxt == _VIRAMA_OFF):
                continue  # matra counts itself; virama kills the inherent vowel
            count += 1
    return count


def _arabic_nuclei(text: str) -> int:
    count = 0
    for word in _ARABIC_LETTER_RE.findall(text):
        nuclei = sum(1 for ch in word if ord(ch) in _ARABIC_NUCLEI)
        count += max(nuclei, 1)
    return count


def _ol_chiki_nuclei(text: str) -> int:
    return sum(1 for ch in text if ord(ch) in _OL_CHIKI_VOWELS)


def _meetei_nuclei(text: str) -> int:
    count = 0
    n = len(text)
    for i, ch in enumerate(text):
        cp = ord(ch)
        if cp in _MEETEI_MATRAS:
            count += 1
        elif cp in _MEETEI_LETTERS:
            nxt = ord(text[i + 1]) if i + 1 < n else None
            if nxt is not None and (nxt in _MEETEI_MATRAS or nxt == _MEETEI_KILLER):
                continue
            count += 1
    return count


class SyllableCounter:
    """Counts vowel nuclei under a script-specific rule set."""

    def __init__(self, script: str, primary):
        self.script = script
        self._primary = primary

    def count(self, text: str) -> int:
        text = unicodedata.normalize("NFC", text)
        total = self._primary(text)
        if self._primary is not _latin_nuclei:
            total += _latin_nuclei(text)  # code-mixed Latin segments
        return total


_LATIN = SyllableCounter("latin", _latin_nuclei)
_BRAHMIC = SyllableCounter("brahmic", _brahmic_nuclei)
_ARABIC = SyllableCounter("arabic", _arabic_nuclei)
_OL_CHIKI = SyllableCounter("ol_chiki", _ol_chiki_nuclei)
_MEETEI = SyllableCounter("meetei_mayek", _meetei_nuclei)

# ISO 639-3 → counter. Brahmic blocks are distinguished per character, so
# all Brahmic-script languages share one counter.
SUPPORTED_LANGUAGES: dict[str, SyllableCounter] = {
    "eng": _LATIN,
    "asm": _BRAHMIC,
    "ben": _BRAHMIC,
    "brx": _BRAHMIC,
    "doi": _BRAHMIC,
    "guj": _BRAHMIC,
    "hin": _BRAHMIC,
    "kan": _BRAHMIC,
    "kok": _BRAHMIC,
    "mai": _BRAHMIC,
    "mal": _BRAHMIC,
    "mar": _BRAHMIC,
    "nep": _BRAHMIC,
    "ori": _BRAHMIC,
    "pan": _BRAHMIC,
    "san": _BRAHMIC,
    "tam": _BRAHMIC,
    "tel": _BRAHMIC,
    "kas": _ARABIC,
    "snd": _ARABIC,
    "urd": _ARABIC,
    "sat": _OL_CHIKI,
    "mni": _MEETEI,
}


def syllable_count(text: str, language: str) -> int:
    """Number of vowel nuclei in ``text`` for the given language."""
    try:
        counter = SUPPORTED_LANGUAGES[language]
    except KeyError:
        raise ValueError(f"unsupported language code {language!r}") from None
    return counter.count(text)
