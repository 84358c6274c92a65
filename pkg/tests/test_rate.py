import pytest

from speechcap.attributes import speaking_rate
from speechcap.errors import UndefinedAttributeError
from speechcap.languages import syllable_count


# Hand-counted vowel-nuclei fixtures. Latin: maximal [aeiouy] runs after
# diacritic stripping. Brahmic: independent vowels + matras + consonants
# not followed by virama or matra.
LATIN_CASES = [
    ("hello world", 3),                      # he-llo (e, o) + world (o)
    ("the quick brown fox jumps over the lazy dog", 11),
    ("speaking", 2),                         # ea, i
    ("beautiful", 3),                        # eau, i, u
    ("my rhythm", 2),                        # y, y
    ("a", 1),
    ("naïve café", 4),                       # aï run -> ai (1), e; a, e
]

DEVANAGARI_CASES = [
    ("नमस्ते", 3),        # न(अ) म(अ) स््... त+े
    ("भारत", 3),          # भ(अ) र(अ) त(अ)
    ("हिन्दी", 2),        # ह+ि, न्, द+ी
    ("क्या", 1),          # क् + य+ा
    ("अच्छा", 2),         # अ, च्, छ+ा
]

OTHER_SCRIPT_CASES = [
    ("বাংলা", "ben", 2),   # ব+া, ং anusvara, ল+া
    ("தமிழ்", "tam", 2),   # த(அ), ம+ி, ழ்(virama)
    ("తెలుగు", "tel", 3),  # త+ె, ల+ు, గ+ు
]


@pytest.mark.parametrize("text,expected", LATIN_CASES)
def test_latin_counts(text, expected):
    assert syllable_count(text, "eng") == expected


@pytest.mark.parametrize("text,expected", DEVANAGARI_CASES)
def test_devanagari_counts(text, expected):
    assert syllable_count(text, "hin") == expected


@pytest.mark.parametrize("text,language,expected", OTHER_SCRIPT_CASES)
def test_other_brahmic_scripts(text, language, expected):
    assert syllable_count(text, language) == expected


def test_code_mixed_transcript():
    # Latin segments inside an Indic transcript still count
    assert syllable_count("नमस्ते Alexa", "hin") == 3 + 3


def test_unsupported_language_rejected():
    with pytest.raises(ValueError):
        syllable_count("hello", "xx")


def test_rate_arithmetic_exact():
    # 12 nuclei over 4 s -> 3.000 syllables/second
    text = "ba be bi bo bu by ba be bi bo bu by"
    assert syllable_count(text, "eng") == 12
    assert speaking_rate(text, "eng", 4.0) == pytest.approx(3.0, abs=1e-3)


def test_namaste_rate():
    assert speaking_rate("नमस्ते", "hin", 1.5) == pytest.approx(2.0, abs=1e-3)


def test_zero_duration_undefined():
    with pytest.raises(UndefinedAttributeError):
        speaking_rate("hello", "eng", 0.0)


def test_no_nuclei_undefined():
    with pytest.raises(UndefinedAttributeError):
        speaking_rate("...!?", "eng", 2.0)
