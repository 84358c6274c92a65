"""Deterministic caption grammar: phrase inventory plus validation.

Each vocabulary label owns a pool of "long" phrasings (used by the
descriptive style) and "short" phrasings (used by the concise style); the
robust style samples from both. Every phrasing maps back to exactly one
(attribute, label) pair, which is what makes captions invertible: the
parser scans for the longest phrase matches, so a phrasing may contain a
shorter phrasing of another label without ambiguity.

Free-valued attributes (speaker name, accent, environment tags) are not
in the inventory; they are rendered through fixed capture templates that
the parser inverts with regexes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import GrammarError

GRAMMAR_VERSION = "template-v1"

# attr -> label -> {"long": (...), "short": (...)}
_DEFAULT_PHRASES = {
    "gender": {
        "female": {
            "long": ("a female speaker", "a female narrator"),
            "short": ("a female voice",),
        },
        "male": {
            "long": ("a male speaker", "a male narrator"),
            "short": ("a male voice",),
        },
        "unspecified": {
            "long": ("a speaker of unstated gender", "an unidentified speaker"),
            "short": ("an unspecified voice",),
        },
    },
    "pitch": {
        "very low pitch": {
            "long": ("a very deep, low-pitched voice", "a very low pitch"),
            "short": ("very deep-voiced",),
        },
        "low pitch": {
            "long": ("a low-pitched voice", "a low pitch"),
            "short": ("low-pitched",),
        },
        "moderate pitch": {
            "long": ("a moderate pitch", "a mid-range pitch"),
            "short": ("mid-pitched",),
        },
        "high pitch": {
            "long": ("a high-pitched voice", "a high pitch"),
            "short": ("high-pitched",),
        },
        "very high pitch": {
            "long": ("a very high-pitched voice", "a very high pitch"),
            "short": ("very high-pitched",),
        },
    },
    "pitch_variation": {
        "monotone": {
            "long": ("a monotone delivery", "a flat, monotone intonation"),
            "short": ("monotone",),
        },
        "expressive tone": {
            "long": ("an expressive tone", "animated, expressive intonation"),
            "short": ("expressive",),
        },
    },
    "reverb": {
        "very distant sounding": {
            "long": ("a very distant, echoing environment", "a very reverberant room"),
            "short": ("very echoey",),
        },
        "distant sounding": {
            "long": ("a distant-sounding, reverberant environment", "a noticeably reverberant room"),
            "short": ("echoey",),
        },
        "slightly distant sounding": {
            "long": ("a moderately reverberant environment", "a slightly distant-sounding room"),
            "short": ("slightly echoey",),
        },
        "slightly close sounding": {
            "long": ("a slightly roomy environment", "a slightly enclosed environment"),
            "short": ("fairly close-sounding",),
        },
        "very close sounding": {
            "long": ("a very close and dry environment", "an intimate, dry recording space"),
            "short": ("close-sounding",),
        },
    },
    "snr": {
        "very noisy": {
            "long": ("a very noisy background", "heavy background noise"),
            "short": ("very noisy audio",),
        },
        "noisy": {
            "long": ("a noisy background", "noticeable background noise"),
            "short": ("noisy audio",),
        },
        "slightly noisy": {
            "long": ("a slightly noisy background", "a little background noise"),
            "short": ("slightly noisy audio",),
        },
        "clear": {
            "long": ("a clear recording with minimal background noise", "almost no background noise"),
            "short": ("clear audio",),
        },
        "very clear": {
            "long": ("a pristine, noise-free recording", "a spotless noise floor"),
            "short": ("very clear audio",),
        },
    },
    "rate": {
        "very slow pace": {
            "long": ("a very slow pace", "a very unhurried pace"),
            "short": ("very slowly",),
        },
        "slow pace": {
            "long": ("a slow pace", "an unhurried pace"),
            "short": ("slowly",),
        },
        "moderate pace": {
            "long": ("a moderate pace", "a steady, measured pace"),
            "short": ("at moderate speed",),
        },
        "slightly fast pace": {
            "long": ("a slightly fast pace", "a slightly quick pace"),
            "short": ("slightly fast",),
        },
        "very fast pace": {
            "long": ("a very fast pace", "a rapid-fire pace"),
            "short": ("fast",),
        },
    },
    "quality": {
        "poor speech quality": {
            "long": ("poor speech quality", "badly degraded speech quality"),
            "short": ("poor quality",),
        },
        "okay speech quality": {
            "long": ("okay speech quality", "acceptable speech quality"),
            "short": ("okay quality",),
        },
        "good speech quality": {
            "long": ("good speech quality", "solid speech quality"),
            "short": ("good quality",),
        },
        "great speech quality": {
            "long": ("great speech quality", "excellent overall speech quality"),
            "short": ("excellent quality",),
        },
    },
    "style": {
        "neutral": {
            "long": ("the intended style is neutral", "a neutral speaking style"),
            "short": ("a neutral tone",),
        },
        "anger": {
            "long": ("the intended style is anger", "an angry speaking style"),
            "short": ("an angry tone",),
        },
        "disgust": {
            "long": ("the intended style is disgust", "a disgusted speaking style"),
            "short": ("a disgusted tone",),
        },
        "fear": {
            "long": ("the intended style is fear", "a fearful speaking style"),
            "short": ("a fearful tone",),
        },
        "happy": {
            "long": ("the intended style is happiness", "a happy speaking style"),
            "short": ("a cheerful tone",),
        },
        "sad": {
            "long": ("the intended style is sadness", "a sad speaking style"),
            "short": ("a sorrowful tone",),
        },
        "surprise": {
            "long": ("the intended style is surprise", "a surprised speaking style"),
            "short": ("an astonished tone",),
        },
        "news": {
            "long": ("the intended style is a news readout", "a newsreader style"),
            "short": ("a news-bulletin tone",),
        },
        "conversational": {
            "long": ("the intended style is conversational", "a casual, conversational style"),
            "short": ("a chatty tone",),
        },
        "digital_command": {
            "long": ("the intended style is a digital assistant command", "a voice-command style"),
            "short": ("a command-like tone",),
        },
        "unspecified": {
            "long": ("the style is left unspecified", "no particular speaking style"),
            "short": ("an unremarkable tone",),
        },
    },
    "age_group": {
        "child": {
            "long": ("the voice of a child", "a childlike voice"),
            "short": ("childlike",),
        },
        "young": {
            "long": ("a youthful voice", "the voice of a young adult"),
            "short": ("youthful",),
        },
        "middle_aged": {
            "long": ("a middle-aged voice", "the voice of a middle-aged adult"),
            "short": ("middle-aged",),
        },
        "elderly": {
            "long": ("an elderly voice", "the voice of an older adult"),
            "short": ("elderly-sounding",),
        },
    },
}


@dataclass(frozen=True, eq=False)
class TemplateGrammar:
    version: str
    phrases: Mapping[str, Mapping[str, Mapping[str, tuple[str, ...]]]]

    def pool(self, attr: str, label: str, kind: str) -> tuple[str, ...]:
        try:
            pools = self.phrases[attr][label]
        except KeyError:
            raise GrammarError(f"grammar has no phrases for {attr}={label!r}") from None
        phrases = tuple(pools.get(kind, ())) or tuple(pools.get("long", ()))
        if not phrases:
            raise GrammarError(f"grammar has no phrases for {attr}={label!r}")
        return phrases

    def all_phrases(self):
        """Yields (attr, label, phrase) over the whole inventory."""
        for attr, labels in self.phrases.items():
            for label, pools in labels.items():
                for kind in ("long", "short"):
                    for phrase in pools.get(kind, ()):
                        yield attr, label, phrase

    def validate(self) -> None:
        seen: dict[str, tuple[str, str]] = {}
        counts: dict[tuple[str, str], int] = {}
        for attr, label, phrase in self.all_phrases():
            key = phrase.casefold()
            owner = (attr, label)
            if key in seen and seen[key] != owner:
                raise GrammarError(
                    f"phrase {phrase!r} is shared by {seen[key]} and {owner}"
                )
            seen[key] = owner
            counts[owner] = counts.get(owner, 0) + 1
        for (attr, label), n in counts.items():
            if n < 2:
                raise GrammarError(f"{attr}={label!r} needs >= 2 phrasings, has {n}")

    def to_json_dict(self) -> dict:
        return {
            "version": self.version,
            "phrases": {
                attr: {
                    label: {kind: list(p) for kind, p in pools.items()}
                    for label, pools in labels.items()
                }
                for attr, labels in self.phrases.items()
            },
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "TemplateGrammar":
        phrases = {
            attr: {
                label: {kind: tuple(p) for kind, p in pools.items()}
                for label, pools in labels.items()
            }
            for attr, labels in d["phrases"].items()
        }
        grammar = cls(version=d["version"], phrases=phrases)
        grammar.validate()
        return grammar

    def save(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path) -> "TemplateGrammar":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


DEFAULT_GRAMMAR = TemplateGrammar(version=GRAMMAR_VERSION, phrases=_DEFAULT_PHRASES)
DEFAULT_GRAMMAR.validate()
