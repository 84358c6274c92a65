"""Caption generation (descriptive, concise, attribute-robust) and the
inverse parser used for round-trip validation and adherence evaluation.

Generation is a pure function of (labels, grammar, seed): phrase variants
and robust-dropout decisions are drawn from one seeded RNG in a fixed
order, so identical inputs always produce identical captions.
"""

from __future__ import annotations

import random
import re
import weakref
from dataclasses import dataclass, asdict

from .binning import BINNED_ATTRIBUTES, AttributeLabels
from .errors import GrammarError
from .grammar import DEFAULT_GRAMMAR, TemplateGrammar

CONCISE_MAX_RATIO = 0.6
ROBUST_DROP_PROBABILITY = 0.5
MIN_ROBUST_BINNED = 2

_PRONOUNS = {"female": "She", "male": "He", "unspecified": "They"}


@dataclass(frozen=True)
class CaptionSet:
    descriptive: str
    concise: str
    attribute_robust: str
    generator: str = "template"  # "template" | "llm_backend"
    rng_seed: int = 0
    robust_retained: tuple[str, ...] = ()
    native: str | None = None
    native_language: str | None = None
    native_untranslated: bool = False
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "robust_retained", tuple(self.robust_retained))
        object.__setattr__(self, "warnings", tuple(self.warnings))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["robust_retained"] = list(self.robust_retained)
        d["warnings"] = list(self.warnings)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CaptionSet":
        return cls(
            descriptive=d["descriptive"],
            concise=d["concise"],
            attribute_robust=d["attribute_robust"],
            generator=d.get("generator", "template"),
            rng_seed=d.get("rng_seed", 0),
            robust_retained=tuple(d.get("robust_retained", ())),
            native=d.get("native"),
            native_language=d.get("native_language"),
            native_untranslated=d.get("native_untranslated", False),
            warnings=tuple(d.get("warnings", ())),
        )


def _cap(text: str) -> str:
    return text[0].upper() + text[1:] if text else text


def _join_list(parts: list[str]) -> str:
    if len(parts) == 1:
        return parts[0]
    if len(parts) == 2:
        return f"{parts[0]} and {parts[1]}"
    return ", ".join(parts[:-1]) + ", and " + parts[-1]


def _env_phrase(tags) -> str:
    return "against a background of " + " and ".join(tags)


def generate_captions(
    labels: AttributeLabels,
    grammar: TemplateGrammar = DEFAULT_GRAMMAR,
    seed: int = 0,
) -> CaptionSet:
    """Render the three caption styles for one label set."""
    rng = random.Random(seed)

    def pick(attr, label, kind):
        return rng.choice(grammar.pool(attr, label, kind))

    name = labels.speaker_name
    has_age = labels.age_group != "unspecified"

    # --- descriptive: every label, verbose phrasing -----------------------
    choices = {
        attr: pick(attr, getattr(labels, attr), "long")
        for attr in ("gender", "pitch", "pitch_variation", "reverb", "rate", "quality", "snr")
    }
    style_idx = rng.randrange(2)
    style_pool = grammar.pool("style", labels.style, "long")
    age_l = pick("age_group", labels.age_group, "long") if has_age else None
    shape = rng.randrange(2)

    def build_descriptive(c: dict) -> str:
        opener = f"{name}, {c['gender']}," if name else _cap(c["gender"])
        pron = _PRONOUNS.get(labels.gender, "They")
        style_l = style_pool[min(style_idx, len(style_pool) - 1)]
        if shape == 0:
            s1 = (
                f"{opener} delivers speech in {c['reverb']} with "
                f"{c['pitch']} and {c['pitch_variation']}."
            )
            s2 = (
                f"{pron} speaks at {c['rate']}, and the recording maintains "
                f"{c['quality']} with {c['snr']} throughout."
            )
        else:
            s1 = (
                f"{opener} speaks with {c['pitch']} and {c['pitch_variation']}, "
                f"recorded in {c['reverb']}."
            )
            s2 = (
                f"{pron} keeps {c['rate']}, and the audio carries "
                f"{c['quality']} along with {c['snr']}."
            )
        sentences = [s1, s2]
        if age_l is not None:
            sentences.append(f"Across the whole utterance, it registers as {age_l}.")
        if labels.accent:
            sentences.append(f"One more marker stands out: the accent is {labels.accent}.")
        if labels.env_tags:
            sentences.append(
                "The performance plays out "
                + _env_phrase(labels.env_tags)
                + ", clearly audible behind the voice."
            )
        if style_idx == 0:
            sentences.append(_cap(style_l) + ".")
        else:
            sentences.append(f"Overall, the delivery carries {style_l}.")
        return " ".join(sentences)

    descriptive = build_descriptive(choices)

    # --- concise: every label, compact phrasing ---------------------------
    concise = (
        f"{pick('gender', labels.gender, 'short')} speaking {pick('rate', labels.rate, 'short')} "
        f"with {pick('pitch', labels.pitch, 'short')}, "
        f"{pick('pitch_variation', labels.pitch_variation, 'short')} delivery; "
        f"{pick('reverb', labels.reverb, 'short')}, {pick('snr', labels.snr, 'short')}, "
        f"{pick('quality', labels.quality, 'short')}"
    )
    tail = []
    if has_age:
        tail.append(pick("age_group", labels.age_group, "short"))
    if labels.accent:
        tail.append(f"{labels.accent}-accented")
    if tail:
        concise += ", " + ", ".join(tail)
    if labels.env_tags:
        concise += ", " + _env_phrase(labels.env_tags)
    concise += f"; {pick('style', labels.style, 'short')}."
    concise = f"{name}: {concise}" if name else _cap(concise)

    # --- attribute-robust: seeded dropout over the binned attributes ------
    dropped = [a for a in BINNED_ATTRIBUTES if rng.random() < ROBUST_DROP_PROBABILITY]
    retained = [a for a in BINNED_ATTRIBUTES if a not in dropped]
    while len(retained) < MIN_ROBUST_BINNED:
        add = rng.choice([a for a in BINNED_ATTRIBUTES if a not in retained])
        retained = [a for a in BINNED_ATTRIBUTES if a == add or a in retained]
    if len(retained) == len(BINNED_ATTRIBUTES):  # must omit at least one
        drop = rng.choice(list(BINNED_ATTRIBUTES))
        retained = [a for a in retained if a != drop]

    def robust_phrase(attr, label):
        kind = "short" if rng.random() < 0.5 else "long"
        return pick(attr, label, kind)

    items = [robust_phrase("gender", labels.gender)]
    items.append(pick("style", labels.style, "short"))
    for attr in BINNED_ATTRIBUTES:
        if attr in retained:
            items.append(robust_phrase(attr, getattr(labels, attr)))
    body = _join_list(items)
    if rng.randrange(2) == 0:
        robust = (
            f"{name}'s delivery features {body}."
            if name
            else f"This delivery features {body}."
        )
    else:
        where = f"in {name}'s recording" if name else "in this recording"
        robust = f"Expect {body} {where}."
    robust_retained = ("gender", "style") + tuple(
        a for a in BINNED_ATTRIBUTES if a in retained
    )

    if len(concise) > CONCISE_MAX_RATIO * len(descriptive):
        # Deterministic repair: rebuild the descriptive with the longest
        # phrasing of every label (same skeleton, same labels recovered).
        longest = {
            attr: max(grammar.pool(attr, getattr(labels, attr), "long"), key=len)
            for attr in choices
        }
        descriptive = build_descriptive(longest)
    if len(concise) > CONCISE_MAX_RATIO * len(descriptive):
        raise GrammarError(
            f"concise caption exceeds {CONCISE_MAX_RATIO:.0%} of descriptive length "
            f"({len(concise)} vs {len(descriptive)})"
        )
    return CaptionSet(
        descriptive=descriptive,
        concise=concise,
        attribute_robust=robust,
        generator="template",
        rng_seed=seed,
        robust_retained=robust_retained,
    )


# --------------------------------------------------------------------------
# Inverse parsing
# --------------------------------------------------------------------------

_ACCENT_RE = re.compile(
    r"(?:the accent is ([\w][\w' -]*?)(?=[.,;])|(?<![\w-])([\w][\w' -]*?)-accented(?![\w-]))",
    re.IGNORECASE,
)
_ENV_RE = re.compile(
    r"against a background of ([a-z0-9_]+(?: and [a-z0-9_]+)*)", re.IGNORECASE
)
_NAME_RES = (
    re.compile(r"^([^,.:;]+?), (?=an? |the )"),
    re.compile(r"^([^,.:;]+?): "),
    re.compile(r"^([^,.:;]+?)'s delivery features"),
    re.compile(r"in ([^,.:;]+?)'s recording\.$"),
)


class CaptionParser:
    """Recovers labels from captions produced by a grammar.

    Only labels actually mentioned are returned; nothing is defaulted.
    """

    def __init__(self, grammar: TemplateGrammar):
        self.grammar = grammar
        by_phrase: dict[str, tuple[str, str]] = {}
        for attr, label, phrase in grammar.all_phrases():
            by_phrase[phrase.casefold()] = (attr, label)
        self._by_phrase = by_phrase
        alternation = "|".join(
            re.escape(p) for p in sorted(by_phrase, key=len, reverse=True)
        )
        self._phrase_re = re.compile(
            rf"(?<![\w-])(?:{alternation})(?![\w-])", re.IGNORECASE
        )

    def parse(self, caption: str) -> dict:
        found: dict[str, object] = {}
        warnings: list[str] = []
        for match in self._phrase_re.finditer(caption):
            attr, label = self._by_phrase[match.group(0).casefold()]
            if attr in found and found[attr] != label:
                warnings.append(f"conflicting {attr} phrases; keeping first")
                continue
            found[attr] = label
        accent = _ACCENT_RE.search(caption)
        if accent:
            found["accent"] = accent.group(1) or accent.group(2)
        env = _ENV_RE.search(caption)
        if env:
            found["env_tags"] = tuple(env.group(1).lower().split(" and "))
        for name_re in _NAME_RES:
            m = name_re.search(caption)
            if m:
                found["speaker_name"] = m.group(1)
                break
        if warnings:
            found["_warnings"] = tuple(warnings)
        return found


_parser_cache: "weakref.WeakKeyDictionary[TemplateGrammar, CaptionParser]"
_parser_cache = weakref.WeakKeyDictionary()


def get_parser(grammar: TemplateGrammar = DEFAULT_GRAMMAR) -> CaptionParser:
    parser = _parser_cache.get(grammar)
    if parser is None:
        parser = CaptionParser(grammar)
        _parser_cache[grammar] = parser
    return parser


def parse_caption(caption: str, grammar: TemplateGrammar = DEFAULT_GRAMMAR) -> dict:
    return get_parser(grammar).parse(caption)
