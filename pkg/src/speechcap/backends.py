"""Adapters for external text backends: translation and LLM captioning.

Both speak a plain JSON-over-HTTP contract so any service can be slotted
in. Endpoints and tokens come from the environment:

    SPEECHCAP_TRANSLATE_URL / SPEECHCAP_TRANSLATE_TOKEN
    SPEECHCAP_LLM_URL       / SPEECHCAP_LLM_TOKEN

Translation request/response:  {"text", "source_language", "target_language"}
                               -> {"text": "..."}
Completion request/response:   {"prompt"} -> {"text": "..."}

LLM output is never trusted: the descriptive caption must survive the
inverse parser (>= 80% of labels recovered) or the template generator is
used instead.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, replace

import httpx

from .binning import AttributeLabels, labels_to_sequence
from .captions import CaptionSet, generate_captions, parse_caption
from .errors import BackendError
from .grammar import DEFAULT_GRAMMAR, TemplateGrammar

TRANSLATE_URL_ENV = "SPEECHCAP_TRANSLATE_URL"
TRANSLATE_TOKEN_ENV = "SPEECHCAP_TRANSLATE_TOKEN"
LLM_URL_ENV = "SPEECHCAP_LLM_URL"
LLM_TOKEN_ENV = "SPEECHCAP_LLM_TOKEN"

DEFAULT_TIMEOUT_S = 30.0
LLM_MIN_LABEL_RECALL = 0.8

DEFAULT_PROMPT_TEMPLATE = """\
You caption speech recordings. Given the attribute labels of one
utterance, write three English captions and answer with a JSON object
holding exactly the keys "descriptive", "concise" and "attribute_robust".

- "descriptive": a fluent summary mentioning every attribute.
- "concise": a short description still mentioning every attribute.
- "attribute_robust": a caption that deliberately omits some attributes
  but always keeps the speaking style and the speaker gender.

Attributes: {attributes}
"""


@dataclass(frozen=True)
class NativeCaption:
    text: str
    language: str
    untranslated: bool = False


class StubTranslationBackend:
    """Pass-through used when no translation service is configured."""

    is_stub = True

    def translate(self, text: str, source_language: str, target_language: str) -> str:
        return text


class HttpTranslationBackend:
    is_stub = False

    def __init__(self, url: str | None = None, token: str | None = None,
                 timeout_s: float = DEFAULT_TIMEOUT_S, client: httpx.Client | None = None):
        self.url = url or os.environ.get(TRANSLATE_URL_ENV)
        if not self.url:
            raise BackendError(f"no translation endpoint ({TRANSLATE_URL_ENV} unset)")
        self.token = token if token is not None else os.environ.get(TRANSLATE_TOKEN_ENV)
        self.timeout_s = timeout_s
        self._client = client

    def translate(self, text: str, source_language: str, target_language: str) -> str:
        headers = {"Authorization": f"Bearer {self.token}"} if self.token else {}
        body = {
            "text": text,
            "source_language": source_language,
            "target_language": target_language,
        }
        try:
            if self._client is not None:
                resp = self._client.post(self.url, json=body, headers=headers,
                                         timeout=self.timeout_s)
            else:
                resp = httpx.post(self.url, json=body, headers=headers,
                                  timeout=self.timeout_s)
            resp.raise_for_status()
            payload = resp.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise BackendError(f"translation backend failed: {exc}") from exc
        return str(payload.get("text", ""))


def translate_caption(caption: str, target_language: str, backend) -> NativeCaption:
    """Translate one caption; raises :class:`BackendError` on failure.

    A stub backend returns the source text flagged as untranslated. An
    empty translation counts as a failure (no silent blank captions).
    """
    translated = backend.translate(caption, "eng", target_language)
    if not translated.strip():
        raise BackendError("translation backend returned empty text")
    return NativeCaption(
        text=translated,
        language=target_language,
        untranslated=bool(getattr(backend, "is_stub", False)),
    )


class HttpLlmBackend:
    def __init__(self, url: str | None = None, token: str | None = None,
                 timeout_s: float = DEFAULT_TIMEOUT_S, client: httpx.Client | None = None):
        self.url = url or os.environ.get(LLM_URL_ENV)
        if not self.url:
            raise BackendError(f"no LLM endpoint ({LLM_URL_ENV} unset)")
        self.token = token if token is not None else os.environ.get(LLM_TOKEN_ENV)
        self.timeout_s = timeout_s
        self._client = client

    def complete(self, prompt: str) -> str:
        headers = {"Authorization": f"Bearer {self.token}"} if self.token else {}
        try:
            if self._client is not None:
                resp = self._client.post(self.url, json={"prompt": prompt},
                                         headers=headers, timeout=self.timeout_s)
            else:
                resp = httpx.post(self.url, json={"prompt": prompt},
                                  headers=headers, timeout=self.timeout_s)
            resp.raise_for_status()
            payload = resp.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise BackendError(f"LLM backend failed: {exc}") from exc
        return str(payload.get("text", ""))


_JSON_BLOCK_RE = re.compile(r"\{.*\}", re.DOTALL)


def _parse_llm_response(text: str) -> dict | None:
    m = _JSON_BLOCK_RE.search(text)
    if not m:
        return None
    try:
        payload = json.loads(m.group(0))
    except json.JSONDecodeError:
        return None
    keys = ("descriptive", "concise", "attribute_robust")
    if not all(isinstance(payload.get(k), str) and payload[k].strip() for k in keys):
        return None
    return {k: payload[k].strip() for k in keys}


def _expected_attrs(labels: AttributeLabels) -> list[str]:
    expected = ["gender", "style", "pitch", "pitch_variation", "reverb", "snr", "rate", "quality"]
    if labels.age_group != "unspecified":
        expected.append("age_group")
    return expected


def _label_recall(caption: str, labels: AttributeLabels, grammar: TemplateGrammar) -> float:
    parsed = parse_caption(caption, grammar)
    expected = _expected_attrs(labels)
    hit = sum(1 for a in expected if parsed.get(a) == getattr(labels, a))
    return hit / len(expected)


def llm_generate_captions(
    labels: AttributeLabels,
    backend,
    grammar: TemplateGrammar = DEFAULT_GRAMMAR,
    seed: int = 0,
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE,
) -> CaptionSet:
    """Ask an LLM backend for the three captions, validating its output.

    One retry on an invalid response, then fall back to the template
    generator with a warning recorded on the caption set.
    """
    prompt = prompt_template.format(attributes=labels_to_sequence(labels))
    failure = None
    for _ in range(2):
        try:
            raw = backend.complete(prompt)
        except BackendError as exc:
            failure = str(exc)
            break
        payload = _parse_llm_response(raw)
        if payload is None:
            failure = "unparseable LLM response"
            continue
        if _label_recall(payload["descriptive"], labels, grammar) < LLM_MIN_LABEL_RECALL:
            failure = "descriptive caption missed too many labels"
            continue
        robust_parsed = parse_caption(payload["attribute_robust"], grammar)
        retained = tuple(
            a
            for a in ("gender", "style", "pitch", "pitch_variation", "reverb", "snr", "rate", "quality")
            if robust_parsed.get(a) == getattr(labels, a)
        )
        return CaptionSet(
            descriptive=payload["descriptive"],
            concise=payload["concise"],
            attribute_robust=payload["attribute_robust"],
            generator="llm_backend",
            rng_seed=seed,
            robust_retained=retained,
        )
    fallback = generate_captions(labels, grammar, seed)
    return replace(fallback, warnings=(f"llm backend fallback: {failure}",))
