"""Shared synthetic-signal and corpus builders for the test suite."""

from __future__ import annotations

import json

import numpy as np
from scipy.io import wavfile

from speechcap.audio import AudioClip

SR = 16000

TRANSCRIPTS = {
    "hin": "नमस्ते दुनिया यह एक परीक्षण है",
    "eng": "hello world this is a quick test",
    "tam": "வணக்கம் உலகம் இது ஒரு சோதனை",
    "ben": "নমস্কার পৃথিবী এটি একটি পরীক্ষা",
}


def tone(freq_hz: float, duration_s: float = 3.0, amp: float = 0.8, sr: int = SR) -> AudioClip:
    t = np.arange(int(duration_s * sr)) / sr
    return AudioClip(sr, amp * np.sin(2 * np.pi * freq_hz * t))


def sawtooth(freq_hz: float, duration_s: float = 3.0, amp: float = 0.8, sr: int = SR) -> AudioClip:
    from scipy import signal

    t = np.arange(int(duration_s * sr)) / sr
    return AudioClip(sr, amp * signal.sawtooth(2 * np.pi * freq_hz * t))


def synth_speech(
    seed: int = 3,
    bursts: int = 4,
    gap_s: float = 0.5,
    burst_s: float = 0.6,
    noise_amp: float = 1e-4,
    lead_s: float = 0.3,
    sr: int = SR,
) -> np.ndarray:
    """Dry pseudo-speech: harmonic bursts with sharp edges over near-silence."""
    rng = np.random.default_rng(seed)
    spans = [
        (lead_s + k * (burst_s + gap_s), lead_s + k * (burst_s + gap_s) + burst_s)
        for k in range(bursts)
    ]
    n = int((spans[-1][1] + 0.5) * sr)
    x = np.zeros(n)
    t = np.arange(n) / sr
    freqs = rng.uniform(110, 220, bursts)
    for k, (a, b) in enumerate(spans):
        i0, i1 = int(a * sr), int(b * sr)
        seg = sum(np.sin(2 * np.pi * freqs[k] * j * t[i0:i1]) / j for j in range(1, 6))
        env = np.ones(i1 - i0)
        fade = int(0.005 * sr)
        env[:fade] = np.linspace(0, 1, fade)
        env[-fade:] = np.linspace(1, 0, fade)
        x[i0:i1] = seg * env
    x += rng.standard_normal(n) * noise_amp
    return x / np.max(np.abs(x)) * 0.9


def exponential_rir(tau_s: float, seed: int = 5, sr: int = SR) -> np.ndarray:
    """Noise-carrier RIR with an exponential amplitude envelope."""
    rng = np.random.default_rng(seed)
    n = int(7 * tau_s * sr)
    h = np.exp(-np.arange(n) / (tau_s * sr)) * rng.standard_normal(n)
    return h / np.sqrt(np.sum(h * h))


def convolve_rir(x: np.ndarray, h: np.ndarray) -> np.ndarray:
    y = np.convolve(x, h)[: len(x)]
    return y / np.max(np.abs(y)) * 0.9


def speech_clip(seed: int = 3, **kwargs) -> AudioClip:
    return AudioClip(SR, synth_speech(seed, **kwargs))


def write_wav(path, samples: np.ndarray, sr: int = SR) -> None:
    wavfile.write(path, sr, samples.astype(np.float32))


def utterance_samples(seed: int, sr: int = SR) -> np.ndarray:
    """Short multi-burst clip for corpus fixtures (0.8-2 s)."""
    rng = np.random.default_rng(seed)
    n_bursts = int(rng.integers(2, 4))
    spans = []
    t = 0.12
    for _ in range(n_bursts):
        length = rng.uniform(0.2, 0.4)
        spans.append((t, t + length))
        t += length + rng.uniform(0.2, 0.35)
    n = int((t + 0.15) * sr)
    x = np.zeros(n)
    tt = np.arange(n) / sr
    for a, b in spans:
        i0, i1 = int(a * sr), int(b * sr)
        f = rng.uniform(100, 260)
        seg = sum(
            np.sin(2 * np.pi * f * j * tt[i0:i1] + rng.uniform(0, 2 * np.pi)) / j
            for j in range(1, 6)
        )
        env = np.ones(i1 - i0)
        fade = int(0.008 * sr)
        env[:fade] = np.linspace(0, 1, fade)
        env[-fade:] = np.linspace(1, 0, fade)
        x[i0:i1] = seg * env
    x += rng.standard_normal(n) * 10 ** rng.uniform(-4.2, -2.8)
    return (x / np.max(np.abs(x)) * 0.8).astype(np.float32)


def build_corpus(root, n: int, seed: int = 0) -> list[dict]:
    """Write a synthetic wav corpus + manifest under ``root``; returns rows."""
    audio_dir = root / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)
    langs = list(TRANSCRIPTS)
    rows = []
    for i in range(n):
        uid = f"utt{i:05d}"
        write_wav(audio_dir / f"{uid}.wav", utterance_samples(seed * 100003 + i))
        lang = langs[i % len(langs)]
        rows.append(
            {
                "utterance_id": uid,
                "audio_ref": f"audio/{uid}.wav",
                "transcript": TRANSCRIPTS[lang],
                "language": lang,
                "speaker": {
                    "speaker_id": f"spk{i % 3}",
                    "display_name": ["Jaya", "Arjun", None][i % 3],
                    "gender": ["female", "male", "unspecified"][i % 3],
                    "age_group": "young" if i % 5 == 0 else "unspecified",
                },
                "style": {
                    "style": ["neutral", "anger", "happy", "sad"][i % 4],
                    "env_tags": ["clean"] if i % 2 else [],
                },
            }
        )
    with open(root / "manifest.jsonl", "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return rows
