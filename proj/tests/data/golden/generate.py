# Copyright 2026 The hapredict Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the golden fixture corpus and the values a run must reproduce.

Expected scores and metrics are computed here with scipy, independently of
the C++ code. Run from this directory; output is deterministic.
"""

import json
import pathlib
import wave

import numpy as np
from scipy import stats

HERE = pathlib.Path(__file__).resolve().parent

# id, rate, channels, signal kind, listener, system, correctness,
# small transcript, large transcript
UTTERANCES = [
    ("utt_01", 16000, 1, "tones", "L0001", "E001", 80, "the cat", "the cat sat"),
    ("utt_02", 44100, 2, "noise", "L0002", "E001", 55, "a dog", "a dog"),
    ("utt_03", 16000, 1, "silence", "L0003", "E002", 10, "", ""),
    ("utt_04", 22050, 1, "chirp", "L0001", "E002", 50, "café", "cafe au"),
    ("utt_05", 44100, 1, "tones", "L0002", "E003", 40, "yes", "yes no"),
    ("utt_06", 16000, 2, "noise", "L0003", "E003", 30, "{x}", "{x} y"),
    ("utt_07", 44100, 1, "chirp", "L0001", "E001", 90, "go home", "go home now"),
    ("utt_08", 16000, 1, "noise", "L0002", "E002", 35, "it is", "it"),
    ("utt_09", 22050, 2, "tones", "L0003", "E003", 70, "red sun", "the red sun"),
    ("utt_10", 16000, 1, "chirp", "L0001", "E001", 45, "we", "we ran"),
]

LISTENERS = {
    "L0001": {
        "audiogram_cfs": [250, 500, 1000, 2000, 3000, 4000, 6000, 8000],
        "audiogram_levels_l": [5, 5, 10, 10, 10, 10, 5, 10],
        "audiogram_levels_r": [0, 5, 5, 10, 5, 10, 10, 5],
    },
    "L0002": {
        "audiogram_cfs": [250, 500, 1000, 2000, 3000, 4000, 6000, 8000],
        "audiogram_levels_l": [10, 15, 20, 30, 35, 40, 45, 50],
        "audiogram_levels_r": [15, 20, 25, 35, 40, 45, 50, 55],
    },
    "L0003": {
        "audiogram_cfs": [250, 500, 1000, 2000, 3000, 4000, 6000, 8000],
        "audiogram_levels_l": [30, 35, 45, 55, 60, 65, 70, 75],
        "audiogram_levels_r": [20, 25, 35, 40, 50, 55, 60, 60],
    },
}

DURATION_S = 0.6


def make_signal(kind, rate, channels, seed):
    n = int(DURATION_S * rate)
    t = np.arange(n) / rate
    rng = np.random.default_rng(seed)
    if kind == "silence":
        x = np.zeros(n)
    elif kind == "tones":
        x = 0.05 * (np.sin(2 * np.pi * 500 * t) + 0.5 * np.sin(2 * np.pi * 1500 * t))
    elif kind == "chirp":
        x = 0.08 * np.sin(2 * np.pi * (200 * t + 2500 * t * t))
    else:
        x = 0.03 * rng.standard_normal(n)
    frames = np.stack([x * (1.0 - 0.2 * c) for c in range(channels)], axis=1)
    pcm = np.clip(np.round(frames * 32768), -32768, 32767).astype("<i2")
    return pcm


def score(text):
    return min(100, 10 * len(text))


def main():
    (HERE / "signals").mkdir(exist_ok=True)
    for judge in ("small", "large"):
        (HERE / "transcripts" / judge).mkdir(parents=True, exist_ok=True)

    manifest = []
    pred, truth = [], []
    rows = []
    for i, (uid, rate, ch, kind, listener, system, corr, small, large) in enumerate(UTTERANCES):
        pcm = make_signal(kind, rate, ch, seed=100 + i)
        with wave.open(str(HERE / "signals" / f"{uid}.wav"), "wb") as w:
            w.setnchannels(ch)
            w.setsampwidth(2)
            w.setframerate(rate)
            w.writeframes(pcm.tobytes())
        for judge, text in (("small", small), ("large", large)):
            (HERE / "transcripts" / judge / f"{uid}.txt").write_bytes(text.encode("utf-8"))
        manifest.append({"signal": uid, "listener": listener, "system": system,
                         "correctness": corr})
        s, l = score(small), score(large)
        final = (s + l) / 2
        rows.append({"utterance_id": uid, "score_small": s, "score_large": l,
                     "final_score": final})
        pred.append(final)
        truth.append(corr)

    (HERE / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    (HERE / "listeners.json").write_text(json.dumps(LISTENERS, indent=2) + "\n")

    pred, truth = np.array(pred, float), np.array(truth, float)
    expected = {
        "utterances": rows,
        "rmse": float(np.sqrt(np.mean((pred - truth) ** 2))),
        "lcc": float(stats.pearsonr(pred, truth)[0]),
        "srcc": float(stats.spearmanr(pred, truth)[0]),
    }
    (HERE / "expected_values.json").write_text(json.dumps(expected, indent=2) + "\n")


if __name__ == "__main__":
    main()
