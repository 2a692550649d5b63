# SPDX-License-Identifier: LGPL-2.1+

"""Synthetic inputs with the value distributions the codecs are meant for"""

from typing import Callable, Dict

import numpy as np

from .backend import CorpusKind
from .container import DEFAULT_CHUNK_SIZE

Generator = Callable[[np.random.Generator, int, int], np.ndarray]


def _element_max(element_width: int) -> int:
    return (1 << (8 * element_width)) - 1


def _runs(
    rng: np.random.Generator, count: int, element_width: int, min_run: int = 50, max_run: int = 2000
) -> np.ndarray:
    nruns = count // min_run + 1
    lengths = rng.integers(min_run, max_run, size=nruns)
    values = rng.integers(0, min(_element_max(element_width), 1 << 16), size=nruns, endpoint=True)
    return np.repeat(values, lengths)[:count].astype(np.uint64)


def _constant_runs(rng: np.random.Generator, count: int, element_width: int) -> np.ndarray:
    return _runs(rng, count, element_width)


def _arithmetic(rng: np.random.Generator, count: int, element_width: int) -> np.ndarray:
    parts = []
    total = 0
    while total < count:
        length = int(rng.integers(100, 2000))
        start = int(rng.integers(0, 1 << min(8 * element_width, 32)))
        delta = int(rng.integers(-8, 9))
        steps = np.arange(length, dtype=np.int64) * delta + start
        parts.append(steps.astype(np.uint64))
        total += length
    return np.concatenate(parts)[:count]


def _uniform_random(rng: np.random.Generator, count: int, element_width: int) -> np.ndarray:
    raw = rng.integers(0, 256, size=count * element_width, dtype=np.uint8)
    return raw.view(f"<u{element_width}").astype(np.uint64)


def _power_law(rng: np.random.Generator, count: int, element_width: int) -> np.ndarray:
    values = rng.zipf(1.5, size=count) - 1
    return np.minimum(values, min(_element_max(element_width), 1 << 62)).astype(np.uint64)


GENOME_ALPHABET = np.frombuffer(b"ACGTN", dtype=np.uint8)
GENOME_WEIGHTS = [0.295, 0.205, 0.205, 0.29, 0.005]


def _genome_bytes(rng: np.random.Generator, nbytes: int) -> np.ndarray:
    text = np.empty(nbytes, dtype=np.uint8)
    pos = 0
    while pos < nbytes:
        length = min(int(rng.integers(200, 4000)), nbytes - pos)
        # Roughly half of the sequence repeats earlier stretches.
        if pos > length and rng.random() < 0.5:
            src = int(rng.integers(0, pos - length))
            text[pos : pos + length] = text[src : src + length]
        else:
            text[pos : pos + length] = rng.choice(GENOME_ALPHABET, size=length, p=GENOME_WEIGHTS)
        pos += length
    return text


def _genome(rng: np.random.Generator, count: int, element_width: int) -> np.ndarray:
    return _genome_bytes(rng, count * element_width).view(f"<u{element_width}").astype(np.uint64)


def _skewed(rng: np.random.Generator, count: int, element_width: int) -> np.ndarray:
    """Chunk-sized regions, eight incompressible ones in every 32, the rest long runs

    Heavy regions come in groups so units of several chunks differ a lot in cost.
    """
    per_region = DEFAULT_CHUNK_SIZE // element_width
    parts = []
    for region, start in enumerate(range(0, count, per_region)):
        n = min(per_region, count - start)
        if (region // 8) % 4 == 0:
            parts.append(_uniform_random(rng, n, element_width))
        else:
            parts.append(_runs(rng, n, element_width, 5000, 20000))
    if not parts:
        return np.empty(0, dtype=np.uint64)
    return np.concatenate(parts)


GENERATORS: Dict[CorpusKind, Generator] = {
    CorpusKind.constant_runs: _constant_runs,
    CorpusKind.arithmetic: _arithmetic,
    CorpusKind.uniform_random: _uniform_random,
    CorpusKind.power_law: _power_law,
    CorpusKind.genome: _genome,
    CorpusKind.skewed: _skewed,
}


def generate_corpus(kind: CorpusKind, size: int, element_width: int = 1, seed: int = 0) -> bytes:
    """size bytes, rounded down to whole elements, the same for the same seed"""
    count = size // element_width
    if count == 0:
        return b""
    rng = np.random.default_rng(seed)
    values = GENERATORS[kind](rng, count, element_width)
    return values.astype(f"<u{element_width}").tobytes()
