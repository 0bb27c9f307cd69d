"""Spin-1 random bit source: S(theta, phi), outcome statistics, simulation and bit tests.

The source prepares the S_z = 0 state and measures S(theta, phi).  Outcome +1
emits bit 1, outcome -1 emits bit 0, and outcome 0 only increments a monitor
counter that tracks misalignment.

Bi-immunity of the ideal device is a statement about infinite sequences and
cannot be tested; Borel normality of finite prefixes and von Neumann debiasing
are provided as the finite symptoms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientData
from .geometry import NumRay, in_certification_window

SLACK = 1e-12
MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """splitmix64 generator; :meth:`block` yields the same stream as repeated :meth:`next_u64`."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def block(self, m: int) -> np.ndarray:
        steps = np.arange(1, m + 1, dtype=np.uint64)
        z = np.uint64(self.state) + steps * np.uint64(GOLDEN_GAMMA)
        if m:
            self.state = int(z[-1])
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))


def uniform53(words: np.ndarray) -> np.ndarray:
    """Map 64-bit words to [0, 1) by their top 53 bits (word / 2**64, truncated)."""
    return (words >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class SpinOperator:
    theta: float
    phi: float
    matrix: np.ndarray


def spin_operator(theta: float, phi: float) -> SpinOperator:
    s = math.sin(theta) / math.sqrt(2.0)
    c = math.cos(theta)
    em = np.exp(-1j * phi)
    ep = np.exp(1j * phi)
    m = np.array(
        [
            [c, em * s, 0.0],
            [ep * s, 0.0, em * s],
            [0.0, ep * s, -c],
        ],
        dtype=complex,
    )
    return SpinOperator(theta, phi, m)


def eigenbasis(op: SpinOperator) -> list[tuple[float, NumRay]]:
    """Eigenpairs ordered +1, 0, -1 with phase-canonical eigenvectors."""
    w, v = np.linalg.eigh(op.matrix)
    order = np.argsort(-w)
    return [(float(w[i]), NumRay(tuple(v[:, i]))) for i in order]


SZ_ZERO = NumRay((0j, 1 + 0j, 0j))


def outcome_probabilities(theta: float, phi: float = 0.0) -> tuple[float, float, float]:
    """P(+1), P(0), P(-1) for the S_z = 0 preparation; phi only shifts phases."""
    s = math.sin(theta)
    c = math.cos(theta)
    half = s * s / 2.0
    return half, c * c, half


def certification_window(theta: float) -> bool:
    return math.pi / 3 - SLACK <= theta <= 2 * math.pi / 3 + SLACK


def overlap_window(theta: float, phi: float = 0.0) -> tuple[bool, float]:
    """Overlap-window test between S_z = 0 and the +1 eigenvector of S(theta, phi)."""
    plus = eigenbasis(spin_operator(theta, phi))[0][1]
    return in_certification_window(SZ_ZERO, plus)


@dataclass
class BitStream:
    bits: np.ndarray
    counts: dict[int, int]
    theta: float
    phi: float
    seed: int
    requested: int

    @property
    def draws(self) -> int:
        return sum(self.counts.values())

    @property
    def monitor_ratio(self) -> float:
        return self.counts[0] / self.draws if self.draws else 0.0

    def to_text(self) -> str:
        return (self.bits.astype(np.uint8) + ord("0")).tobytes().decode("ascii") + "\n"


def simulate_bits(theta: float, phi: float, n: int, seed: int) -> BitStream:
    """Simulate measurements until ``n`` bits are emitted; deterministic in all arguments."""
    if n < 0:
        raise ValueError("n must be non-negative")
    p_plus, p_zero, _ = outcome_probabilities(theta, phi)
    t1 = p_plus
    t2 = p_plus + p_zero
    if n and t1 <= 0.0 and t2 >= 1.0:
        raise ValueError("S_z = 0 is an eigenstate of S(theta, phi): no bits can be emitted")
    rng = SplitMix64(seed)
    chunks = []
    emitted = 0
    zeros = 0
    p_bit = max(1.0 - p_zero, 1e-6)
    while emitted < n:
        need = n - emitted
        m = int(need / p_bit * 1.05) + 64
        u = uniform53(rng.block(m))
        outcome = np.where(u < t1, 1, np.where(u < t2, 0, -1)).astype(np.int8)
        is_bit = outcome != 0
        bit_pos = np.flatnonzero(is_bit)
        if len(bit_pos) >= need:
            cut = bit_pos[need - 1] + 1
            outcome = outcome[:cut]
            is_bit = is_bit[:cut]
        zeros += int(len(outcome) - is_bit.sum())
        got = outcome[is_bit]
        chunks.append((got == 1).astype(np.uint8))
        emitted += len(got)
    bits = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.uint8)
    ones = int(bits.sum())
    return BitStream(bits, {1: ones, 0: zeros, -1: n - ones}, theta, phi, seed, n)


def von_neumann_debias(bits) -> np.ndarray:
    """Disjoint pairs: 01 -> 0, 10 -> 1, 00 and 11 dropped."""
    b = np.asarray(bits, dtype=np.uint8)
    pairs = b[: len(b) // 2 * 2].reshape(-1, 2)
    keep = pairs[:, 0] != pairs[:, 1]
    return pairs[keep, 0].copy()


def champernowne_bits(n: int) -> np.ndarray:
    """First ``n`` bits of 0 1 00 01 10 11 000 ... (all words of length 1, 2, ... in order)."""
    out = []
    total = 0
    for length in itertools.count(1):
        for w in range(1 << length):
            out.append(format(w, f"0{length}b"))
            total += length
            if total >= n:
                s = "".join(out)[:n]
                return np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0")
    raise AssertionError("unreachable")


@dataclass
class NormalityReport:
    kmax: int
    #: k -> {block: (frequency, deviation from 2**-k)}
    blocks: dict[int, dict[str, tuple[float, float]]] = field(default_factory=dict)
    #: k -> sqrt(log2 N / N) with N the number of k-blocks
    threshold: dict[int, float] = field(default_factory=dict)
    passed_k: dict[int, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.passed_k.values())

    def to_json(self) -> dict:
        return {
            "kmax": self.kmax,
            "criterion": "|freq - 2^-k| <= sqrt(log2(N)/N), non-overlapping k-blocks",
            "passed": self.passed,
            "per_k": {
                str(k): {
                    "threshold": self.threshold[k],
                    "passed": self.passed_k[k],
                    "blocks": {w: {"frequency": f, "deviation": d} for w, (f, d) in self.blocks[k].items()},
                }
                for k in sorted(self.blocks)
            },
        }


def borel_normality_test(bits, kmax: int = 4) -> NormalityReport:
    b = np.asarray(bits, dtype=np.int64)
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    if len(b) < (1 << kmax) * kmax:
        raise InsufficientData(f"{len(b)} bits is below 2^kmax * kmax = {(1 << kmax) * kmax}")
    report = NormalityReport(kmax)
    for k in range(1, kmax + 1):
        n_blocks = len(b) // k
        words = b[: n_blocks * k].reshape(n_blocks, k) @ (1 << np.arange(k - 1, -1, -1))
        tally = np.bincount(words, minlength=1 << k)
        freq = tally / n_blocks
        dev = np.abs(freq - 2.0**-k)
        bound = math.sqrt(math.log2(n_blocks) / n_blocks) if n_blocks > 1 else 0.0
        report.blocks[k] = {format(w, f"0{k}b"): (float(freq[w]), float(dev[w])) for w in range(1 << k)}
        report.threshold[k] = bound
        report.passed_k[k] = bool(np.all(dev <= bound))
    return report
