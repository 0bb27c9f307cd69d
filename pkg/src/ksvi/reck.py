"""Generalized beam-splitter (Reck) factorization of unitaries.

Convention: ``U = diag(exp(i*final_phases)) @ S_1 @ S_2 @ ... @ S_m`` where
``S_k`` is the stage ``stages[k-1]`` embedded on its two ports.  Elimination
runs over rows n..2 and, within a row, columns r-1..1, right-multiplying by
the adjoint of each stage, so for n = 3 the stages come out on ports
(1,2), (1,3), (2,3) in product order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadPort, NotUnitary, ParseError

UNITARY_TOL = 1e-10
_ZERO = 1e-14


def wrap_phase(phi: float) -> float:
    """Map to (-pi, pi]."""
    w = math.remainder(phi, 2 * math.pi)
    if w <= -math.pi + 1e-12:
        w += 2 * math.pi
    return w


def phase_close(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(math.remainder(a - b, 2 * math.pi)) <= tol


@dataclass(frozen=True)
class UnitaryMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        object.__setattr__(self, "entries", m)
        dev = unitarity_deviation(m)
        if dev > UNITARY_TOL:
            raise NotUnitary(dev)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def unitarity_deviation(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.abs(m @ m.conj().T - np.eye(m.shape[0])).max())


@dataclass(frozen=True)
class BeamSplitterStage:
    ports: tuple[int, int]  # 1-based, i < j
    transmittance: float
    phase: float

    @property
    def reflectance(self) -> float:
        return 1.0 - self.transmittance

    def block(self) -> np.ndarray:
        t = math.sqrt(self.transmittance)
        r = math.sqrt(max(self.reflectance, 0.0))
        e = complex(math.cos(self.phase), math.sin(self.phase))
        return np.array([[t, 1j * e * r], [1j * r, e * t]], dtype=complex)

    def embed(self, n: int) -> np.ndarray:
        i, j = self.ports
        if not (1 <= i < j <= n):
            raise BadPort(f"stage ports {self.ports} invalid for dimension {n}")
        m = np.eye(n, dtype=complex)
        idx = [i - 1, j - 1]
        m[np.ix_(idx, idx)] = self.block()
        return m


@dataclass(frozen=True)
class Decomposition:
    stages: tuple[BeamSplitterStage, ...]
    final_phases: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "convention": "U = diag(exp(i*final_phases)) * S_1 * ... * S_m",
            "stages": [
                {"ports": list(s.ports), "T": s.transmittance, "R": s.reflectance, "phi": s.phase}
                for s in self.stages
            ],
            "final_phases": list(self.final_phases),
        }

    def render(self) -> str:
        lines = [f"{'ports':<8}{'T':>20}{'phi':>20}"]
        for s in self.stages:
            lines.append(f"{f'({s.ports[0]},{s.ports[1]})':<8}{s.transmittance:>20.15f}{s.phase:>20.15f}")
        lines.append("final phases: " + " ".join(f"{p:.15f}" for p in self.final_phases))
        return "\n".join(lines)


def decompose(u) -> Decomposition:
    if not isinstance(u, UnitaryMatrix):
        u = UnitaryMatrix(u)
    n = u.n
    w = u.entries.copy()
    stages = []
    for r in range(n - 1, 0, -1):
        for c in range(r - 1, -1, -1):
            a, b = w[r, c], w[r, r]
            if abs(a) < _ZERO:
                t, phi = 1.0, 0.0
            elif abs(b) < _ZERO:
                t, phi = 0.0, 0.0
            else:
                t = abs(b) ** 2 / (abs(a) ** 2 + abs(b) ** 2)
                e_minus = a * math.sqrt(t) / (1j * math.sqrt(1.0 - t) * b)
                phi = wrap_phase(-float(np.angle(e_minus)))
            stage = BeamSplitterStage((c + 1, r + 1), float(t), phi)
            w = w @ stage.embed(n).conj().T
            stages.append(stage)
    final = tuple(wrap_phase(float(np.angle(w[k, k]))) for k in range(n))
    return Decomposition(tuple(reversed(stages)), final)


def reconstruct(d: Decomposition, n: int) -> np.ndarray:
    if len(d.final_phases) not in (0, n):
        raise ValueError(f"{len(d.final_phases)} final phases for dimension {n}")
    m = np.diag(np.exp(1j * np.asarray(d.final_phases, dtype=float))) if d.final_phases else np.eye(n, dtype=complex)
    for s in d.stages:
        m = m @ s.embed(n)
    return m


def ux_reference() -> UnitaryMatrix:
    s2 = math.sqrt(2.0)
    return UnitaryMatrix(0.5 * np.array([[1, s2, 1], [s2, 0, -s2], [1, -s2, 1]], dtype=complex))


UX_STAGES = (
    BeamSplitterStage((1, 2), 1 / 3, -math.pi / 2),
    BeamSplitterStage((1, 3), 3 / 4, math.pi),
    BeamSplitterStage((2, 3), 1 / 3, -math.pi / 2),
)
UX_FINAL_PHASES = (0.0, -math.pi / 2, -math.pi / 2)


def check_ux(tol: float = 1e-9) -> tuple[bool, list[str]]:
    """Compare decompose(U_x) with the reference stages and the reference product with U_x."""
    problems = []
    d = decompose(ux_reference())
    if len(d.stages) != len(UX_STAGES):
        problems.append(f"expected {len(UX_STAGES)} stages, got {len(d.stages)}")
    for got, want in zip(d.stages, UX_STAGES):
        if got.ports != want.ports:
            problems.append(f"stage ports {got.ports}, expected {want.ports}")
        if abs(got.transmittance - want.transmittance) > tol:
            problems.append(f"T{got.ports} = {got.transmittance}, expected {want.transmittance}")
        if not phase_close(got.phase, want.phase, tol):
            problems.append(f"phi{got.ports} = {got.phase}, expected {want.phase}")
    for k, (got, want) in enumerate(zip(d.final_phases, UX_FINAL_PHASES), 1):
        if not phase_close(got, want, tol):
            problems.append(f"final phase on beam {k} = {got}, expected {want}")
    ref = reconstruct(Decomposition(UX_STAGES, UX_FINAL_PHASES), 3)
    err = float(np.abs(ref - ux_reference().entries).max())
    if err > 1e-12:
        problems.append(f"reference product differs from U_x by {err:.3e}")
    return not problems, problems


def random_unitary(n: int, rng: np.random.Generator) -> UnitaryMatrix:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return UnitaryMatrix(q)


def matrix_to_json(m) -> dict:
    m = m.entries if isinstance(m, UnitaryMatrix) else np.asarray(m, dtype=complex)
    return {"n": int(m.shape[0]), "entries": [[[float(x.real), float(x.imag)] for x in row] for row in m]}


def matrix_from_json(doc) -> UnitaryMatrix:
    if not isinstance(doc, dict) or "n" not in doc or "entries" not in doc:
        raise ParseError("matrix document needs keys 'n' and 'entries'", "$")
    n = doc["n"]
    rows = doc["entries"]
    if not isinstance(n, int) or n < 1 or not isinstance(rows, list) or len(rows) != n:
        raise ParseError(f"'entries' must hold n={n} rows", "$.entries")
    m = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"row {i} must hold {n} entries", f"$.entries[{i}]")
        for j, e in enumerate(row):
            if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, (int, float)) for x in e)):
                raise ParseError("entry must be [re, im]", f"$.entries[{i}][{j}]")
            m[i, j] = complex(e[0], e[1])
    return UnitaryMatrix(m)


def load_matrix(path) -> UnitaryMatrix:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from None
    return matrix_from_json(doc)
