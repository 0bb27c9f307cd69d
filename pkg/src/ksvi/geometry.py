"""Rays in three-dimensional Hilbert space.

Two representations coexist.  :class:`ExactRay` holds an integer triple in
canonical form (gcd 1, first nonzero entry positive), so orthogonality is
decided by an exact integer dot product.  :class:`NumRay` holds a unit complex
vector with a fixed global phase and is used for every irrational construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Union

import numpy as np

from .errors import DegenerateCross, DegeneratePair, ParseError, UnsupportedComplexCross, ZeroVector

ORTHO_TOL = 1e-9
WINDOW_SLACK = 1e-12

#: Upper end of the certification window, 3/sqrt(14).
WINDOW_HIGH = 3.0 / math.sqrt(14.0)
#: Lower end of the certification window, sqrt(5/14).
WINDOW_LOW = math.sqrt(5.0 / 14.0)


@dataclass(frozen=True)
class ExactRay:
    """Ray through an integer vector, stored canonically."""

    components: tuple[int, int, int]

    def __post_init__(self):
        comps = tuple(int(c) for c in self.components)
        if len(comps) != 3:
            raise ValueError("rays live in dimension 3")
        if not any(comps):
            raise ZeroVector("the zero vector does not span a ray")
        g = reduce(math.gcd, (abs(c) for c in comps))
        lead = next(c for c in comps if c)
        sign = 1 if lead > 0 else -1
        object.__setattr__(self, "components", tuple(sign * c // g for c in comps))

    @property
    def vector(self) -> np.ndarray:
        v = np.array(self.components, dtype=complex)
        return v / np.linalg.norm(v)

    def to_numeric(self) -> NumRay:
        return NumRay(tuple(self.vector))

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.components) + ")"


@dataclass(frozen=True, eq=False)
class NumRay:
    """Unit complex vector; first component of magnitude > 1e-9 is real positive.

    Equality is projective and tolerance based, see :func:`same_ray`.
    """

    components: tuple[complex, complex, complex]

    def __post_init__(self):
        v = np.asarray(self.components, dtype=complex).reshape(-1)
        if v.shape != (3,):
            raise ValueError("rays live in dimension 3")
        norm = float(np.linalg.norm(v))
        if norm < ORTHO_TOL:
            raise ZeroVector("the zero vector does not span a ray")
        # Skip no-op arithmetic so that already-canonical input is preserved bit for bit.
        if abs(norm - 1.0) > 1e-15:
            v = v / norm
        for c in v:
            if abs(c) > ORTHO_TOL:
                if not (c.imag == 0.0 and c.real > 0.0):
                    v = v * (abs(c) / c)
                break
        object.__setattr__(self, "components", tuple(complex(c) for c in v))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.components, dtype=complex)

    def is_real(self) -> bool:
        return all(abs(c.imag) < ORTHO_TOL for c in self.components)

    def to_numeric(self) -> NumRay:
        return self

    def __repr__(self):
        return f"NumRay({_fmt_vec(self.components)})"

    __str__ = __repr__


Ray = Union[ExactRay, NumRay]


def _fmt_vec(comps) -> str:
    parts = []
    for c in comps:
        c = complex(c)
        parts.append(f"{c.real:.6g}" if abs(c.imag) < 1e-12 else f"{c.real:.6g}{c.imag:+.6g}j")
    return "(" + ", ".join(parts) + ")"


def canonicalize_ray(components) -> ExactRay:
    return ExactRay(tuple(components))


def as_ray(value) -> Ray:
    """Coerce an integer triple, a complex/real triple or a ray into a :data:`Ray`."""
    if isinstance(value, (ExactRay, NumRay)):
        return value
    comps = list(value)
    if all(isinstance(c, (int, np.integer)) and not isinstance(c, bool) for c in comps):
        return ExactRay(tuple(int(c) for c in comps))
    return NumRay(tuple(complex(c) for c in comps))


def inner_product(a: Ray, b: Ray):
    """Exact integer dot product for two exact rays, else ``<a|b>`` of unit representatives."""
    if isinstance(a, ExactRay) and isinstance(b, ExactRay):
        return sum(x * y for x, y in zip(a.components, b.components))
    return complex(np.vdot(a.vector, b.vector))


def overlap_magnitude(a: Ray, b: Ray) -> float:
    if isinstance(a, ExactRay) and isinstance(b, ExactRay):
        dot = inner_product(a, b)
        na = sum(c * c for c in a.components)
        nb = sum(c * c for c in b.components)
        value = abs(dot) / math.sqrt(na * nb)
    else:
        value = abs(inner_product(a, b))
    return min(1.0, value)


def is_orthogonal(a: Ray, b: Ray) -> bool:
    if isinstance(a, ExactRay) and isinstance(b, ExactRay):
        return inner_product(a, b) == 0
    return abs(inner_product(a, b)) < ORTHO_TOL


def same_ray(a: Ray, b: Ray) -> bool:
    """Projective equality: identical canonical triples, or ``1 - |<a|b>| < 1e-9``."""
    if isinstance(a, ExactRay) and isinstance(b, ExactRay):
        return a.components == b.components
    return 1.0 - overlap_magnitude(a, b) < ORTHO_TOL


def cross_product(a: Ray, b: Ray) -> Ray:
    """Ray orthogonal to two real rays."""
    if isinstance(a, ExactRay) and isinstance(b, ExactRay):
        x1, y1, z1 = a.components
        x2, y2, z2 = b.components
        comps = (y1 * z2 - z1 * y2, z1 * x2 - x1 * z2, x1 * y2 - y1 * x2)
        if not any(comps):
            raise DegenerateCross(f"{a} and {b} are parallel")
        return ExactRay(comps)
    for r in (a, b):
        if isinstance(r, NumRay) and not r.is_real():
            raise UnsupportedComplexCross(f"{r} has complex components")
    w = np.cross(a.vector.real, b.vector.real)
    if np.linalg.norm(w) < ORTHO_TOL:
        raise DegenerateCross(f"{a} and {b} are parallel")
    return NumRay(tuple(w))


@dataclass(frozen=True)
class Frame:
    """Orthonormal basis built from a pair of rays.

    ``vectors`` holds e1, e2, e3 as rows, with ``b = p e1 + q e2`` after the
    phase rotation.  The vectors are kept as raw arrays (not phase
    canonicalized) so that coordinates stay meaningful.
    """

    vectors: np.ndarray
    p: float
    q: float

    def coords(self, v) -> np.ndarray:
        """Coordinates of a vector relative to this basis."""
        return self.vectors.conj() @ np.asarray(v, dtype=complex)

    def embed(self, coords) -> np.ndarray:
        """Ambient vector with the given coordinates."""
        return np.asarray(coords, dtype=complex) @ self.vectors

    def ray(self, coords) -> NumRay:
        return NumRay(tuple(self.embed(coords)))

    @property
    def rays(self) -> tuple[NumRay, NumRay, NumRay]:
        return tuple(NumRay(tuple(v)) for v in self.vectors)


def orthonormal_basis_from_pair(a: Ray, b: Ray) -> Frame:
    """Basis (a, (b - a p)/q, a x (b - a p)/q) in which a = (1,0,0) and b = (p,q,0)."""
    va = a.vector
    vb = b.vector
    ip = np.vdot(va, vb)
    p = abs(ip)
    if p < ORTHO_TOL or 1.0 - p < ORTHO_TOL:
        raise DegeneratePair(f"overlap {p:.12g} leaves no unique plane")
    vb = vb * (p / ip)  # rotate so <a|b> is real positive
    q = math.sqrt(1.0 - p * p)
    e2 = (vb - va * p) / q
    # conj() makes e3 orthogonal under the Hermitian product; a plain cross product for real input.
    e3 = np.cross(va, e2).conj()
    return Frame(vectors=np.vstack([va, e2, e3]), p=float(p), q=q)


def in_certification_window(a: Ray, b: Ray) -> tuple[bool, float]:
    ov = overlap_magnitude(a, b)
    ok = WINDOW_LOW - WINDOW_SLACK <= ov <= WINDOW_HIGH + WINDOW_SLACK
    return ok, ov


def ray_to_json(r: Ray) -> dict:
    if isinstance(r, ExactRay):
        return {"exact": list(r.components)}
    return {"numeric": [[c.real, c.imag] for c in r.components]}


def ray_from_json(doc, location="ray") -> Ray:
    if not isinstance(doc, dict) or len(doc) != 1:
        raise ParseError('expected {"exact": [...]} or {"numeric": [...]}', location)
    try:
        if "exact" in doc:
            comps = doc["exact"]
            if len(comps) != 3 or not all(isinstance(c, int) and not isinstance(c, bool) for c in comps):
                raise ParseError("exact ray needs three integers", location)
            return ExactRay(tuple(comps))
        if "numeric" in doc:
            comps = doc["numeric"]
            if len(comps) != 3 or not all(len(c) == 2 for c in comps):
                raise ParseError("numeric ray needs three [re, im] pairs", location)
            return NumRay(tuple(complex(float(re), float(im)) for re, im in comps))
    except ZeroVector as exc:
        raise ParseError(str(exc), location) from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), location) from exc
    raise ParseError('unknown ray encoding, expected "exact" or "numeric"', location)


def parse_ray(text: str) -> Ray:
    """Parse the command-line ray syntax ``x,y,z`` (numeric) or ``exact:i,j,k``."""
    text = text.strip()
    try:
        if text.startswith("exact:"):
            return ExactRay(tuple(int(t) for t in text[6:].split(",")))
        parts = [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise ParseError(f"cannot parse ray {text!r}") from exc
    if len(parts) != 3:
        raise ParseError(f"ray {text!r} needs three components")
    try:
        return NumRay(tuple(complex(x) for x in parts))
    except ZeroVector as exc:
        raise ParseError(str(exc)) from exc
