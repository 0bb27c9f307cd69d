"""Reduction to the equality case, the combined value-definiteness instance and certificates.

All constructions are numeric: the 24-context table is re-expressed relative
to an orthonormal basis derived from the input rays, so that its ``(3,2,1)``
slot carries the second ray (or an auxiliary ray with the right overlap).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .assignment import PropagationTrace, SearchMode, Seed, propagate, search_completion
from .errors import DegeneratePair, OutOfRange
from .geometry import (
    ORTHO_TOL,
    WINDOW_HIGH,
    WINDOW_LOW,
    WINDOW_SLACK,
    Frame,
    NumRay,
    Ray,
    as_ray,
    in_certification_window,
    orthonormal_basis_from_pair,
)
from .hypergraph import Hypergraph, HypergraphBuilder, ray_id, table1_vectors

SQRT14 = math.sqrt(14.0)


@dataclass
class ReductionResult:
    p: float
    q: float
    x: float
    y: float
    z: float
    c: NumRay
    alpha: NumRay
    beta: NumRay
    psi: NumRay
    phi: NumRay
    #: Rows a, psi, phi: the basis relative to which the table is read.
    basis: np.ndarray
    #: Rows a, (b - a p)/q, a x that: the frame in which a = (1,0,0), b = (p,q,0).
    frame: Frame
    #: Named rays used by the extra contexts.
    rays: dict[str, NumRay]
    #: C25 = {alpha, beta, c}, C26 = {alpha, a, a x alpha}, C27 = {beta, b, b x beta}.
    extra_contexts: dict[str, tuple[str, str, str]]

    def to_json(self) -> dict:
        def vec(r):
            return [[complex(v).real, complex(v).imag] for v in (r.components if isinstance(r, NumRay) else r)]

        return {
            "p": self.p, "q": self.q, "x": self.x, "y": self.y, "z": self.z,
            "c": vec(self.c), "alpha": vec(self.alpha), "beta": vec(self.beta),
            "psi": vec(self.psi), "phi": vec(self.phi),
            "extra_contexts": {k: list(v) for k, v in self.extra_contexts.items()},
        }


def reduce_to_equality(a: Ray, b: Ray) -> ReductionResult:
    """Auxiliary ray c with |<a|c>| = 3/sqrt(14) that a and b both being 1 would force to 1."""
    a, b = as_ray(a), as_ray(b)
    ov = abs(np.vdot(a.vector, b.vector))
    if not (ORTHO_TOL < ov < WINDOW_HIGH - WINDOW_SLACK):
        raise OutOfRange(f"|<a|b>| = {ov:.12g} is outside (0, 3/sqrt(14))")
    frame = orthonormal_basis_from_pair(a, b)
    p, q = frame.p, frame.q
    x = 3.0 / SQRT14
    y = p * (1.0 - x * x) / (q * x)
    z = math.sqrt(1.0 - x * x - y * y)
    c = np.array([x, y, z])
    alpha = np.array([0.0, -z, y])
    beta = np.array([q * z, -p * z, p * y - q * x])
    psi = np.array([0.0, 2 * y - z, y + 2 * z]) * SQRT14 / 5.0
    phi = np.array([0.0, y + 2 * z, z - 2 * y]) * SQRT14 / 5.0
    a_c = np.array([1.0, 0.0, 0.0])
    b_c = np.array([p, q, 0.0])
    a_x_alpha = np.cross(a_c, alpha)
    b_x_beta = np.cross(b_c, beta)
    basis = np.vstack([frame.embed(a_c), frame.embed(psi), frame.embed(phi)])
    rays = {
        "a": frame.ray(a_c),
        "b": frame.ray(b_c),
        "c": frame.ray(c),
        "alpha": frame.ray(alpha),
        "beta": frame.ray(beta),
        "a_x_alpha": frame.ray(a_x_alpha),
        "b_x_beta": frame.ray(b_x_beta),
    }
    return ReductionResult(
        p=p, q=q, x=x, y=y, z=z,
        c=rays["c"], alpha=rays["alpha"], beta=rays["beta"],
        psi=frame.ray(psi), phi=frame.ray(phi),
        basis=basis, frame=frame, rays=rays,
        extra_contexts={
            "C25": ("alpha", "beta", "c"),
            "C26": ("alpha", "a", "a_x_alpha"),
            "C27": ("beta", "b", "b_x_beta"),
        },
    )


def equality_basis(a: Ray, b: Ray) -> np.ndarray:
    """Rows a, psi, phi with b = (3a + 2 psi + phi)/sqrt(14), for |<a|b>| = 3/sqrt(14)."""
    frame = orthonormal_basis_from_pair(a, b)
    e1, e2, e3 = frame.vectors
    s5 = math.sqrt(5.0)
    return np.vstack([e1, (2 * e2 + e3) / s5, (e2 - 2 * e3) / s5])


def _embed_table(builder: HypergraphBuilder, basis: np.ndarray, prefix: str) -> dict[str, str]:
    """Add the 24 table contexts read relative to ``basis``; return raw-vector id -> stored id."""
    stored: dict[str, str] = {}
    for cid, vecs in table1_vectors():
        members = []
        for v in vecs:
            ray = NumRay(tuple(np.asarray(v, dtype=float) @ basis))
            key = ray_id(v)
            members.append(builder.add_observable(prefix + key, ray))
            stored.setdefault(key, members[-1])
        builder.add_context(prefix + cid, members)
    return stored


@dataclass
class Theorem1Instance:
    hypergraph: Hypergraph
    #: Distinguished observable ids: "a", "b", plus "c", "alpha", "beta" after a reduction.
    ids: dict[str, str]
    #: Contexts in which a and b receive the value 1.
    seed_contexts: tuple[str, str]
    reduction: ReductionResult | None = None

    def seeds(self) -> list[Seed]:
        return [Seed(self.ids["a"], self.seed_contexts[0], 1), Seed(self.ids["b"], self.seed_contexts[1], 1)]


def _add_theorem1(builder: HypergraphBuilder, a: Ray, b: Ray, prefix: str):
    ov = abs(np.vdot(a.vector, b.vector))
    if ov <= ORTHO_TOL or ov > WINDOW_HIGH + WINDOW_SLACK:
        raise OutOfRange(f"|<a|b>| = {ov:.12g} is outside (0, 3/sqrt(14)]")
    if ov >= WINDOW_HIGH - WINDOW_SLACK:
        stored = _embed_table(builder, equality_basis(a, b), prefix)
        ids = {"a": stored[ray_id((1, 0, 0))], "b": stored[ray_id((3, 2, 1))]}
        return ids, (prefix + "C1", prefix + "C2"), None
    red = reduce_to_equality(a, b)
    stored = _embed_table(builder, red.basis, prefix)
    names = {}
    for name in ("a", "b", "c", "alpha", "beta", "a_x_alpha", "b_x_beta"):
        names[name] = builder.add_observable(prefix + name, red.rays[name])
    for cid, members in red.extra_contexts.items():
        builder.add_context(prefix + cid, [names[m] for m in members])
    ids = {k: names[k] for k in ("a", "b", "c", "alpha", "beta")}
    if stored[ray_id((3, 2, 1))] != ids["c"] or stored[ray_id((1, 0, 0))] != ids["a"]:
        raise AssertionError("table slots did not merge with the reduction rays")
    return ids, (prefix + "C26", prefix + "C27"), red


def build_theorem1_instance(a: Ray, b: Ray, prefix: str = "") -> Theorem1Instance:
    """Hypergraph on which a and b cannot both be 1 noncontextually, for 0 < |<a|b>| <= 3/sqrt(14)."""
    a, b = as_ray(a).to_numeric(), as_ray(b).to_numeric()
    builder = HypergraphBuilder()
    ids, seed_ctx, red = _add_theorem1(builder, a, b, prefix)
    return Theorem1Instance(builder.build(), ids, seed_ctx, red)


@dataclass
class Corollary1Instance:
    hypergraph: Hypergraph
    #: Keys P_a, P_b, P_c, P_alpha, P_beta, C_1, C_2.
    ids: dict[str, str]
    frame: Frame
    sub_b: dict[str, str] = field(default_factory=dict)
    sub_c: dict[str, str] = field(default_factory=dict)


def build_corollary1_instance(a: Ray, b: Ray) -> Corollary1Instance:
    """Instance on which a valued 1 leaves b without any admissible definite value."""
    a, b = as_ray(a).to_numeric(), as_ray(b).to_numeric()
    ok, ov = in_certification_window(a, b)
    if not ok:
        raise OutOfRange(f"|<a|b>| = {ov:.12g} is outside [sqrt(5/14), 3/sqrt(14)]")
    frame = orthonormal_basis_from_pair(a, b)
    p, q = frame.p, frame.q
    builder = HypergraphBuilder()
    pa = builder.add_observable("a", frame.ray([1, 0, 0]))
    pal = builder.add_observable("alpha", frame.ray([0, 1, 0]))
    pbe = builder.add_observable("beta", frame.ray([0, 0, 1]))
    pb = builder.add_observable("b", frame.ray([p, q, 0]))
    pc = builder.add_observable("c", frame.ray([q, -p, 0]))
    builder.add_context("C1", [pa, pal, pbe])
    builder.add_context("C2", [pb, pc, pbe])
    c_ray = builder._obs[pc].ray
    sub_b, _, _ = _add_theorem1(builder, a, b, "Ob:")
    sub_c, _, _ = _add_theorem1(builder, a, c_ray, "Oc:")
    ids = {"P_a": pa, "P_b": pb, "P_c": pc, "P_alpha": pal, "P_beta": pbe, "C_1": "C1", "C_2": "C2"}
    return Corollary1Instance(builder.build(), ids, frame, sub_b, sub_c)


@dataclass
class BranchRefutation:
    value: int
    refuted: bool
    trace: PropagationTrace
    #: True when propagation alone stopped at a fixpoint and exhaustive search was needed.
    searched: bool = False

    def to_json(self) -> dict:
        return {"value": self.value, "refuted": self.refuted, "searched": self.searched,
                "trace": self.trace.to_json()}


@dataclass
class Certificate:
    psi: NumRay
    phi: NumRay
    overlap: float
    window_ok: bool
    outcome: str  # "ValueIndefinite" | "WindowViolated" | "NotRefuted"
    instance: Hypergraph | None = None
    ids: dict[str, str] = field(default_factory=dict)
    witness: list[BranchRefutation] = field(default_factory=list)

    def to_json(self) -> dict:
        def vec(r):
            return [[c.real, c.imag] for c in r.components]

        return {
            "psi": vec(self.psi),
            "phi": vec(self.phi),
            "overlap": self.overlap,
            "window": [WINDOW_LOW, WINDOW_HIGH],
            "window_ok": self.window_ok,
            "outcome": self.outcome,
            "ids": self.ids,
            "observables": len(self.instance.observables) if self.instance else 0,
            "contexts": len(self.instance.contexts) if self.instance else 0,
            "branches": [w.to_json() for w in self.witness],
        }


def refute_branch(inst: Corollary1Instance, value: int) -> BranchRefutation:
    h = inst.hypergraph
    seeds = [Seed(inst.ids["P_a"], inst.ids["C_1"], 1), Seed(inst.ids["P_b"], inst.ids["C_2"], value)]
    _, trace = propagate(h, seeds, noncontextual=True)
    if trace.is_contradiction:
        return BranchRefutation(value, True, trace)
    found = search_completion(h, seeds, SearchMode.NoncontextualValueDefinite)
    return BranchRefutation(value, found is None, trace, searched=True)


def certify_value_indefinite(psi: Ray, phi: Ray) -> Certificate:
    """Show that with P_psi valued 1, neither value of P_phi admits a noncontextual assignment."""
    psi, phi = as_ray(psi).to_numeric(), as_ray(phi).to_numeric()
    ok, ov = in_certification_window(psi, phi)
    if not ok:
        return Certificate(psi, phi, ov, False, "WindowViolated")
    try:
        inst = build_corollary1_instance(psi, phi)
    except DegeneratePair:
        return Certificate(psi, phi, ov, False, "WindowViolated")
    branches = [refute_branch(inst, 1), refute_branch(inst, 0)]
    outcome = "ValueIndefinite" if all(b.refuted for b in branches) else "NotRefuted"
    return Certificate(psi, phi, ov, True, outcome, inst.hypergraph, inst.ids, branches)
