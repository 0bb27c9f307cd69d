"""Observables, contexts and their orthogonality hypergraph.

A :class:`Hypergraph` is immutable once built.  Use :class:`HypergraphBuilder`
to assemble one; it merges projectively equal rays into a single observable,
so an observable id is an alias for its canonical ray.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

from .errors import ParseError, UnknownContext, UnknownObservable
from .geometry import ExactRay, Ray, inner_product, is_orthogonal, ray_from_json, ray_to_json, same_ray

DIMENSION = 3


@dataclass(frozen=True)
class Observable:
    id: str
    ray: Ray


@dataclass(frozen=True)
class Context:
    id: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class Violation:
    kind: str
    where: str
    message: str
    value: object = None

    def __str__(self):
        return f"{self.where}: {self.message}"


class Hypergraph:
    """Observables plus contexts; insertion order is the canonical order everywhere."""

    def __init__(self, observables, contexts, aliases=None, notes=()):
        self.dimension = DIMENSION
        self.observables: dict[str, Observable] = {o.id: o for o in observables}
        self.contexts: dict[str, Context] = {c.id: c for c in contexts}
        self.aliases: dict[str, str] = dict(aliases or {})
        self.notes: tuple[str, ...] = tuple(notes)
        self.report: list[Violation] = []

    def __len__(self):
        return len(self.contexts)

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return save_hypergraph(self) == save_hypergraph(other)

    def __repr__(self):
        return f"Hypergraph({len(self.observables)} observables, {len(self.contexts)} contexts)"

    def resolve(self, obs_id: str) -> str:
        """Canonical id of an observable, following merge aliases."""
        obs_id = self.aliases.get(obs_id, obs_id)
        if obs_id not in self.observables:
            raise UnknownObservable(f"unknown observable {obs_id!r}")
        return obs_id

    def context(self, ctx_id: str) -> Context:
        try:
            return self.contexts[ctx_id]
        except KeyError:
            raise UnknownContext(f"unknown context {ctx_id!r}") from None

    def ray(self, obs_id: str) -> Ray:
        return self.observables[self.resolve(obs_id)].ray

    @cached_property
    def obs_index(self) -> dict[str, int]:
        return {oid: i for i, oid in enumerate(self.observables)}

    @cached_property
    def ctx_index(self) -> dict[str, int]:
        return {cid: i for i, cid in enumerate(self.contexts)}

    @cached_property
    def encoded(self) -> list[tuple[int, int, int]]:
        """Contexts as triples of observable indices, in context order."""
        idx = self.obs_index
        return [tuple(idx[m] for m in c.members) for c in self.contexts.values()]

    @cached_property
    def contexts_of(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {oid: [] for oid in self.observables}
        for c in self.contexts.values():
            for m in c.members:
                if m in out:
                    out[m].append(c.id)
        return {k: tuple(v) for k, v in out.items()}

    def subgraph(self, context_ids) -> Hypergraph:
        """Restriction to the given contexts and the observables they use."""
        ctxs = [self.context(cid) for cid in context_ids]
        used = {m for c in ctxs for m in c.members}
        obs = [o for oid, o in self.observables.items() if oid in used]
        return Hypergraph(obs, ctxs)

    def without(self, context_ids) -> Hypergraph:
        drop = set(context_ids)
        return self.subgraph([cid for cid in self.contexts if cid not in drop])


class HypergraphBuilder:
    """Incremental construction with projective deduplication of rays."""

    def __init__(self):
        self._obs: dict[str, Observable] = {}
        self._ctx: dict[str, Context] = {}
        self._aliases: dict[str, str] = {}
        self._exact: dict[tuple, str] = {}
        self.notes: list[str] = []

    def add_observable(self, obs_id: str, ray: Ray) -> str:
        """Insert an observable and return the id it is stored under."""
        if obs_id in self._aliases:
            target = self._aliases[obs_id]
            if same_ray(self._obs[target].ray, ray):
                return target
            raise ParseError(f"id {obs_id!r} reused for a different ray", "observables")
        if obs_id in self._obs:
            if same_ray(self._obs[obs_id].ray, ray):
                return obs_id
            raise ParseError(f"id {obs_id!r} reused for a different ray", "observables")
        existing = self._find(ray)
        if existing is not None:
            self._aliases[obs_id] = existing
            self.notes.append(f"observable {obs_id!r} has the same ray as {existing!r}; merged as alias")
            return existing
        self._obs[obs_id] = Observable(obs_id, ray)
        if isinstance(ray, ExactRay):
            self._exact[ray.components] = obs_id
        return obs_id

    def _find(self, ray: Ray):
        if isinstance(ray, ExactRay) and ray.components in self._exact:
            return self._exact[ray.components]
        for o in self._obs.values():
            if same_ray(o.ray, ray):
                return o.id
        return None

    def resolve(self, obs_id: str) -> str:
        return self._aliases.get(obs_id, obs_id)

    def add_context(self, ctx_id: str, members) -> str:
        if ctx_id in self._ctx:
            raise ParseError(f"duplicate context id {ctx_id!r}", "contexts")
        self._ctx[ctx_id] = Context(ctx_id, tuple(self.resolve(m) for m in members))
        return ctx_id

    def build(self) -> Hypergraph:
        return Hypergraph(self._obs.values(), self._ctx.values(), self._aliases, self.notes)


def validate(h: Hypergraph) -> list[Violation]:
    """Check arity, id resolution, pairwise orthogonality, coverage and ray uniqueness."""
    out: list[Violation] = []
    for c in h.contexts.values():
        if len(c.members) != h.dimension:
            out.append(Violation("arity", c.id, f"size {len(c.members)} != {h.dimension}", len(c.members)))
        missing = [m for m in c.members if m not in h.observables]
        for m in missing:
            out.append(Violation("dangling", c.id, f"member {m!r} is not an observable"))
        if len(set(c.members)) != len(c.members):
            out.append(Violation("repeated", c.id, "a member is listed twice"))
        present = [m for m in c.members if m in h.observables]
        for i in range(len(present)):
            for j in range(i + 1, len(present)):
                a, b = present[i], present[j]
                if a == b:
                    continue
                ra, rb = h.observables[a].ray, h.observables[b].ray
                if not is_orthogonal(ra, rb):
                    ip = inner_product(ra, rb)
                    out.append(
                        Violation("orthogonality", c.id, f"<{a}|{b}> = {_fmt(ip)} != 0", ip)
                    )
    for oid, ctxs in h.contexts_of.items():
        if not ctxs:
            out.append(Violation("uncovered", oid, "observable belongs to no context"))
    ids = list(h.observables)
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            if same_ray(h.observables[ids[i]].ray, h.observables[ids[j]].ray):
                out.append(Violation("duplicate-ray", ids[j], f"same ray as {ids[i]!r}"))
    return out


def _fmt(x):
    if isinstance(x, complex):
        return f"{x.real:.3g}" if abs(x.imag) < 1e-12 else f"{x:.3g}"
    return str(x)


def star_contexts(h: Hypergraph, a: str) -> list[str]:
    """Ids of the contexts containing observable ``a``, in context order."""
    return list(h.contexts_of[h.resolve(a)])


# Table of 24 contexts; each entry lists members with their value labels (None for the last column).
_TABLE1 = [
    ("C1", [(1, 0, 0), (0, 1, 0), (0, 0, 1)], (1, 0, 0)),
    ("C2", [(3, 2, 1), (2, -3, 0), (3, 2, -13)], (1, 0, 0)),
    ("C3", [(1, 0, 0), (0, 1, 1), (0, 1, -1)], (1, 0, 0)),
    ("C4", [(3, 2, 1), (1, -1, -1), (1, -4, 5)], (1, 0, 0)),
    ("C5", [(2, 1, 1), (1, -1, -1), (0, 1, -1)], (1, 0, 0)),
    ("C6", [(3, 2, 0), (2, -3, 0), (0, 0, 1)], (1, 0, 0)),
    ("C7", [(2, 1, 1), (1, 0, -2), (2, -5, 1)], (1, 0, 0)),
    ("C8", [(3, 2, 0), (2, -3, 3), (6, -9, -13)], (1, 0, 0)),
    ("C9", [(2, 0, 1), (1, 0, -2), (0, 1, 0)], (1, 0, 0)),
    ("C10", [(3, 1, -1), (2, -3, 3), (0, 1, 1)], (1, 0, 0)),
    ("C11", [(2, 0, 1), (1, 1, -2), (1, -5, -2)], (1, 0, 0)),
    ("C12", [(3, 1, -1), (1, -1, 2), (1, -7, -4)], (1, 0, 0)),
    ("C13", [(1, 1, 0), (1, -1, 2), (1, -1, -1)], (1, 0, 0)),
    ("C14", [(1, 1, 0), (1, -1, 0), (0, 0, 1)], (1, 0, 0)),
    ("C15", [(1, 1, 0), (1, -1, 1), (1, -1, -2)], (1, 0, 0)),
    ("C16", [(1, 1, 1), (1, -1, 0), (1, 1, -2)], (1, 0, 0)),
    ("C17", [(2, 1, -1), (1, -1, 1), (0, 1, 1)], (1, 0, 0)),
    ("C18", [(1, 1, 1), (1, 0, -1), (1, -2, 1)], (1, 0, 0)),
    ("C19", [(2, 1, -1), (1, 0, 2), (2, -5, -1)], (1, 0, 0)),
    ("C20", [(1, 0, 1), (1, 0, -1), (0, 1, 0)], (1, 0, 0)),
    ("C21", [(2, 0, -1), (1, 0, 2), (0, 1, 0)], (1, 0, 0)),
    ("C22", [(1, 0, 1), (1, 1, -1), (1, -2, -1)], (1, 0, 0)),
    ("C23", [(2, 0, -1), (1, 1, 2), (1, -5, 2)], (1, 0, 0)),
    ("C24", [(1, 1, -1), (1, -1, 0), (1, 1, 2)], None),
]

#: Contexts receiving the two hypotheses of the propagation proof.
TABLE1_SEED_CONTEXTS = ("C1", "C2")
#: The context driven to three zeros.
TABLE1_CONTRADICTION = "C24"


def table1_vectors() -> list[tuple[str, list[tuple[int, int, int]]]]:
    """Raw integer rows of the 24 contexts (before canonicalization)."""
    return [(cid, list(vecs)) for cid, vecs, _ in _TABLE1]


def ray_id(components) -> str:
    return "(" + ",".join(str(c) for c in components) + ")"


def table1_labels() -> dict[str, int]:
    """Value label of every observable as read from the value column (contexts C1-C23).

    The last column is the contradiction itself and carries no usable labels.
    """
    labels: dict[str, int] = {}
    for _, vecs, labs in _TABLE1:
        if labs is None:
            continue
        for v, lab in zip(vecs, labs):
            oid = ray_id(ExactRay(v).components)
            if labels.setdefault(oid, lab) != lab:
                raise AssertionError(f"inconsistent label for {oid}")
    return labels


def table1_hypergraph() -> Hypergraph:
    b = HypergraphBuilder()
    for cid, vecs, _ in _TABLE1:
        ids = []
        for v in vecs:
            ray = ExactRay(v)
            ids.append(b.add_observable(ray_id(ray.components), ray))
        b.add_context(cid, ids)
    return b.build()


def star_hypergraph(rays: int = 7) -> tuple[Hypergraph, str]:
    """Star of ``rays`` contexts through a common observable ``a`` = (0,0,1).

    Each ray pairs an integer direction (p, q, 0) with its orthogonal partner
    (-q, p, 0) in the plane orthogonal to ``a``.
    """
    directions = [(1, 0), (2, 1), (1, 1), (1, 2), (3, 1), (1, 3), (3, 2), (4, 1), (1, 4), (4, 3)]
    if not 1 <= rays <= len(directions):
        raise ValueError(f"rays must lie in 1..{len(directions)}")
    b = HypergraphBuilder()
    b.add_observable("a", ExactRay((0, 0, 1)))
    for k, (p, q) in enumerate(directions[:rays], start=1):
        u = b.add_observable(f"u{k}", ExactRay((p, q, 0)))
        w = b.add_observable(f"w{k}", ExactRay((-q, p, 0)))
        b.add_context(f"C{k}", ["a", u, w])
    return b.build(), "a"


def save_hypergraph(h: Hypergraph) -> str:
    doc = {
        "dimension": h.dimension,
        "observables": [{"id": o.id, "ray": ray_to_json(o.ray)} for o in h.observables.values()],
        "contexts": [{"id": c.id, "members": list(c.members)} for c in h.contexts.values()],
    }
    if h.aliases:
        doc["aliases"] = dict(sorted(h.aliases.items()))
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_hypergraph(document: str) -> Hypergraph:
    """Parse a hypergraph document; violations are attached as ``h.report``."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "$")
    for key in ("observables", "contexts"):
        if key not in doc:
            raise ParseError(f"missing {key!r}", "$")
        if not isinstance(doc[key], list):
            raise ParseError("expected a list", f"$.{key}")
    if doc.get("dimension", DIMENSION) != DIMENSION:
        raise ParseError(f"only dimension {DIMENSION} is supported", "$.dimension")
    b = HypergraphBuilder()
    for i, entry in enumerate(doc["observables"]):
        loc = f"$.observables[{i}]"
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str) or "ray" not in entry:
            raise ParseError('expected {"id": str, "ray": ...}', loc)
        b.add_observable(entry["id"], ray_from_json(entry["ray"], loc + ".ray"))
    for alias, target in (doc.get("aliases") or {}).items():
        if b.resolve(alias) == alias and alias not in b._obs:
            b._aliases[alias] = b.resolve(target)
    for i, entry in enumerate(doc["contexts"]):
        loc = f"$.contexts[{i}]"
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str):
            raise ParseError('expected {"id": str, "members": [...]}', loc)
        members = entry.get("members")
        if not isinstance(members, list) or not all(isinstance(m, str) for m in members):
            raise ParseError("members must be a list of ids", loc + ".members")
        b.add_context(entry["id"], members)
    h = b.build()
    h.report = validate(h) + [Violation("alias", "load", note) for note in b.notes]
    return h
