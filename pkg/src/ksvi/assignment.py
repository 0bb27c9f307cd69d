"""Two-valued assignments over a hypergraph: propagation, admissibility, search.

Worklist order (fixed, so traces are reproducible): the contexts of the seeds
in seed order, then every remaining context in hypergraph order; a context is
re-enqueued whenever one of its members changes.  Search branches on the
lowest undefined variable in hypergraph order, trying 1 before 0.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from . import kernels
from .errors import CompletionFailed, SeedConflict, TheoremCheckFailed, UnknownContext, UnknownObservable
from .hypergraph import (
    TABLE1_CONTRADICTION,
    TABLE1_SEED_CONTEXTS,
    Hypergraph,
    ray_id,
    star_contexts,
    table1_hypergraph,
    table1_labels,
)

RULE_NAMES = {
    kernels.SEED: "Seed",
    kernels.R1: "Admissibility1",
    kernels.R2: "Admissibility2",
    kernels.NT: "NoncontextualTransfer",
}
CONFLICT_NAMES = {
    kernels.TWO_ONES: "two-ones",
    kernels.THREE_ZEROS: "three-zeros",
    kernels.BIVALUED: "bivalued",
}


class SearchMode(enum.Enum):
    NoncontextualValueDefinite = "noncontextual"
    ContextualAllowed = "contextual"


@dataclass(frozen=True)
class Seed:
    observable: str
    context: str
    value: int

    @classmethod
    def parse(cls, text: str) -> Seed:
        """``observable@context=value``; the observable id may itself contain ``@``."""
        try:
            left, value = text.rsplit("=", 1)
            obs, ctx = left.rsplit("@", 1)
            v = int(value)
        except ValueError:
            raise ValueError(f"seed {text!r} is not of the form obs@ctx=0|1") from None
        if v not in (0, 1):
            raise ValueError(f"seed value must be 0 or 1, got {v}")
        return cls(obs, ctx, v)


@dataclass
class Assignment:
    """Partial map (observable, context) -> {0, 1}; missing pairs are value indefinite."""

    values: dict[tuple[str, str], int] = field(default_factory=dict)

    def get(self, observable: str, context: str):
        return self.values.get((observable, context))

    def observable_values(self, observable: str) -> set[int]:
        return {v for (o, _), v in self.values.items() if o == observable}

    def value_of(self, observable: str):
        """The single value of a noncontextually assigned observable, else None."""
        vals = self.observable_values(observable)
        return vals.pop() if len(vals) == 1 else None

    def __len__(self):
        return len(self.values)

    def to_json(self) -> dict:
        return {
            "entries": [
                {"observable": o, "context": c, "value": v} for (o, c), v in self.values.items()
            ]
        }

    @classmethod
    def from_json(cls, doc: dict) -> Assignment:
        return cls({(e["observable"], e["context"]): int(e["value"]) for e in doc["entries"]})


@dataclass(frozen=True)
class Step:
    rule: str
    context: str
    derived: tuple[tuple[str, str, int], ...]

    def describe(self) -> str:
        body = ", ".join(f"v({o},{c})={v}" for o, c, v in self.derived)
        return f"{self.rule:<22} {self.context:<8} {body}"


@dataclass
class PropagationTrace:
    steps: list[Step]
    status: str  # "Fixpoint" or "Contradiction"
    conflict_context: str | None = None
    conflict_kind: str | None = None
    description: str = ""

    @property
    def is_contradiction(self) -> bool:
        return self.status == "Contradiction"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "conflict_context": self.conflict_context,
            "conflict_kind": self.conflict_kind,
            "description": self.description,
            "steps": [
                {
                    "rule": s.rule,
                    "context": s.context,
                    "derived": [{"observable": o, "context": c, "value": v} for o, c, v in s.derived],
                }
                for s in self.steps
            ],
        }

    def render(self) -> str:
        lines = [f"{i:4d}  {s.describe()}" for i, s in enumerate(self.steps, 1)]
        lines.append(f"status: {self.status}" + (f" ({self.description})" if self.description else ""))
        return "\n".join(lines)


def _encode_seeds(h: Hypergraph, seeds) -> list[tuple[int, int, int]]:
    raw: dict[tuple[str, str], int] = {}
    out = []
    for seed in seeds:
        obs = h.resolve(seed.observable)
        ctx = h.context(seed.context)
        if obs not in ctx.members:
            raise UnknownObservable(f"{obs!r} is not a member of {ctx.id!r}")
        if seed.value not in (0, 1):
            raise ValueError(f"seed value must be 0 or 1, got {seed.value}")
        key = (obs, ctx.id)
        if raw.setdefault(key, seed.value) != seed.value:
            raise SeedConflict(f"seeds give v({obs},{ctx.id}) both values")
        out.append((h.ctx_index[ctx.id], ctx.members.index(obs), seed.value))
    return out


def _lift(h: Hypergraph, values, noncontextual: bool) -> Assignment:
    ctx_ids = list(h.contexts)
    a = Assignment()
    for ci, triple in enumerate(h.encoded):
        members = h.contexts[ctx_ids[ci]].members
        for s in range(3):
            v = values[triple[s]] if noncontextual else values[3 * ci + s]
            if v != -1:
                a.values[(members[s], ctx_ids[ci])] = int(v)
    return a


def _steps(h: Hypergraph, events) -> list[Step]:
    ctx_ids = list(h.contexts)
    steps: list[Step] = []
    current = None
    derived: list[tuple[str, str, int]] = []
    for rule, c, s, v in events:
        cid = ctx_ids[c]
        entry = (h.contexts[cid].members[s], cid, int(v))
        key = (rule, c)
        if rule in (kernels.R1, kernels.R2) and key == current:
            derived.append(entry)
            continue
        if current is not None:
            steps.append(Step(RULE_NAMES[current[0]], ctx_ids[current[1]], tuple(derived)))
        current, derived = key, [entry]
    if current is not None:
        steps.append(Step(RULE_NAMES[current[0]], ctx_ids[current[1]], tuple(derived)))
    return steps


def propagate(h: Hypergraph, seeds, noncontextual: bool = True) -> tuple[Assignment, PropagationTrace]:
    """Close the seeds under the admissibility rules (and transfer, if noncontextual)."""
    enc = _encode_seeds(h, seeds)
    status, bad, kind, values, events = kernels.propagate(len(h.observables), h.encoded, enc, noncontextual)
    assignment = _lift(h, values, noncontextual)
    steps = _steps(h, events)
    if status == kernels.CONTRADICTION:
        cid = list(h.contexts)[bad]
        kind_name = CONFLICT_NAMES[kind]
        members = h.contexts[cid].members
        if kind == kernels.BIVALUED:
            desc = f"an observable of {cid} would carry both values"
        elif kind == kernels.TWO_ONES:
            desc = f"two members of {cid} valued 1"
        else:
            desc = f"all members of {cid} valued 0: " + ", ".join(members)
        trace = PropagationTrace(steps, "Contradiction", cid, kind_name, desc)
    else:
        trace = PropagationTrace(steps, "Fixpoint")
    return assignment, trace


def replay(h: Hypergraph, trace: PropagationTrace, noncontextual: bool = True) -> Assignment:
    """Rebuild the assignment from a trace; each step only adds values."""
    a = Assignment()
    for step in trace.steps:
        for o, c, v in step.derived:
            if noncontextual:
                for c2 in h.contexts_of[o]:
                    a.values.setdefault((o, c2), v)
            else:
                a.values.setdefault((o, c), v)
    return a


def is_admissible(h: Hypergraph, v: Assignment) -> tuple[bool, list[str]]:
    """Check both admissibility clauses in every context against the defined entries."""
    problems = []
    for key in v.values:
        o, c = key
        if c not in h.contexts or o not in h.contexts[c].members:
            problems.append(f"entry v({o},{c}) does not belong to the hypergraph")
    for cid, ctx in h.contexts.items():
        vals = [v.get(o, cid) for o in ctx.members]
        ones = [o for o, x in zip(ctx.members, vals) if x == 1]
        if ones:
            bad = [o for o, x in zip(ctx.members, vals) if o != ones[0] and x != 0]
            if bad:
                problems.append(f"{cid}: v({ones[0]})=1 but " + ", ".join(f"v({o})={v.get(o, cid)}" for o in bad))
        for i, o in enumerate(ctx.members):
            others = [x for j, x in enumerate(vals) if j != i]
            if all(x == 0 for x in others) and vals[i] != 1:
                problems.append(f"{cid}: all members except {o} are 0 but v({o})={vals[i]}")
                break
    return not problems, problems


def _mode_flag(mode: SearchMode) -> bool:
    return mode is SearchMode.NoncontextualValueDefinite


def search_completion(h: Hypergraph, seeds=(), mode: SearchMode = SearchMode.NoncontextualValueDefinite):
    """First total admissible assignment extending the seeds, or None."""
    enc = _encode_seeds(h, seeds)
    nc = _mode_flag(mode)
    values = kernels.search(len(h.observables), h.encoded, enc, nc)
    if values is None:
        return None
    return _lift(h, values, nc)


def count_completions(h: Hypergraph, seeds=(), mode: SearchMode = SearchMode.NoncontextualValueDefinite,
                      cap: int = 10**7) -> int:
    """Number of total admissible assignments extending the seeds, saturating at ``cap``."""
    if cap <= 0:
        raise ValueError("cap must be positive")
    enc = _encode_seeds(h, seeds)
    return kernels.count(len(h.observables), h.encoded, enc, _mode_flag(mode), cap)


def build_star_assignment(h: Hypergraph, a: str) -> Assignment:
    """Admissible total assignment with ``a`` valued 1 in every context containing it.

    The other members of the star get 0; where such an observable also
    appears outside the star it is 0 there as well when possible, the rest is
    completed contextually.
    """
    a = h.resolve(a)
    star = star_contexts(h, a)
    star_set = set(star)
    seeds = []
    on_rays = set()
    for cid in star:
        for o in h.contexts[cid].members:
            seeds.append(Seed(o, cid, 1 if o == a else 0))
            if o != a:
                on_rays.add(o)
    extra = [
        Seed(o, cid, 0)
        for cid, ctx in h.contexts.items()
        if cid not in star_set
        for o in ctx.members
        if o in on_rays
    ]
    result = search_completion(h, seeds + extra, SearchMode.ContextualAllowed)
    if result is None:
        result = search_completion(h, seeds, SearchMode.ContextualAllowed)
    if result is None:
        raise CompletionFailed(f"no admissible completion around {a!r}")
    return result


def verify_theorem1(h: Hypergraph | None = None) -> PropagationTrace:
    """Replay the 24-context propagation proof and check it against the value column."""
    if h is None:
        h = table1_hypergraph()
    c1, c2 = TABLE1_SEED_CONTEXTS
    pa, pb = ray_id((1, 0, 0)), ray_id((3, 2, 1))
    assignment, trace = propagate(h, [Seed(pa, c1, 1), Seed(pb, c2, 1)], noncontextual=True)
    if not trace.is_contradiction:
        raise TheoremCheckFailed("propagation reached a fixpoint instead of a contradiction")
    if trace.conflict_context != TABLE1_CONTRADICTION or trace.conflict_kind != "three-zeros":
        raise TheoremCheckFailed(
            f"contradiction located in {trace.conflict_context} ({trace.conflict_kind}), "
            f"expected {TABLE1_CONTRADICTION} (three-zeros)"
        )
    for o in h.contexts[TABLE1_CONTRADICTION].members:
        if assignment.get(o, TABLE1_CONTRADICTION) != 0:
            raise TheoremCheckFailed(f"{o} is not forced to 0 in {TABLE1_CONTRADICTION}")
    for o, label in table1_labels().items():
        got = assignment.observable_values(o)
        if got != {label}:
            raise TheoremCheckFailed(f"{o}: propagated {sorted(got)}, table says {label}")
    return trace


def trace_to_text(trace: PropagationTrace) -> str:
    return json.dumps(trace.to_json(), indent=2, sort_keys=True) + "\n"


@dataclass
class OracleSweep:
    subgraphs: int = 0
    seed_sets: int = 0
    mismatches: int = 0
    #: (context ids, encoded seeds) of the first disagreement.
    first: tuple | None = None


def oracle_sweep(h: Hypergraph, max_contexts: int = 6, mode: SearchMode = SearchMode.NoncontextualValueDefinite,
                 min_contexts: int = 1) -> OracleSweep:
    """Search-absence versus zero-count agreement on every sub-hypergraph of up to ``max_contexts``
    contexts, over every seed set of size at most two."""
    from itertools import combinations

    ctx_ids = list(h.contexts)
    enc = h.encoded
    nc = _mode_flag(mode)
    out = OracleSweep()
    for k in range(min_contexts, max_contexts + 1):
        for pick in combinations(range(len(enc)), k):
            remap: dict[int, int] = {}
            members = [tuple(remap.setdefault(o, len(remap)) for o in enc[c]) for c in pick]
            checked, bad, first = kernels.crosscheck(len(remap), members, nc)
            out.subgraphs += 1
            out.seed_sets += checked
            if bad:
                out.mismatches += bad
                if out.first is None:
                    out.first = (tuple(ctx_ids[c] for c in pick), first)
    return out
