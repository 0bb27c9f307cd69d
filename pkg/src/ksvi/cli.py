"""Command-line entry point ``ksvi``.

Exit codes: 0 success, 1 a checked mathematical outcome was negative (no
completion, contradiction, failed check), 2 usage, parse or I/O error.
Every subcommand accepts ``--json`` to print a machine-readable document in
place of the human summary.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

from . import io as kio
from . import qrng, reck
from .assignment import (
    SearchMode,
    Seed,
    count_completions,
    propagate,
    search_completion,
    verify_theorem1,
)
from .constructions import certify_value_indefinite, reduce_to_equality
from .errors import InsufficientData, KsviError, NotUnitary, OutOfRange, ParseError, TheoremCheckFailed
from .geometry import parse_ray, ray_to_json
from .greechie import export_greechie_dot
from .hypergraph import load_hypergraph, save_hypergraph, table1_hypergraph, validate

OK, FAILED, USAGE = 0, 1, 2


@dataclass
class CommandResult:
    code: int
    summary: str
    doc: dict = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)
    detail: str = ""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def _load(path):
    return load_hypergraph(kio.read_text(path))


def _write(result: CommandResult, path, text: str):
    kio.atomic_write_text(path, text)
    result.artifacts.append(str(path))


def cmd_validate(args) -> CommandResult:
    h = _load(args.file)
    problems = h.report
    doc = {
        "observables": len(h.observables),
        "contexts": len(h.contexts),
        "violations": [{"kind": v.kind, "where": v.where, "message": v.message} for v in problems],
        "notes": list(h.notes),
    }
    errors = [v for v in problems if v.kind != "alias"]
    if errors:
        return CommandResult(FAILED, f"{len(errors)} violation(s)", doc, detail="\n".join(map(str, problems)))
    return CommandResult(OK, f"valid: {len(h.observables)} observables, {len(h.contexts)} contexts", doc,
                         detail="\n".join(map(str, problems)))


def cmd_table1(args) -> CommandResult:
    h = table1_hypergraph()
    problems = validate(h)
    res = CommandResult(OK if not problems else FAILED,
                        f"Table I: {len(h.observables)} observables, {len(h.contexts)} contexts, "
                        f"{len(problems)} violation(s)")
    if args.export_dot:
        _write(res, args.export_dot, export_greechie_dot(h))
    if args.export_json:
        _write(res, args.export_json, save_hypergraph(h))
    res.doc = {"observables": len(h.observables), "contexts": len(h.contexts),
               "violations": [str(v) for v in problems], "artifacts": res.artifacts}
    return res


def cmd_propagate(args) -> CommandResult:
    h = _load(args.file)
    try:
        seeds = [Seed.parse(s) for s in args.seed]
    except ValueError as exc:
        raise ParseError(str(exc), "--seed") from None
    assignment, trace = propagate(h, seeds, noncontextual=not args.contextual)
    doc = {"trace": trace.to_json(), "assignment": assignment.to_json()}
    if trace.is_contradiction:
        return CommandResult(FAILED, f"contradiction in {trace.conflict_context}: {trace.description}", doc,
                             detail=trace.render())
    return CommandResult(OK, f"fixpoint: {len(assignment)} values derived", doc, detail=trace.render())


def cmd_search(args) -> CommandResult:
    h = _load(args.file)
    mode = SearchMode.ContextualAllowed if args.contextual else SearchMode.NoncontextualValueDefinite
    if args.count:
        n = count_completions(h, (), mode, cap=args.cap)
        doc = {"mode": mode.value, "count": n, "cap": args.cap, "saturated": n >= args.cap}
        more = "+" if n >= args.cap else ""
        return CommandResult(OK if n else FAILED, f"{n}{more} admissible completion(s) ({mode.value})", doc)
    found = search_completion(h, (), mode)
    if found is None:
        return CommandResult(FAILED, f"no completion exists ({mode.value})", {"mode": mode.value, "assignment": None})
    return CommandResult(OK, f"completion found ({mode.value}, {len(found)} values)",
                         {"mode": mode.value, "assignment": found.to_json()})


def cmd_verify(args) -> CommandResult:
    try:
        trace = verify_theorem1()
    except TheoremCheckFailed as exc:
        return CommandResult(FAILED, f"check failed: {exc}", {"passed": False, "reason": str(exc)})
    res = CommandResult(OK, f"contradiction located in {trace.conflict_context}",
                        {"passed": True, "summary": f"contradiction located in {trace.conflict_context}",
                         "trace": trace.to_json()},
                        detail=trace.render())
    if args.emit_trace:
        _write(res, args.emit_trace, kio.dumps(trace.to_json()))
    return res


def cmd_certify(args) -> CommandResult:
    psi, phi = parse_ray(args.psi), parse_ray(args.phi)
    cert = certify_value_indefinite(psi, phi)
    doc = cert.to_json()
    res = CommandResult(OK if cert.outcome == "ValueIndefinite" else FAILED,
                        f"{cert.outcome} (overlap {cert.overlap:.12f})", doc)
    if cert.witness:
        res.detail = "\n".join(
            f"branch v(phi)={w.value}: " + ("refuted" if w.refuted else "not refuted")
            + (f" at {w.trace.conflict_context} ({w.trace.conflict_kind})" if w.trace.is_contradiction else "")
            + (" by search" if w.searched else "")
            for w in cert.witness
        )
    if args.emit_instance:
        if cert.instance is None:
            raise OutOfRange("no instance: the pair is outside the certification window")
        _write(res, args.emit_instance, save_hypergraph(cert.instance))
    if args.emit_trace:
        _write(res, args.emit_trace, kio.dumps(doc))
    return res


def cmd_reduce(args) -> CommandResult:
    a, b = parse_ray(args.a), parse_ray(args.b)
    try:
        red = reduce_to_equality(a, b)
    except OutOfRange as exc:
        return CommandResult(FAILED, str(exc), {"error": str(exc)})
    doc = red.to_json()
    doc["a"] = ray_to_json(a)
    doc["b"] = ray_to_json(b)
    return CommandResult(OK, f"reduced: p={red.p:.12f}, y={red.y:.12f}, z={red.z:.12f}", doc)


def cmd_qrng(args) -> CommandResult:
    stream = qrng.simulate_bits(args.theta, args.phi, args.n, args.seed)
    bits = qrng.von_neumann_debias(stream.bits) if args.debias else stream.bits
    in_window = qrng.certification_window(args.theta)
    doc = {
        "theta": args.theta, "phi": args.phi, "n": args.n, "seed": args.seed,
        "counts": {"+1": stream.counts[1], "0": stream.counts[0], "-1": stream.counts[-1]},
        "draws": stream.draws,
        "monitor_ratio": stream.monitor_ratio,
        "window": in_window,
        "overlap": math.sin(args.theta) / math.sqrt(2.0),
        "debiased": args.debias,
        "bits_written": int(len(bits)),
    }
    code = OK
    if args.normality is not None:
        report = qrng.borel_normality_test(bits, args.normality)
        doc["normality"] = report.to_json()
        if not report.passed:
            code = FAILED
    flag = "inside certification window" if in_window else "OUTSIDE certification window"
    summary = f"{len(bits)} bits, monitor ratio {stream.monitor_ratio:.6f}, {flag}"
    if "normality" in doc:
        summary += ", normality " + ("pass" if doc["normality"]["passed"] else "FAIL")
    res = CommandResult(code, summary, doc)
    _write(res, args.out, (bits.astype("uint8") + ord("0")).tobytes().decode("ascii") + "\n")
    if args.report:
        _write(res, args.report, kio.dumps(doc))
    return res


def cmd_decompose(args) -> CommandResult:
    if args.matrix is None and not args.check_ux:
        raise ParseError("give --matrix <path> and/or --check-ux")
    doc: dict = {}
    lines = []
    code = OK
    if args.matrix is not None:
        try:
            u = reck.load_matrix(args.matrix)
        except NotUnitary as exc:
            return CommandResult(FAILED, str(exc), {"error": str(exc), "max_deviation": exc.max_deviation})
        d = reck.decompose(u)
        err = float(abs(reck.reconstruct(d, u.n) - u.entries).max())
        doc["decomposition"] = d.to_json()
        doc["reconstruction_error"] = err
        lines.append(d.render())
        lines.append(f"reconstruction error: {err:.3e}")
    if args.check_ux:
        ok, problems = reck.check_ux()
        doc["check_ux"] = {"passed": ok, "problems": problems}
        if args.matrix is None:
            d = reck.decompose(reck.ux_reference())
            doc["decomposition"] = d.to_json()
            lines.append(d.render())
        lines.append("U_x check: " + ("pass" if ok else "FAIL: " + "; ".join(problems)))
        if not ok:
            code = FAILED
    summary = lines[-1] if lines else ""
    return CommandResult(code, summary, doc, detail="\n".join(lines[:-1]))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON document instead of the summary")
    p = _Parser(prog="ksvi", description="Located value indefiniteness toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="check a hypergraph document")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("table1", parents=[common], help="build the 24-context hypergraph")
    s.add_argument("--export-dot", metavar="PATH")
    s.add_argument("--export-json", metavar="PATH")
    s.set_defaults(func=cmd_table1)

    s = sub.add_parser("propagate", parents=[common], help="close seeds under the admissibility rules")
    s.add_argument("file")
    s.add_argument("--seed", action="append", default=[], metavar="OBS@CTX=V")
    s.add_argument("--contextual", action="store_true")
    s.set_defaults(func=cmd_propagate)

    s = sub.add_parser("search", parents=[common], help="search for or count admissible completions")
    s.add_argument("file")
    s.add_argument("--contextual", action="store_true")
    s.add_argument("--count", action="store_true")
    s.add_argument("--cap", type=int, default=10**7)
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("verify-ks-table", parents=[common], help="replay the 24-context contradiction")
    s.add_argument("--emit-trace", metavar="PATH")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("certify", parents=[common], help="certify a value-indefinite observable")
    s.add_argument("--psi", required=True)
    s.add_argument("--phi", required=True)
    s.add_argument("--emit-instance", metavar="PATH")
    s.add_argument("--emit-trace", metavar="PATH")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("reduce", parents=[common], help="reduce a pair to the equality case")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("qrng", parents=[common], help="simulate the spin-1 random bit source")
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--phi", type=float, default=0.0)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--debias", action="store_true")
    s.add_argument("--normality", type=int, metavar="KMAX")
    s.add_argument("--report", metavar="PATH")
    s.set_defaults(func=cmd_qrng)

    s = sub.add_parser("decompose", parents=[common], help="beam-splitter factorization of a unitary")
    s.add_argument("--matrix", metavar="PATH")
    s.add_argument("--check-ux", action="store_true")
    s.set_defaults(func=cmd_decompose)
    return p


def dispatch(argv=None) -> CommandResult:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", 0) is not None and getattr(args, "n", 0) < 0:
        parser.error("--n must be non-negative")
    try:
        result = args.func(args)
    except InsufficientData as exc:
        result = CommandResult(USAGE, f"error: {exc}", {"error": str(exc)})
    except (KsviError, OSError, ValueError) as exc:
        result = CommandResult(USAGE, f"error: {exc}", {"error": str(exc)})
    result.doc.setdefault("summary", result.summary)
    result.doc.setdefault("exit_code", result.code)
    if args.json:
        sys.stdout.write(kio.dumps(result.doc))
    else:
        if result.detail:
            print(result.detail)
        stream = sys.stderr if result.code == USAGE else sys.stdout
        print(result.summary, file=stream)
    return result


def main(argv=None) -> int:
    try:
        return dispatch(argv).code
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE


if __name__ == "__main__":
    sys.exit(main())
