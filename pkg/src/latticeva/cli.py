"""Command-line interface: compute, verify, table, epsilon, twisted-eigen, zhu."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .elements import BUILTINS, builtin
from .exact import PoleError
from .fock import AdmissibilityError, ModuleSpec
from .grammar import ParseError, parse
from .modes import NEG_INF, epsilon
from .twisted import twisted_eigen_pairs, twisted_mode
from . import verify as V
from . import zhu

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_p(text: str):
    if text == "sym":
        return None
    try:
        p = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--p takes 'sym' or a rational literal, got {text!r}") from None
    if p == 0:
        raise UsageError("--p must be non-zero")
    return p


def _ptext(p) -> str:
    return "sym" if p is None else str(p)


def _result(name, status, **kw) -> dict:
    d = {"name": name, "status": status}
    d.update(kw)
    return d


def _doc(command, p, results) -> dict:
    return {"command": command, "p": _ptext(p), "results": results}


# ---------------------------------------------------------------------------
# commands

def cmd_compute(args, p):
    v = V.evaluate(parse(args.expr), p)
    return _doc("compute", p, [_result(args.expr, "ok", value=v.render(), vector=v.to_json())])


def _report_results(report: V.Report, timing: bool) -> list:
    return [r.to_json(timing) for r in report.records]


def cmd_verify(args, p):
    report = V.verify(only=args.only, domain=args.domain)
    return _doc("verify", p, _report_results(report, not args.no_timing))


def cmd_table(args, p):
    report = V.appendix_table(args.section)
    return _doc("table", p, _report_results(report, not args.no_timing))


def cmd_epsilon(args, p):
    v = V.evaluate(parse(args.expr), p)
    a = builtin(args.gen, ModuleSpec(p))
    mode_fn = (lambda x, n, u: twisted_mode(x, n, u)) if v.spec.twisted else None
    e = epsilon(a, v, mode_fn=mode_fn)
    value = "-inf" if e == NEG_INF else str(e)
    return _doc("epsilon", p, [_result(f"eps({args.gen}, {args.expr})", "ok", value=value)])


def cmd_twisted_eigen(args, p):
    out = []
    for label, w1, h3 in twisted_eigen_pairs():
        ok = w1 is not None and h3 is not None
        out.append(_result(label, "ok" if ok else "fail", value=f"({w1}, {h3})",
                           omega1=str(w1), H3=str(h3)))
    return _doc("twisted-eigen", p, out)


def cmd_zhu(args, p):
    if args.p != "sym" and p is not None:
        raise UsageError("zhu works in M(1)+ and takes no numeric --p")
    a = V.evaluate(parse(args.a), None)
    if args.op == "member":
        if args.b is not None:
            raise UsageError("zhu member takes a single expression")
        m = zhu.o_membership(a, args.cutoff)
        res = _result(f"{args.a} in O(V)", m.status, value=m.status,
                      cutoff=m.cutoff, products=m.generators, rank=m.rank)
        return _doc("zhu", p, [res])
    if args.b is None:
        raise UsageError(f"zhu {args.op} takes two expressions")
    b = V.evaluate(parse(args.b), None)
    fn = zhu.zhu_star if args.op == "star" else zhu.zhu_circ
    v = fn(a, b)
    sym = "*" if args.op == "star" else "∘"
    return _doc("zhu", p, [_result(f"({args.a}) {sym} ({args.b})", "ok", value=v.render(), vector=v.to_json())])


COMMANDS = {
    "compute": cmd_compute,
    "verify": cmd_verify,
    "table": cmd_table,
    "epsilon": cmd_epsilon,
    "twisted-eigen": cmd_twisted_eigen,
    "zhu": cmd_zhu,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", default="sym", help="'sym' for a symbolic norm or a rational literal such as 2 or 1/2")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--no-timing", action="store_true", help="omit wall-time fields")

    ap = argparse.ArgumentParser(prog="latticeva", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", parents=[common], help="evaluate an expression")
    c.add_argument("expr")

    c = sub.add_parser("verify", parents=[common], help="check catalogue relations")
    c.add_argument("--only", help="relation name or alias")
    c.add_argument("--domain", choices=sorted(V.DOMAIN_P))

    c = sub.add_parser("table", parents=[common], help="recompute an appendix table")
    c.add_argument("section", choices=("A1", "A2", "A3", "A4"))

    c = sub.add_parser("epsilon", parents=[common], help="top nonzero mode of an element on a vector")
    c.add_argument("gen", choices=sorted(set(BUILTINS) - {"omega"}))
    c.add_argument("expr")

    sub.add_parser("twisted-eigen", parents=[common], help="omega_1, H_3 eigenvalues on the twisted module")

    c = sub.add_parser("zhu", parents=[common], help="Zhu products and O(V) membership")
    c.add_argument("op", choices=("star", "circ", "member"))
    c.add_argument("a")
    c.add_argument("b", nargs="?")
    c.add_argument("--cutoff", type=int, default=10)
    return ap


def render_text(doc: dict) -> str:
    """Text view, a pure function of the JSON document."""
    lines = [f"{doc['command']} (p = {doc['p']})"]
    for r in doc["results"]:
        head = f"{r['status'].upper():4} {r['name']}"
        if r.get("regime"):
            head += f" [{r['regime']}]"
        lines.append(head)
        if "value" in r:
            lines.append(f"     = {r['value']}")
        if "residual" in r:
            lines.append(f"     residual: {r['residual']}")
        if "error" in r:
            lines.append(f"     error: {r['error']}")
    return "\n".join(lines)


def exit_code(doc: dict) -> int:
    return EXIT_FAIL if any(r["status"] == "fail" for r in doc["results"]) else EXIT_OK


def _emit(doc, fmt, stream=None):
    stream = stream or sys.stdout
    if fmt == "json":
        stream.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        stream.write(render_text(doc) + "\n")


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fmt = args.format
    try:
        p = parse_p(args.p)
        doc = COMMANDS[args.command](args, p)
    except (ParseError, UsageError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        if fmt == "json":
            _emit(_doc(args.command, None, [_result(args.command, "error", error=str(msg))]), fmt)
        return EXIT_USAGE
    except (PoleError, AdmissibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if fmt == "json":
            _emit(_doc(args.command, None, [_result(args.command, "error", error=str(exc))]), fmt)
        return EXIT_DOMAIN
    _emit(doc, fmt)
    return exit_code(doc)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
