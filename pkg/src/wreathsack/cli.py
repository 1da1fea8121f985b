"""Command-line frontend: ``wreathsack {solve,solset,verify,certify,reduce3dm,periodic,eval}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .abelian import AbelianGroupSpec, GroupSpecError, TokenError
from .expr import ExponentExpression, ExpressionSyntaxError, brute_force_solve, is_solution, parse_expression
from .periodic import membership, parse_cutoff, parse_periodic, word_problem
from .presburger import ExtractionLimitError
from .reductions import ThreeDMInstance, reduce_3dm
from .solver_np import Certificate, MalformedCertificate, search_solve, verify_certificate
from .solver_semilinear import SolverLimitError, is_solvable, solution_set
from .wreath import WreathProduct

EXIT_SAT, EXIT_UNSAT, EXIT_INPUT, EXIT_UNKNOWN = 0, 1, 2, 3

class InputError(ValueError):
    pass


@dataclass
class Instance:
    group: WreathProduct
    expression: ExponentExpression
    subset_sum: bool = False


@dataclass
class SolveResult:
    status: str
    witness: Optional[dict] = None
    solution_set: Optional[dict] = None
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.solution_set is not None:
            out["solution_set"] = self.solution_set
        out["stats"] = self.stats
        return out


def parse_instance(text: str) -> Instance:
    """Line 1 the lamp group, line 2 the expression; ``# subset-sum`` turns on 0/1 exponents."""
    subset_sum = False
    lines = []
    for raw in text.splitlines():
        s = raw.strip()
        if s.startswith("#"):
            if s[1:].strip().lower() == "subset-sum":
                subset_sum = True
            continue
        if s:
            lines.append(s)
    if len(lines) != 2:
        raise InputError(f"instance needs a group line and an expression line, found {len(lines)} lines")
    try:
        group = WreathProduct(AbelianGroupSpec.parse(lines[0]))
        e = parse_expression(lines[1])
        for w in e.words() + [b.base for b in e.blocks]:
            group.evaluate_word(list(w))
    except (GroupSpecError, TokenError, ExpressionSyntaxError) as exc:
        raise InputError(str(exc)) from exc
    return Instance(group, e, subset_sum)


def format_instance(group: WreathProduct, e: ExponentExpression, subset_sum: bool = False) -> str:
    lines = [str(group.base), str(e)]
    if subset_sum:
        lines.append("# subset-sum")
    return "\n".join(lines) + "\n"


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(str(exc)) from exc


def _load(args) -> Instance:
    if args.expr is not None:
        inst = parse_instance(f"{args.group or 'Z/2'}\n{args.expr}\n")
    elif args.instance is not None:
        inst = parse_instance(_read(args.instance))
    else:
        raise InputError("give an instance file or --expr")
    if getattr(args, "subset_sum", False):
        inst.subset_sum = True
    return inst


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=False) + "\n")


# -- subcommands -----------------------------------------------------------------


def cmd_solve(args) -> int:
    inst = _load(args)
    e, group = inst.expression, inst.group
    t0 = time.perf_counter()
    stats: dict = {"method": args.method, "variables": e.variables}
    witness = None
    status = "unsat"
    cert = None
    if args.method == "semilinear":
        nu = is_solvable(e, group, subset_sum=inst.subset_sum, stats=stats)
        if nu is not None:
            status, witness = "sat", nu
    elif args.method == "oracle":
        bound = 1 if inst.subset_sum else args.bound
        sols = brute_force_solve(e, min(bound, args.bound), group, subset_sum=inst.subset_sum)
        if sols:
            status, witness = "sat", sols[0]
        stats["bound"] = bound
    else:
        if inst.subset_sum:
            raise InputError("the search method does not support --subset-sum")
        r = search_solve(e, group, args.budget)
        stats["tried"] = r.tried
        status = {"sat": "sat", "unsat": "unsat", "unknown": "unknown-within-budget"}[r.status]
        witness, cert = r.valuation, r.certificate
    stats["seconds"] = round(time.perf_counter() - t0, 6)
    if witness is not None and not is_solution(e, witness, group):
        raise AssertionError(f"witness {witness} does not verify")
    if cert is not None and args.certificate:
        with open(args.certificate, "w", encoding="utf-8") as fh:
            fh.write(cert.to_json(group))
    _emit(SolveResult(status, witness, None, stats).to_dict())
    return {"sat": EXIT_SAT, "unsat": EXIT_UNSAT}.get(status, EXIT_UNKNOWN)


def cmd_solset(args) -> int:
    inst = _load(args)
    stats: dict = {}
    s = solution_set(inst.expression, inst.group, subset_sum=inst.subset_sum, stats=stats)
    out = {"variables": inst.expression.variables, **s.to_dict(), "stats": stats}
    _emit(out)
    return EXIT_SAT if not s.is_empty() else EXIT_UNSAT


def cmd_certify(args) -> int:
    from .solver_np import certificate_from_solution

    inst = _load(args)
    try:
        nu = {k: int(v) for k, v in json.loads(args.witness).items()}
    except (ValueError, AttributeError) as exc:
        raise InputError(f"witness must be a JSON object of naturals: {exc}") from exc
    if not is_solution(inst.expression, nu, inst.group):
        _emit({"status": "not-a-solution"})
        return EXIT_UNSAT
    sys.stdout.write(certificate_from_solution(inst.expression, nu, inst.group).to_json(inst.group) + "\n")
    return EXIT_SAT


def cmd_verify(args) -> int:
    inst = _load(args)
    try:
        cert = Certificate.from_json(_read(args.certificate), inst.group)
        v = verify_certificate(inst.expression, cert, inst.group)
    except MalformedCertificate as exc:
        _emit({"status": "malformed", "reason": str(exc)})
        return EXIT_INPUT
    _emit({"status": "accept" if v else "reject", "reason": v.reason, "witness": v.valuation})
    return EXIT_SAT if v else EXIT_UNSAT


def cmd_reduce3dm(args) -> int:
    try:
        inst = ThreeDMInstance.parse(_read(args.file))
        e = reduce_3dm(inst, args.group, binary_moves=args.binary_moves)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(format_instance(WreathProduct(args.group), e, args.binary_moves))
    return EXIT_SAT


def cmd_periodic(args) -> int:
    try:
        p = parse_periodic(args.group, args.words)
        if args.mode == "wp":
            ok = word_problem(p)
        else:
            if args.cutoff is None:
                raise InputError("member needs a cutoff m")
            ok = membership(p, parse_cutoff(args.cutoff))
    except (ValueError, GroupSpecError, TokenError) as exc:
        raise InputError(str(exc)) from exc
    _emit({"result": ok})
    return EXIT_SAT if ok else EXIT_UNSAT


def cmd_eval(args) -> int:
    try:
        group = WreathProduct(args.group)
        g = group.evaluate_word(args.word.split())
    except (GroupSpecError, TokenError) as exc:
        raise InputError(str(exc)) from exc
    _emit({"support": {str(p): v.to_list() for p, v in g.support}, "shift": g.shift})
    return EXIT_SAT


# -- wiring ----------------------------------------------------------------------


def _instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("instance", nargs="?", help="instance file (group line, expression line) or - for stdin")
    p.add_argument("--expr", help="expression given inline instead of a file")
    p.add_argument("--group", help="lamp group for --expr, e.g. Z/2 or 'Z^2 x Z/3' (default Z/2)")
    p.add_argument("--subset-sum", action="store_true", help="restrict every exponent to {0,1}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wreathsack", description="Knapsack and exponent equations over G wr Z.")
    ap.add_argument("--trace", action="store_true", help="log solver progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide solvability")
    _instance_args(p)
    p.add_argument("--method", choices=["semilinear", "search", "oracle"], default="semilinear")
    p.add_argument("--bound", type=int, default=6, help="box bound for the oracle")
    p.add_argument("--budget", type=int, default=1000, help="shift vectors tried by the search")
    p.add_argument("--certificate", help="write the certificate found by --method search here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("solset", help="print the solution set as semilinear JSON")
    _instance_args(p)
    p.set_defaults(func=cmd_solset)

    p = sub.add_parser("certify", help="certificate JSON for a known solution")
    _instance_args(p)
    p.add_argument("--witness", required=True, help='JSON object, e.g. \'{"x": 1}\'')
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="check a certificate (0 accept, 1 reject, 2 malformed)")
    _instance_args(p)
    p.add_argument("--certificate", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce3dm", help="knapsack instance from a 3DM file")
    p.add_argument("file")
    p.add_argument("--group", default="Z/2")
    p.add_argument("--binary-moves", action="store_true", help="variant that stays correct with 0/1 exponents")
    p.set_defaults(func=cmd_reduce3dm)

    p = sub.add_parser("periodic", help="periodic word problem and bounded membership")
    p.add_argument("mode", choices=["wp", "member"])
    p.add_argument("words", help="e.g. '[(g1),(g1-)]'")
    p.add_argument("cutoff", nargs="?", help="m in decimal or 0x hex (member only)")
    p.add_argument("--group", default="Z")
    p.set_defaults(func=cmd_periodic)

    p = sub.add_parser("eval", help="evaluate a word")
    p.add_argument("word")
    p.add_argument("--group", default="Z/2")
    p.set_defaults(func=cmd_eval)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.trace or os.environ.get("WREATHSACK_TRACE") == "1":
        logging.basicConfig(stream=sys.stderr, level=logging.DEBUG, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        _emit({"status": "error", "error": str(exc)})
        return EXIT_INPUT
    except (SolverLimitError, ExtractionLimitError) as exc:
        _emit({"status": "unknown", "error": str(exc)})
        return EXIT_UNKNOWN


if __name__ == "__main__":
    sys.exit(main())
