"""Command line interface: ``patfree <subcommand> ...``.

Exit codes: 0 success or accept, 1 reject, 2 usage error, 3 budget exceeded
or no safe flip.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import harness, io, oracle, sampler
from .classify import Kind, classify
from .core import BudgetExceeded, NoSafeFlip, NdArray, Pattern, UsageError, apply_flips
from .exact1d import deletion_set_1d, distance_exact_1d
from .matcher import find_occurrences
from .ndcombin import IterationCapExceeded, alpha, deletion_procedure_nd, hitting_number_nd

EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _emit(rec: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(io.dumps_record(rec) + "\n")
    else:
        for key, val in rec.items():
            out.write(f"{key}: {val}\n")


def _load(args, pattern_only=False):
    P = io.parse_pattern(args.pattern, args.alphabet)
    if pattern_only:
        return P
    A = io.parse_array(args.input, args.alphabet)
    sigma = max(A.sigma, P.sigma)
    if A.sigma != sigma:
        A = NdArray(A.values, sigma)
    if P.sigma != sigma:
        P = Pattern(P.values, sigma)
    return A, P


def _frac(x) -> float:
    return float(x)


def cmd_classify(args, out):
    P = _load(args, pattern_only=True)
    _emit(classify(P).to_record(), args.format, out)
    return EXIT_OK


def cmd_distance(args, out):
    A, P = _load(args)
    if args.approx:
        seed = sampler.resolve_seed(args.seed)
        if A.ndim == 1:
            rep = sampler.approx_distance_1d(A, P, tau=args.tau, delta=args.delta, seed=seed, force=args.force)
        else:
            rep = sampler.approx_distance_nd(A, P, tau=args.tau, delta=args.delta, seed=seed, force=args.force)
        _emit({"mode": "approx", "seed": seed, **rep.to_record()}, args.format, out)
        return EXIT_OK
    if A.ndim == 1:
        dv = distance_exact_1d(A, P)
        rec = {"mode": "exact", "absolute": dv.absolute, "relative": _frac(dv.relative), "size": dv.size,
               "exact": dv.exact}
        if not dv.exact:
            rec["upper"] = dv.upper
        _emit(rec, args.format, out)
        return EXIT_OK
    h, _ = hitting_number_nd(A, P)
    rec = {"mode": "bounds", "hitting": h, "size": A.size, "lower": h}
    cls = classify(P)
    if cls.kind is Kind.REMOVABLE or args.force:
        trace = deletion_procedure_nd(A, P)
        rec["upper"] = len(trace.flips)
        rec["alpha_d"] = alpha(A.ndim)
    _emit(rec, args.format, out)
    return EXIT_OK


def cmd_flipset(args, out):
    A, P = _load(args)
    if A.ndim == 1:
        F = deletion_set_1d(A, P)
    else:
        F = deletion_procedure_nd(A, P).flips
    if len(find_occurrences(apply_flips(A, F), P)):
        raise RuntimeError("flip set did not remove every copy")
    text = io.flipset_to_json(F)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    _emit({"size": len(F), "verified": True, "out": args.out or None,
           **({} if args.out else {"flips": [[list(c), v] for c, v in F]})}, args.format, out)
    return EXIT_OK


def cmd_test(args, out):
    A, P = _load(args)
    seed = sampler.resolve_seed(args.seed)
    cls = classify(P)
    if cls.kind is Kind.NOT_REMOVABLE and A.ndim == 1:
        v = sampler.tolerant_test_almost_homo_1d(A, P, args.eps2, c=args.c, seed=seed)
    else:
        v = sampler.tolerant_test_1d(A, P, args.eps1, args.eps2, seed=seed, force=args.force)
    _emit({"verdict": "accept" if v.accept else "reject", **v.to_record()}, args.format, out)
    return EXIT_OK if v.accept else EXIT_REJECT


def cmd_approx_nd(args, out):
    A, P = _load(args)
    seed = sampler.resolve_seed(args.seed)
    rep = sampler.approx_distance_nd(A, P, tau=args.tau, delta=args.delta, seed=seed, force=args.force)
    _emit({"seed": seed, **rep.to_record()}, args.format, out)
    return EXIT_OK


def cmd_test_nd(args, out):
    A, P = _load(args)
    seed = sampler.resolve_seed(args.seed)
    v = sampler.tolerant_test_nd(A, P, args.eps, args.tau, seed=seed, scale=args.scale, force=args.force)
    _emit({"verdict": "accept" if v.accept else "reject", **v.to_record()}, args.format, out)
    return EXIT_OK if v.accept else EXIT_REJECT


def cmd_bench(args, out):
    if args.kind == "lowerbound":
        seed = sampler.resolve_seed(args.seed)
        res = harness.lb_experiment(args.n, args.k, args.eps, trials=args.trials, seed=seed)
        _emit({"seed": seed, "frequency": res.frequency, "hits": res.hits, "trials": res.trials, "size": res.size,
               "union_bound": res.union_bound, "exact": res.exact, "within_bound": res.within_bound()},
              args.format, out)
    else:
        sizes = [int(float(s)) for s in args.sizes.split(",")]
        res = harness.scaling_bench(args.op, sizes, args.reps)
        _emit(res, args.format, out)
    return EXIT_OK


def cmd_gen(args, out):
    seed = sampler.resolve_seed(args.seed)
    if args.kind == "planted":
        if not args.pattern:
            raise UsageError("gen planted needs --pattern")
        P = io.parse_pattern(args.pattern, args.alphabet)
        if P.ndim == 1:
            A, dv = harness.gen_planted_1d(args.n, P, args.copies, seed)
            rec = {"seed": seed, "n": A.size, "distance": dv.absolute, "relative": _frac(dv.relative),
                   "exact": dv.exact}
        else:
            A, h = harness.gen_planted_nd((args.n,) * P.ndim, P, args.copies, seed)
            rec = {"seed": seed, "dims": list(A.dims), "hitting": h, "relative_hitting": h / A.size}
    else:
        spec = harness.LbInstanceSpec(args.n, args.k, args.eps, args.lb_kind)
        A = harness.lb_sample(spec, seed)
        rec = {"seed": seed, "n": spec.n, "kind": spec.kind, "ones": int(A.values.sum())}
    if args.out:
        io.write_array(A, args.out)
        rec["out"] = args.out
    else:
        rec["array"] = io.serialize_array(A)
    _emit(rec, args.format, out)
    return EXIT_OK


def cmd_oracle(args, out):
    if args.kind == "removability":
        P = _load(args, pattern_only=True)
        if P.ndim == 1 and P.sigma == 2:
            res = oracle.exhaustive_removability_1d(P, max_k=args.max_k)
        else:
            seed = sampler.resolve_seed(args.seed)
            res = oracle.randomized_removability_nd(P, trials=args.trials, seed=seed)
        rec = {"passed": res.passed, "checked": res.checked}
        if not (P.ndim == 1 and P.sigma == 2):
            rec["seed"] = seed
        if res.counterexample is not None:
            rec["counterexample"] = res.counterexample.values.tolist()
            rec["template_start"] = list(res.template_start)
        _emit(rec, args.format, out)
        return EXIT_OK
    A, P = _load(args)
    if args.kind == "hitting":
        if A.size > args.max_cells:
            raise BudgetExceeded(f"{A.size} cells exceed the oracle budget of {args.max_cells}")
        _emit({"hitting": oracle.brute_force_hitting_number(A, P)}, args.format, out)
    else:
        if A.size > args.max_cells:
            raise BudgetExceeded(f"{A.size} cells exceed the oracle budget of {args.max_cells}")
        _emit({"deletion": oracle.brute_force_deletion_number(A, P, r_max=args.r_max)}, args.format, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--alphabet", type=int, default=None, help="alphabet size for raw digit inputs")

    io_args = argparse.ArgumentParser(add_help=False, parents=[common])
    io_args.add_argument("--input", required=True)
    io_args.add_argument("--pattern", required=True)
    io_args.add_argument("--force", action="store_true", help="proceed for patterns of unestablished removability")

    parser = argparse.ArgumentParser(prog="patfree", description="Distance to pattern freeness: exact, bounds and testers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common])
    p.add_argument("--pattern", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("distance", parents=[io_args])
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--approx", action="store_true")
    p.add_argument("--tau", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("flipset", parents=[io_args])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_flipset)

    p = sub.add_parser("test", parents=[io_args])
    p.add_argument("--eps1", type=float, required=True)
    p.add_argument("--eps2", type=float, required=True)
    p.add_argument("--c", type=float, default=1.0, help="tolerance constant for almost homogeneous patterns")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("approx-nd", parents=[io_args])
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_approx_nd)

    p = sub.add_parser("test-nd", parents=[io_args])
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--scale", choices=("hitting", "deletion"), default="hitting")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_test_nd)

    p = sub.add_parser("bench", parents=[common])
    p.add_argument("kind", choices=("lowerbound", "scaling"))
    p.add_argument("--n", type=int, default=20_000)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--eps", type=float, default=0.005)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--op", default="distance_exact_1d", choices=("distance_exact_1d", "almost_homo", "approx_1d"))
    p.add_argument("--sizes", default="1e6,2e6")
    p.add_argument("--reps", type=int, default=7)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", parents=[common])
    p.add_argument("kind", choices=("planted", "lb"))
    p.add_argument("--pattern", default=None)
    p.add_argument("--n", type=int, required=True, help="length, or side length for d-D patterns")
    p.add_argument("--copies", type=int, default=0)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--eps", type=float, default=0.005)
    p.add_argument("--lb-kind", choices=("B", "C"), default="C")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", parents=[common])
    p.add_argument("kind", choices=("deletion", "hitting", "removability"))
    p.add_argument("--input", default=None)
    p.add_argument("--pattern", required=True)
    p.add_argument("--r-max", type=int, default=4)
    p.add_argument("--max-cells", type=int, default=36)
    p.add_argument("--max-k", type=int, default=5)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "oracle" and args.kind != "removability" and not args.input:
        parser.error("oracle deletion/hitting needs --input")
    try:
        return args.func(args, out)
    except (BudgetExceeded, NoSafeFlip, IterationCapExceeded) as exc:
        sys.stderr.write(f"patfree: {exc}\n")
        return EXIT_BUDGET
    except (UsageError, OSError) as exc:
        sys.stderr.write(f"patfree: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
