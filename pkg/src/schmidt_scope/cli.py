"""Command-line front end.

stdout carries the JSON report (or generated file); stderr carries human
diagnostics. Exit codes: 0 inconclusive, 1 entanglement detected / NotEB,
2 usage or parse error, 3 validation error, 4 numeric failure.
"""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import channels, criteria, schmidt, states
from .errors import (DimensionError, FilterNotContractiveError, InvalidDensityError, NegativeRadicandError,
                     NotTracePreservingError, NumericError)
from .fileio import (FileFormatError, channel_doc, dumps, input_record, loads, parse_channel, parse_matrix,
                     parse_state, read_text, state_doc)
from .linalg import BipartiteState, Tolerances

EXIT_INCONCLUSIVE = 0
EXIT_DETECTED = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NUMERIC = 4

TOL_ENV = "SCHMIDT_SCOPE_TOL"
CRITERIA_NAMES = ("rc", "sympoly[:l=L][:norank]", "theta:THETA", "zhang", "filter:FILE_LA,FILE_LB[:raw]")


class UsageError(Exception):
    pass


def _tolerances(args) -> Tolerances:
    if args.tol is not None:
        return Tolerances.uniform(args.tol)
    env = os.environ.get(TOL_ENV)
    if env:
        try:
            return Tolerances.uniform(float(env))
        except ValueError:
            raise UsageError(f"{TOL_ENV}={env!r} is not a number") from None
    return Tolerances()


def _load_state(path: str, args):
    raw = read_text(path)
    doc = loads(raw, path)
    tols = _tolerances(args)
    parsed = parse_state(doc, validate=not args.no_validate, tols=tols)
    if isinstance(parsed, BipartiteState):
        parsed = (parsed.rho, parsed.na, parsed.nb)
    return input_record(path, raw), tols, parsed


def _spectrum_section(rho, na, nb, rank_tol: float) -> dict:
    sp = schmidt.schmidt_spectrum(rho, rank_tol, na, nb)
    mu = sp.as_array()
    return {
        "dims": [na, nb],
        "spectrum": list(sp.coeffs),
        "rank": sp.rank,
        "rank_sensitivity": {"rank_tol": rank_tol, "smallest_retained": sp.smallest_retained,
                             "largest_discarded": sp.largest_discarded},
        "purity": float(np.vdot(rho, rho).real),
        "sum_mu_squared": float(np.sum(mu ** 2)),
        "sym_polys": list(schmidt.symmetric_polynomials(sp).values),
    }


def _summary(reports) -> str:
    return "EntanglementDetected" if any(r.detected for r in reports) else "Inconclusive"


# -- criterion list parsing --------------------------------------------------

def parse_criteria(text: str):
    """Parse ``rc,sympoly:l=4,theta:0.0,zhang,filter:a.json,b.json`` into specs."""
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    specs = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        name, _, rest = tok.partition(":")
        if name == "rc" and not rest:
            specs.append(("rc", {}))
        elif name == "zhang" and not rest:
            specs.append(("zhang", {}))
        elif name == "theta":
            try:
                specs.append(("theta", {"theta": float(rest)}))
            except ValueError:
                raise UsageError(f"theta needs a numeric angle, got {tok!r}") from None
        elif name == "sympoly":
            opts = {"l": None, "use_rank": True}
            for part in filter(None, rest.split(":")):
                if part.startswith("l="):
                    try:
                        opts["l"] = int(part[2:])
                    except ValueError:
                        raise UsageError(f"bad degree in {tok!r}") from None
                elif part in ("norank", "rank=false"):
                    opts["use_rank"] = False
                elif part in ("rank", "rank=true"):
                    opts["use_rank"] = True
                else:
                    raise UsageError(f"unknown sympoly option {part!r}")
            specs.append(("sympoly", opts))
        elif name == "filter":
            if not rest or i + 1 >= len(tokens):
                raise UsageError("filter needs two matrix files: filter:FILE_LA,FILE_LB")
            i += 1
            file_b, _, flag = tokens[i].partition(":")
            if flag not in ("", "raw"):
                raise UsageError(f"unknown filter option {flag!r}")
            specs.append(("filter", {"file_a": rest, "file_b": file_b, "normalize": flag != "raw"}))
        else:
            raise UsageError(f"unknown criterion {tok!r}; valid: {', '.join(CRITERIA_NAMES)}")
        i += 1
    if not specs:
        raise UsageError(f"no criteria given; valid: {', '.join(CRITERIA_NAMES)}")
    return specs


def _load_filter(path: str) -> np.ndarray:
    return parse_matrix(loads(read_text(path), path))


def run_criteria(specs, rho, na, nb, decision_tol: float, rank_tol: float):
    # criteria take a state object; with --no-validate the matrix is wrapped unchecked
    state = BipartiteState(rho, na, nb)
    reports = []
    d = min(na * na, nb * nb)
    for name, opts in specs:
        if name == "rc":
            reports.append(criteria.rc_check(state, decision_tol))
        elif name == "zhang":
            reports.append(criteria.zhang_check(state, decision_tol))
        elif name == "theta":
            reports.append(criteria.theta_check(state, opts["theta"], decision_tol))
        elif name == "sympoly":
            degrees = [opts["l"]] if opts["l"] is not None else range(1, d + 1)
            for l in degrees:
                if not 1 <= l <= d:
                    raise UsageError(f"sympoly degree l={l} outside 1..{d}")
                reports.append(criteria.sympoly_check(state, l, opts["use_rank"], rank_tol, decision_tol))
        elif name == "filter":
            la = _load_filter(opts["file_a"])
            lb = _load_filter(opts["file_b"])
            rep = criteria.filter_check(state, la, lb, opts["normalize"], decision_tol)
            rep.params.update(file_a=opts["file_a"], file_b=opts["file_b"])
            reports.append(rep)
    return reports


# -- commands ----------------------------------------------------------------

def cmd_schmidt(args) -> int:
    record, tols, (rho, na, nb) = _load_state(args.path, args)
    report = {"input": record, "tolerances": _tol_dict(tols, args)}
    report.update(_spectrum_section(rho, na, nb, args.rank_tol))
    report["criteria"] = []
    report["summary"] = "Inconclusive"
    _emit(report)
    return EXIT_INCONCLUSIVE


def _tol_dict(tols: Tolerances, args) -> dict:
    out = dict(tols.as_dict(), rank=args.rank_tol)
    if hasattr(args, "decision_tol"):
        out["decision"] = args.decision_tol
    return out


def _check_one(path: str, specs, args) -> dict:
    record, tols, (rho, na, nb) = _load_state(path, args)
    report = {"input": record, "tolerances": _tol_dict(tols, args)}
    report.update(_spectrum_section(rho, na, nb, args.rank_tol))
    reps = run_criteria(specs, rho, na, nb, args.decision_tol, args.rank_tol)
    report["criteria"] = [r.to_dict() for r in reps]
    report["summary"] = _summary(reps)
    return report


def _guarded(fn, *a):
    """Run fn, mapping library errors to (exit_code, message)."""
    try:
        return fn(*a), EXIT_INCONCLUSIVE, None
    except (FileFormatError, UsageError, FileNotFoundError, IsADirectoryError) as exc:
        return None, EXIT_USAGE, str(exc)
    except (InvalidDensityError, NotTracePreservingError, FilterNotContractiveError,
            NegativeRadicandError) as exc:
        return None, EXIT_VALIDATION, str(exc)
    except DimensionError as exc:
        return None, EXIT_USAGE, str(exc)
    except (NumericError, np.linalg.LinAlgError, FloatingPointError) as exc:
        return None, EXIT_NUMERIC, str(exc)
    except ValueError as exc:
        return None, EXIT_USAGE, str(exc)


def cmd_check(args) -> int:
    specs = parse_criteria(args.criteria)
    if args.batch:
        files = sorted(str(p) for p in Path(args.batch).glob("*.json"))
        if not files:
            raise UsageError(f"no *.json files in {args.batch}")
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(lambda f: _guarded(_check_one, f, specs, args), files))
        entries = []
        codes = []
        for f, (rep, code, msg) in zip(files, results):
            if rep is None:
                entries.append({"input": {"path": f}, "error": msg, "exit_code": code})
                print(f"{f}: {msg}", file=sys.stderr)
                codes.append(code)
            else:
                entries.append(rep)
                codes.append(EXIT_DETECTED if rep["summary"] == "EntanglementDetected" else EXIT_INCONCLUSIVE)
        detected = any(e.get("summary") == "EntanglementDetected" for e in entries)
        _emit({"reports": entries, "summary": "EntanglementDetected" if detected else "Inconclusive"})
        errors = [c for c in codes if c >= EXIT_USAGE]
        if errors:
            return max(errors)
        return EXIT_DETECTED if detected else EXIT_INCONCLUSIVE
    if not args.path:
        raise UsageError("check needs a state file (or '-' for stdin, or --batch DIR)")
    report = _check_one(args.path, specs, args)
    _emit(report)
    return EXIT_DETECTED if report["summary"] == "EntanglementDetected" else EXIT_INCONCLUSIVE


def cmd_channel(args) -> int:
    if args.eb_check is None and args.choi is None:
        raise UsageError("channel needs --eb-check L and/or --choi OUT")
    raw = read_text(args.path)
    tol = args.tol if args.tol is not None else _tolerances(args).trace
    ch = parse_channel(loads(raw, args.path), tol)
    code = EXIT_INCONCLUSIVE
    if args.choi is not None:
        _write(args.choi, dumps(state_doc(channels.choi_state(ch))))
    if args.eb_check is not None:
        d = min(ch.in_dim ** 2, ch.out_dim ** 2)
        if not 1 <= args.eb_check <= d:
            raise UsageError(f"--eb-check degree {args.eb_check} outside 1..{d}")
        rep = channels.eb_check(ch, args.eb_check, not args.no_rank, args.rank_tol, args.decision_tol)
        sv = schmidt.spectrum_from_values(
            np.linalg.svd(channels.channel_coeff_matrix(ch), compute_uv=False), d, args.rank_tol)
        report = {
            "input": input_record(args.path, raw),
            "tolerances": {"kraus": tol, "rank": args.rank_tol, "decision": args.decision_tol},
            "channel": {"in_dim": ch.in_dim, "out_dim": ch.out_dim, "n_kraus": len(ch.kraus)},
            "coeff_singular_values": list(sv.coeffs),
            "rank": sv.rank,
            "sym_polys": list(schmidt.symmetric_polynomials(sv).values),
            "criteria": [rep.to_dict()],
            "summary": rep.verdict.value,
        }
        _emit(report)
        code = EXIT_DETECTED if rep.detected else EXIT_INCONCLUSIVE
    return code


def _gen_doc(args) -> dict:
    kind = args.kind
    if kind == "bell":
        return state_doc(states.max_entangled(args.n))
    if kind == "werner":
        return state_doc(states.werner(args.p))
    if kind == "isotropic":
        return state_doc(states.isotropic(args.f, args.n))
    if kind == "random":
        return state_doc(states.random_state(args.na, args.nb, args.seed))
    if kind == "pure":
        return state_doc(states.random_pure(args.na, args.nb, args.seed))
    if kind == "product":
        stream = states.SeededStream(args.seed)
        local = states._density if args.mixed else states._pure
        return state_doc(states.product_state(local(stream, args.na), local(stream, args.nb)))
    if kind == "separable":
        return state_doc(states.random_separable(args.na, args.nb, args.seed, args.terms))
    if kind == "channel-depolarizing":
        return channel_doc(channels.depolarizing_channel(args.n, args.p))
    if kind == "channel-identity":
        return channel_doc(channels.identity_channel(args.n))
    if kind == "channel-random":
        return channel_doc(channels.random_channel(args.nb, args.na, args.seed))
    raise UsageError(f"unknown kind {kind!r}")


GEN_KINDS = ("bell", "werner", "isotropic", "random", "pure", "product", "separable",
             "channel-depolarizing", "channel-identity", "channel-random")


def cmd_gen(args) -> int:
    _write(args.output, dumps(_gen_doc(args)))
    return EXIT_INCONCLUSIVE


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _emit(report: dict) -> None:
    sys.stdout.write(dumps(report))


# -- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="schmidt-scope",
                                     description="Schmidt spectra and separability criteria for bipartite states.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, decision=True):
        p.add_argument("--tol", type=float, default=None,
                       help=f"validation tolerance (hermiticity, trace, positivity); overrides ${TOL_ENV}")
        p.add_argument("--rank-tol", type=float, default=schmidt.DEFAULT_RANK_TOL,
                       help="relative cutoff for the Schmidt rank")
        if decision:
            p.add_argument("--decision-tol", type=float, default=criteria.DEFAULT_DECISION_TOL,
                           help="margin required before reporting detection")

    p = sub.add_parser("schmidt", help="Schmidt spectrum, rank, purity and symmetric polynomials")
    p.add_argument("path", help="state file, or '-' for stdin")
    p.add_argument("--no-validate", action="store_true", help="accept operators that are not density matrices")
    common(p, decision=False)
    p.set_defaults(func=cmd_schmidt)

    p = sub.add_parser("check", help="run separability criteria on a state file")
    p.add_argument("path", nargs="?", help="state file, or '-' for stdin")
    p.add_argument("--criteria", default="rc", help="comma-separated list: " + ", ".join(CRITERIA_NAMES))
    p.add_argument("--batch", metavar="DIR", help="evaluate every *.json in DIR (ordered by filename)")
    p.add_argument("--jobs", type=int, default=4, help="worker threads for --batch")
    p.add_argument("--no-validate", action="store_true")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("channel", help="entanglement-breaking checks and Choi states for a channel file")
    p.add_argument("path")
    p.add_argument("--eb-check", type=int, metavar="L", help="degree of the symmetric-polynomial bound")
    p.add_argument("--no-rank", action="store_true", help="use the rank-free bound C(d,l)(nb/d)^l")
    p.add_argument("--choi", metavar="OUT", help="write the Choi state as a state file ('-' for stdout)")
    common(p)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("gen", help="generate a state or channel file")
    p.add_argument("kind", choices=GEN_KINDS)
    p.add_argument("--p", type=float, default=0.5, help="mixing / noise parameter (werner, channel-depolarizing)")
    p.add_argument("--f", type=float, default=1.0, help="fidelity (isotropic)")
    p.add_argument("--n", type=int, default=2, help="local dimension (bell, isotropic, channels)")
    p.add_argument("--na", type=int, default=2)
    p.add_argument("--nb", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--terms", type=int, default=10, help="product terms (separable)")
    p.add_argument("--mixed", action="store_true", help="mixed local factors (product)")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_INCONCLUSIVE
    result, code, msg = _guarded(args.func, args)
    if msg is not None:
        print(f"schmidt-scope {args.command}: {msg}", file=sys.stderr)
        return code
    return result


if __name__ == "__main__":
    sys.exit(main())
