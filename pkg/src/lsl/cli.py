"""``lsl``: command-line front end.

Exit codes: 0 success, 1 verification violation, 2 usage or malformed input,
3 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any

import numpy as np

from . import __version__
from .classify import (
    classify,
    classify_distribution,
    ratio_search,
    slice_probe,
    tail_probe,
    truncate_tail_support,
)
from .distributions import (
    Dist,
    PsiSet,
    SpecialKind,
    WDist,
    coupling_overlap,
    fmt_prob,
    int_to_bits,
    load_distribution,
    marginal,
    max_event_gap,
    special,
    special_weights,
    symmetrize,
    tv_distance,
    uniform_symmetric,
    uniform_symmetric_weights,
    weight_marginal,
)
from .engine import output_distribution, weight_distribution
from .hypergraph import DepHypergraph, conditional_independence_check, find_independent_neighborhoods
from .lemmas import SUITES, run_suite
from .lemmas.convolution import IntPMF
from .lemmas.density import DensityInstance, check_density_lemma, check_density_theorem
from .lemmas.observables import continuity_report, kolmogorov_parity_report
from .lemmas.suites import density_lemma_sweep, density_theorem_sweep
from .localfn import (
    RNG_ALGORITHM,
    LocalFn,
    LocalFnFormatError,
    ResourceLimit,
    anf_parity,
    canonical,
    evaluate_bits,
    evens_with_flips,
    kwise_check,
    mixture_evens_odds,
    random_localfn,
    sample,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers


def _read_json(path: str) -> Any:
    try:
        with (sys.stdin if path == "-" else open(path)) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def _load_fn(path: str) -> LocalFn:
    obj = _read_json(path)
    try:
        return LocalFn.from_json(obj)
    except LocalFnFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_any(path: str, mode: str):
    """A distribution file, or a LocalFn file whose exact output distribution is used."""
    obj = _read_json(path)
    if isinstance(obj, dict) and "outputs" in obj:
        try:
            f = LocalFn.from_json(obj)
        except LocalFnFormatError as exc:
            raise UsageError(f"{path}: {exc}") from None
        p = output_distribution(f)
    else:
        try:
            p = load_distribution(obj)
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"{path}: not a distribution: {exc}") from None
    return p.to_float() if mode == "float" else p


def _parse_psi(text: str, n: int) -> PsiSet:
    try:
        members = [int(v) for v in text.replace(",", " ").split()]
        return PsiSet(n, members)
    except ValueError as exc:
        raise UsageError(f"bad Psi {text!r}: {exc}") from None


def _target(spec: str, n: int, weights: bool):
    if spec.startswith("psi:"):
        psi = _parse_psi(spec[4:], n)
        return uniform_symmetric_weights(psi) if weights else uniform_symmetric(psi)
    try:
        kind = SpecialKind.parse(spec)
    except (KeyError, ValueError):
        raise UsageError(f"unknown target {spec!r}") from None
    return special_weights(kind, n) if weights else special(kind, n)


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for this command")


def _render(v):
    if isinstance(v, Fraction):
        return fmt_prob(v)
    if isinstance(v, dict):
        return {str(k): _render(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_render(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


# ---------------------------------------------------------------------------
# subcommands; each returns (result dict, exit code)


def cmd_dist(args):
    _need(args, "input")
    p = _load_any(args.input, args.mode)
    res: dict[str, Any] = {"n": p.n, "kind": "weights" if isinstance(p, WDist) else "strings"}
    if args.against:
        q = _target(args.against, p.n, isinstance(p, WDist))
        if args.mode == "float":
            q = q.to_float()
        res["against"] = args.against
        res["tv"] = tv_distance(p, q)
        if isinstance(p, Dist):
            res["max_event_gap"] = max_event_gap(p, q)
            res["coupling_overlap"] = coupling_overlap(p, q)
    op = args.op
    if op == "symmetrize":
        res["result"] = symmetrize(p).to_json()
    elif op == "weights":
        w = p if isinstance(p, WDist) else weight_marginal(p)
        res["result"] = w.to_json()
        res["rows"] = [{"weight": k, "mass": fmt_prob(v), "mass_float": float(v)} for k, v in enumerate(w.pmf)]
    elif op == "marginal":
        _need(args, "coords")
        coords = [int(c) for c in args.coords.split(",")]
        res["result"] = marginal(p, coords).to_json()
    elif op is not None:
        raise UsageError(f"unknown dist op {op!r}")
    if not args.against and op is None:
        raise UsageError("dist needs --against or --op")
    return res, EXIT_OK


def cmd_fn(args):
    _need(args, "input")
    f = _load_fn(args.input)
    res: dict[str, Any] = {"m": f.m, "n": f.n, "d": f.declared_d, "locality": f.locality}
    op = args.op or "dist"
    if op == "evaluate":
        _need(args, "x")
        if len(args.x) != f.m or set(args.x) - {"0", "1"}:
            raise UsageError(f"--x must be a {f.m}-bit string")
        res["x"], res["y"] = args.x, evaluate_bits(f, args.x)
    elif op == "dist":
        res["distribution"] = output_distribution(f, args.engine).to_json()
    elif op == "weights":
        w = weight_distribution(f, args.engine)
        res["distribution"] = w.to_json()
        res["rows"] = [{"weight": k, "mass": fmt_prob(v), "mass_float": float(v)} for k, v in enumerate(w.pmf)]
    elif op == "sample":
        # shards stay fixed so --threads never changes the draws
        xs = sample(f, args.seed, args.count)
        res["samples"] = [int_to_bits(x, f.n) for x in xs]
    elif op == "anf":
        poly = anf_parity(f)
        res["parity_anf"] = repr(poly)
        res["degree"] = poly.degree
    elif op == "kwise":
        _need(args, "k")
        rep = kwise_check(f, args.k)
        res["kwise"] = rep.to_json()
        return res, EXIT_OK if rep.passed else EXIT_VIOLATION
    else:
        raise UsageError(f"unknown fn op {op!r}")
    return res, EXIT_OK


def cmd_make(args):
    _need(args, "n")
    if args.remark == "flips":
        _need(args, "c")
        if not 1 <= args.c <= args.n:
            raise UsageError("--c must be in 1..n")
        f = evens_with_flips(args.n, args.c)
    elif args.remark == "mixture":
        if args.n < 2:
            raise UsageError("mixture needs n >= 2")
        f = mixture_evens_odds(args.n)
    elif args.remark:
        raise UsageError(f"unknown remark construction {args.remark!r}")
    elif args.kind == "random":
        _need(args, "d")
        m = args.m if args.m is not None else 2 * args.n
        f = random_localfn(args.n, m, args.d, np.random.default_rng(args.seed))
    elif args.kind:
        try:
            f = canonical(SpecialKind.parse(args.kind), args.n)
        except (KeyError, ValueError):
            raise UsageError(f"unknown kind {args.kind!r}") from None
    else:
        raise UsageError("make needs --kind or --remark")
    return f.to_json(), EXIT_OK


def cmd_classify(args):
    _need(args, "input")
    obj = _read_json(args.input)
    psi = None
    if isinstance(obj, dict) and "outputs" in obj:
        f = _load_fn(args.input)
        if args.psi:
            psi = _parse_psi(args.psi, f.n)
        rep = classify(f, psi=psi, weight_level=args.weight_level)
    else:
        p = _load_any(args.input, "exact")
        if args.psi:
            psi = _parse_psi(args.psi, p.n)
        rep = classify_distribution(p, psi=psi, symmetric=True if args.weight_level else None)
    res = rep.to_json()
    res["tv_float"] = float(rep.eps_special)
    return res, EXIT_OK


def cmd_search(args):
    _need(args, "n", "d")
    res = ratio_search(args.n, args.d, args.trials, args.seed, m=args.m)
    return res, EXIT_OK


def cmd_decompose(args):
    _need(args, "input", "t")
    f = _load_fn(args.input)
    g = DepHypergraph.from_localfn(f)
    sel = find_independent_neighborhoods(g, args.t, args.budget)
    res = {"selection": sel.to_json(), "max_degree": g.max_degree()}
    if sel.failure:
        return res, EXIT_VIOLATION
    chk = conditional_independence_check(f, sel, args.samples, args.seed)
    res["independence"] = chk.to_json()
    return res, EXIT_OK if chk.passed else EXIT_VIOLATION


def _suite_worker(job):
    name, params = job
    return name, run_suite(name, **params).to_json()


def cmd_verify(args):
    params = {"n_max": args.n_max, "trials": args.trials, "seed": args.seed, "r_max": args.r_max}
    names = list(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in SUITES:
            raise UsageError(f"unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
    jobs = [(name, params) for name in names]
    if args.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            done = dict(pool.map(_suite_worker, jobs))
    else:
        done = dict(map(_suite_worker, jobs))
    reports = [done[name] for name in names]  # fixed order regardless of completion order
    failed = any(r["status"] == "fail" for r in reports)
    res = reports[0] if len(reports) == 1 else {"suites": reports}
    return res, EXIT_VIOLATION if failed else EXIT_OK


def _pmf_list(raw) -> list[IntPMF]:
    out = []
    for k, item in enumerate(raw):
        try:
            if isinstance(item, dict):
                out.append(IntPMF.from_dict({int(v): Fraction(m) for v, m in item.items()}))
            else:
                out.append(IntPMF.from_masses([Fraction(m) for m in item]))
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"pmfs[{k}]: {exc}") from None
    return out


def cmd_llt(args):
    if not args.input:
        reps = [density_lemma_sweep(args.trials or 50, args.seed), density_theorem_sweep(args.seed)]
        res = {"suites": [r.to_json() for r in reps]}
        return res, EXIT_VIOLATION if any(r.outcome == "fail" for r in reps) else EXIT_OK
    obj = _read_json(args.input)
    deltas = [int(v) for v in args.deltas.split(",")] if args.deltas else None
    try:
        if obj.get("kind", "theorem") == "lemma":
            rep = check_density_lemma(_pmf_list(obj["ys"]), int(obj["phi"]), Fraction(obj["alpha"]),
                                      [int(v) for v in obj["u"]], args.delta_max)
        else:
            inst = DensityInstance(int(obj["t"]), tuple(_pmf_list(obj["pmfs"])), frozenset(obj.get("Phi", [])))
            rep = check_density_theorem(inst, args.delta_max, deltas)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{args.input}: missing or bad field {exc}") from None
    except ValueError as exc:
        raise UsageError(f"{args.input}: {exc}") from None
    return rep.to_json(), EXIT_VIOLATION if rep.outcome == "fail" else EXIT_OK


def cmd_probe(args):
    kind = args.probe
    if kind == "truncate":
        _need(args, "psi", "n")
        return truncate_tail_support(_parse_psi(args.psi, args.n)).to_json(), EXIT_OK
    _need(args, "input")
    if kind == "kolmogorov":
        obj = _read_json(args.input)
        if "outputs" in obj:
            w = weight_distribution(_load_fn(args.input))
        else:
            p = _load_any(args.input, "exact")
            w = p if isinstance(p, WDist) else weight_marginal(p)
        return kolmogorov_parity_report(w), EXIT_OK
    f = _load_fn(args.input)
    if kind == "slice":
        _need(args, "k")
        return slice_probe(f, args.k), EXIT_OK
    if kind == "tail":
        _need(args, "psi")
        return tail_probe(f, _parse_psi(args.psi, f.n)), EXIT_OK
    if kind == "continuity":
        deltas = [int(v) for v in (args.deltas or "2").split(",")]
        return continuity_report(f, deltas), EXIT_OK
    raise UsageError(f"unknown probe {kind!r}")


COMMANDS = {
    "dist": cmd_dist,
    "fn": cmd_fn,
    "make": cmd_make,
    "classify": cmd_classify,
    "search": cmd_search,
    "decompose": cmd_decompose,
    "verify": cmd_verify,
    "llt": cmd_llt,
    "probe": cmd_probe,
}


# ---------------------------------------------------------------------------
# argument parsing and output


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("LSL_THREADS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="input file (JSON); '-' for stdin")
    common.add_argument("--against", help="zeros|ones|zerones|evens|odds|all|psi:<list>")
    common.add_argument("--n", type=int)
    common.add_argument("--m", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--c", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--t", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mode", choices=["exact", "float"], default="exact")
    common.add_argument("--threads", type=int, default=_default_threads())
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", help="write the report here (atomically) instead of stdout")

    parser = argparse.ArgumentParser(prog="lsl", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lsl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", parents=[common], help="distances and transforms of distributions")
    p.add_argument("--op", choices=["symmetrize", "weights", "marginal"])
    p.add_argument("--coords", help="comma-separated coordinates for --op marginal")

    p = sub.add_parser("fn", parents=[common], help="evaluate, analyze or sample a LocalFn file")
    p.add_argument("--op", choices=["evaluate", "dist", "weights", "sample", "anf", "kwise"])
    p.add_argument("--x", help="input bit string for --op evaluate")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--engine", choices=["auto", "naive", "dp"], default="auto")

    p = sub.add_parser("make", parents=[common], help="emit a sampler as a LocalFn file")
    p.add_argument("--kind", help="zeros|ones|zerones|evens|odds|all|random")
    p.add_argument("--remark", choices=["flips", "mixture"])

    p = sub.add_parser("classify", parents=[common], help="nearest special and best-fitting Psi")
    p.add_argument("--psi", help="use this Psi instead of searching")
    p.add_argument("--weight-level", action="store_true", help="assert symmetry; work with weights only")

    p = sub.add_parser("search", parents=[common], help="ratio search over random local functions")
    p.add_argument("--trials", type=int, default=200)

    p = sub.add_parser("decompose", parents=[common], help="independent neighborhoods and their check")
    p.add_argument("--budget", type=int, default=0, help="edge-removal budget")
    p.add_argument("--samples", type=int, default=10, help="subcubes to check")

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", help=f"all, {', '.join(SUITES)}")
    p.add_argument("--n-max", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--r-max", type=int)

    p = sub.add_parser("llt", parents=[common], help="density comparison checks")
    p.add_argument("--delta-max", type=int)
    p.add_argument("--deltas", help="comma-separated explicit deltas")
    p.add_argument("--trials", type=int)

    p = sub.add_parser("probe", parents=[common], help="report-only probes")
    p.add_argument("probe", choices=["slice", "tail", "continuity", "kolmogorov", "truncate"])
    p.add_argument("--psi")
    p.add_argument("--deltas")
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("out",)}


def _to_csv(result: dict) -> str:
    rows = result.get("rows") or result.get("details", {}).get("rows")
    if not rows:
        rows = [{k: v for k, v in result.items() if not isinstance(v, (dict, list))}]
    buf = io.StringIO()
    fields = list(rows[0].keys())
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow(_render(r))
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if not out:
        sys.stdout.write(text)
        return
    folder = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".lsl-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.threads < 1:
        print("lsl: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        result, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"lsl {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimit as exc:
        print(f"lsl {args.command}: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, KeyError) as exc:
        print(f"lsl {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    result = _render(result)
    if args.command == "make":
        text = json.dumps(result) + "\n"  # a bare LocalFn file
    elif args.format == "csv":
        text = _to_csv(result)
    else:
        report = {
            "command": args.command,
            "config": _config(args),
            "rng": RNG_ALGORITHM,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
            "result": result,
        }
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    _emit(text, args.out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
