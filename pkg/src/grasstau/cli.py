"""Command-line front end: ``grasstau <command> [options]``.

Exit status is 0 when a run completes and its checks pass, 1 when a check
fails, and 2 for bad input.  A verdict such as "not decomposable" is a
successful measurement, not a failure.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from . import sampling
from ._config import max_threads
from .decomp3 import decide_3term
from .exterior import Frame
from .kp_flow import (
    Generator,
    find_hbde_violation,
    hbde_terms,
    is_kn_faithful,
    rank_s_plus_minus,
    relative_residual,
    tau_shifted,
)
from .scalars import UnsupportedModeError, format_rational
from .serialize import (
    InputError,
    cm_from_json,
    dumps_line,
    frame_from_json,
    frame_to_json,
    generator_from_json,
    load_json,
    plucker_from_json,
    scalar_to_json,
    soliton_from_json,
    times_from_json,
)
from .special import (
    FieldSingularityError,
    GridSpec,
    cm_tau,
    cm_tau_shifted,
    dkp_tau,
    dkp_wronskian_tau,
    sample_field,
    soliton_rank,
    soliton_tau_batch,
    soliton_tau_shifted,
    wronskian_normalization,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class _Output:
    def __init__(self, path: str | None):
        self.path = path
        self.lines: list[str] = []

    def write(self, line: str) -> None:
        self.lines.append(line)

    def flush(self) -> None:
        text = "".join(line + "\n" for line in self.lines)
        if self.path:
            with open(self.path, "w", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _mode(args) -> bool | None:
    if args.exact:
        return True
    if args.float:
        return False
    return None


def _require(args, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise InputError(f"{args.command} needs {', '.join(missing)}")


def _load_generator(args) -> Generator:
    _require(args, "generator")
    return generator_from_json(load_json(args.generator), _mode(args))


def _load_frame(args, g: Generator | None = None) -> Frame | None:
    if args.frame is None:
        return None
    f = frame_from_json(load_json(args.frame), _mode(args))
    if g is not None and (f.n, f.k) != (g.n, g.k):
        raise InputError(f"frame is {f.n}x{f.k} but the generator needs {g.n}x{g.k}")
    return f


def _params(args) -> dict:
    if args.params is None:
        return {}
    obj = load_json(args.params)
    if not isinstance(obj, dict):
        raise InputError("--params must be a JSON object")
    return obj


def _trial_map(fn: Callable[[int], dict], count: int) -> list[dict]:
    """Run trials, possibly in parallel, returning results in trial order."""
    workers = min(max_threads(), max(count, 1))
    if workers <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def _residual_field(value, exact: bool):
    return format_rational(value) if exact else value


def _emit_records(out: _Output, records: Iterable[dict]) -> bool:
    ok = True
    for rec in records:
        out.write(dumps_line(rec))
        ok = ok and rec["pass"]
    return ok


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_verify_hbde(args, out: _Output) -> int:
    g = _load_generator(args)
    fixed = _load_frame(args, g)
    r = rank_s_plus_minus(g, args.tol)
    exact = g.exact and (fixed is None or fixed.exact)
    if _mode(args) is True and not exact:
        raise UnsupportedModeError("exact mode needs rational generator and frame")
    use_times = not exact or g.nilpotent

    def trial(i: int) -> dict:
        seed = sampling.derived_seed(args.seed, i)
        rng = np.random.default_rng(seed)
        frame = fixed if fixed is not None else sampling.frame(rng, g.n, g.k, exact)
        lams = sampling.distinct_values(rng, 4, exact)
        t = sampling.times(rng, 3, exact) if use_times else []
        terms = hbde_terms(lambda xs: tau_shifted(g, frame, t, xs), lams)
        if exact:
            res = terms[0] - terms[1] + terms[2]
            return {"seed": seed, "k": g.k, "n": g.n, "rank": r, "residual": format_rational(res), "pass": res == 0}
        rel = relative_residual(terms)
        return {"seed": seed, "k": g.k, "n": g.n, "rank": r, "residual": rel, "pass": rel <= args.tol}

    return EXIT_OK if _emit_records(out, _trial_map(trial, args.trials)) else EXIT_FAIL


def cmd_rank(args, out: _Output) -> int:
    g = _load_generator(args)
    out.write(str(rank_s_plus_minus(g, args.tol)))
    return EXIT_OK


def cmd_tau(args, out: _Output) -> int:
    g = _load_generator(args)
    _require(args, "frame")
    frame = _load_frame(args, g)
    p = _params(args)
    t = times_from_json(p.get("t", []), _mode(args))
    xs = times_from_json(p.get("xs", []), _mode(args))
    out.write(dumps_line({"tau": scalar_to_json(tau_shifted(g, frame, t, xs))}))
    return EXIT_OK


def cmd_violation_search(args, out: _Output) -> int:
    g = _load_generator(args)
    r = rank_s_plus_minus(g, args.tol)
    w = find_hbde_violation(g, args.seed, args.trials)
    if w is None:
        out.write(dumps_line({"rank": r, "witness": None}))
        return EXIT_OK if r <= 1 else EXIT_FAIL
    rec = {
        "rank": r,
        "witness": {
            "trial": w.trial,
            "frame": frame_to_json(w.frame),
            "lambda": [scalar_to_json(v) for v in w.lams],
            "residual": scalar_to_json(w.residual),
        },
    }
    out.write(dumps_line(rec))
    return EXIT_OK


def cmd_faithful(args, out: _Output) -> int:
    g = _load_generator(args)
    samples = args.samples
    verdict = is_kn_faithful(g, g.k, g.n, samples=samples, seed=args.seed)
    out.write(dumps_line({"k": g.k, "n": g.n, "faithful": verdict, "seed": args.seed}))
    return EXIT_OK


def _hbde_campaign(args, tau, exact: bool, rank_value: int, k: int, n: int) -> list[dict]:
    def trial(i: int) -> dict:
        seed = sampling.derived_seed(args.seed, i)
        rng = np.random.default_rng(seed)
        t = sampling.times(rng, 3, exact)
        while True:
            lams = sampling.distinct_values(rng, 4, exact)
            try:
                terms = hbde_terms(lambda xs: tau(t, xs), lams)
                break
            except ValueError:
                continue
        if exact:
            res = terms[0] - terms[1] + terms[2]
            return {"seed": seed, "k": k, "n": n, "rank": rank_value, "residual": format_rational(res), "pass": res == 0}
        rel = relative_residual(terms)
        return {"seed": seed, "k": k, "n": n, "rank": rank_value, "residual": rel, "pass": rel <= args.tol}

    return _trial_map(trial, args.trials)


def _write_field(args, out: _Output, tau, batch=None) -> int:
    spec = GridSpec.parse(args.grid)
    grid = sample_field(tau, spec, h=args.h, batch=batch)
    for line in grid.to_csv().splitlines():
        out.write(line)
    return EXIT_OK


def _soliton_data(args):
    _require(args, "params")
    return soliton_from_json(load_json(args.params))


def _cm_data(args):
    _require(args, "params")
    return cm_from_json(load_json(args.params), _mode(args))


def cmd_soliton(args, out: _Output) -> int:
    d = _soliton_data(args)
    if _mode(args) is True:
        raise UnsupportedModeError("soliton tau-functions are exponential; use the float path")
    if args.grid:
        return _write_field(args, out, None, batch=soliton_tau_batch(d))
    tol_rel = max(args.tol, 1e-8)
    args.tol = tol_rel
    records = _hbde_campaign(args, lambda t, xs: soliton_tau_shifted(d, t, xs), False, soliton_rank(d), d.n, 2 * d.n)
    return EXIT_OK if _emit_records(out, records) else EXIT_FAIL


def cmd_cm(args, out: _Output) -> int:
    d = _cm_data(args)
    if args.grid:
        return _write_field(args, out, lambda t: cm_tau(d, t))
    exact = d.exact and _mode(args) is not False
    if not exact:
        args.tol = max(args.tol, 1e-8)
    records = _hbde_campaign(args, lambda t, xs: cm_tau_shifted(d, t, xs), exact, 1, d.n, 2 * d.n)
    return EXIT_OK if _emit_records(out, records) else EXIT_FAIL


def cmd_dkp(args, out: _Output) -> int:
    g = _load_generator(args)
    _require(args, "frame")
    frame = _load_frame(args, g)
    p = _params(args)
    k = int(p.get("k", 1))
    if k < 0:
        raise InputError("the discrete variable k must be non-negative")
    t = times_from_json(p.get("t", []), _mode(args))
    tau = dkp_tau(g, frame, k, t)
    rec = {"k": k, "tau": scalar_to_json(tau)}
    ok = True
    try:
        raw = dkp_wronskian_tau(g, frame, k, t)
    except ValueError as exc:
        rec["wronskian"] = None
        rec["note"] = str(exc)
    else:
        scaled = wronskian_normalization(k) * raw
        rec["wronskian"] = scalar_to_json(raw)
        rec["normalization"] = format_rational(wronskian_normalization(k))
        if isinstance(tau, Fraction) and isinstance(scaled, Fraction):
            ok = scaled == tau
        else:
            ok = abs(complex(scaled) - complex(tau)) <= args.tol * max(1.0, abs(complex(tau)))
        rec["agree"] = ok
    out.write(dumps_line(rec))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_decomposable(args, out: _Output) -> int:
    _require(args, "point")
    pv = plucker_from_json(load_json(args.point), _mode(args))
    verdict = decide_3term(pv, args.trials, args.seed)
    out.write(dumps_line(verdict.to_json()))
    return EXIT_OK


def cmd_field(args, out: _Output) -> int:
    _require(args, "params", "grid")
    obj = load_json(args.params)
    if isinstance(obj, dict) and "X" in obj:
        d = cm_from_json(obj, False)
        return _write_field(args, out, lambda t: cm_tau(d, t))
    d = soliton_from_json(obj)
    return _write_field(args, out, None, batch=soliton_tau_batch(d))


COMMANDS = {
    "verify-hbde": (cmd_verify_hbde, "HBDE campaign over random frames and shifts"),
    "rank": (cmd_rank, "rank of the lower-left block S+-"),
    "tau": (cmd_tau, "evaluate tau at times t and Miwa shifts xs"),
    "violation-search": (cmd_violation_search, "search for an HBDE violation"),
    "faithful": (cmd_faithful, "sampled (k,n)-faithfulness test"),
    "soliton": (cmd_soliton, "soliton HBDE campaign, or field CSV with --grid"),
    "cm": (cmd_cm, "Calogero-Moser HBDE campaign, or field CSV with --grid"),
    "dkp": (cmd_dkp, "discrete KP tau and its Wronskian form"),
    "decomposable": (cmd_decomposable, "3-term decomposability verdict"),
    "field": (cmd_field, "sample u = 2 d^2/dx^2 log tau on a grid"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grasstau", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--generator", help="generator JSON (inline or path)")
        p.add_argument("--frame", help="frame JSON (inline or path)")
        p.add_argument("--point", help="Plücker vector JSON (inline or path)")
        p.add_argument("--params", help="command parameters JSON (inline or path)")
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--samples", type=int, default=None, help="faithfulness sample count")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--h", type=float, default=1e-3, help="field difference step")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--grid", help="x0:x1:dx,y0:y1:dy,t0:t1:dt")
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--exact", action="store_true", help="require exact rational arithmetic")
        mode.add_argument("--float", action="store_true", help="force complex double arithmetic")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.trials < 0:
        print("error: --trials must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    out = _Output(args.out)
    try:
        status = COMMANDS[args.command][0](args, out)
    except (InputError, UnsupportedModeError, FieldSingularityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out.flush()
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
