"""Command-line interface.

Exit codes: 0 certified (or success), 2 no witness certified,
1 input error or unsupported size, 3 soundness violation found.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from . import oracle, qp
from . import witnesses as W
from .exact import fraction_str
from .states import Spectrum, SymmetricState, spectrum_r

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CERTIFIED = 2
EXIT_VIOLATION = 3

INPUT_TOL = 1e-9

EPILOG = """exit codes:
  0  success; for 'check', at least one witness certified
  1  input error or unsupported size
  2  'check' only: no witness certified
  3  'verify' only: a certified spectrum produced an NPT state
"""


class InputError(Exception):
    pass


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- input parsing ------------------------------------------------------------


def _parse_number(tok: str):
    tok = tok.strip()
    try:
        return float(Fraction(tok))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse number {tok!r}") from exc


def load_spectrum(args) -> Spectrum:
    if (args.lambdas is None) == (args.input is None):
        raise InputError("give exactly one of --lambdas or --input")
    if args.lambdas is not None:
        values = [_parse_number(t) for t in args.lambdas.split(",") if t.strip()]
    else:
        try:
            with open(args.input) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read {args.input}: {exc}") from exc
        if "matrix" in data:
            try:
                values = list(SymmetricState.from_json(data).eigenvalues())
            except (ValueError, KeyError) as exc:
                raise InputError(str(exc)) from exc
        elif "lambdas" in data:
            values = [float(v) for v in data["lambdas"]]
        else:
            raise InputError("input JSON needs 'lambdas' or 'matrix'")
    values = np.array(values, dtype=float)
    n = args.n if args.n is not None else values.size - 1
    if values.size != n + 1:
        raise InputError(f"--n {n} needs {n + 1} eigenvalues, got {values.size}")
    if n < 2:
        raise InputError("N must be >= 2")
    if args.normalize:
        if values.min() < 0 or values.sum() <= 0:
            raise InputError("cannot normalize a spectrum with negative entries")
        values = values / values.sum()
    try:
        return Spectrum(n, values, tol=INPUT_TOL)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def parse_y(mode: str, N: int) -> W.YParams:
    if mode == "zero":
        y = W.YParams.zero(N)
    elif mode == "extremal":
        y = W.extremal_y(N)
    else:
        try:
            vals = [Fraction(t.strip()) for t in mode.split(",")]
            y = W.YParams.from_list(N, vals)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad --y value: {exc}") from exc
    bad = y.violations()
    if bad:
        L, mu, val = bad[0]
        raise InputError(f"inadmissible y: row L={L}, mu={mu} gives {float(val):.6g} < 0")
    return y


# -- commands -----------------------------------------------------------------


def cmd_check(args) -> int:
    s = load_spectrum(args)
    y = parse_y(args.y, s.n_qubits)
    verdicts = W.check_all(s, y, tol=args.tol_solver, seed=args.seed)
    if args.trace:
        res = qp.fw_minimize(qp.build_plb(s, y), tol=args.tol_solver, seed=args.seed, record_trace=True)
        qp.write_trace(res, args.trace)
    any_cert = any(v.certified for v in verdicts)
    if args.format == "csv":
        text = _csv(["witness", "certified", "margin"], [[v.witness_id, int(v.certified), _fmt(v.margin)] for v in verdicts])
    else:
        text = _dump_json(
            {
                "n_qubits": s.n_qubits,
                "lambdas": [float(x) for x in s.lambdas],
                "r": spectrum_r(s),
                "y": y.to_json(),
                "certified": any_cert,
                "verdicts": [v.to_json() for v in verdicts],
            }
        )
    _emit(text, args.output)
    return EXIT_OK if any_cert else EXIT_NOT_CERTIFIED


def cmd_radii(args) -> int:
    if not 2 <= args.n_min <= args.n_max:
        raise InputError("need 2 <= --n-min <= --n-max")
    Ns = list(range(args.n_min, args.n_max + 1))

    def row(N):
        return W.radii_row(N, ghz_max=args.ghz_max, use_enumeration=N <= args.enumerate_max)

    with ThreadPoolExecutor(oracle.thread_count()) as ex:
        rows = list(ex.map(row, Ns))
    if args.n_max > W.POLYTOPE_MAX_N:
        print(
            f"note: S1 radii for N > {W.POLYTOPE_MAX_N} use vertex candidates that are not checked by enumeration",
            file=sys.stderr,
        )
    if args.format == "json":
        text = _dump_json(rows)
    else:
        text = _csv(W.RADII_COLUMNS, [[_fmt(r[c]) for c in W.RADII_COLUMNS] for r in rows])
    _emit(text, args.output)
    return EXIT_OK


def cmd_polytope(args) -> int:
    if args.n is None:
        raise InputError("--n is required")
    geo = W.s1_polytope(args.n)
    data = geo.to_json()
    data["w0_bound"] = fraction_str(W.w0_bound(args.n))
    _emit(_dump_json(data), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    if not 2 <= args.n_min <= args.n_max <= 6:
        raise InputError("verify supports 2 <= --n-min <= --n-max <= 6")
    rep = oracle.soundness_sweep(
        range(args.n_min, args.n_max + 1),
        n_spectra=args.spectra,
        n_unitaries=args.unitaries,
        seed=args.seed,
        fault=args.inject_fault,
    )
    comp = oracle.completeness_n2(args.completeness_samples, seed=args.seed)
    out = {"soundness": rep.to_json(), "completeness_n2": comp}
    _emit(_dump_json(out), args.output)
    if rep.violations or comp["unsound"]:
        sys.stderr.write(f"soundness violation: {json.dumps(rep.violations[:1])}\n")
        return EXIT_VIOLATION
    return EXIT_OK


def chamber_grid(N: int, resolution: int) -> np.ndarray:
    """Barycentric grid over the sorted-spectrum chamber.

    Chamber corners are uniform spectra on the first ``k`` entries, ``k = 1..N+1``.
    """
    d = N + 1
    corners = np.array([[1.0 / k if i < k else 0.0 for i in range(d)] for k in range(1, d + 1)])
    pts = []
    for combo in combinations_with_replacement(range(d), resolution):
        w = np.bincount(combo, minlength=d) / resolution
        pts.append(w @ corners)
    return np.array(pts)


def _scan_point(lam, N, y, tol):
    s = Spectrum(N, lam, tol=1e-9)
    row = [
        W.w0_check(s).certified,
        W.w1_check(s).certified,
        W.w2_check(s, y, tol=tol).certified,
        W.w3_check(s).certified,
    ]
    if N == 2:
        row.append(oracle.exact_sas_n2(s))
    return [float(x) for x in s.lambdas], [int(b) for b in row]


def cmd_scan(args) -> int:
    N = args.n
    if N not in (2, 3):
        raise InputError("scan supports --n 2 or 3")
    if args.resolution < 1:
        raise InputError("--resolution must be positive")
    y = parse_y(args.y, N)
    pts = chamber_grid(N, args.resolution)
    with ThreadPoolExecutor(oracle.thread_count()) as ex:
        rows = list(ex.map(lambda p: _scan_point(p, N, y, args.tol_solver), pts))
    header = [f"lambda_{i}" for i in range(N + 1)] + ["w0", "w1", "w2", "w3"] + (["exact_n2"] if N == 2 else [])
    _emit(_csv(header, [[_fmt(x) for x in lam] + flags for lam, flags in rows]), args.output)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sas-witness",
        description="Spectral certificates of absolute separability for symmetric qubit states.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=("json", "csv"), default_fmt="json"):
        sp.add_argument("--output", help="write to this file instead of stdout")
        sp.add_argument("--format", choices=fmt, default=default_fmt)
        sp.add_argument("--seed", type=int, default=0)

    c = sub.add_parser("check", help="run all witnesses on one spectrum", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    c.add_argument("--n", type=int)
    c.add_argument("--lambdas", help="comma-separated eigenvalues, e.g. 0.5,0.3,0.2")
    c.add_argument("--input", help="JSON file with 'lambdas' (spectrum) or 'matrix' (state)")
    c.add_argument("--y", default="extremal", help="zero | extremal | comma-separated y_L for L > N/2")
    c.add_argument("--tol-solver", type=float, default=1e-9)
    c.add_argument("--normalize", action="store_true", help="rescale the spectrum to unit sum")
    c.add_argument("--trace", help="write the W2 solver trace as CSV")
    common(c)
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("radii", help="table of characteristic radii")
    r.add_argument("--n-min", type=int, default=2)
    r.add_argument("--n-max", type=int, default=10)
    r.add_argument("--ghz-max", type=int, default=oracle.GHZ_MAX_N)
    r.add_argument("--enumerate-max", type=int, default=5,
                   help="cross-check vertex radii against full enumeration up to this N")
    common(r, default_fmt="csv")
    r.set_defaults(func=cmd_radii)

    g = sub.add_parser("polytope", help="faces, vertices and radii of S1 (2 <= N <= 6)")
    g.add_argument("--n", type=int)
    common(g, fmt=("json",))
    g.set_defaults(func=cmd_polytope)

    v = sub.add_parser("verify", help="PPT soundness sweep and N=2 completeness statistics", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    v.add_argument("--n-min", type=int, default=2)
    v.add_argument("--n-max", type=int, default=4)
    v.add_argument("--spectra", type=int, default=1000)
    v.add_argument("--unitaries", type=int, default=50)
    v.add_argument("--completeness-samples", type=int, default=2000)
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    common(v, fmt=("json",))
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scan", help="witness verdicts on a grid over the sorted-spectrum chamber")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--resolution", type=int, default=50)
    s.add_argument("--y", default="extremal")
    s.add_argument("--tol-solver", type=float, default=1e-9)
    common(s, fmt=("csv",), default_fmt="csv")
    s.set_defaults(func=cmd_scan)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except W.UnsupportedError as exc:
        sys.stderr.write(f"unsupported: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
