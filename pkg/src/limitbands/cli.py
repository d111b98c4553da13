"""Command-line front end: plot-ready CSV/JSON tables.

    python -m limitbands bands --alpha 2.55 --n-bands 8
    python -m limitbands dispersion --alpha 2.55 --n-bands 7 --n-k 65
    python -m limitbands observables --alpha 2.55 --n-k 64 --format json
    python -m limitbands approx --alpha 3.5
    python -m limitbands market --input bars.csv --window 5

Exit status: 0 success, 1 invalid input, 2 numerical failure. Without
``--output`` the table goes to ``$LIMITBANDS_OUTPUT_DIR/<command>.<ext>``
when that variable is set, otherwise to stdout.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import approx, bands, market, observables
from .errors import NumericalError, ValidationError
from .model import DEFAULT_ALPHA, DEFAULT_LIMIT, make_params

OUTPUT_ENV = "LIMITBANDS_OUTPUT_DIR"
# without --eps-max/--n-bands, tabulate bands starting below this many alpha^2
DEFAULT_SPAN = 10.0
P_LIMIT_NOTE = "p_limit = |phi(d/2)|^2 * d (edge density times cell width; 1 for a uniform density)"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def _cell_text(v):
    v = _num(v)
    if v is None:
        return ""
    return v if isinstance(v, str) else repr(v)


def _write_table(columns, rows, fmt, meta):
    if fmt == "json":
        doc = dict(meta)
        doc["columns"] = list(columns)
        doc["rows"] = [[_num(v) for v in r] for r in rows]
        return json.dumps(doc, indent=1) + "\n"
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for r in rows:
        out.write(",".join(_cell_text(v) for v in r) + "\n")
    return out.getvalue()


def _params(args):
    return make_params(args.limit, args.alpha)


def _bands(args, p):
    if args.n_bands is not None and args.eps_max is not None:
        raise ValidationError("n_bands", "give --eps-max or --n-bands, not both")
    if args.n_bands is not None:
        return bands.find_bands(p, n_max=args.n_bands)
    eps_max = args.eps_max if args.eps_max is not None else DEFAULT_SPAN * p.alpha ** 2
    return bands.find_bands(p, eps_max=eps_max)


def _meta(args, p, command):
    return {"command": command, "alpha": p.alpha, "limit_fraction": p.limit_fraction, "d_log": p.d_log,
            "eps_top": p.eps_top}


def cmd_bands(args):
    p = _params(args)
    bs = _bands(args, p)
    cols = ["index", "eps_lo[hbar_omega]", "eps_hi[hbar_omega]", "width[hbar_omega]", "node_edge", "resolved"]
    rows = [(b.index, b.eps_lo, b.eps_hi, b.width,
             "lo" if b.lo_kind.endswith("node") else "hi", b.resolved) for b in bs]
    return cols, rows, _meta(args, p, "bands")


def cmd_dispersion(args):
    p = _params(args)
    bs = _bands(args, p)
    if args.band is not None:
        bs = [b for b in bs if b.index == args.band]
        if not bs:
            raise ValidationError("band", f"band {args.band} not among the computed bands")
    cols = ["band", "k_d[rad]", "eps[hbar_omega]"]
    rows = [(b.index, k, e) for b in bs for k, e in bands.dispersion(p, b, args.n_k)]
    return cols, rows, _meta(args, p, "dispersion")


def cmd_observables(args):
    p = _params(args)
    bs = _bands(args, p)
    table = observables.observable_table(p, bs, args.n_k)
    cols = ["eps[hbar_omega]", "sigma2[d^2]", "p_limit[1]", "band", "k_d[rad]", "sigma2_harmonic[d^2]",
            "sigma2[logret^2]"]
    d2 = p.d_log ** 2
    rows = [(e, s, pl, n, k, float(observables.harmonic_sigma2(p, e)), s * d2) for e, s, pl, n, k in table]
    meta = _meta(args, p, "observables")
    meta["p_limit_definition"] = P_LIMIT_NOTE
    return cols, rows, meta


def cmd_approx(args):
    p = _params(args)
    bs = _bands(args, p)
    gaps = {s: (lo, hi) for s, lo, hi in bands.band_gaps(bs)}
    cols = ["band", "exact_center[hbar_omega]", "exact_width[hbar_omega]",
            "tb_center[hbar_omega]", "tb_width[hbar_omega]", "tb_center_relerr[1]", "tb_width_relerr[1]",
            "fe_center[hbar_omega]", "fe_center_relerr[1]",
            "gap_below_exact[hbar_omega]", "gap_below_fe[hbar_omega]", "gap_below_relerr[1]"]
    rows = []
    for b in bs:
        tb_c = tb_w = tb_ce = tb_we = None
        if b.index + 0.5 <= p.eps_top:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                tb = approx.tight_binding_band(p, b.index)
            tb_c, tb_w = tb.center, tb.width
            tb_ce = abs(tb_c - b.center) / b.center
            tb_we = abs(tb_w - b.width) / b.width if b.width > 0 else None
        # zone-centre of the band in the extended scheme
        e0, e2, _ = approx.free_electron_correction(p, (b.index + 0.5) * math.pi)
        exact_mid = float(bands.solve_dispersion(p, b, [math.pi / 2])[0])
        fe = e0 + e2
        g_ex = g_fe = g_err = None
        if b.index in gaps:
            lo, hi = gaps[b.index]
            g_ex = hi - lo
            g_fe = approx.gap_at_boundary(p, b.index)
            g_err = abs(g_ex - g_fe) / g_ex
        rows.append((b.index, b.center, b.width, tb_c, tb_w, tb_ce, tb_we, fe, abs(fe - exact_mid) / exact_mid,
                     g_ex, g_fe, g_err))
    meta = _meta(args, p, "approx")
    meta["fe_center_note"] = "free-electron energy compared with the exact energy at k*d = pi/2"
    return cols, rows, meta


def cmd_market(args):
    raw = Path(args.input).read_bytes()
    bars_ = market.parse_bars(raw)
    pts = market.realized_volvol(bars_, window=args.window, limit_fraction=args.limit)
    if args.points:
        with open(args.points, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("window_id,start,end,volume,sigma2[logret^2],limit_hit\n")
            for q in pts:
                fh.write(f"{q.window_id},{q.start.isoformat()},{q.end.isoformat()},{q.volume!r},{q.sigma2!r},"
                         f"{int(q.limit_hit)}\n")
    report = market.band_signature_scan(pts)
    return report.to_json(indent=1) + "\n"


def build_parser():
    ap = _Parser(prog="limitbands", description="Band structure of the periodic harmonic price-limit model.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, table=True):
        sp.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                        help=f"cell half-width in oscillator units (default {DEFAULT_ALPHA})")
        sp.add_argument("--limit", type=float, default=DEFAULT_LIMIT,
                        help=f"daily price-limit fraction L (default {DEFAULT_LIMIT})")
        sp.add_argument("--output", "-o", help="output file (default stdout or $%s)" % OUTPUT_ENV)
        if table:
            sp.add_argument("--eps-max", type=float, help="all bands starting below this energy [hbar_omega] (default 10 alpha^2)")
            sp.add_argument("--n-bands", type=int, help="number of lowest bands instead of --eps-max")
            sp.add_argument("--format", choices=("csv", "json"), default="csv")
            sp.add_argument("--edge-xtol", type=float, default=bands.EDGE_XTOL,
                            help="relative tolerance of band-edge refinement")

    for name, fn, helptext in (("bands", cmd_bands, "band edges and widths"),
                               ("dispersion", cmd_dispersion, "E(k) on each band"),
                               ("observables", cmd_observables, "volatility and limit-hit probability per state"),
                               ("approx", cmd_approx, "exact vs tight-binding vs free-electron")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        if name in ("dispersion", "observables"):
            sp.add_argument("--n-k", type=int, default=64, help="k points on [0, pi] per band")
        if name == "dispersion":
            sp.add_argument("--band", type=int, help="only this band index")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("market", help="bar CSV -> windowed volatility/volume -> band signature report")
    common(sp, table=False)
    sp.add_argument("--input", "-i", required=True, help="bar CSV: timestamp,open,high,low,close,volume")
    sp.add_argument("--window", type=int, default=5, help="bars per non-overlapping window (default 5)")
    sp.add_argument("--points", help="also write the windowed points as CSV here")
    sp.set_defaults(func=cmd_market, format="json")
    return ap


def _destination(args):
    if args.output:
        return Path(args.output)
    outdir = os.environ.get(OUTPUT_ENV)
    if outdir:
        return Path(outdir) / f"{args.command}.{args.format}"
    return None


def run(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    old_xtol = bands.EDGE_XTOL
    try:
        if getattr(args, "edge_xtol", None):
            bands.EDGE_XTOL = args.edge_xtol
        result = args.func(args)
        text = result if isinstance(result, str) else _write_table(*result[:2], args.format, result[2])
    except (ValidationError, ValueError, OSError) as exc:
        print(f"limitbands: error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"limitbands: numerical failure: {exc}", file=sys.stderr)
        return 2
    finally:
        bands.EDGE_XTOL = old_xtol
    dest = _destination(args)
    if dest is None:
        sys.stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


def main():
    sys.exit(run())
