"""OHLCV ingestion and a scan for band-like volatility/volume structure.

The model predicts that volatility rises with trading volume from one band
to the next while falling with volume inside a band. Given bar data we form
(volume, realized variance) points over non-overlapping windows and look
for exactly that sawtooth: a positive overall rank correlation together
with several volume-contiguous clusters whose internal correlation is
negative.

Everything in :func:`band_signature_scan` depends on volumes only through
their ranks, so any monotone map from volume to model energy gives the
same report.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from datetime import datetime

import numpy as np
from scipy import stats

from .errors import ValidationError

HEADER = ("timestamp", "open", "high", "low", "close", "volume")
LIMIT_SLACK = 1e-6
MIN_SCAN_POINTS = 10
MIN_CLUSTER = 3
MAX_CLUSTERS = 40


@dataclass(frozen=True)
class Bar:
    timestamp: datetime
    open: float
    high: float
    low: float
    close: float
    volume: float


@dataclass(frozen=True)
class VolVolPoint:
    window_id: int
    sigma2: float
    volume: float
    limit_hit: bool
    start: datetime | None = None
    end: datetime | None = None


class BarFormatError(ValidationError):
    def __init__(self, row, message):
        super().__init__(f"row {row}", message)
        self.row = row


def _number(text, row, name):
    try:
        v = float(text)
    except ValueError:
        raise BarFormatError(row, f"{name} is not a number: {text!r}") from None
    if not math.isfinite(v):
        raise BarFormatError(row, f"{name} is not finite: {text!r}")
    return v


def parse_bars(stream) -> list:
    """Read bar CSV (``timestamp,open,high,low,close,volume``) into sorted bars.

    ``stream`` may be bytes, str, or a binary/text file object. Rows are
    numbered from 1 for the header line.
    """
    if hasattr(stream, "read"):
        stream = stream.read()
    if isinstance(stream, bytes):
        stream = stream.decode("utf-8")
    reader = csv.reader(io.StringIO(stream))
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("header", "empty input") from None
    if tuple(h.strip() for h in header) != HEADER:
        raise ValidationError("header", f"expected {','.join(HEADER)}, got {','.join(header)}")
    bars = []
    for row, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != len(HEADER):
            raise BarFormatError(row, f"expected {len(HEADER)} fields, got {len(rec)}")
        try:
            ts = datetime.fromisoformat(rec[0].strip())
        except ValueError:
            raise BarFormatError(row, f"bad timestamp {rec[0]!r}") from None
        if ts.tzinfo is None:
            raise BarFormatError(row, f"timestamp {rec[0]!r} lacks a UTC offset")
        o, h, lo, c, v = (_number(rec[i], row, HEADER[i]) for i in range(1, 6))
        if min(o, h, lo, c) <= 0:
            raise BarFormatError(row, "prices must be positive")
        if v < 0:
            raise BarFormatError(row, "volume must be non-negative")
        if h < lo:
            raise BarFormatError(row, f"high {h} below low {lo}")
        if not (lo <= min(o, c) and max(o, c) <= h):
            raise BarFormatError(row, "open/close outside [low, high]")
        bars.append((ts, row, Bar(ts, o, h, lo, c, v)))
    bars.sort(key=lambda t: t[0])
    for (t0, r0, _), (t1, r1, _) in zip(bars[:-1], bars[1:]):
        if t0 == t1:
            raise BarFormatError(r1, f"duplicate timestamp {t1.isoformat()} (also row {r0})")
    return [b for _, _, b in bars]


def _fmt(x):
    return np.format_float_positional(x, trim="-")


def format_bars(bars) -> str:
    """Serialize bars to the CSV format read by :func:`parse_bars`."""
    out = io.StringIO()
    out.write(",".join(HEADER) + "\n")
    for b in bars:
        out.write(",".join([b.timestamp.isoformat(), _fmt(b.open), _fmt(b.high), _fmt(b.low),
                            _fmt(b.close), _fmt(b.volume)]) + "\n")
    return out.getvalue()


def _previous_daily_close(bars):
    """For each bar, the last close of the previous trading date (None on day one)."""
    prev = []
    last_date = None
    last_close_prev_day = None
    day_close = None
    for b in bars:
        d = b.timestamp.date()
        if d != last_date:
            if last_date is not None:
                last_close_prev_day = day_close
            last_date = d
        prev.append(last_close_prev_day)
        day_close = b.close
    return prev


def realized_volvol(bars, window: int = 5, limit_fraction: float = 0.10) -> list:
    """Realized variance of log close and summed volume per non-overlapping window.

    A window is flagged ``limit_hit`` if any of its closes sits within
    ``1e-6`` of the daily limit relative to the previous day's close.
    """
    if window < 2:
        raise ValidationError("window", f"must be >= 2, got {window}")
    if not (0 < limit_fraction < 1):
        raise ValidationError("limit_fraction", f"must lie in (0, 1), got {limit_fraction}")
    n_win = len(bars) // window
    if n_win == 0:
        warnings.warn(f"{len(bars)} bars is less than one window of {window}", RuntimeWarning, stacklevel=2)
        return []
    closes = np.array([b.close for b in bars])
    logc = np.log(closes)
    vol = np.array([b.volume for b in bars])
    prev = _previous_daily_close(bars)
    hit = np.array([p is not None and abs(c / p - 1.0) >= limit_fraction - LIMIT_SLACK
                    for c, p in zip(closes, prev)])
    out = []
    for w in range(n_win):
        sl = slice(w * window, (w + 1) * window)
        out.append(VolVolPoint(window_id=w, sigma2=float(np.var(logc[sl])), volume=float(vol[sl].sum()),
                               limit_hit=bool(hit[sl].any()), start=bars[sl.start].timestamp,
                               end=bars[sl.stop - 1].timestamp))
    return out


@dataclass(frozen=True)
class Cluster:
    volume_lo: float
    volume_hi: float
    corr: float | None
    n: int


@dataclass
class ScanReport:
    global_corr: float | None
    clusters: list = field(default_factory=list)
    band_like: bool = False
    max_sigma2_volume_rank: int | None = None
    status: str = "ok"

    def to_dict(self):
        d = asdict(self)
        d["clusters"] = [asdict(c) for c in self.clusters]
        return d

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _spearman(x, y):
    if len(x) < 2 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    r = stats.spearmanr(x, y).statistic
    return float(r) if np.isfinite(r) else None


def _segment_costs(y, min_size):
    """SSE of a straight-line fit of ``y`` against position for every slice ``[i, j)``.

    Entry ``[i, j]`` of the returned ``(n+1, n+1)`` matrix; slices shorter
    than ``min_size`` cost ``inf``.
    """
    n = len(y)
    x = np.arange(n, dtype=float)
    y = y - y.mean()
    c = [np.concatenate([[0.0], np.cumsum(v)]) for v in (np.ones(n), x, x * x, y, x * y, y * y)]
    s0, sx, sxx, sy, sxy, syy = (ci[None, :] - ci[:, None] for ci in c)
    with np.errstate(invalid="ignore", divide="ignore"):
        vx = sxx - sx * sx / s0
        vy = syy - sy * sy / s0
        cxy = sxy - sx * sy / s0
        fit = np.where(vx > 0, cxy * cxy / np.where(vx > 0, vx, 1.0), 0.0)
        cost = np.maximum(vy - fit, 0.0)
    cost[~(s0 >= min_size)] = np.inf
    return cost


def segment_sequence(y, min_size=MIN_CLUSTER, max_segments=MAX_CLUSTERS):
    """Piecewise-linear segmentation of ``y`` with the segment count picked by BIC.

    Returns the sorted segment start indices (the first is 0). Memory grows
    as ``len(y)**2``.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    k_max = max(1, min(max_segments, n // min_size))
    cost = _segment_costs(y, min_size)
    dp = np.full((k_max + 1, n + 1), np.inf)
    arg = np.zeros((k_max + 1, n + 1), dtype=int)
    dp[0, 0] = 0.0
    for k in range(1, k_max + 1):
        tot = dp[k - 1][:, None] + cost
        arg[k] = np.argmin(tot, axis=0)
        dp[k] = tot[arg[k], np.arange(n + 1)]
    floor = 1e-12 * max(float(np.var(y)), 1e-300) * n
    best_k, best = 1, np.inf
    for k in range(1, k_max + 1):
        if not np.isfinite(dp[k, n]):
            continue
        # level, slope and breakpoint per segment
        bic = n * math.log((dp[k, n] + floor) / n) + 3 * k * math.log(n)
        if bic < best - 1e-9:
            best_k, best = k, bic
    starts = []
    j = n
    for k in range(best_k, 0, -1):
        j = int(arg[k, j])
        starts.append(j)
    return sorted(starts)


def band_signature_scan(points) -> ScanReport:
    """Look for inter-band positive / intra-band negative volatility-volume structure.

    ``points`` is a sequence of :class:`VolVolPoint` or ``(volume, sigma2)``
    pairs.
    """
    vol, s2 = [], []
    for p in points:
        if isinstance(p, VolVolPoint):
            vol.append(p.volume)
            s2.append(p.sigma2)
        else:
            vol.append(float(p[0]))
            s2.append(float(p[1]))
    n = len(vol)
    if n < MIN_SCAN_POINTS:
        raise ValidationError("points", f"need at least {MIN_SCAN_POINTS} points, got {n}")
    vol = np.asarray(vol, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    if np.ptp(vol) == 0:
        return ScanReport(global_corr=None, status="inconclusive")
    ranks = stats.rankdata(vol)
    global_corr = _spearman(vol, s2)
    order = np.lexsort((np.arange(n), ranks))
    starts = segment_sequence(s2[order])
    bounds = starts + [n]
    clusters = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        idx = order[a:b]
        clusters.append(Cluster(volume_lo=float(vol[idx].min()), volume_hi=float(vol[idx].max()),
                                corr=_spearman(ranks[idx], s2[idx]), n=int(b - a)))
    negative = sum(1 for c in clusters if c.corr is not None and c.corr < 0)
    band_like = global_corr is not None and global_corr > 0 and negative >= 2
    imax = int(np.argmax(s2))
    return ScanReport(global_corr=global_corr, clusters=clusters, band_like=band_like,
                      max_sigma2_volume_rank=int(stats.rankdata(vol, method="min")[imax]))
