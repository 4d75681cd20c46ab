"""Band-structure engine: membership tests, spectrum scans, flat bands, gap closings.

Membership at one momentum is O(1): the bracket is linear in the two
quasimomentum weights, whose joint range over the torus attains its extrema
at the zone center and at theta1 = -theta2 = +-2*pi/3, so a momentum lies in
a continuous band exactly when the first kernel sits inside the strip
spanned by the three extremal combinations of the other two.

Scanning walks a momentum grid, refines every band edge by bisection, and
additionally detects bands narrower than the grid step wherever the first
kernel crosses the whole strip between two consecutive out-of-band probes
(the two strip boundaries are bisected independently).  Bands that collapse
exponentially with the cell size are found this way without any special
resolution requirements.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, root

from .kernels import (
    EXTREMAL_THETAS,
    GeometryError,
    LatticeSpec,
    Quasimomentum,
    SQRT3,
    kagome_equilateral_F,
    lambda_arrays,
    tri_bracket_neg,
    tri_bracket_pos,
    _fg_arrays,
    _lambda1_neg,
    _lambda1_pos,
    _lambda2_neg,
    _lambda2_pos,
    _lambda3_neg,
    _lambda3_pos,
)

#: Band edges are bisected until the bracket width drops below this,
#: relative to max(1, |k|).
EDGE_RTOL = 1.0e-10

#: Smallest momentum probed; bands verified to extend below are reported
#: as starting at zero.  Margins closer to zero than this are dominated by
#: floating-point cancellation.
X_FLOOR = 1.0e-6

#: Tolerance of the trigonometric criterion 2 cos(L/ell) + 1 = 0 locating
#: point-degenerate bands.
DEGENERATE_TRIG_TOL = 1.0e-9


class InternalConsistencyError(RuntimeError):
    """A scan violated a proven structural bound (signals a defect)."""


@dataclass(frozen=True)
class SpectralInterval:
    """One band [k_lo, k_hi] on the momentum axis (kappa on the negative side)."""

    k_lo: float
    k_hi: float
    side: str
    band_type: str = "continuous"  # continuous | flat | degenerate_point
    edge_theta_lo: tuple | None = None
    edge_theta_hi: tuple | None = None

    @property
    def energy_lo(self) -> float:
        return self.k_lo ** 2 if self.side == "positive" else -self.k_hi ** 2

    @property
    def energy_hi(self) -> float:
        return self.k_hi ** 2 if self.side == "positive" else -self.k_lo ** 2

    @property
    def width_k(self) -> float:
        return self.k_hi - self.k_lo

    @property
    def width_energy(self) -> float:
        return self.energy_hi - self.energy_lo


@dataclass(frozen=True)
class FlatBand:
    """Infinitely degenerate eigenvalue at fixed momentum."""

    k: float
    family: str
    multiplicity_note: str
    embedded: bool


@dataclass
class BandStructure:
    """Ordered scan result for one side of the spectrum."""

    spec: LatticeSpec
    side: str
    intervals: list
    scan_k_max: float
    resolution: float
    edge_tolerance: float = EDGE_RTOL

    @property
    def continuous(self) -> list:
        return [iv for iv in self.intervals if iv.band_type == "continuous"]

    @property
    def flat(self) -> list:
        return [iv for iv in self.intervals if iv.band_type != "continuous"]

    def csv_rows(self):
        """Rows matching the header side,band_index,type,k_lo,k_hi,E_lo,E_hi."""
        rows = []
        for i, iv in enumerate(self.intervals, start=1):
            rows.append((self.side, i, iv.band_type, iv.k_lo, iv.k_hi, iv.energy_lo, iv.energy_hi))
        return rows

    def to_dict(self):
        return {
            "spec": {"kind": self.spec.kind, "c": self.spec.c, "d": self.spec.d, "ell": self.spec.ell},
            "side": self.side,
            "scan_k_max": self.scan_k_max,
            "resolution": self.resolution,
            "edge_tolerance": self.edge_tolerance,
            "intervals": [
                {
                    "band_index": i,
                    "type": iv.band_type,
                    "k_lo": iv.k_lo,
                    "k_hi": iv.k_hi,
                    "E_lo": iv.energy_lo,
                    "E_hi": iv.energy_hi,
                    "edge_theta_lo": list(iv.edge_theta_lo) if iv.edge_theta_lo else None,
                    "edge_theta_hi": list(iv.edge_theta_hi) if iv.edge_theta_hi else None,
                }
                for i, iv in enumerate(self.intervals, start=1)
            ],
        }


@dataclass(frozen=True)
class SpectralThresholds:
    """Closed-form spectral-edge conditions at zero energy."""

    positive_starts_at_zero: bool
    negative_reaches_zero: bool


# --------------------------------------------------------------------------
# membership

def _thread_count() -> int:
    env = os.environ.get("QG_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _strip_components(x, side, spec: LatticeSpec):
    """(over_hi, under_lo) for scalar or array momentum.

    over_hi > 0 means the first kernel is above the admissible strip,
    under_lo > 0 below it; the momentum is in a band iff both are <= 0.
    Both components are continuous in x.
    """
    if spec.is_kagome:
        l1, l2, l3 = lambda_arrays(x, side, spec)
        v0 = 3.0 * l2
        vp = -1.5 * (l2 + SQRT3 * l3)
        vm = -1.5 * (l2 - SQRT3 * l3)
        hi = np.maximum(v0, np.maximum(vp, vm))
        lo = np.minimum(v0, np.minimum(vp, vm))
        return l1 - hi, lo - l1
    if side == "positive":
        b_hi = tri_bracket_pos(x, 3.0, spec)
        b_lo = tri_bracket_pos(x, -1.5, spec)
    else:
        b_hi = tri_bracket_neg(x, 3.0, spec)
        b_lo = tri_bracket_neg(x, -1.5, spec)
    # bracket is non-increasing in the weight: in band iff b_hi <= 0 <= b_lo
    return b_hi, -b_lo


def _strip_components_chunked(xs, side, spec: LatticeSpec):
    n = _thread_count()
    if n <= 1 or xs.size < 200_000:
        return _strip_components(xs, side, spec)
    chunks = np.array_split(xs, n)
    with ThreadPoolExecutor(max_workers=n) as pool:
        parts = list(pool.map(lambda ch: _strip_components(ch, side, spec), chunks))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _margin(x, side, spec: LatticeSpec):
    oh, ul = _strip_components(x, side, spec)
    return np.maximum(oh, ul)


def in_band(x, side, spec: LatticeSpec) -> bool:
    """Spectral-band membership of momentum x (energy x^2 or -x^2).

    Edges count as inside (spectra are closed sets).
    """
    if x <= 0.0:
        raise ValueError("momentum argument must be positive")
    return bool(_margin(float(x), side, spec) <= 0.0)


def bracket_theta_gradient(x, side, theta: Quasimomentum, spec: LatticeSpec):
    """Gradient of the kagome bracket in the quasimomentum angles.

    Factorizes so that it vanishes at the zone center and at
    theta1 = -theta2 = +-2*pi/3 for every momentum, which is what makes the
    three-point membership test exact.
    """
    l1, l2, l3 = lambda_arrays(x, side, spec)
    t1, t2 = theta.theta1, theta.theta2
    d1 = l2 * (math.sin(t1) + math.sin(t1 - t2)) - l3 * (math.cos(t1 - t2) - math.cos(t1))
    d2 = l2 * (math.sin(t2) - math.sin(t1 - t2)) - l3 * (math.cos(t2) - math.cos(t1 - t2))
    return d1, d2


# --------------------------------------------------------------------------
# flat bands

def _is_degenerate_length(length, ell) -> bool:
    return abs(2.0 * math.cos(length / ell) + 1.0) < DEGENERATE_TRIG_TOL


def _limit_membership(k, side, spec) -> bool:
    """Membership of the continuous spectrum in a punctured neighborhood.

    Used for momenta where the bracket vanishes identically in theta and
    the direct test is degenerate.
    """
    eps = 1.0e-6 * max(1.0, k)
    return in_band(k - eps, side, spec) or in_band(k + eps, side, spec)


def flat_bands(spec: LatticeSpec, k_max: float) -> list:
    """All positive-side flat bands with momentum <= k_max.

    Generic kagome carries one family per edge length (2 n pi / L for
    L in {d-c, c, d}); in the equilateral case they merge into n pi / c and
    an extra family appears at the zeros of 2 cos(kc) + 1.  The triangular
    lattice has the single family 2 n pi / d.  Point-degenerate bands sit at
    k = 1/ell whenever 2 cos(L/ell) + 1 = 0 for one of the lengths.
    """
    if k_max <= 0.0:
        raise ValueError("k_max must be positive")
    ell = spec.ell
    out = []

    def series(family, step_k, embedded_fn):
        n = 1
        while n * step_k <= k_max * (1.0 + 1e-15):
            k = n * step_k
            out.append(FlatBand(k=k, family=family, multiplicity_note=f"n={n}", embedded=embedded_fn(k)))
            n += 1

    if spec.kind == "kagome":
        member = lambda k: in_band(k, "positive", spec)
        series("b_family", 2.0 * math.pi / spec.b, member)
        series("c_family", 2.0 * math.pi / spec.c, member)
        series("d_family", 2.0 * math.pi / spec.d, member)
        degenerate = any(_is_degenerate_length(L, ell) for L in (spec.c, spec.b, spec.d))
    elif spec.kind == "equilateral_kagome":
        series("equilateral_merged", math.pi / spec.c, lambda k: False)
        n = 1
        while True:
            k = ((6 * n - 3) + (-1) ** (n + 1)) * math.pi / (6.0 * spec.c)
            if k > k_max * (1.0 + 1e-15):
                break
            out.append(FlatBand(k=k, family="david_star", multiplicity_note=f"n={n}",
                                embedded=_limit_membership(k, "positive", spec)))
            n += 1
        degenerate = _is_degenerate_length(spec.d, ell)
    elif spec.kind == "triangular":
        series("d_family", 2.0 * math.pi / spec.d, lambda k: False)
        degenerate = _is_degenerate_length(spec.d, ell)
    else:  # pragma: no cover
        raise GeometryError(f"unknown lattice kind {spec.kind!r}")

    k_point = 1.0 / ell
    if degenerate and k_point <= k_max:
        out.append(FlatBand(k=k_point, family="degenerate_point", multiplicity_note="k=1/ell",
                            embedded=_limit_membership(k_point, "positive", spec)))
    out.sort(key=lambda fb: (fb.k, fb.family))
    return out


def negative_flat_bands(spec: LatticeSpec) -> list:
    """Negative-side flat bands: only the equilateral lattice has one, at kappa = 1/ell."""
    if spec.kind == "equilateral_kagome":
        return [FlatBand(k=1.0 / spec.ell, family="equilateral_negative",
                         multiplicity_note="kappa=1/ell", embedded=False)]
    return []


# --------------------------------------------------------------------------
# scanning

def _bisect_vec(fn, lo, hi, rtol=EDGE_RTOL, max_iter=90):
    """Vectorized bisection of sign changes of fn between lo and hi arrays.

    Signs at lo and hi must differ elementwise.  Returns the point on the
    hi-sign side of the crossing (both converge to the same root within
    rtol).
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    f_lo = np.sign(fn(lo))
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        done = (mid <= np.minimum(lo, hi)) | (mid >= np.maximum(lo, hi))
        gap = np.abs(hi - lo)
        if np.all(done | (gap <= rtol * np.maximum(1.0, np.abs(mid)))):
            break
        f_mid = np.sign(fn(mid))
        take_lo = f_mid == f_lo
        lo = np.where(take_lo & ~done, mid, lo)
        hi = np.where(~take_lo & ~done, mid, hi)
    return hi


def _edge_theta(x, side, spec: LatticeSpec, upper_edge: bool):
    """Which extremal quasimomentum attains the strip boundary at an edge."""
    if spec.is_kagome:
        l1, l2, l3 = lambda_arrays(x, side, spec)
        vals = np.array([3.0 * l2, -1.5 * (l2 + SQRT3 * l3), -1.5 * (l2 - SQRT3 * l3)])
        target = vals.max() if upper_edge else vals.min()
        idx = int(np.argmin(np.abs(vals - target)))
        return EXTREMAL_THETAS[idx]
    # triangular: weight 3 at the zone center, -3/2 at the corners
    if side == "positive":
        b3 = tri_bracket_pos(x, 3.0, spec)
        bm = tri_bracket_pos(x, -1.5, spec)
    else:
        b3 = tri_bracket_neg(x, 3.0, spec)
        bm = tri_bracket_neg(x, -1.5, spec)
    return EXTREMAL_THETAS[0] if abs(b3) <= abs(bm) else EXTREMAL_THETAS[1]


def _negative_seeds(spec: LatticeSpec, kappa_max: float) -> list:
    """Interior points guaranteed (or expected) to lie inside negative bands."""
    ell = spec.ell
    inv = 1.0 / ell
    if spec.kind == "triangular":
        return [s for s in (inv / SQRT3, SQRT3 * inv) if s < kappa_max]
    if spec.kind == "equilateral_kagome":
        # zeros of the reduced condition F(kappa) = 0 bracket the flat point
        seeds = []
        f = lambda kp: float(kagome_equilateral_F(kp, spec))
        lo, hi = 1e-9 * inv, inv * (1.0 - 1e-9)
        if f(lo) * f(hi) < 0:
            seeds.append(brentq(f, lo, hi, xtol=1e-14))
        hi2 = 2.0 * inv
        while f(hi2) < 0 and hi2 < 64.0 * inv:
            hi2 *= 2.0
        if f(inv * (1.0 + 1e-9)) * f(hi2) < 0:
            seeds.append(brentq(f, inv * (1.0 + 1e-9), hi2, xtol=1e-14))
        return [s for s in seeds if s < kappa_max]
    seeds = [inv]  # -1/ell^2 always belongs to the kagome spectrum
    seeds.extend(r for r in kagome_collapse_roots(spec) if r < kappa_max)
    return seeds


def kagome_collapse_function(kappa, spec: LatticeSpec):
    """Leading coefficient of the large-cell negative spectral condition.

    Its roots (together with kappa = 1/ell) are the points the negative
    bands collapse to as the cell period grows; the function takes the
    values 9 at kappa = 0 and -12 e^(-2c/ell) at kappa = 1/ell, and grows
    to +infinity.
    """
    c, ell = spec.c, spec.ell
    x = (kappa * ell) ** 2
    return 4.0 * (np.exp(-kappa * c) + 1.0) * (x - 1.0) ** 2 + np.exp(-2.0 * kappa * c) * (x * x - 14.0 * x + 1.0)


def kagome_collapse_roots(spec: LatticeSpec) -> tuple:
    """The two roots of the collapse function, one on each side of 1/ell."""
    if not spec.is_kagome:
        raise GeometryError("collapse function is a kagome quantity")
    inv = 1.0 / spec.ell
    f = lambda kp: float(kagome_collapse_function(kp, spec))
    # certified sign brackets: f(0) = 9 > 0 > f(1/ell), f(+inf) = +inf
    lo_root = brentq(f, 1e-12 * inv, inv, xtol=1e-15, rtol=1e-15)
    hi = 2.0 * inv
    while f(hi) <= 0.0:
        hi *= 2.0
        if hi > 64.0 * inv:  # pragma: no cover
            raise InternalConsistencyError("upper collapse root escaped its bracket")
    hi_root = brentq(f, inv, hi, xtol=1e-15, rtol=1e-15)
    return lo_root, hi_root


def _scan_continuous(spec: LatticeSpec, side: str, x_max: float, resolution: float):
    """Grid scan with edge bisection and narrow-band (strip-crossing) recovery."""
    n = max(8, int(math.floor(x_max / resolution)))
    probes = np.arange(1, n + 1) * (x_max / n)
    extra = [X_FLOOR]
    if side == "negative":
        seeds = _negative_seeds(spec, x_max)
        extra.extend(seeds)
        # geometric ladders around each seed keep edge-bisection brackets
        # tight even when several exponentially narrow bands sit between
        # two grid probes
        rel = np.logspace(-12.0, -2.5, 20)
        for s in seeds:
            ladder = np.concatenate([s * (1.0 - rel), s * (1.0 + rel)])
            extra.extend(ladder[(ladder > 0.0) & (ladder <= x_max)])
    probes = np.unique(np.concatenate([probes, np.array(extra)]))
    probes = probes[(probes > 0.0) & (probes <= x_max)]

    flat_point = 1.0 / spec.ell if spec.kind == "equilateral_kagome" and side == "negative" else None
    if flat_point is not None:
        # the isolated flat point is not part of any continuous band
        probes = probes[np.abs(probes - flat_point) > 1e-9 * flat_point]

    oh, ul = _strip_components_chunked(probes, side, spec)
    margin = np.maximum(oh, ul)
    inb = margin <= 0.0

    margin_fn = lambda xs: _margin(xs, side, spec)
    over_fn = lambda xs: _strip_components(xs, side, spec)[0]
    under_fn = lambda xs: _strip_components(xs, side, spec)[1]

    intervals = []

    # runs of in-band probes
    idx = np.flatnonzero(inb)
    if idx.size:
        run_starts = idx[np.concatenate(([True], np.diff(idx) > 1))]
        run_ends = idx[np.concatenate((np.diff(idx) > 1, [True]))]
        lo_out, lo_in, lo_fixed = [], [], {}
        hi_out, hi_in, hi_fixed = [], [], {}
        for r, (a, b) in enumerate(zip(run_starts, run_ends)):
            if a == 0:
                # in-band at the floor probe: the band reaches zero
                lo_fixed[r] = 0.0 if probes[0] <= X_FLOOR * (1 + 1e-12) else probes[0]
            else:
                lo_out.append(probes[a - 1])
                lo_in.append(probes[a])
            if b == len(probes) - 1:
                hi_fixed[r] = probes[-1]
            else:
                hi_out.append(probes[b + 1])
                hi_in.append(probes[b])
        lo_edges = _bisect_vec(margin_fn, np.array(lo_out), np.array(lo_in)) if lo_out else np.array([])
        hi_edges = _bisect_vec(margin_fn, np.array(hi_out), np.array(hi_in)) if hi_out else np.array([])
        i_lo = i_hi = 0
        for r in range(len(run_starts)):
            if r in lo_fixed:
                k_lo = lo_fixed[r]
            else:
                k_lo = float(lo_edges[i_lo])
                i_lo += 1
            if r in hi_fixed:
                k_hi = hi_fixed[r]
            else:
                k_hi = float(hi_edges[i_hi])
                i_hi += 1
            intervals.append((k_lo, k_hi, r in lo_fixed and k_lo == 0.0, r in hi_fixed))

    # strip crossings between consecutive out-of-band probes: a band narrower
    # than the grid step, recovered by bisecting both strip boundaries
    out_pair = ~inb[:-1] & ~inb[1:]
    above = oh > 0.0
    crossing = np.flatnonzero(out_pair & (above[:-1] != above[1:]))
    if crossing.size:
        r1 = _bisect_vec(over_fn, probes[crossing], probes[crossing + 1])
        r2 = _bisect_vec(under_fn, probes[crossing], probes[crossing + 1])
        for a, b in zip(np.minimum(r1, r2), np.maximum(r1, r2)):
            intervals.append((float(a), float(b), False, False))

    intervals.sort()
    # merge overlaps and stitch intervals separated by less than the edge tolerance
    merged = []
    for k_lo, k_hi, lo_fix, hi_fix in intervals:
        if merged and k_lo <= merged[-1][1] + EDGE_RTOL * max(1.0, k_lo):
            prev = merged[-1]
            if k_hi > prev[1]:
                merged[-1] = (prev[0], k_hi, prev[2], hi_fix)
        else:
            merged.append((k_lo, k_hi, lo_fix, hi_fix))
    return merged


def _known_point_momenta(spec: LatticeSpec, side: str, x_max: float) -> list:
    """Momenta where the bracket vanishes identically in theta.

    A strip crossing there pinches to zero width but is an infinitely
    degenerate eigenvalue, reported as a flat or point interval instead of a
    continuous band.
    """
    if side == "negative":
        return [fb.k for fb in negative_flat_bands(spec)]
    return [fb.k for fb in flat_bands(spec, x_max)
            if fb.family in ("david_star", "degenerate_point")]


def scan_bands(spec: LatticeSpec, side: str = "positive", k_max: float = 10.0,
               resolution: float | None = None) -> BandStructure:
    """Scan one side of the spectrum into a BandStructure.

    Continuous bands come from the grid-plus-bisection scan; flat bands and
    point-degenerate bands are attached as zero-length intervals.  Negative
    scans get analytic interior seed points so that exponentially narrow
    bands are never missed, and the structural band-count bounds (at most
    three for kagome, two for triangular) are asserted.
    """
    if side not in ("positive", "negative"):
        raise ValueError(f"side must be 'positive' or 'negative', got {side!r}")
    if k_max <= 0.0:
        raise ValueError("k_max must be positive")
    if resolution is None:
        resolution = 2.0 * math.pi / (1000.0 * spec.d) if side == "positive" else k_max / 5000.0
    if resolution > math.pi / (20.0 * spec.d):
        warnings.warn(
            f"resolution {resolution:g} is coarser than pi/(20 d); narrow bands may degrade",
            stacklevel=2,
        )

    raw = _scan_continuous(spec, side, k_max, resolution)

    # a strip crossing pinched to zero width at a flat point is not a band
    point_momenta = _known_point_momenta(spec, side, k_max)
    cleaned = []
    for k_lo, k_hi, lo_zero, hi_trunc in raw:
        width = k_hi - k_lo
        if width < 1e-10 * max(1.0, k_hi) and any(abs(0.5 * (k_lo + k_hi) - p) < 1e-8 * max(1.0, p) for p in point_momenta):
            continue
        cleaned.append((k_lo, k_hi, lo_zero, hi_trunc))

    intervals = []
    for k_lo, k_hi, lo_zero, hi_trunc in cleaned:
        th_lo = None if (lo_zero or k_lo == 0.0) else _edge_theta(k_lo, side, spec, upper_edge=False)
        th_hi = None if hi_trunc else _edge_theta(k_hi, side, spec, upper_edge=True)
        intervals.append(SpectralInterval(k_lo, k_hi, side, "continuous", th_lo, th_hi))

    if side == "negative":
        bound = 2 if spec.kind == "triangular" else 3
        if len(intervals) > bound:
            raise InternalConsistencyError(
                f"{spec.kind} negative scan found {len(intervals)} bands, bound is {bound}"
            )
        for fb in negative_flat_bands(spec):
            if fb.k <= k_max:
                intervals.append(SpectralInterval(fb.k, fb.k, side, "flat"))
    else:
        for fb in flat_bands(spec, k_max):
            btype = "degenerate_point" if fb.family == "degenerate_point" else "flat"
            intervals.append(SpectralInterval(fb.k, fb.k, side, btype))

    intervals.sort(key=lambda iv: (iv.k_lo, iv.k_hi))
    return BandStructure(spec=spec, side=side, intervals=intervals,
                         scan_k_max=k_max, resolution=resolution)


def scan_negative_bands(spec: LatticeSpec, kappa_max: float | None = None,
                        resolution: float | None = None) -> BandStructure:
    """Negative-side scan; the default range 10/ell covers every band with margin."""
    if kappa_max is None:
        kappa_max = 10.0 / spec.ell
    if kappa_max < 2.0 * SQRT3 / spec.ell:
        raise ValueError("kappa_max must be at least 2*sqrt(3)/ell to cover the spectrum")
    return scan_bands(spec, "negative", kappa_max, resolution)


def spectral_threshold(spec: LatticeSpec) -> SpectralThresholds:
    """Zero-energy behavior: both conditions are closed inequalities in d."""
    crit = 2.0 * SQRT3 * spec.ell
    return SpectralThresholds(
        positive_starts_at_zero=spec.d >= crit,
        negative_reaches_zero=spec.d <= crit,
    )


# --------------------------------------------------------------------------
# gap closings

_CSTEP = 1.0e-100


def _delta_fixed_theta(x, d, spec: LatticeSpec, side: str, f: float, g: float):
    """Kagome bracket at fixed quasimomentum weights, with free cell period d.

    Accepts complex x and d (used for complex-step differentiation).
    """
    c, ell = spec.c, spec.ell
    if side == "positive":
        l1 = _lambda1_pos(x, c, d, ell)
        l2 = _lambda2_pos(x, c, d, ell)
        l3 = _lambda3_pos(x, c, d, ell)
    else:
        l1 = _lambda1_neg(x, c, d, ell)
        l2 = _lambda2_neg(x, c, d, ell)
        l3 = _lambda3_neg(x, c, d, ell)
    return l1 - l2 * f - l3 * g


def _local_gap_width(spec: LatticeSpec, side: str, x0: float, window: float) -> float:
    """Width of the spectral gap around x0 (0 if x0 lies in a band)."""
    if _margin(x0, side, spec) <= 0.0:
        return 0.0
    probes = np.linspace(max(x0 - window, X_FLOOR), x0 + window, 4001)
    inb = _margin(probes, side, spec) <= 0.0
    below = np.flatnonzero(inb & (probes < x0))
    above = np.flatnonzero(inb & (probes > x0))
    if below.size == 0 or above.size == 0:
        return float("inf")
    margin_fn = lambda xs: _margin(xs, side, spec)
    lo_edge = _bisect_vec(margin_fn, np.array([x0]), np.array([probes[below[-1]]]))[0]
    hi_edge = _bisect_vec(margin_fn, np.array([x0]), np.array([probes[above[0]]]))[0]
    return float(hi_edge - lo_edge)


def detect_gap_closings(spec: LatticeSpec, k_window: tuple, d_window: tuple,
                        side: str = "positive", grid_n: int = 48) -> list:
    """Parameter points where neighboring band edges touch.

    At the extremal quasimomenta the bracket's momentum- and period-
    derivatives are driven to a simultaneous zero (2d Newton from sign-change
    cells of a coarse grid); a candidate is kept when the bracket itself
    vanishes there and the scanned local gap is below 1e-6 in momentum.
    Returns (k, d, (theta1, theta2)) tuples.
    """
    if not spec.is_kagome:
        raise GeometryError("gap-closing search is defined for kagome geometry")
    k_lo, k_hi = k_window
    d_lo, d_hi = d_window
    if not (0.0 < k_lo < k_hi and spec.c < d_lo < d_hi):
        raise ValueError("windows must be nonempty and compatible with the geometry")

    found = []
    for theta in EXTREMAL_THETAS:
        f, g = _fg_arrays(np.array(theta[0]), np.array(theta[1]))
        f, g = float(f), float(g)

        def grad(v):
            x, d = v
            dk = _delta_fixed_theta(x + 1j * _CSTEP, d, spec, side, f, g).imag / _CSTEP
            dd = _delta_fixed_theta(x, d + 1j * _CSTEP, spec, side, f, g).imag / _CSTEP
            return [dk, dd]

        ks = np.linspace(k_lo, k_hi, grid_n)
        ds = np.linspace(d_lo, d_hi, grid_n)
        kk, dd_grid = np.meshgrid(ks, ds, indexing="ij")
        gk = _delta_fixed_theta(kk + 1j * _CSTEP, dd_grid, spec, side, f, g).imag / _CSTEP
        gd = _delta_fixed_theta(kk, dd_grid + 1j * _CSTEP, spec, side, f, g).imag / _CSTEP
        sk = np.sign(gk)
        sd = np.sign(gd)
        cells = np.argwhere(
            ((sk[:-1, :-1] != sk[1:, :-1]) | (sk[:-1, :-1] != sk[:-1, 1:]))
            & ((sd[:-1, :-1] != sd[1:, :-1]) | (sd[:-1, :-1] != sd[:-1, 1:]))
        )
        for i, j in cells:
            x0 = (0.5 * (ks[i] + ks[i + 1]), 0.5 * (ds[j] + ds[j + 1]))
            sol = root(grad, x0, method="hybr", tol=1e-13)
            if not sol.success:
                continue
            k_star, d_star = sol.x
            if not (k_lo - 1e-9 <= k_star <= k_hi + 1e-9 and d_lo - 1e-9 <= d_star <= d_hi + 1e-9):
                continue
            delta = _delta_fixed_theta(k_star, d_star, spec, side, f, g)
            l1, l2, l3 = lambda_arrays(k_star, side, LatticeSpec.kagome(spec.c, d_star, spec.ell))
            scale = abs(l1) + 3.0 * abs(l2) + 1.5 * SQRT3 * abs(l3) + 1.0
            if abs(delta) > 1e-6 * scale:
                continue
            spec_star = LatticeSpec.kagome(spec.c, d_star, spec.ell)
            if _local_gap_width(spec_star, side, k_star, window=0.05 * (1.0 + k_star)) >= 1e-6:
                continue
            found.append((float(k_star), float(d_star), theta))

    # dedupe: closings found from several theta points or cells coincide
    unique = []
    for cand in sorted(found):
        if not any(abs(cand[0] - u[0]) < 1e-6 and abs(cand[1] - u[1]) < 1e-6 for u in unique):
            unique.append(cand)
    return unique
