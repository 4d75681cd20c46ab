"""Floquet secular systems assembled directly from the cell wave-function Ansatz.

This module is the independent oracle for the closed-form kernels: the
12 x 12 kagome system (and the reduced 6 x 6 triangular one) is built from
plane waves on the cell edges, the cell-boundary phase conditions, midpoint
smoothness and the circulant vertex conditions, with no reference to the
kernel expressions.  Its determinant vanishes exactly on the spectrum.

Coefficient elimination
-----------------------
Midpoint smoothness makes three coefficient pairs equal; the three phase
conditions at the cell boundary express three more pairs through the kept
ones.  The remaining unknowns, in the fixed column order used throughout,
are

    B3+, B3-, B4+, B4-, C1+, C1-, C4+, C4-, D3+, D3-, D4+, D4-

and the twelve rows are the vertex conditions in their cyclic order, first
vertex (psi group), second (phi group), third (chi group).

Determinant convention
----------------------
With the ordering above the raw determinant satisfies

    det_raw = -1024 i e^(2 i theta2) z^3 ell^3 sin(zc/2) sin(zd/2) sin(z(d-c)/2) * Delta

where Delta is the kernel bracket.  The public determinant is rescaled by
-64 z^6 so that it carries the conventional prefactor 65536 i z^9 ell^3.
The triangular raw determinant is -32 z ell e^(2 i theta2) sin^2(zd/2) * B(z)
with B the raw triangular bracket; it is rescaled by -8 / ell^3, which
reproduces the known closed value 1024 i e^(2 i theta2) ell^-3 sinh^2(d/2 ell) (...)
at z = i / ell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import (
    GeometryError,
    LatticeSpec,
    Quasimomentum,
    SQRT3,
    lambda_arrays,
    tri_bracket_neg,
    tri_bracket_pos,
)

KAGOME_PREFACTOR = 65536.0j
TRIANGULAR_PREFACTOR = 256.0

# raw-to-conventional determinant rescale factors, calibrated once against
# the closed-form bracket (see module docstring)
_KAGOME_RESCALE_POWER = 6  # det_conventional = det_raw * (-64 z^6)


@dataclass(frozen=True)
class SecularSystem:
    """One assembled secular matrix at fixed momentum and quasimomentum."""

    dimension: int
    matrix: np.ndarray
    momentum: complex
    theta: Quasimomentum
    spec: LatticeSpec

    def determinant(self) -> complex:
        """Determinant in the conventional normalization (see module docstring)."""
        raw = np.linalg.det(self.matrix)
        z = self.momentum
        if self.dimension == 12:
            return raw * (-64.0 * z ** _KAGOME_RESCALE_POWER)
        return raw * (-8.0 / self.spec.ell ** 3)


def _kagome_rows(z, p1, p2, p3, c, d, ell):
    """12 x 12 system rows for given phase factors p1 = e^{i t1}, p2 = e^{i t2}, p3 = e^{i(t2-t1)}.

    Linear in each phase factor, which batched evaluation exploits.
    """
    b = d - c
    ec_m = np.exp(-1j * z * c)
    ec_p = np.exp(1j * z * c)
    # function -> (plus column, minus column, plus scale, minus scale)
    funs = {
        "psi1": (4, 5, p2 * ec_m, p2 * ec_p),
        "psi2": (10, 11, p3 * ec_m, p3 * ec_p),
        "psi3": (0, 1, 1.0, 1.0),
        "psi4": (2, 3, 1.0, 1.0),
        "phi1": (4, 5, 1.0, 1.0),
        "phi2": (8, 9, 1.0, 1.0),
        "phi3": (0, 1, 1.0, 1.0),
        "phi4": (6, 7, 1.0, 1.0),
        "chi1": (6, 7, p1 * ec_m, p1 * ec_p),
        "chi2": (2, 3, 1.0, 1.0),
        "chi3": (8, 9, 1.0, 1.0),
        "chi4": (10, 11, 1.0, 1.0),
    }

    def val(f, x):
        p, m, sp, sm = funs[f]
        v = np.zeros(12, complex)
        v[p] += sp * np.exp(1j * z * x)
        v[m] += sm * np.exp(-1j * z * x)
        return v

    def der(f, x):
        p, m, sp, sm = funs[f]
        v = np.zeros(12, complex)
        v[p] += 1j * z * sp * np.exp(1j * z * x)
        v[m] -= 1j * z * sm * np.exp(-1j * z * x)
        return v

    il = 1j * ell
    h = b / 2.0
    return np.array([
        val("psi2", 0) - val("psi1", 0) + il * (der("psi2", 0) + der("psi1", 0)),
        val("psi3", h) - val("psi2", 0) + il * (-der("psi3", h) + der("psi2", 0)),
        val("psi4", h) - val("psi3", h) - il * (der("psi4", h) + der("psi3", h)),
        val("psi1", 0) - val("psi4", h) + il * (der("psi1", 0) - der("psi4", h)),
        val("phi2", -h) - val("phi1", 0) + il * (der("phi2", -h) - der("phi1", 0)),
        val("phi3", -h) - val("phi2", -h) + il * (der("phi3", -h) + der("phi2", -h)),
        val("phi4", 0) - val("phi3", -h) + il * (-der("phi4", 0) + der("phi3", -h)),
        val("phi1", 0) - val("phi4", 0) - il * (der("phi1", 0) + der("phi4", 0)),
        val("chi2", -h) - val("chi1", 0) + il * (der("chi2", -h) + der("chi1", 0)),
        val("chi3", h) - val("chi2", -h) + il * (-der("chi3", h) + der("chi2", -h)),
        val("chi4", 0) - val("chi3", h) - il * (der("chi4", 0) + der("chi3", h)),
        val("chi1", 0) - val("chi4", 0) + il * (der("chi1", 0) - der("chi4", 0)),
    ])


# Cyclic order of the six edge ends around the degree-6 vertex obtained by
# contracting the three short kagome edges; verified against the closed-form
# triangular bracket.
_TRI_ORDER = ("psi1", "psi2", "phi4", "phi1", "chi4", "chi1")


def _triangular_rows(z, p1, p2, p3, d, ell):
    """6 x 6 system rows; columns C1+, C1-, C4+, C4-, D4+, D4-."""
    ed_m = np.exp(-1j * z * d)
    ed_p = np.exp(1j * z * d)
    # (plus column, minus column, plus scale, minus scale, outward sign)
    funs = {
        "psi1": (0, 1, p2 * ed_m, p2 * ed_p, 1.0),
        "psi2": (4, 5, p3 * ed_m, p3 * ed_p, 1.0),
        "chi1": (2, 3, p1 * ed_m, p1 * ed_p, 1.0),
        "phi1": (0, 1, 1.0, 1.0, -1.0),
        "phi4": (2, 3, 1.0, 1.0, -1.0),
        "chi4": (4, 5, 1.0, 1.0, -1.0),
    }

    def val(f):
        p, m, sp, sm, _ = funs[f]
        v = np.zeros(6, complex)
        v[p] += sp
        v[m] += sm
        return v

    def dout(f):
        p, m, sp, sm, sgn = funs[f]
        v = np.zeros(6, complex)
        v[p] += sgn * 1j * z * sp
        v[m] -= sgn * 1j * z * sm
        return v

    il = 1j * ell
    rows = []
    for j in range(6):
        a, nxt = _TRI_ORDER[j], _TRI_ORDER[(j + 1) % 6]
        rows.append(val(nxt) - val(a) + il * (dout(nxt) + dout(a)))
    return np.array(rows)


def _phases(theta: Quasimomentum):
    t1, t2 = theta.theta1, theta.theta2
    return np.exp(1j * t1), np.exp(1j * t2), np.exp(1j * (t2 - t1))


def kagome_secular_matrix(z, theta: Quasimomentum, spec: LatticeSpec) -> SecularSystem:
    """Assemble the 12 x 12 kagome system at complex momentum z != 0."""
    if not spec.is_kagome:
        raise GeometryError("degenerate geometry: use the triangular secular system")
    if z == 0:
        raise ValueError("secular system requires z != 0")
    p1, p2, p3 = _phases(theta)
    rows = _kagome_rows(complex(z), p1, p2, p3, spec.c, spec.d, spec.ell)
    return SecularSystem(12, rows, complex(z), theta, spec)


def kagome_secular_det(z, theta: Quasimomentum, spec: LatticeSpec) -> complex:
    """Conventionally normalized 12 x 12 determinant."""
    return kagome_secular_matrix(z, theta, spec).determinant()


def triangular_secular_matrix(z, theta: Quasimomentum, spec: LatticeSpec) -> SecularSystem:
    """Assemble the reduced 6 x 6 triangular system at complex momentum z != 0."""
    if spec.kind != "triangular":
        raise GeometryError("triangular secular system requires a triangular spec")
    if z == 0:
        raise ValueError("secular system requires z != 0")
    p1, p2, p3 = _phases(theta)
    rows = _triangular_rows(complex(z), p1, p2, p3, spec.d, spec.ell)
    return SecularSystem(6, rows, complex(z), theta, spec)


def triangular_secular_det(z, theta: Quasimomentum, spec: LatticeSpec) -> complex:
    """Conventionally normalized 6 x 6 determinant."""
    return triangular_secular_matrix(z, theta, spec).determinant()


def normalized_bracket(z, theta: Quasimomentum, spec: LatticeSpec) -> complex:
    """Oracle reconstruction of the kernel bracket from the raw determinant.

    Divides the determinant by every known nonvanishing prefactor including
    the three sine factors; only meaningful away from the sine zeros.
    """
    if spec.is_kagome:
        raw = np.linalg.det(kagome_secular_matrix(z, theta, spec).matrix)
        c, d, ell = spec.c, spec.d, spec.ell
        sines = np.sin(z * c / 2.0) * np.sin(z * d / 2.0) * np.sin(z * (d - c) / 2.0)
        pref = -1024.0j * np.exp(2j * theta.theta2) * z ** 3 * ell ** 3 * sines
    else:
        raw = np.linalg.det(triangular_secular_matrix(z, theta, spec).matrix)
        pref = -32.0 * z * spec.ell * np.exp(2j * theta.theta2) * np.sin(z * spec.d / 2.0) ** 2
    return raw / pref


def _phase_decomposition(z, spec: LatticeSpec):
    """Theta-independent matrix and sparse phase terms of the secular system.

    The matrix depends on theta only through the three boundary phase
    factors, each entering linearly in a handful of entries:
    M(theta) = M0 + sum_i p_i(theta) * (sparse term i).
    """
    z = complex(z)
    if spec.is_kagome:
        args = (spec.c, spec.d, spec.ell)
        rows = _kagome_rows
    else:
        args = (spec.d, spec.ell)
        rows = _triangular_rows
    m0 = rows(z, 0.0, 0.0, 0.0, *args)
    terms = []
    for idx, phases in enumerate(((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))):
        diff = rows(z, *phases, *args) - m0
        for r, c in np.argwhere(diff != 0.0):
            terms.append((idx, int(r), int(c), diff[r, c]))
    return m0, terms


def _det_grid(z, theta1_flat, theta2_flat, spec: LatticeSpec) -> np.ndarray:
    """Raw determinants over a flattened quasimomentum grid, batched."""
    m0, terms = _phase_decomposition(z, spec)
    phases = (
        np.exp(1j * theta1_flat),
        np.exp(1j * theta2_flat),
        np.exp(1j * (theta2_flat - theta1_flat)),
    )
    mats = np.empty((theta1_flat.size,) + m0.shape, complex)
    mats[:] = m0
    for idx, r, c, val in terms:
        mats[:, r, c] += phases[idx] * val
    return np.linalg.det(mats)


def _reduction_factor(x, side, spec: LatticeSpec) -> complex:
    """Theta-independent part of the normalization that makes the reduced
    determinant real: divide the raw determinant by this and by e^(2 i theta2)."""
    ell = spec.ell
    if spec.is_kagome:
        if side == "positive":
            return -1024.0j * complex(x) ** 3 * ell ** 3
        return 1024.0j * x ** 3 * ell ** 3
    if side == "positive":
        return -32.0 * complex(x) * ell
    return 32.0j * x * ell


def _reduced_grid(x, side, theta1_flat, theta2_flat, spec: LatticeSpec) -> np.ndarray:
    """Real reduced determinant values over a theta grid.

    On the positive side this equals sin-prefactor * bracket; on the
    negative side the hyperbolic analogue.  Division by the momentum and
    phase prefactors keeps the values real, so sign changes over the grid
    are sign changes of the bracket.
    """
    z = complex(x) if side == "positive" else 1j * x
    dets = _det_grid(z, theta1_flat, theta2_flat, spec)
    norm = _reduction_factor(x, side, spec) * np.exp(2j * theta2_flat)
    return (dets / norm).real


def _oracle_scale(x, side, spec: LatticeSpec) -> float:
    """Magnitude scale of the bracket used for the vanishing tolerance."""
    zmod = abs(x)
    if spec.is_kagome:
        l1, l2, l3 = lambda_arrays(x, side, spec)
        floor = ((zmod * spec.ell) ** 2 + 1.0) ** 3
        return float(max(abs(l1), 3.0 * abs(l2), 1.5 * (abs(l2) + SQRT3 * abs(l3)), floor))
    if side == "positive":
        b_hi = tri_bracket_pos(x, 0.0, spec)
        b_span = abs(tri_bracket_pos(x, 3.0, spec) - b_hi)
    else:
        b_hi = tri_bracket_neg(x, 0.0, spec)
        b_span = abs(tri_bracket_neg(x, 3.0, spec) - b_hi)
    floor = ((zmod * spec.ell) ** 2 + 1.0) ** 2
    return float(max(abs(b_hi), b_span, floor))


#: Relative tolerance declaring the reduced determinant to vanish.
VANISH_RTOL = 1.0e-9

#: Relative tolerance on a single sine prefactor; flat-band momenta are
#: never exactly representable, so exact zeros cannot be required.
SINE_ZERO_TOL = 1.0e-12


def oracle_in_spectrum(x, spec: LatticeSpec, theta_grid_n: int = 64, side: str = "positive") -> bool:
    """Brute-force spectral membership from the secular determinant.

    True iff over the quasimomentum grid the reduced determinant changes
    sign (a continuous-band point), nearly vanishes at some grid point
    (band edge), or one of its sine prefactors vanishes (flat band or
    degenerate point).  The n x n grid is augmented with the two corner
    extrema theta1 = -theta2 = +-2*pi/3, where the bracket attains its
    range boundary; without them a grid of any practical size misses the
    narrow sign-change region of momenta close to a band edge.  Evaluated
    in chunks so a sign change returns early.
    """
    if theta_grid_n < 8:
        raise ValueError("theta_grid_n must be at least 8")
    if x <= 0.0:
        raise ValueError("momentum argument must be positive")
    t = np.linspace(-np.pi, np.pi, theta_grid_n, endpoint=False)
    t1, t2 = np.meshgrid(t, t, indexing="ij")
    corners = 2.0 * np.pi / 3.0 * np.array([[1.0, -1.0], [-1.0, 1.0]])
    t1f = np.concatenate([corners[:, 0], t1.ravel()])
    t2f = np.concatenate([corners[:, 1], t2.ravel()])

    z = complex(x) if side == "positive" else 1j * x
    m0, terms = _phase_decomposition(z, spec)
    factor = _reduction_factor(x, side, spec)
    vmin = math.inf
    vmax = -math.inf
    abs_min = math.inf
    chunk = 512
    for start in range(0, t1f.size, chunk):
        s1 = t1f[start:start + chunk]
        s2 = t2f[start:start + chunk]
        phases = (np.exp(1j * s1), np.exp(1j * s2), np.exp(1j * (s2 - s1)))
        mats = np.empty((s1.size,) + m0.shape, complex)
        mats[:] = m0
        for idx, r, c, val in terms:
            mats[:, r, c] += phases[idx] * val
        vals = (np.linalg.det(mats) / (factor * np.exp(2j * s2))).real
        vmin = min(vmin, float(vals.min()))
        vmax = max(vmax, float(vals.max()))
        if vmin <= 0.0 <= vmax:
            return True
        abs_min = min(abs_min, float(np.abs(vals).min()))
    scale = _oracle_scale(x, side, spec)
    if spec.is_kagome:
        lengths = (spec.c, spec.d, spec.d - spec.c)
    else:
        lengths = (spec.d,)
    if side == "positive":
        sines = [np.sin(x * L / 2.0) for L in lengths]
        # a vanishing sine factor is an infinitely degenerate eigenvalue;
        # testing per factor keeps the detection zone tight even where
        # several families coincide
        if any(abs(s) <= SINE_ZERO_TOL * max(1.0, x * L / 2.0) for s, L in zip(sines, lengths)):
            return True
        pref = np.prod(sines)
        if not spec.is_kagome:
            pref = pref ** 2
    else:
        pref = np.prod([np.sinh(x * L / 2.0) for L in lengths])
        if not spec.is_kagome:
            pref = pref ** 2
    # bracket vanishes at a grid point (band edge graze, or the
    # theta-independent zero of a point-degenerate band); measured relative
    # to the sine prefactor so that small prefactors near flat momenta do
    # not fake a vanishing bracket
    return bool(abs_min <= VANISH_RTOL * abs(pref) * scale)
