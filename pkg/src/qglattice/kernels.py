"""Scalar kernels of the quasimomentum-resolved spectral conditions.

Everything in this module is a pure closed-form evaluation: the lattice
geometry types, the quasimomentum weight functions ``f_theta``/``g_theta``,
the three trigonometric kernels (and their hyperbolic analogues on the
negative energy side) that enter the kagome spectral condition, the reduced
rational conditions for the triangular lattice, and the leading high-energy
expansion coefficients.

All kernel evaluators accept scalars or numpy arrays, and remain valid for
complex momentum arguments (the hyperbolic forms are the analytic
continuations of the trigonometric ones).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT3 = math.sqrt(3.0)

#: Quasimomentum points that can carry the global extrema of
#: ``l2*f_theta + l3*g_theta`` over the torus: the zone center and the two
#: corners theta1 = -theta2 = +-2*pi/3.
EXTREMAL_THETAS = (
    (0.0, 0.0),
    (2.0 * math.pi / 3.0, -2.0 * math.pi / 3.0),
    (-2.0 * math.pi / 3.0, 2.0 * math.pi / 3.0),
)


class GeometryError(ValueError):
    """Raised for lattice parameters outside the supported geometry."""


@dataclass(frozen=True)
class LatticeSpec:
    """Geometry and coupling scale of one periodic lattice.

    kind
        ``"kagome"`` (two distinct edge lengths ``c`` and ``d - c``),
        ``"equilateral_kagome"`` (``d = 2c``, David-star pattern) or
        ``"triangular"`` (single vertex of degree six, edge length ``d``;
        ``c`` is unused and stored as 0).
    c, d
        Kagome edge length and cell period, ``0 < c < d``.  ``b := d - c``.
    ell
        Length scale of the vertex coupling, ``ell > 0``.
    """

    kind: str
    c: float
    d: float
    ell: float

    def __post_init__(self):
        if self.ell <= 0.0:
            raise GeometryError(f"coupling scale ell must be positive, got {self.ell}")
        if self.kind == "triangular":
            if self.d <= 0.0:
                raise GeometryError(f"triangular period d must be positive, got {self.d}")
        elif self.kind in ("kagome", "equilateral_kagome"):
            if not 0.0 < self.c < self.d:
                raise GeometryError(
                    f"kagome geometry requires 0 < c < d, got c={self.c}, d={self.d}; "
                    "degenerate c=0 or c=d is the triangular lattice"
                )
            if self.kind == "equilateral_kagome" and self.d != 2.0 * self.c:
                raise GeometryError(f"equilateral lattice requires d = 2c, got c={self.c}, d={self.d}")
            if self.kind == "kagome" and self.d == 2.0 * self.c:
                object.__setattr__(self, "kind", "equilateral_kagome")  # keep kind <-> geometry in sync
        else:
            raise GeometryError(f"unknown lattice kind {self.kind!r}")

    @classmethod
    def kagome(cls, c, d, ell=1.0):
        if d == 2.0 * c:
            return cls("equilateral_kagome", c, d, ell)
        return cls("kagome", c, d, ell)

    @classmethod
    def equilateral(cls, c, ell=1.0):
        return cls("equilateral_kagome", c, 2.0 * c, ell)

    @classmethod
    def triangular(cls, d, ell=1.0):
        return cls("triangular", 0.0, d, ell)

    @property
    def b(self):
        """Second kagome edge length, d - c."""
        return self.d - self.c

    @property
    def is_kagome(self):
        return self.kind in ("kagome", "equilateral_kagome")


@dataclass(frozen=True)
class Quasimomentum:
    """Point (theta1, theta2) on the quasimomentum torus [-pi, pi)^2."""

    theta1: float
    theta2: float

    @property
    def f(self):
        return f_theta(self)

    @property
    def g(self):
        return g_theta(self)


@dataclass(frozen=True)
class KernelTriple:
    """Values (l1, l2, l3) of the three spectral kernels at one momentum."""

    l1: float
    l2: float
    l3: float
    side: str = "positive"

    def as_array(self):
        return np.array([self.l1, self.l2, self.l3])


def f_theta(q: Quasimomentum):
    """Even quasimomentum weight, range [-3/2, 3]."""
    t1, t2 = q.theta1, q.theta2
    return math.cos(t1) + math.cos(t1 - t2) + math.cos(t2)


def g_theta(q: Quasimomentum):
    """Odd quasimomentum weight, range [-3*sqrt(3)/2, 3*sqrt(3)/2]."""
    t1, t2 = q.theta1, q.theta2
    return math.sin(t2) + math.sin(t1 - t2) - math.sin(t1)


def _fg_arrays(theta1, theta2):
    """Vectorized f_theta, g_theta for plain angle arrays."""
    f = np.cos(theta1) + np.cos(theta1 - theta2) + np.cos(theta2)
    g = np.sin(theta2) + np.sin(theta1 - theta2) - np.sin(theta1)
    return f, g


# --------------------------------------------------------------------------
# Kagome kernels.  The positive-side forms are trigonometric; substituting
# k -> i*kappa turns them into the hyperbolic negative-side forms, which are
# coded independently below so that the agreement can be tested.

def _lambda1_pos(k, c, d, ell):
    x = (k * ell) ** 2
    return 2.0 * (x + 1.0) * (
        4.0 * (x + 1.0) ** 2
        * (np.cos(k * (c + d)) + np.cos(k * (c - 2.0 * d)) + 2.0 * np.cos(k * d) + np.cos(2.0 * k * d))
        + (x * x + 14.0 * x + 1.0) * (2.0 * np.cos(k * d) + 1.0) * np.cos(k * (2.0 * c - d))
        + (3.0 * x * x + 18.0 * x + 3.0)
        + (5.0 * x * x + 22.0 * x + 5.0) * (np.cos(k * (d - c)) + np.cos(k * c))
    )


def _lambda2_pos(k, c, d, ell):
    x = (k * ell) ** 2
    return (
        8.0 * (x + 1.0) * (x - 1.0) ** 2
        * np.cos(k * (d - c) / 2.0) * np.cos(k * c / 2.0)
        * (np.cos(k * (2.0 * c - d) / 2.0) + 2.0 * np.cos(k * d / 2.0))
    )


def _lambda3_pos(k, c, d, ell):
    x = (k * ell) ** 2
    return (
        16.0 * k * ell * (x - 1.0) ** 2
        * np.sin(k * (d - c) / 2.0) * np.sin(k * c / 2.0) * np.sin(k * (d - 2.0 * c) / 2.0)
    )


def _lambda1_neg(kp, c, d, ell):
    x = (kp * ell) ** 2
    return 2.0 * (1.0 - x) * (
        4.0 * (x - 1.0) ** 2
        * (np.cosh(kp * (c + d)) + np.cosh(kp * (c - 2.0 * d)) + 2.0 * np.cosh(kp * d) + np.cosh(2.0 * kp * d))
        + (x * x - 14.0 * x + 1.0) * (2.0 * np.cosh(kp * d) + 1.0) * np.cosh(kp * (2.0 * c - d))
        + (3.0 * x * x - 18.0 * x + 3.0)
        + (5.0 * x * x - 22.0 * x + 5.0) * (np.cosh(kp * (d - c)) + np.cosh(kp * c))
    )


def _lambda2_neg(kp, c, d, ell):
    x = (kp * ell) ** 2
    return (
        8.0 * (1.0 - x) * (x + 1.0) ** 2
        * (np.cosh(kp * (2.0 * c - d) / 2.0) + 2.0 * np.cosh(kp * d / 2.0))
        * np.cosh(kp * (d - c) / 2.0) * np.cosh(kp * c / 2.0)
    )


def _lambda3_neg(kp, c, d, ell):
    x = (kp * ell) ** 2
    return (
        16.0 * kp * ell * (x + 1.0) ** 2
        * np.sinh(kp * (d - c) / 2.0) * np.sinh(kp * c / 2.0) * np.sinh(kp * (d - 2.0 * c) / 2.0)
    )


def lambda_arrays(x, side, spec: LatticeSpec):
    """Kernel values (l1, l2, l3) for scalar or array momentum ``x``."""
    if not spec.is_kagome:
        raise GeometryError("kagome kernels are undefined for the triangular lattice")
    if side == "positive":
        return (
            _lambda1_pos(x, spec.c, spec.d, spec.ell),
            _lambda2_pos(x, spec.c, spec.d, spec.ell),
            _lambda3_pos(x, spec.c, spec.d, spec.ell),
        )
    if side == "negative":
        return (
            _lambda1_neg(x, spec.c, spec.d, spec.ell),
            _lambda2_neg(x, spec.c, spec.d, spec.ell),
            _lambda3_neg(x, spec.c, spec.d, spec.ell),
        )
    raise ValueError(f"side must be 'positive' or 'negative', got {side!r}")


def lambda_pos(k, spec: LatticeSpec) -> KernelTriple:
    """Positive-side kernel triple at momentum k > 0."""
    l1, l2, l3 = lambda_arrays(k, "positive", spec)
    return KernelTriple(l1, l2, l3, side="positive")


def lambda_neg(kappa, spec: LatticeSpec) -> KernelTriple:
    """Negative-side (hyperbolic) kernel triple at kappa > 0, energy -kappa^2."""
    l1, l2, l3 = lambda_arrays(kappa, "negative", spec)
    return KernelTriple(l1, l2, l3, side="negative")


def bracket(x, side, theta: Quasimomentum, spec: LatticeSpec):
    """Spectral bracket l1 - l2*f_theta - l3*g_theta.

    Its zero set over the quasimomentum torus is the continuous spectrum at
    momentum ``x`` (energy x^2 on the positive side, -x^2 on the negative).
    """
    l1, l2, l3 = lambda_arrays(x, side, spec)
    return l1 - l2 * f_theta(theta) - l3 * g_theta(theta)


# --------------------------------------------------------------------------
# Triangular lattice: the condition is scalar in f_theta.  ``tri_bracket``
# is the raw quadratic-free form; G and G-tilde are the rational reductions
# f_theta = G(k) valid away from the singular denominators.

#: Sentinel guard for the rational forms; below this the caller must fall
#: back to the raw bracket.
G_DENOMINATOR_EPS = 1.0e-8


def tri_bracket_pos(k, f, spec: LatticeSpec):
    """Raw triangular positive-side bracket at momentum k and weight f."""
    d, ell = spec.d, spec.ell
    x = (k * ell) ** 2
    return (
        3.0 * (x * x + 6.0 * x + 1.0)
        + (3.0 * x * x + 10.0 * x + 3.0) * (2.0 * np.cos(k * d) + np.cos(2.0 * k * d))
        - 4.0 * (x - 1.0) ** 2 * np.cos(k * d / 2.0) ** 2 * f
    )


def tri_bracket_neg(kp, f, spec: LatticeSpec):
    """Raw triangular negative-side bracket at kappa and weight f."""
    d, ell = spec.d, spec.ell
    x = (kp * ell) ** 2
    return (
        3.0 * (x * x - 6.0 * x + 1.0)
        + (3.0 * x * x - 10.0 * x + 3.0) * (2.0 * np.cosh(kp * d) + np.cosh(2.0 * kp * d))
        - 4.0 * (x + 1.0) ** 2 * np.cosh(kp * d / 2.0) ** 2 * f
    )


def tri_G(k, spec: LatticeSpec):
    """Rational form of the triangular band condition, f_theta = G(k).

    Returns NaN when the denominator factors cos(kd/2) or (k^2 ell^2 - 1)
    are within ``G_DENOMINATOR_EPS`` of zero; callers must then use
    ``tri_bracket_pos`` directly.
    """
    d, ell = spec.d, spec.ell
    k = np.asarray(k, dtype=float)
    x = (k * ell) ** 2
    cos_half = np.cos(k * d / 2.0)
    bad = (np.abs(cos_half) <= G_DENOMINATOR_EPS) | (np.abs(x - 1.0) <= G_DENOMINATOR_EPS)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (
            2.0 * x / cos_half ** 2 + (3.0 * x * x + 10.0 * x + 3.0) * np.cos(k * d)
        ) / (x - 1.0) ** 2
        val = np.where(bad, np.nan, val)
    return val[()] if val.ndim == 0 else val


def tri_G_tilde(kappa, spec: LatticeSpec):
    """Negative-side analogue of ``tri_G``; globally regular for kappa > 0."""
    d, ell = spec.d, spec.ell
    kappa = np.asarray(kappa, dtype=float)
    x = (kappa * ell) ** 2
    sech_half = 1.0 / np.cosh(kappa * d / 2.0)
    return (
        ((3.0 * x * x - 10.0 * x + 3.0) * np.cosh(kappa * d) - 2.0 * x * sech_half ** 2)
        / (x + 1.0) ** 2
    )[()]


def kagome_equilateral_F(kappa, spec: LatticeSpec):
    """Negative-side band condition f_theta = F(kappa) of the equilateral lattice."""
    if spec.kind != "equilateral_kagome":
        raise GeometryError("F(kappa) is defined for the equilateral lattice only")
    c, ell = spec.c, spec.ell
    kappa = np.asarray(kappa, dtype=float)
    x = (kappa * ell) ** 2
    num = (x - 1.0) ** 2 * (2.0 * np.cosh(2.0 * kappa * c) + 2.0 * np.cosh(3.0 * kappa * c) + 1.0) \
        + (x * x - 14.0 * x + 1.0) * np.cosh(kappa * c)
    den = (x + 1.0) ** 2 * (np.cosh(kappa * c) + 1.0)
    return (num / den)[()]


def xi(k, c):
    """Periodic high-energy band indicator cos(kc) - cos(2kc) of the equilateral lattice.

    Large momenta belong to the wide bands exactly when 0 <= xi <= 9/8
    (up to a relative O(1/k) error); the maximum over a period is 9/8.
    """
    return np.cos(k * c) - np.cos(2.0 * k * c)


def asymptotic_coefficients(k, theta: Quasimomentum, spec: LatticeSpec, which: str):
    """Leading high-energy expansion coefficients of the spectral conditions.

    which = "alpha"  -> scalar leading coefficient of the general kagome
                        condition written as alpha(k) * k^6 + O(k^5).
    which = "beta"   -> pair (beta1, beta2) of the equilateral expansion
                        beta1(k) + beta2(k)/k^2 = O(k^-4).
    which = "gamma"  -> pair (gamma1, gamma2) of the triangular expansion.
    """
    f = f_theta(theta)
    c, d, ell = spec.c, spec.d, spec.ell
    if which == "alpha":
        return 4.0 * (np.cos(k * (2.0 * c - d) / 2.0) + 2.0 * np.cos(k * d / 2.0)) * (
            (2.0 * np.cos(k * (c - d)) + 4.0 * np.cos(k * d) - 1.0) * np.cos(k * d / 2.0)
            + np.cos(k * (2.0 * c + d) / 2.0)
            - 2.0 * f * np.cos(k * c / 2.0) * np.cos(k * (c - d) / 2.0)
        )
    if which == "beta":
        beta1 = -2.0 * ell ** 4 * np.cos(k * c / 2.0) ** 2 * (
            4.0 * np.cos(k * c) - 4.0 * np.cos(2.0 * k * c) + f - 3.0
        )
        beta2 = 2.0 * ell ** 2 * (
            (np.cos(k * c) + 1.0) * f
            + 7.0 * np.cos(k * c) + 2.0 * np.cos(2.0 * k * c) + 2.0 * np.cos(3.0 * k * c) + 1.0
        )
        return beta1, beta2
    if which == "gamma":
        gamma1 = 4.0 * ell ** 4 * np.cos(k * d / 2.0) ** 2 * (3.0 * np.cos(k * d) - f)
        gamma2 = 2.0 * ell ** 2 * (
            10.0 * np.cos(k * d) + 5.0 * np.cos(2.0 * k * d) + 9.0 + 2.0 * (np.cos(k * d) + 1.0) * f
        )
        return gamma1, gamma2
    raise ValueError(f"which must be 'alpha', 'beta' or 'gamma', got {which!r}")
