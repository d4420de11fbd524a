"""Operator calculus on spectral coefficients.

Projections onto Landau levels, the heat semigroup, fractional powers, the
unitary Schrodinger propagator, the Sobolev / Triebel-Lizorkin / mixed
space-time norms, and a finite-difference application of the twisted
Laplacian used as an independent oracle for the eigenrelation.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidInputError
from .special_functions import multi_index_order
from .special_hermite import SpectralField, synthesize

__all__ = [
    "NormParams",
    "NormOrder",
    "TimeSeriesField",
    "landau_level",
    "project",
    "fractional_power",
    "heat_semigroup",
    "propagate",
    "propagate_series",
    "auto_time_samples",
    "sobolev_norm",
    "triebel_lizorkin_norm",
    "mixed_norm",
    "weighted_lp_norm",
    "apply_twisted_laplacian_fd",
    "interior_mask",
]

TWO_PI = 2.0 * math.pi

INF = float("inf")


class NormOrder(str, Enum):
    SPACE_OUTER = "space_outer"
    TIME_OUTER = "time_outer"


@dataclass(frozen=True)
class NormParams:
    """Bundle of (p, q, r, s) norm parameters with domain validation.

    Raw norms accept p >= 1 and q > 0; the sharp-exponent sweeps assume
    p in [2, inf] and q in [2, inf), which validate_for_sweep enforces.
    """

    p: float = 2.0
    q: float = 2.0
    r: float = 0.0
    s: float = 0.0
    order: NormOrder = NormOrder.SPACE_OUTER

    def __post_init__(self):
        if not self.p >= 1.0:
            raise InvalidInputError(f"p must be >= 1, got {self.p}")
        if not self.q > 0.0:
            raise InvalidInputError(f"q must be > 0, got {self.q}")

    def validate_for_sweep(self):
        if not 2.0 <= self.p:
            raise InvalidInputError(f"sweep requires p >= 2, got {self.p}")
        if not (2.0 <= self.q < INF):
            raise InvalidInputError(f"sweep requires 2 <= q < inf, got {self.q}")
        return self


def landau_level(nu, n):
    """Eigenvalue 2|nu| + n of the level containing phi_{mu,nu}."""
    return 2 * multi_index_order(nu) + n


def _scale_by_level(f, factor):
    return f.map_coeffs(lambda key, c: factor(landau_level(key[1], f.n)) * c)


def project(ell, f):
    """Keep exactly the coefficients at Landau level ell.

    Levels outside the spectrum yield the zero field; the operator is
    idempotent and orthogonal to every other level.
    """
    kept = {
        key: c
        for key, c in f.coeffs.items()
        if landau_level(key[1], f.n) == ell
    }
    return SpectralField(f.n, f.mu_max, f.nu_max, kept)


def fractional_power(s, f):
    """Multiply each coefficient by ell^s; every level has ell >= n >= 1."""
    return _scale_by_level(f, lambda ell: float(ell) ** s)


def heat_semigroup(t, f):
    """Coefficient damping by e^{-t ell}; norm non-increasing for t >= 0."""
    if t < 0:
        raise InvalidInputError(f"semigroup time must be >= 0, got {t}")
    return _scale_by_level(f, lambda ell: math.exp(-t * ell))


def propagate(t, f):
    """Unitary phase rotation e^{-i t ell} per level; 2 pi periodic in t."""
    return _scale_by_level(f, lambda ell: complex(math.cos(t * ell), -math.sin(t * ell)))


def auto_time_samples(f, q):
    """Default number of time samples for a mixed norm in q.

    For q = 2 the squared solution magnitude is a trigonometric polynomial
    with frequencies bounded by the level spread, so M = 2*max_level + 1
    makes the rectangle rule exact to roundoff.  Other q default to
    8 * (max_level + 1).
    """
    max_level = f.max_level()
    if q == 2:
        return 2 * max_level + 1
    return 8 * (max_level + 1)


@dataclass
class TimeSeriesField:
    """Propagated snapshots u(t_j) on a uniform periodic time grid."""

    times: np.ndarray
    fields: list
    time_weight: float
    samples: np.ndarray = None  # (M, num_points) when materialized
    grid: object = None
    metadata: dict = field(default_factory=dict)

    @property
    def M(self):
        return self.times.size


def propagate_series(f, M, basis=None):
    """Propagate f over M uniform times in [0, 2 pi).

    When a basis is supplied the grid samples of every slice are
    materialized as well (one synthesis per occupied level, then a phase
    matrix multiply).  The metadata records whether M satisfies the
    exactness condition M >= 2*max_level + 1 for time L2 norms.
    """
    if M < 1:
        raise InvalidInputError(f"M must be >= 1, got {M}")
    times = TWO_PI * np.arange(M) / M
    fields = [propagate(t, f) for t in times]
    needed = 2 * f.max_level() + 1
    metadata = {"M": int(M), "q2_exact": M >= needed}
    if not metadata["q2_exact"]:
        metadata["warning"] = (
            f"M={M} is below the exactness threshold {needed} for time L2 norms"
        )
    samples = None
    grid = None
    if basis is not None:
        levels = f.levels()
        if levels:
            level_samples = np.stack(
                [synthesize(project(ell, f), basis).ravel() for ell in levels]
            )
            phases = np.exp(-1j * np.outer(times, np.array(levels, dtype=float)))
            samples = phases @ level_samples
        else:
            samples = np.zeros((M, basis.grid.num_points), dtype=complex)
        grid = basis.grid
    return TimeSeriesField(
        times=times,
        fields=fields,
        time_weight=TWO_PI / M,
        samples=samples,
        grid=grid,
        metadata=metadata,
    )


def sobolev_norm(s, f):
    """Norm (sum over levels of ell^{2s} |P_ell f|_{L2}^2)^{1/2}.

    Computed on coefficients alone; s = 0 gives the L2 norm.
    """
    total = 0.0
    for (mu, nu), c in f.items_sorted():
        total += float(landau_level(nu, f.n)) ** (2.0 * s) * abs(c) ** 2
    return math.sqrt(total)


def weighted_lp_norm(values, weights, p):
    """(sum w |v|^p)^{1/p}, with p = inf meaning the plain maximum."""
    values = np.abs(np.asarray(values))
    if p == INF:
        return float(values.max()) if values.size else 0.0
    if not p > 0:
        raise InvalidInputError(f"p must be positive, got {p}")
    return float((weights @ values ** p) ** (1.0 / p))


def _lq_along_axis(magnitudes, weight, q, axis):
    if q == INF:
        return magnitudes.max(axis=axis)
    return (weight * (magnitudes ** q).sum(axis=axis)) ** (1.0 / q)


def triebel_lizorkin_norm(r, p, q, f, basis):
    """Norm of (sum over levels of ell^{rq} |P_ell f(z)|^q)^{1/q} in L^p.

    q = inf takes the pointwise supremum over levels, p = inf the grid
    maximum.  With r = 0, q = 2 the inner object is the square function.
    """
    if not p >= 1.0:
        raise InvalidInputError(f"p must be in [1, inf], got {p}")
    if not q > 0.0:
        raise InvalidInputError(f"q must be in (0, inf], got {q}")
    levels = f.levels()
    if not levels:
        return 0.0
    grid = basis.grid
    magnitudes = np.stack(
        [np.abs(synthesize(project(ell, f), basis).ravel()) for ell in levels]
    )
    ells = np.array(levels, dtype=float)
    if q == INF:
        inner = (ells[:, None] ** r * magnitudes).max(axis=0)
    else:
        inner = (
            (ells[:, None] ** (r * q) * magnitudes ** q).sum(axis=0)
        ) ** (1.0 / q)
    return weighted_lp_norm(inner, grid.spatial_weights, p)


def mixed_norm(series, p, q, order=NormOrder.SPACE_OUTER):
    """Mixed space-time norm of a materialized TimeSeriesField.

    space_outer: time L^q norm at each grid point, then spatial L^p.
    time_outer: spatial L^p norm of each slice, then time L^q.
    """
    order = NormOrder(order)
    if series.samples is None:
        raise InvalidInputError(
            "mixed_norm needs materialized samples; propagate with a basis"
        )
    magnitudes = np.abs(series.samples)  # (M, num_points)
    weights = series.grid.spatial_weights
    if order is NormOrder.SPACE_OUTER:
        per_point = _lq_along_axis(magnitudes, series.time_weight, q, axis=0)
        return weighted_lp_norm(per_point, weights, p)
    per_time = np.array(
        [weighted_lp_norm(row, weights, p) for row in magnitudes]
    )
    return float(_lq_along_axis(per_time, series.time_weight, q, axis=0))


def _diff(values, axis, h):
    """Second-order centered first difference; boundary slots left at zero."""
    out = np.zeros_like(values)
    src_hi = [slice(None)] * values.ndim
    src_lo = [slice(None)] * values.ndim
    dst = [slice(None)] * values.ndim
    src_hi[axis] = slice(2, None)
    src_lo[axis] = slice(None, -2)
    dst[axis] = slice(1, -1)
    out[tuple(dst)] = (values[tuple(src_hi)] - values[tuple(src_lo)]) / (2.0 * h)
    return out


def _diff2(values, axis, h):
    """Second-order centered second difference; boundary slots left at zero."""
    out = np.zeros_like(values)
    src_hi = [slice(None)] * values.ndim
    src_mid = [slice(None)] * values.ndim
    src_lo = [slice(None)] * values.ndim
    dst = [slice(None)] * values.ndim
    src_hi[axis] = slice(2, None)
    src_mid[axis] = slice(1, -1)
    src_lo[axis] = slice(None, -2)
    dst[axis] = slice(1, -1)
    out[tuple(dst)] = (
        values[tuple(src_hi)] - 2.0 * values[tuple(src_mid)] + values[tuple(src_lo)]
    ) / (h * h)
    return out


def _axis_coordinate(shape, axis, h):
    npts = shape[axis]
    coords = h * (np.arange(npts) - 0.5 * (npts - 1))
    reshape = [1] * len(shape)
    reshape[axis] = npts
    return coords.reshape(reshape)


def interior_mask(shape, width=1):
    """Boolean mask excluding a band of the given width on every axis."""
    mask = np.ones(shape, dtype=bool)
    for axis in range(len(shape)):
        idx = [slice(None)] * len(shape)
        idx[axis] = slice(0, width)
        mask[tuple(idx)] = False
        idx[axis] = slice(-width, None)
        mask[tuple(idx)] = False
    return mask


def apply_twisted_laplacian_fd(samples, n, h, form="squares"):
    """Apply the twisted Laplacian with centered finite differences.

    The operator, written so that the Fourier-Wigner eigenfunctions
    phi_{mu,nu} satisfy L phi = (2|nu| + n) phi, is

        L = -Laplacian + |z|^2 / 4 - i sum_j (x_j d/dy_j - y_j d/dx_j)
          = -sum_j (A_j^2 + B_j^2),
        A_j = d/dx_j - (i/2) y_j,  B_j = d/dy_j + (i/2) x_j.

    form="squares" groups the stencil per squared field A_j, B_j;
    form="expanded" groups it as Laplacian + rotation + potential.  Both
    share the same difference stencils, so they agree to rounding.  Samples
    must lie on the centered uniform grid with spacing h, axes ordered
    (x_1..x_n, y_1..y_n); the returned array is zero on the width-1
    boundary band, where the stencil cannot be evaluated.
    """
    values = np.asarray(samples, dtype=complex)
    if values.ndim != 2 * n:
        raise InvalidInputError(
            f"expected {2 * n} axes for n={n}, got shape {values.shape}"
        )
    if min(values.shape) < 5:
        raise InvalidInputError(
            f"grid too small for the interior stencil: shape {values.shape}"
        )
    coords = [_axis_coordinate(values.shape, axis, h) for axis in range(2 * n)]
    out = np.zeros_like(values)
    if form == "squares":
        for j in range(n):
            x, y = coords[j], coords[n + j]
            a_sq = (
                _diff2(values, j, h)
                - 1j * y * _diff(values, j, h)
                - 0.25 * y * y * values
            )
            b_sq = (
                _diff2(values, n + j, h)
                + 1j * x * _diff(values, n + j, h)
                - 0.25 * x * x * values
            )
            out -= a_sq + b_sq
    elif form == "expanded":
        rotation = np.zeros_like(values)
        radius_sq = np.zeros_like(values, dtype=float)
        for j in range(n):
            x, y = coords[j], coords[n + j]
            out -= _diff2(values, j, h) + _diff2(values, n + j, h)
            rotation += x * _diff(values, n + j, h) - y * _diff(values, j, h)
            radius_sq = radius_sq + x * x + y * y
        out += 0.25 * radius_sq * values - 1j * rotation
    else:
        raise InvalidInputError(f"unknown stencil form {form!r}")
    band = ~interior_mask(values.shape, width=1)
    out[band] = 0.0
    return out
