"""Special Hermite eigenbasis on a tensor grid.

Each basis function is the Fourier-Wigner pairing of two Hermite functions,

    phi_{mu,nu}(x, y) = (2 pi)^{-n/2} * integral over R^n of
                        e^{i x.xi} phi_mu(xi + y/2) phi_nu(xi - y/2) dxi,

with z = (x_1..x_n, y_1..y_n).  The integral factors coordinate by
coordinate, and each 1-D factor is computed by Gauss-Hermite quadrature with
the Gaussian stripped from the integrand analytically:

    (2 pi)^{-1/2} e^{-y^2/4} * sum_k w_k e^{i x xi_k} p_mu(xi_k + y/2)
                                              p_nu(xi_k - y/2),

where p_k(u) = phi_k(u) e^{u^2/2} is the polynomial factor.  analyze and
synthesize convert between grid samples and coefficients on a truncated
(mu, nu) index set.
"""

import itertools
import math
import struct
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    ConfigError,
    InvalidInputError,
    ResourceLimitError,
    TruncationKeyError,
    TruncationWarning,
)
from .special_functions import (
    gauss_hermite_rule,
    hermite_polynomial_table,
    multi_index_order,
    validate_multi_index,
)

__all__ = [
    "QuadratureGrid",
    "BasisTable",
    "SpectralField",
    "eval_special_hermite",
    "evaluate_pairs",
    "build_basis",
    "analyze",
    "synthesize",
    "save_basis",
    "load_basis",
    "DEFAULT_QUAD_ORDER",
    "DEFAULT_MEMORY_CAP",
    "NORM_TOLERANCE",
]

TWO_PI = 2.0 * math.pi

DEFAULT_QUAD_ORDER = 200
DEFAULT_MEMORY_CAP = 4_000_000_000  # bytes of basis storage
NORM_TOLERANCE = 2e-6

BASIS_MAGIC = b"TWL1"


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform tensor grid on [-R, R]^{2n} with trapezoid weights, plus a
    periodic time axis of M samples t_j = 2 pi j / M, each of weight 2 pi / M.
    """

    n: int
    R: float
    h: float
    M: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError(f"dimension n must be >= 1, got {self.n}")
        if not (self.R > 0.0 and math.isfinite(self.R)):
            raise InvalidInputError(f"R must be positive and finite, got {self.R}")
        if not (self.h > 0.0 and math.isfinite(self.h)):
            raise InvalidInputError(f"h must be positive and finite, got {self.h}")
        steps = round(2.0 * self.R / self.h)
        if steps < 1 or abs(steps * self.h - 2.0 * self.R) > 1e-9 * 2.0 * self.R:
            raise InvalidInputError(
                f"2R/h must be an integer: R={self.R}, h={self.h}"
            )
        if self.M < 1:
            raise InvalidInputError(f"M must be >= 1, got {self.M}")

    @cached_property
    def axis(self):
        """The shared 1-D axis; every one of the 2n coordinates uses it."""
        steps = round(2.0 * self.R / self.h)
        return np.linspace(-self.R, self.R, steps + 1)

    @cached_property
    def axis_weights(self):
        w = np.full(self.axis.size, self.h)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    @property
    def num_axis_points(self):
        return self.axis.size

    @property
    def shape(self):
        return (self.axis.size,) * (2 * self.n)

    @property
    def num_points(self):
        return self.axis.size ** (2 * self.n)

    @cached_property
    def spatial_weights(self):
        """Flattened tensor-product trapezoid weights, row-major."""
        w = self.axis_weights
        total = w
        for _ in range(2 * self.n - 1):
            total = np.multiply.outer(total, w)
        return total.ravel()

    @cached_property
    def coordinates(self):
        """2n flattened coordinate arrays ordered (x_1..x_n, y_1..y_n)."""
        mesh = np.meshgrid(*([self.axis] * (2 * self.n)), indexing="ij")
        return tuple(m.ravel() for m in mesh)

    @cached_property
    def times(self):
        return TWO_PI * np.arange(self.M) / self.M

    @property
    def time_weight(self):
        return TWO_PI / self.M


def _normalize_caps(caps, n):
    """Accept a scalar cap or a length-n sequence; return a tuple of n ints."""
    if isinstance(caps, (int, np.integer)):
        caps = (int(caps),) * n
    caps = tuple(int(c) for c in caps)
    if len(caps) != n or any(c < 0 for c in caps):
        raise InvalidInputError(
            f"truncation caps must be non-negative, one per coordinate: {caps!r}"
        )
    return caps


def _normalize_truncation(truncation, n):
    if len(truncation) != 2:
        raise InvalidInputError(
            "truncation must be a (mu_max, nu_max) pair of caps"
        )
    return _normalize_caps(truncation[0], n), _normalize_caps(truncation[1], n)


def _index_range(caps):
    return list(itertools.product(*[range(c + 1) for c in caps]))


def _check_quad_order(quad_order, max_mu_order, max_nu_order):
    minimum = 2 * (max(max_mu_order, max_nu_order) + 1)
    if quad_order < minimum:
        raise ConfigError(
            f"quad_order {quad_order} is below the minimum {minimum} required "
            f"for indices of order up to {max(max_mu_order, max_nu_order)}"
        )
    if quad_order > 1024:
        raise ConfigError(f"quad_order {quad_order} exceeds the maximum 1024")


def _pair_table_1d(mu_cap, nu_cap, axis, rule):
    """1-D factor values, shape (mu_cap+1, nu_cap+1, len(axis), len(axis)).

    Entry [a, b, i, j] is the 1-D Fourier-Wigner factor for orders (a, b) at
    (x, y) = (axis[i], axis[j]).
    """
    xi, w = rule.nodes, rule.weights
    npts = axis.size
    phases = np.exp(1j * np.outer(xi, axis))  # (m, Nx)
    out = np.empty((mu_cap + 1, nu_cap + 1, npts, npts), dtype=complex)
    prefactor = (TWO_PI ** -0.5) * np.exp(-0.25 * axis * axis)
    for j, y in enumerate(axis):
        plus = hermite_polynomial_table(mu_cap, xi + 0.5 * y)
        minus = hermite_polynomial_table(nu_cap, xi - 0.5 * y)
        weighted = plus[:, None, :] * (minus[None, :, :] * w)
        block = weighted.reshape(-1, xi.size) @ phases
        out[:, :, :, j] = prefactor[j] * block.reshape(mu_cap + 1, nu_cap + 1, npts)
    return out


def _rows_1d(pairs, axis, rule):
    """Rows for an explicit pair list in one dimension, streaming over y."""
    xi, w = rule.nodes, rule.weights
    npts = axis.size
    mu_idx = np.array([p[0][0] for p in pairs])
    nu_idx = np.array([p[1][0] for p in pairs])
    mu_cap = int(mu_idx.max())
    nu_cap = int(nu_idx.max())
    phases = np.exp(1j * np.outer(xi, axis))  # (m, Nx)
    out = np.empty((len(pairs), npts * npts), dtype=complex)
    prefactor = (TWO_PI ** -0.5) * np.exp(-0.25 * axis * axis)
    for j, y in enumerate(axis):
        plus = hermite_polynomial_table(mu_cap, xi + 0.5 * y)
        minus = hermite_polynomial_table(nu_cap, xi - 0.5 * y)
        weighted = (plus[mu_idx] * minus[nu_idx]) * w
        out[:, j::npts] = prefactor[j] * (weighted @ phases)
    return out


def evaluate_pairs(pairs, grid, quad_order=DEFAULT_QUAD_ORDER):
    """Sample phi_{mu,nu} on the grid for each (mu, nu) in pairs.

    Returns a complex array of shape (len(pairs), grid.num_points) with
    row-major flattening over the axes (x_1..x_n, y_1..y_n).
    """
    n = grid.n
    pairs = [
        (validate_multi_index(mu, n), validate_multi_index(nu, n))
        for mu, nu in pairs
    ]
    max_mu = max((multi_index_order(mu) for mu, _ in pairs), default=0)
    max_nu = max((multi_index_order(nu) for _, nu in pairs), default=0)
    _check_quad_order(quad_order, max_mu, max_nu)
    rule = gauss_hermite_rule(quad_order)
    if n == 1:
        return _rows_1d(pairs, grid.axis, rule)

    caps = [
        (
            max(mu[j] for mu, _ in pairs),
            max(nu[j] for _, nu in pairs),
        )
        for j in range(n)
    ]
    tables = {}
    for cap in set(caps):
        tables[cap] = _pair_table_1d(cap[0], cap[1], grid.axis, rule)
    # Axes of the per-coordinate product come out as (x_1,y_1,...,x_n,y_n);
    # permute to the grid convention (x_1..x_n, y_1..y_n).
    perm = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    rows = np.empty((len(pairs), grid.num_points), dtype=complex)
    for row, (mu, nu) in enumerate(pairs):
        factor = tables[caps[0]][mu[0], nu[0]]
        for j in range(1, n):
            factor = np.multiply.outer(factor, tables[caps[j]][mu[j], nu[j]])
        rows[row] = factor.transpose(perm).ravel()
    return rows


def eval_special_hermite(mu, nu, z, quad_order=DEFAULT_QUAD_ORDER):
    """Evaluate phi_{mu,nu} at a single point z = (x_1..x_n, y_1..y_n)."""
    n = len(mu)
    mu = validate_multi_index(mu, n)
    nu = validate_multi_index(nu, n)
    z = np.asarray(z, dtype=float)
    if z.shape != (2 * n,) or not np.all(np.isfinite(z)):
        raise InvalidInputError(
            f"z must be a finite point in R^{2 * n}, got {z!r}"
        )
    _check_quad_order(quad_order, multi_index_order(mu), multi_index_order(nu))
    rule = gauss_hermite_rule(quad_order)
    xi, w = rule.nodes, rule.weights
    value = complex(1.0)
    for j in range(n):
        x, y = z[j], z[n + j]
        plus = hermite_polynomial_table(mu[j], xi + 0.5 * y)[mu[j]]
        minus = hermite_polynomial_table(nu[j], xi - 0.5 * y)[nu[j]]
        factor = np.sum(w * plus * minus * np.exp(1j * x * xi))
        value *= (TWO_PI ** -0.5) * math.exp(-0.25 * y * y) * factor
    return complex(value)


@dataclass
class BasisTable:
    """Sampled basis functions for a truncated (mu, nu) index set."""

    grid: QuadratureGrid
    mu_max: tuple
    nu_max: tuple
    quad_order: int
    pairs: list
    values: np.ndarray  # (len(pairs), grid.num_points), complex

    _row_of: dict = field(init=False, repr=False)

    def __post_init__(self):
        self._row_of = {pair: i for i, pair in enumerate(self.pairs)}

    @property
    def n(self):
        return self.grid.n

    def __contains__(self, pair):
        return pair in self._row_of

    def row(self, mu, nu):
        return self.values[self._row_of[(tuple(mu), tuple(nu))]]

    @cached_property
    def levels(self):
        """Sorted Landau levels present, with the rows at each level."""
        by_level = {}
        for i, (_, nu) in enumerate(self.pairs):
            by_level.setdefault(2 * multi_index_order(nu) + self.n, []).append(i)
        return {ell: np.array(rows) for ell, rows in sorted(by_level.items())}

    def grid_norms(self):
        """Grid L2 norm of every stored function."""
        w = self.grid.spatial_weights
        return np.sqrt(np.abs(self.values) ** 2 @ w).real

    def gram(self):
        """Weighted Gram matrix of the stored functions."""
        weighted = self.values * self.grid.spatial_weights
        return weighted @ self.values.conj().T

    def gram_deviation(self):
        """Max entrywise distance of the Gram matrix from the identity."""
        g = self.gram()
        return float(np.abs(g - np.eye(len(self.pairs))).max())


def build_basis(
    n,
    truncation,
    grid,
    quad_order=DEFAULT_QUAD_ORDER,
    memory_cap=DEFAULT_MEMORY_CAP,
):
    """Build the sampled basis for all mu <= mu_max, nu <= nu_max.

    The table holds prod(mu_max_i + 1) * prod(nu_max_j + 1) functions.  A
    ResourceLimitError is raised before allocation if the estimated storage
    exceeds memory_cap bytes.  A TruncationWarning is emitted when any grid
    norm deviates from 1 by more than NORM_TOLERANCE, which indicates the
    grid radius R is clipping the Gaussian tails.
    """
    if grid.n != n:
        raise InvalidInputError(f"grid dimension {grid.n} does not match n={n}")
    mu_caps, nu_caps = _normalize_truncation(truncation, n)
    pairs = [
        (mu, nu)
        for mu in _index_range(mu_caps)
        for nu in _index_range(nu_caps)
    ]
    estimate = len(pairs) * grid.num_points * 16
    if estimate > memory_cap:
        raise ResourceLimitError(
            f"basis table would need {estimate} bytes "
            f"({len(pairs)} functions x {grid.num_points} points), "
            f"cap is {memory_cap}"
        )
    values = evaluate_pairs(pairs, grid, quad_order)
    table = BasisTable(
        grid=grid,
        mu_max=mu_caps,
        nu_max=nu_caps,
        quad_order=quad_order,
        pairs=pairs,
        values=values,
    )
    norms = table.grid_norms()
    worst = int(np.argmax(np.abs(norms - 1.0)))
    deviation = abs(norms[worst] - 1.0)
    if deviation > NORM_TOLERANCE:
        warnings.warn(
            f"grid norm of phi_{pairs[worst]} is {norms[worst]:.6g}; "
            f"R={grid.R} is truncating basis mass (deviation {deviation:.3g})",
            TruncationWarning,
            stacklevel=2,
        )
    return table


@dataclass
class SpectralField:
    """A function represented by coefficients on a truncated (mu, nu) set."""

    n: int
    mu_max: tuple
    nu_max: tuple
    coeffs: dict  # (mu, nu) -> complex

    def __post_init__(self):
        self.mu_max = _normalize_caps(self.mu_max, self.n)
        self.nu_max = _normalize_caps(self.nu_max, self.n)
        for mu, nu in self.coeffs:
            validate_multi_index(mu, self.n)
            validate_multi_index(nu, self.n)
            if any(m > c for m, c in zip(mu, self.mu_max)) or any(
                v > c for v, c in zip(nu, self.nu_max)
            ):
                raise TruncationKeyError(
                    f"coefficient index {(mu, nu)} exceeds truncation "
                    f"({self.mu_max}, {self.nu_max})"
                )

    def items_sorted(self):
        return sorted(self.coeffs.items())

    def norm(self):
        """Coefficient L2 norm; equals the L2 norm of the function."""
        return math.sqrt(sum(abs(c) ** 2 for _, c in self.items_sorted()))

    def levels(self):
        return sorted({2 * multi_index_order(nu) + self.n for _, nu in self.coeffs})

    def max_level(self):
        levels = self.levels()
        return levels[-1] if levels else self.n

    def map_coeffs(self, fn):
        """New field with each coefficient c at key (mu, nu) replaced by fn(key, c)."""
        return SpectralField(
            self.n,
            self.mu_max,
            self.nu_max,
            {key: fn(key, c) for key, c in self.coeffs.items()},
        )


def analyze(samples, basis):
    """Coefficients <f, phi_{mu,nu}> of grid samples against the basis."""
    samples = np.asarray(samples)
    grid = basis.grid
    if samples.shape != grid.shape and samples.shape != (grid.num_points,):
        raise InvalidInputError(
            f"sample shape {samples.shape} does not match grid shape {grid.shape}"
        )
    flat = samples.reshape(-1).astype(complex)
    vec = basis.values.conj() @ (grid.spatial_weights * flat)
    coeffs = {pair: complex(v) for pair, v in zip(basis.pairs, vec)}
    return SpectralField(basis.n, basis.mu_max, basis.nu_max, coeffs)


def synthesize(field, basis):
    """Grid samples of sum of coefficient * phi_{mu,nu}."""
    missing = [key for key in field.coeffs if key not in basis]
    if missing:
        raise TruncationKeyError(
            f"field indices outside the basis truncation: {sorted(missing)}"
        )
    vec = np.zeros(len(basis.pairs), dtype=complex)
    for key, c in field.items_sorted():
        vec[basis._row_of[key]] = c
    return (vec @ basis.values).reshape(basis.grid.shape)


def save_basis(table, path):
    """Write the basis table to a little-endian binary cache file.

    Layout: magic "TWL1"; int64 n; n int64 mu caps; n int64 nu caps;
    float64 R; float64 h; int64 quad_order; then the value rows in pair
    order, each point as (real, imag) float64.
    """
    n = table.n
    header = struct.pack(
        "<4sq" + "q" * n + "q" * n + "ddq",
        BASIS_MAGIC,
        n,
        *table.mu_max,
        *table.nu_max,
        table.grid.R,
        table.grid.h,
        table.quad_order,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(table.values, dtype="<c16").tobytes())


def load_basis(path, M=1, revalidate=True, gram_tol=1e-6):
    """Load a basis cache and revalidate it against the Gram identity test."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != BASIS_MAGIC:
            raise ConfigError(f"{path}: bad magic {magic!r}, expected {BASIS_MAGIC!r}")
        (n,) = struct.unpack("<q", fh.read(8))
        if n < 1:
            raise ConfigError(f"{path}: invalid dimension {n}")
        mu_caps = struct.unpack("<" + "q" * n, fh.read(8 * n))
        nu_caps = struct.unpack("<" + "q" * n, fh.read(8 * n))
        R, h, quad_order = struct.unpack("<ddq", fh.read(24))
        grid = QuadratureGrid(n=n, R=R, h=h, M=M)
        pairs = [
            (mu, nu)
            for mu in _index_range(mu_caps)
            for nu in _index_range(nu_caps)
        ]
        data = np.frombuffer(fh.read(), dtype="<c16")
    expected = len(pairs) * grid.num_points
    if data.size != expected:
        raise ConfigError(
            f"{path}: payload holds {data.size} values, expected {expected}"
        )
    table = BasisTable(
        grid=grid,
        mu_max=tuple(int(c) for c in mu_caps),
        nu_max=tuple(int(c) for c in nu_caps),
        quad_order=int(quad_order),
        pairs=pairs,
        values=data.reshape(len(pairs), grid.num_points).astype(complex),
    )
    if revalidate:
        deviation = table.gram_deviation()
        if deviation > gram_tol:
            raise ConfigError(
                f"{path}: cache failed Gram revalidation "
                f"(deviation {deviation:.3g} > {gram_tol:.3g})"
            )
    return table
