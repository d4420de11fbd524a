"""One-dimensional Hermite machinery.

Normalized Hermite functions evaluated with a stable three-term recurrence,
Gauss-Hermite quadrature rules from the symmetric Jacobi eigenproblem, and
enumeration of the multi-indices that populate a Landau level.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import InvalidInputError

__all__ = [
    "SQRT_PI",
    "GaussHermiteRule",
    "gauss_hermite_rule",
    "hermite_function_values",
    "hermite_function_table",
    "hermite_polynomial_table",
    "enumerate_level",
    "multi_index_order",
    "validate_multi_index",
]

SQRT_PI = math.sqrt(math.pi)

MAX_RULE_ORDER = 1024


def _recurrence(k_max, x, first_row):
    """Run phi_{k+1} = x sqrt(2/(k+1)) phi_k - sqrt(k/(k+1)) phi_{k-1}.

    The recurrence acts on the normalized values themselves, so no factorial
    sized intermediates appear at any order.
    """
    table = np.empty((k_max + 1,) + x.shape, dtype=float)
    table[0] = first_row
    if k_max >= 1:
        table[1] = math.sqrt(2.0) * x * table[0]
    for k in range(1, k_max):
        table[k + 1] = (
            math.sqrt(2.0 / (k + 1)) * x * table[k]
            - math.sqrt(k / (k + 1.0)) * table[k - 1]
        )
    return table


def hermite_function_table(k_max, x):
    """Normalized Hermite function values phi_0(x) .. phi_{k_max}(x).

    Parameters
    ----------
    k_max : int
        Highest order to evaluate, k_max >= 0.
    x : array_like
        Evaluation points; any shape.

    Returns
    -------
    ndarray of shape (k_max + 1,) + x.shape.
    """
    if k_max < 0:
        raise InvalidInputError(f"k_max must be >= 0, got {k_max}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("Hermite evaluation requires finite x")
    first = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    return _recurrence(k_max, x, first)


def hermite_function_values(k_max, x):
    """Values [phi_0(x), ..., phi_{k_max}(x)] at a single point x."""
    x = float(x)
    if not math.isfinite(x):
        raise InvalidInputError(f"x must be finite, got {x!r}")
    return hermite_function_table(k_max, np.asarray(x))


def hermite_polynomial_table(k_max, x):
    """Values of phi_k(x) * exp(x^2 / 2), the polynomial factor of phi_k.

    This is the orthonormal-scaled Hermite polynomial; it pairs with
    Gauss-Hermite weights, which already carry the Gaussian e^{-x^2}.
    """
    if k_max < 0:
        raise InvalidInputError(f"k_max must be >= 0, got {k_max}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("Hermite evaluation requires finite x")
    first = np.full(x.shape, math.pi ** -0.25)
    return _recurrence(k_max, x, first)


@dataclass(frozen=True)
class GaussHermiteRule:
    """Nodes and weights for the weight function e^{-x^2} on the real line."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray


def gauss_hermite_rule(m):
    """Gauss-Hermite rule of order m via the symmetric tridiagonal eigenproblem.

    Nodes are the roots of the degree-m Hermite polynomial (eigenvalues of the
    Jacobi matrix of the recurrence); weights come from the first components
    of the normalized eigenvectors scaled by the zeroth moment sqrt(pi).
    Nodes and weights are symmetrized so the +/- pairing is exact.
    """
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool):
        raise InvalidInputError(f"rule order must be an integer, got {m!r}")
    if not 1 <= m <= MAX_RULE_ORDER:
        raise InvalidInputError(
            f"rule order must be in [1, {MAX_RULE_ORDER}], got {m}"
        )
    if m == 1:
        return GaussHermiteRule(1, np.zeros(1), np.array([SQRT_PI]))
    off_diag = np.sqrt(np.arange(1, m) / 2.0)
    nodes, vectors = eigh_tridiagonal(np.zeros(m), off_diag)
    weights = SQRT_PI * vectors[0] ** 2
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return GaussHermiteRule(int(m), nodes, weights)


def multi_index_order(index):
    """The order |nu| = sum of the entries."""
    return sum(index)


def validate_multi_index(index, n):
    """Check that index is a length-n tuple of non-negative integers."""
    if len(index) != n:
        raise InvalidInputError(
            f"multi-index {index!r} has length {len(index)}, expected {n}"
        )
    for entry in index:
        if not isinstance(entry, (int, np.integer)) or entry < 0:
            raise InvalidInputError(
                f"multi-index entries must be non-negative integers, got {index!r}"
            )
    return tuple(int(entry) for entry in index)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def enumerate_level(n, ell):
    """All multi-indices nu in N_0^n with 2|nu| + n = ell, lexicographically.

    Returns an empty list when ell is not in the spectrum (ell < n or
    ell - n odd).  The count is C(|nu| + n - 1, n - 1) with |nu| = (ell - n)/2.
    """
    if n < 1:
        raise InvalidInputError(f"dimension n must be >= 1, got {n}")
    residual = ell - n
    if residual < 0 or residual % 2 != 0:
        return []
    return list(_compositions(residual // 2, n))
