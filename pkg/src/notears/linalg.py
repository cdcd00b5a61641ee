"""Dense matrix kernels shared by the numerical modules."""

import warnings

import numpy as np

# Order-13 Pade numerator/denominator coefficients for the matrix exponential,
# and the 1-norm threshold under which the approximant is accurate to double
# precision.  Inputs with a larger norm are halved s times first and the
# result is squared s times afterwards.
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152


def check_square(A, name="A"):
    """Coerce ``A`` to a float ndarray and validate it is square and finite."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError(f"{name} must be finite (no NaN/Inf entries)")
    return A


def expm(A):
    """Matrix exponential by scaling-and-squaring with an order-13 Pade approximant.

    Parameters
    ----------
    A : (d, d) array_like
        Square matrix with finite entries.

    Returns
    -------
    (d, d) ndarray
        ``e**A``.  ``expm(0) == I`` holds exactly.
    """
    A = check_square(A)
    n = A.shape[0]
    norm1 = float(np.linalg.norm(A, 1)) if n else 0.0
    squarings = 0
    if norm1 > _THETA13:
        squarings = int(np.ceil(np.log2(norm1 / _THETA13)))
        A = A / (2.0**squarings)

    b = _PADE13
    ident = np.eye(n)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A2 @ A4
    U = A @ (
        A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
        + b[7] * A6
        + b[5] * A4
        + b[3] * A2
        + b[1] * ident
    )
    V = (
        A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
        + b[6] * A6
        + b[4] * A4
        + b[2] * A2
        + b[0] * ident
    )
    E = np.linalg.solve(V - U, V + U)
    for _ in range(squarings):
        E = E @ E
    return E


def expm_taylor(A, terms=60):
    """Truncated Taylor series sum_{k=0}^{terms} A^k / k! by direct accumulation.

    Slowly convergent and only accurate for small ``||A||``; kept as an
    independent reference for :func:`expm`.
    """
    A = check_square(A)
    if terms < 1:
        raise ValueError("terms must be >= 1")
    total = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for k in range(1, terms + 1):
        term = term @ A / k
        total = total + term
    return total


def spectral_radius(A, iters=2000, tol=1e-10):
    """Estimate the largest absolute eigenvalue of ``|A|`` by power iteration.

    The iteration runs on the entrywise absolute value, which upper-bounds the
    spectral radius of ``A`` itself and is exact for nonnegative input.
    Accurate to ``tol`` when ``|A|`` has a spectral gap; if the estimate has
    not settled after ``iters`` iterations a warning is issued and the last
    estimate is returned.
    """
    A = check_square(A)
    d = A.shape[0]
    M = np.abs(A)
    v = np.full(d, 1.0 / np.sqrt(d))
    estimate = 0.0
    for _ in range(iters):
        u = M @ v
        growth = float(np.linalg.norm(u))
        if growth == 0.0:
            return 0.0
        u /= growth
        if abs(growth - estimate) <= tol * max(1.0, growth):
            return growth
        estimate = growth
        v = u
    warnings.warn(
        f"power iteration did not converge within {iters} iterations",
        RuntimeWarning,
        stacklevel=2,
    )
    return estimate
