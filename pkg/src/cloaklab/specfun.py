r"""Cylinder functions of integer order for real positive arguments.

Bessel functions :math:`J_n`, :math:`Y_n`, the Hankel function
:math:`H^{(1)}_n = J_n + i Y_n` and their first derivatives, for
``0 <= n <= 60`` and ``0 < x <= 200`` (``x = 0`` allowed for :math:`J_n`).

Evaluation regimes
------------------
J
    ascending power series for ``x <= 2``; Hankel asymptotic expansion when
    ``x > 40 + n**2 / 4``; Miller backward recurrence normalised by the
    Neumann sum ``J_0 + 2 sum J_2k = 1`` otherwise.
Y
    ``Y_0`` and ``Y_1`` from the Hankel asymptotic expansion for ``x > 25``,
    from the Neumann series in ``J_2k`` below that, then forward recurrence
    in the order (stable for the dominant solution).

Derivatives use ``f_0' = -f_1`` and ``f_n' = (f_{n-1} - f_{n+1}) / 2``.
"""

import math

import numpy as np

from .errors import RangeError

__all__ = [
    "MAX_ORDER",
    "MAX_ARG",
    "bessel_j",
    "bessel_y",
    "hankel1",
    "bessel_j_prime",
    "bessel_y_prime",
    "hankel1_prime",
    "wronskian_residual",
    "jy_table",
    "jh",
]

MAX_ORDER = 60
MAX_ARG = 200.0

EULER_GAMMA = 0.57721566490153286061
SERIES_MAX_ARG = 2.0
Y_ASYMPTOTIC_MIN_ARG = 25.0
_RESCALE = 1e250


def _check_order(n):
    if isinstance(n, bool) or int(n) != n:
        raise RangeError(f"order must be an integer, got {n!r}")
    n = int(n)
    if n < 0 or n > MAX_ORDER:
        raise RangeError(f"order {n} outside supported range 0..{MAX_ORDER}")
    return n


def _check_arg(x, allow_zero=False):
    x = float(x)
    if not math.isfinite(x) or x > MAX_ARG or x < 0.0 or (x == 0.0 and not allow_zero):
        bound = "[0" if allow_zero else "(0"
        raise RangeError(f"argument {x!r} outside supported range {bound}, {MAX_ARG:g}]")
    return x


def _asymptotic_applies(n, x):
    return x > 40.0 + 0.25 * n * n


def _j_series(k, x):
    half = 0.5 * x
    if k == 0:
        term = 1.0
    else:
        log_term = k * math.log(half) - math.lgamma(k + 1)
        if log_term < -745.0:
            return 0.0
        term = math.exp(log_term)
    q = -half * half
    total = term
    m = 0
    while True:
        m += 1
        term *= q / (m * (m + k))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total


def _hankel_asymptotic(k, x):
    """Return (J_k(x), Y_k(x)) from the large-argument Hankel expansion."""
    mu = 4.0 * k * k
    p = 0.0
    q = 0.0
    term = 1.0
    j = 0
    while j < 500:
        if j % 4 == 0:
            p += term
        elif j % 4 == 1:
            q += term
        elif j % 4 == 2:
            p -= term
        else:
            q -= term
        j += 1
        new = term * (mu - (2 * j - 1) ** 2) / (8.0 * j * x)
        # terms may grow while (2j-1)^2 < mu; past that, stop at convergence
        # or where the asymptotic series starts to diverge
        if j > k + 1 and (abs(new) < 1e-17 or abs(new) > abs(term)):
            break
        term = new
    chi = x - (0.5 * k + 0.25) * math.pi
    amp = math.sqrt(2.0 / (math.pi * x))
    c, s = math.cos(chi), math.sin(chi)
    return amp * (p * c - q * s), amp * (p * s + q * c)


def _j_miller(nmax, x):
    top = max(nmax, x)
    start = int(1.2 * top) + 40
    start += start % 2
    vals = np.zeros(nmax + 1)
    j_up = 0.0  # J_{k+1}
    j_k = 1e-30  # J_k, arbitrary seed at k = start
    neumann = 2.0 * j_k
    for k in range(start, 0, -1):
        j_down = (2.0 * k / x) * j_k - j_up
        j_up, j_k = j_k, j_down
        order = k - 1
        if order <= nmax:
            vals[order] = j_k
        if order > 0 and order % 2 == 0:
            neumann += 2.0 * j_k
        if abs(j_k) > _RESCALE:
            j_k /= _RESCALE
            j_up /= _RESCALE
            neumann /= _RESCALE
            vals /= _RESCALE
    neumann += j_k
    return vals / neumann


def _j_all(nmax, x):
    """J_0 .. J_nmax at x >= 0 (no range checks)."""
    if x == 0.0:
        out = np.zeros(nmax + 1)
        out[0] = 1.0
        return out
    if x <= SERIES_MAX_ARG:
        return np.array([_j_series(k, x) for k in range(nmax + 1)])
    if _asymptotic_applies(nmax, x):
        return np.array([_hankel_asymptotic(k, x)[0] for k in range(nmax + 1)])
    return _j_miller(nmax, x)


def _y01(x):
    if x > Y_ASYMPTOTIC_MIN_ARG:
        return _hankel_asymptotic(0, x)[1], _hankel_asymptotic(1, x)[1]
    kmax = int(x) + 40
    kmax += kmax % 2 + 1
    j = _j_all(kmax, x)
    log_term = math.log(0.5 * x) + EULER_GAMMA
    s0 = 0.0
    s1 = 0.0
    for k in range(1, (kmax - 1) // 2 + 1):
        sign = -1.0 if k % 2 else 1.0
        s0 += sign * j[2 * k] / k
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k
    y0 = (2.0 / math.pi) * (log_term * j[0] - 2.0 * s0)
    y1 = (2.0 / math.pi) * (log_term * j[1] - j[0] / x + s1)
    return y0, y1


def _y_all(nmax, x):
    """Y_0 .. Y_nmax at x > 0 by forward recurrence (no range checks)."""
    out = np.empty(nmax + 1)
    y0, y1 = _y01(x)
    out[0] = y0
    if nmax >= 1:
        out[1] = y1
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, nmax):
            out[k + 1] = (2.0 * k / x) * out[k] - out[k - 1]
    return out


def _derivative(vals, n):
    if n == 0:
        return -vals[1]
    return 0.5 * (vals[n - 1] - vals[n + 1])


def _finite(value, name, n, x):
    if not np.all(np.isfinite(value)):
        raise RangeError(f"{name}({n}, {x!r}) overflows double precision")
    return value


def bessel_j(n, x):
    """Bessel function of the first kind J_n(x), for 0 <= x <= 200."""
    n = _check_order(n)
    x = _check_arg(x, allow_zero=True)
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= SERIES_MAX_ARG:
        return _j_series(n, x)
    if _asymptotic_applies(n, x):
        return _hankel_asymptotic(n, x)[0]
    return float(_j_miller(n, x)[n])


def bessel_y(n, x):
    """Bessel function of the second kind Y_n(x), for 0 < x <= 200."""
    n = _check_order(n)
    x = _check_arg(x)
    return _finite(float(_y_all(n, x)[n]), "bessel_y", n, x)


def hankel1(n, x):
    """Hankel function of the first kind H^(1)_n(x) = J_n(x) + i Y_n(x)."""
    return complex(bessel_j(n, x), bessel_y(n, x))


def bessel_j_prime(n, x):
    """Derivative J_n'(x)."""
    n = _check_order(n)
    x = _check_arg(x, allow_zero=True)
    if n == 0:
        return -bessel_j(1, x)
    if n == MAX_ORDER:
        return float(_derivative(_j_all(n + 1, x), n))
    return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))


def bessel_y_prime(n, x):
    """Derivative Y_n'(x)."""
    n = _check_order(n)
    x = _check_arg(x)
    return _finite(float(_derivative(_y_all(n + 1, x), n)), "bessel_y_prime", n, x)


def hankel1_prime(n, x):
    """Derivative of the Hankel function H^(1)_n'(x)."""
    return complex(bessel_j_prime(n, x), bessel_y_prime(n, x))


def wronskian_residual(n, x):
    """Return |J_n Y_n' - J_n' Y_n - 2/(pi x)| at x."""
    n = _check_order(n)
    x = _check_arg(x)
    j, jp, y, yp = jy_table(n, x)
    return abs(j[n] * yp[n] - jp[n] * y[n] - 2.0 / (math.pi * x))


def jy_table(nmax, x):
    """Tabulate J, J', Y, Y' for all orders 0..nmax at one argument.

    Returns four float arrays of length ``nmax + 1``. Entries of Y that
    overflow double precision come back as ``-inf`` rather than raising.
    """
    nmax = _check_order(nmax)
    x = _check_arg(x)
    j = _j_all(nmax + 1, x)
    y = _y_all(nmax + 1, x)
    jp = np.empty(nmax + 1)
    yp = np.empty(nmax + 1)
    jp[0] = -j[1]
    yp[0] = -y[1]
    with np.errstate(over="ignore", invalid="ignore"):
        jp[1:] = 0.5 * (j[: nmax] - j[2: nmax + 2])
        yp[1:] = 0.5 * (y[: nmax] - y[2: nmax + 2])
    return j[: nmax + 1], jp, y[: nmax + 1], yp


def jh(n, x):
    """Return ``(J_n(x), J_n'(x), H_n(x), H_n'(x))`` for one order.

    This is the bundle every mode formula consumes; the Hankel entries are
    complex.
    """
    j, jp, y, yp = jy_table(n, x)
    n = int(n)
    h = complex(j[n], y[n])
    hp = complex(jp[n], yp[n])
    _finite(np.array([h, hp]), "hankel1", n, x)
    return float(j[n]), float(jp[n]), h, hp
