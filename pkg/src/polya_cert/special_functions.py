"""Bessel functions J_nu, their first zeros, Gamma, and the radial energy inequality.

Everything here is real-order, nonnegative-argument only; that is all the
certificate machinery needs (orders up to nu = 12 enter through the
high-dimension tables, arguments stay below ~30).
"""

import heapq
import math
from functools import lru_cache

import numpy as np
from scipy import special as _sp

__all__ = [
    "bessel_j",
    "bessel_zero",
    "gamma_fn",
    "bessel_energy_gap",
    "bessel_identity_residual",
    "quad_gk",
    "BracketingError",
    "QuadratureError",
]


class BracketingError(RuntimeError):
    """Zero search failed to bracket a sign change."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature exceeded its subdivision budget."""


def _validate_order(nu):
    if not np.isfinite(nu) or nu < 0:
        raise ValueError(f"Bessel order must be finite and >= 0, got {nu}")


def bessel_j(nu, t):
    """Evaluate J_nu(t) and J_nu'(t) for nu >= 0, t >= 0.

    Accepts scalar or array t; returns (value, derivative) with matching shape.
    Relative accuracy is that of the underlying AMOS routines (~1e-13 on the
    working range), which is what the certificate tolerances assume.
    """
    _validate_order(nu)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("bessel_j requires t >= 0")
    val = _sp.jv(nu, t_arr)
    deriv = _sp.jvp(nu, t_arr, n=1)
    if np.isscalar(t) or t_arr.ndim == 0:
        return float(val), float(deriv)
    return val, deriv


def _bessel_second_derivative(nu, t):
    # recurrence-based (J_{nu-2} - 2 J_nu + J_{nu+2})/4; independent of the ODE
    return _sp.jvp(nu, t, n=2)


@lru_cache(maxsize=256)
def bessel_zero(nu):
    """First positive zero j_nu of J_nu, for 0 <= nu <= 20.

    Coarse sign-change scan (step 0.1 from max(nu, 1)), bisection down to
    1e-6, then Newton polishing; the bracket guarantees we never slide to a
    higher zero. Absolute accuracy ~1e-12.
    """
    nu = float(nu)
    _validate_order(nu)
    if nu > 20:
        raise ValueError(f"bessel_zero supports 0 <= nu <= 20, got {nu}")

    # J_nu > 0 on (0, j_nu), so scan until the first sign change.
    start = max(nu, 1.0)
    ts = start + 0.1 * np.arange(0, 131)  # j_nu - nu < 7 for nu <= 20
    vals = _sp.jv(nu, ts)
    neg = np.nonzero(vals <= 0.0)[0]
    if len(neg) == 0 or neg[0] == 0:
        raise BracketingError(f"no sign change of J_{nu} found in [{start}, {ts[-1]}]")
    lo, hi = ts[neg[0] - 1], ts[neg[0]]

    flo = _sp.jv(nu, lo)
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        fmid = _sp.jv(nu, mid)
        if fmid == 0.0:
            lo = hi = mid
            break
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid

    root = 0.5 * (lo + hi)
    for _ in range(60):
        f = _sp.jv(nu, root)
        fp = _sp.jvp(nu, root, n=1)
        step = f / fp
        new = root - step
        if not (lo - 1e-6 <= new <= hi + 1e-6):
            new = 0.5 * (lo + hi)  # Newton left the bracket; fall back
        if abs(new - root) <= 1e-14 * max(1.0, abs(root)):
            root = new
            break
        root = new

    # post: sign change across the returned point
    if not _sp.jv(nu, root - 1e-7) * _sp.jv(nu, root + 1e-7) < 0:
        raise BracketingError(f"refined root {root} of J_{nu} lost its bracket")
    return float(root)


# Lanczos approximation, g = 7 with 9 coefficients; relative error < 1e-13
# on the positive axis once arguments below 0.5 are lifted by the recurrence.
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x):
    """Gamma(x) for real x > 0 via the Lanczos approximation."""
    x = float(x)
    if not np.isfinite(x) or x <= 0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    if x < 0.5:
        # keep the Lanczos series in its accurate range without reflection
        return gamma_fn(x + 1.0) / x
    z = x - 1.0
    acc = _LANCZOS_C[0]
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


# Gauss-Kronrod 7-15 nodes on [-1, 1] (positive half; mirrored below).
_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144838258730,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.0,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)

_GK_NODES = np.concatenate((-_XGK[:-1], _XGK[::-1]))  # 15 ascending nodes
_GK_WEIGHTS = np.concatenate((_WGK[:-1], _WGK[::-1]))
_G_WEIGHTS = np.zeros(15)
_G_WEIGHTS[1:-1:2] = np.concatenate((_WG[:-1], _WG[::-1]))


def _gk15(f, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fx = f(mid + half * _GK_NODES)
    k = half * float(np.dot(_GK_WEIGHTS, fx))
    g = half * float(np.dot(_G_WEIGHTS, fx))
    return k, abs(k - g)


def quad_gk(f, a, b, abs_tol=1e-10, max_intervals=100_000):
    """Adaptive Gauss-Kronrod (7-15) integration of a vectorized integrand.

    Splits the interval with the largest Kronrod/Gauss discrepancy until the
    summed discrepancy falls below abs_tol. The discrepancy overestimates the
    Kronrod error, so the returned value is well inside the tolerance.
    """
    if b < a:
        raise ValueError("quad_gk requires a <= b")
    if b == a:
        return 0.0
    val, err = _gk15(f, a, b)
    heap = [(-err, a, b, val)]
    total_err = err
    while total_err > abs_tol:
        if len(heap) >= max_intervals:
            raise QuadratureError(
                f"quad_gk did not reach abs_tol={abs_tol} within {max_intervals} intervals"
            )
        neg_err, ia, ib, _ = heapq.heappop(heap)
        total_err += neg_err  # neg_err is negative
        im = 0.5 * (ia + ib)
        for ja, jb in ((ia, im), (im, ib)):
            v, e = _gk15(f, ja, jb)
            heapq.heappush(heap, (-e, ja, jb, v))
            total_err += e
    return sum(item[3] for item in heap)


def bessel_energy_gap(nu, s):
    """Both sides of the radial energy comparison for the profile t^(-nu) J_nu(t).

    Returns (lhs, rhs) with
        lhs = int_0^s ((t^(-nu) J_nu(t))')^2 t^(2nu+1) dt
        rhs = int_0^s J_nu(t)^2 t dt,
    each to 1e-10 absolute. Valid for 0 <= s <= j_nu; lhs <= rhs there, with
    equality exactly at s = j_nu.
    """
    _validate_order(nu)
    jnu = bessel_zero(nu)
    if s < 0 or s > jnu + 1e-9:
        raise ValueError(f"s must lie in [0, j_nu={jnu}], got {s}")
    if s == 0:
        return 0.0, 0.0
    s = min(s, jnu)

    def grad_integrand(t):
        # ((t^-nu J)' )^2 t^(2nu+1) == (J' - nu J / t)^2 t, which is finite at 0+
        val = _sp.jv(nu, t)
        deriv = _sp.jvp(nu, t, n=1)
        return (deriv - nu * val / t) ** 2 * t

    def mass_integrand(t):
        return _sp.jv(nu, t) ** 2 * t

    lhs = quad_gk(grad_integrand, 0.0, s, abs_tol=1e-10)
    rhs = quad_gk(mass_integrand, 0.0, s, abs_tol=1e-10)
    return lhs, rhs


def bessel_identity_residual(nu, t):
    """Residual of d/dt[(t^(-nu) J_nu)' t^(2nu+1)] = -t^(nu+1) J_nu.

    Expanded via independent evaluations of J, J', J'' (the second derivative
    comes from the neighbor-order recurrence, not from the ODE):
        |t^(nu+1) J'' + t^nu J' - nu^2 t^(nu-1) J + t^(nu+1) J|.
    """
    _validate_order(nu)
    t = float(t)
    if t <= 0:
        raise ValueError(f"bessel_identity_residual requires t > 0, got {t}")
    val = _sp.jv(nu, t)
    d1 = _sp.jvp(nu, t, n=1)
    d2 = _bessel_second_derivative(nu, t)
    return abs(
        t ** (nu + 1) * d2 + t**nu * d1 - nu * nu * t ** (nu - 1) * val + t ** (nu + 1) * val
    )
