"""Radial Bessel trial functions and their Rayleigh-quotient certificates.

Each center carries the compactly supported profile F(|x - x_k|); disjoint
supports make the max of the per-center Rayleigh quotients an upper bound for
the l-th Neumann eigenvalue (min-max over the l-dimensional span).
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .geometry import ConvexPolygon
from .special_functions import bessel_j, bessel_zero, gamma_fn

__all__ = [
    "BesselProfile",
    "TrialFunctionPack",
    "RayleighQuotient",
    "CertificateError",
    "DegenerateSupportError",
    "rayleigh_quotient",
    "build_pack",
    "certified_upper_bound",
]

_TWO_PI = 2.0 * math.pi


class CertificateError(RuntimeError):
    """A quotient exceeded its provable bound; points at a quadrature bug."""


class DegenerateSupportError(ValueError):
    """The trial function carries no mass inside the domain."""


class BesselProfile:
    """Radial profile rho^(1-d/2) J_(d/2-1)(rho j / r), cut off at rho = r.

    The general-d formula is kept, but only d = 2 (where the profile is
    J_0(rho j_0 / r)) is exercised numerically.
    """

    def __init__(self, r, d=2):
        if r <= 0:
            raise ValueError("support radius r must be positive")
        if d < 2 or int(d) != d:
            raise ValueError("dimension d must be an integer >= 2")
        self.r = float(r)
        self.d = int(d)
        self.nu = d / 2.0 - 1.0
        self.jnu = bessel_zero(self.nu)
        self._scale = self.jnu / self.r

    def evaluate(self, rho):
        """Return (F, F') at radii rho; both vanish for rho >= r."""
        rho_arr = np.asarray(rho, dtype=float)
        scalar = rho_arr.ndim == 0
        rho_arr = np.atleast_1d(rho_arr)
        if np.any(rho_arr < 0):
            raise ValueError("radii must be nonnegative")
        inside = rho_arr < self.r
        t = self._scale * rho_arr
        F = np.zeros_like(rho_arr)
        Fp = np.zeros_like(rho_arr)
        if np.any(inside):
            ti = t[inside]
            val, deriv = bessel_j(self.nu, ti)
            if self.nu == 0.0:
                F[inside] = val
                Fp[inside] = self._scale * deriv
            else:
                ri = rho_arr[inside]
                pos = ri > 0
                F_in = np.empty_like(ri)
                Fp_in = np.empty_like(ri)
                F_in[pos] = ri[pos] ** (-self.nu) * val[pos]
                Fp_in[pos] = (
                    self._scale * ri[pos] ** (-self.nu) * deriv[pos]
                    - self.nu * ri[pos] ** (-self.nu - 1.0) * val[pos]
                )
                # series limit at the origin
                F_in[~pos] = (self._scale / 2.0) ** self.nu / gamma_fn(self.nu + 1.0)
                Fp_in[~pos] = 0.0
                F[inside] = F_in
                Fp[inside] = Fp_in
        if scalar:
            return float(F[0]), float(Fp[0])
        return F, Fp

    __call__ = evaluate


class RayleighQuotient(NamedTuple):
    numerator: float
    denominator: float
    quotient: float


_LEGGAUSS_CACHE = {}


def _leggauss(n):
    if n not in _LEGGAUSS_CACHE:
        _LEGGAUSS_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _LEGGAUSS_CACHE[n]


def _radial_integrals(profile, radii, n_radial):
    """Gauss-Legendre values of (int F'^2 rho^(d-1), int F^2 rho^(d-1)) on [0, R]."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    x, w = _leggauss(n_radial)
    rho = 0.5 * np.outer(x + 1.0, radii)  # (q, m)
    wts = 0.5 * np.outer(w, radii)
    F, Fp = profile.evaluate(rho.ravel())
    F = F.reshape(rho.shape)
    Fp = Fp.reshape(rho.shape)
    power = rho ** (profile.d - 1)
    num = np.sum(wts * Fp**2 * power, axis=0)
    den = np.sum(wts * F**2 * power, axis=0)
    return num, den


def _arc_breakpoints(p, center, r):
    """Angular arcs on which the capped exit distance is analytic.

    Returns a list of (alpha, beta, q, phi) where on (alpha, beta) the ray
    exit distance equals q / cos(omega - phi) for the active edge's line, or
    q = inf for arcs that leave the domain immediately (boundary centers).
    """
    center = np.asarray(center, dtype=float)
    diff = p.vertices - center[None, :]
    dist = np.hypot(diff[:, 0], diff[:, 1])
    keep = dist > 1e-12 * max(p.diameter, 1.0)
    ang = np.mod(np.arctan2(diff[keep, 1], diff[keep, 0]), _TWO_PI)
    ang = np.sort(np.unique(ang))
    if len(ang) == 0:
        raise ValueError("center coincides with every vertex")
    bounds = np.append(ang, ang[0] + _TWO_PI)

    # inward normals and signed line distances identify the active edge per arc
    signed = np.einsum("ej,ej->e", center[None, :] - p.vertices, p._normals)

    arcs = []
    for k in range(len(ang)):
        alpha, beta = bounds[k], bounds[k + 1]
        if beta - alpha < 1e-13:
            continue
        mid = 0.5 * (alpha + beta)
        omega = np.array([[math.cos(mid), math.sin(mid)]])
        exit_mid = float(p.ray_exit_many(center, omega)[0])
        if exit_mid == 0.0:
            continue  # ray leaves the domain immediately (center on the boundary)
        # active edge: the one whose line the midpoint ray meets at exit_mid
        foot = center + exit_mid * omega[0]
        rel = foot[None, :] - p.vertices
        t = np.einsum("ej,ej->e", rel, p._edges) / p._edge_lengths**2
        on_edge = (t >= -1e-9) & (t <= 1 + 1e-9)
        line_dev = np.abs(np.einsum("ej,ej->e", rel, p._normals))
        line_dev[~on_edge] = np.inf
        e = int(np.argmin(line_dev))
        q = float(signed[e])
        # foot direction: outward normal of the active edge
        n_out = -p._normals[e]
        phi = math.atan2(n_out[1], n_out[0])
        arcs.append((alpha, beta, q, phi))
    return arcs


def _angle_in(alpha, beta, theta):
    shifted = np.mod(theta - alpha, _TWO_PI)
    return 1e-13 < shifted < (beta - alpha) - 1e-13


def rayleigh_quotient(profile, p: ConvexPolygon, center, n_angles=256, n_radial=128):
    """Rayleigh quotient of the trial function centered at `center`.

    numerator   = int_S1 int_0^R(w) F'(rho)^2 rho^(d-1) drho dw
    denominator = int_S1 int_0^R(w) F(rho)^2  rho^(d-1) drho dw

    The angular integral is split at the polygon's vertex directions and at
    the angles where the exit distance crosses r, so every piece is analytic
    and Gauss-Legendre converges spectrally; uniform sampling alone would lose
    too much accuracy at the kinks for the 1e-8 certificate tolerance.
    """
    center = np.asarray(center, dtype=float)
    if not p.contains(center):
        raise ValueError(f"center {center} lies outside the domain")
    if n_angles < 64 or n_radial < 64:
        raise ValueError("need n_angles >= 64 and n_radial >= 64")
    r = profile.r

    num_r, den_r = _radial_integrals(profile, [r], n_radial)
    cap_num, cap_den = float(num_r[0]), float(den_r[0])

    # support entirely inside: every exit distance is at least r
    if float(p.edge_segment_distance(center).min()) >= r:
        numerator = _TWO_PI * cap_num
        denominator = _TWO_PI * cap_den
        return RayleighQuotient(numerator, denominator, numerator / denominator)

    numerator = 0.0
    denominator = 0.0
    for alpha, beta, q, phi in _arc_breakpoints(p, center, r):
        # split where q / cos(omega - phi) crosses r
        cuts = [alpha, beta]
        if q < r:
            delta = math.acos(min(1.0, q / r))
            for theta in (phi - delta, phi + delta):
                if _angle_in(alpha, beta, theta):
                    cuts.append(alpha + float(np.mod(theta - alpha, _TWO_PI)))
        cuts = sorted(cuts)
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b - a < 1e-13:
                continue
            mid = 0.5 * (a + b)
            exit_mid = q / math.cos(mid - phi)
            if exit_mid >= r:
                numerator += (b - a) * cap_num
                denominator += (b - a) * cap_den
            else:
                n_w = max(12, int(math.ceil(n_angles * (b - a) / _TWO_PI)))
                xw, ww = _leggauss(n_w)
                omega = 0.5 * (b - a) * xw + 0.5 * (a + b)
                radii = q / np.cos(omega - phi)
                seg_num, seg_den = _radial_integrals(profile, radii, n_radial)
                scale = 0.5 * (b - a)
                numerator += scale * float(np.dot(ww, seg_num))
                denominator += scale * float(np.dot(ww, seg_den))

    if denominator < 1e-14:
        raise DegenerateSupportError("trial function has vanishing mass in the domain")
    return RayleighQuotient(numerator, denominator, numerator / denominator)


@dataclass
class TrialFunctionPack:
    """Centers, common support radius, and per-center Rayleigh quotients."""

    centers: np.ndarray
    r: float
    quotients: list
    d: int = 2
    n_angles: int = 256
    n_radial: int = 128

    def to_dict(self):
        return {
            "r": self.r,
            "d": self.d,
            "centers": [[float(x), float(y)] for x, y in self.centers],
            "quotients": [float(q) for q in self.quotients],
        }


def _check_separation(centers, r):
    centers = np.asarray(centers, dtype=float)
    if len(centers) >= 2:
        d2 = np.sum((centers[:, None, :] - centers[None, :, :]) ** 2, axis=-1)
        np.fill_diagonal(d2, np.inf)
        min_dist = math.sqrt(float(d2.min()))
        if min_dist < 2.0 * r - 1e-12:
            raise ValueError(
                f"centers are {min_dist:.6g} apart; supports of radius {r} would overlap"
            )


def _max_workers():
    env = os.environ.get("POLYA_CERT_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def build_pack(p, centers, r, d=2, n_angles=256, n_radial=128):
    """Compute all per-center quotients; centers must be 2r-separated."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if len(centers) == 0:
        raise ValueError("need at least one center")
    _check_separation(centers, r)
    inside = p.contains_many(centers)
    if not np.all(inside):
        raise ValueError(f"centers {np.nonzero(~inside)[0].tolist()} lie outside the domain")
    profile = BesselProfile(r, d)

    def quotient(c):
        return rayleigh_quotient(profile, p, c, n_angles=n_angles, n_radial=n_radial).quotient

    workers = _max_workers()
    if workers > 1 and len(centers) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            quotients = list(pool.map(quotient, centers))
    else:
        quotients = [quotient(c) for c in centers]
    return TrialFunctionPack(
        centers=centers, r=float(r), quotients=quotients, d=d,
        n_angles=n_angles, n_radial=n_radial,
    )


def certified_upper_bound(pack: TrialFunctionPack):
    """Max quotient of the pack: an upper bound for the l-th Neumann eigenvalue.

    Supports are disjoint, so numerator and denominator are both additive over
    linear combinations and the max of the individual quotients bounds the
    Rayleigh quotient of the whole l-dimensional trial space.
    """
    if len(pack.centers) == 0:
        raise ValueError("empty pack certifies nothing")
    _check_separation(pack.centers, pack.r)
    profile = BesselProfile(pack.r, pack.d)
    bound = profile.jnu**2 / pack.r**2
    value = max(pack.quotients)
    if value > bound * (1.0 + 1e-8):
        raise CertificateError(
            f"quotient {value} exceeds the provable bound {bound}; quadrature is broken"
        )
    return value
