"""Closed-form Neumann spectra used as external oracles for validation.

Rectangles have eigenvalues pi^2 (m^2/w^2 + n^2/h^2); the unit disk's first
nonzero eigenvalue is the squared first zero of J_1'. Spectra built here carry
mesh_h = 0 so the pipeline treats them as exact.
"""

import math

import numpy as np

from .special_functions import bessel_j
from .spectrum import NeumannSpectrum

__all__ = [
    "rectangle_neumann_eigenvalues",
    "square_neumann_eigenvalues",
    "rectangle_spectrum",
    "square_spectrum",
    "disk_first_nonzero_eigenvalue",
]


def rectangle_neumann_eigenvalues(width, height, lam_max):
    """All Neumann eigenvalues of a width x height rectangle up to lam_max, sorted."""
    if width <= 0 or height <= 0 or lam_max < 0:
        raise ValueError("invalid rectangle or lambda range")
    pi2 = math.pi**2
    m_max = int(math.floor(width * math.sqrt(lam_max) / math.pi)) + 1
    n_max = int(math.floor(height * math.sqrt(lam_max) / math.pi)) + 1
    vals = []
    for m in range(m_max + 1):
        for n in range(n_max + 1):
            mu = pi2 * (m * m / width**2 + n * n / height**2)
            if mu <= lam_max + 1e-12:
                vals.append(mu)
    return np.sort(np.array(vals))


def square_neumann_eigenvalues(lam_max):
    return rectangle_neumann_eigenvalues(1.0, 1.0, lam_max)


def rectangle_spectrum(width, height, lam_max) -> NeumannSpectrum:
    """Analytic spectrum packaged for the counting function (mesh_h = 0)."""
    eigs = rectangle_neumann_eigenvalues(width, height, lam_max)
    return NeumannSpectrum(eigenvalues=eigs, mesh_h=0.0, domain_area=width * height)


def square_spectrum(lam_max) -> NeumannSpectrum:
    return rectangle_spectrum(1.0, 1.0, lam_max)


def disk_first_nonzero_eigenvalue(radius=1.0):
    """mu_2 of the disk: square of the first positive zero of J_1', over radius^2.

    Found by bisection plus Newton on J_1' in (1, 3); the zero sits near
    1.8412 and is simple.
    """
    lo, hi = 1.0, 3.0

    def d1(t):
        return bessel_j(1, t)[1]

    flo = d1(lo)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = d1(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    root = 0.5 * (lo + hi)
    for _ in range(8):
        val, _ = bessel_j(1, root)
        # J1'' from the ODE: t^2 J'' + t J' + (t^2 - 1) J = 0 with J' = 0 at the root
        second = -(root**2 - 1.0) * val / root**2
        deriv = d1(root)
        step = deriv / second
        root -= step
        if abs(step) < 1e-14:
            break
    return (root / radius) ** 2
