"""Counting-function bounds, the end-to-end verification pipeline, and the
high-dimension coefficient comparison against the Kroger constant."""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ConvexPolygon
from .lattice import packing_points
from .special_functions import bessel_zero, gamma_fn
from .spectrum import NeumannSpectrum, counting_function, neumann_spectrum
from .trial_functions import build_pack, certified_upper_bound

__all__ = [
    "BoundReport",
    "DimComparison",
    "VerificationError",
    "unit_ball_volume",
    "weyl_bounds",
    "convex_bound",
    "eigenvalue_gap_check",
    "verify_counting_bound",
    "levenshtein_density",
    "dimension_comparison_table",
    "FEM_SLACK",
]

_SQRT3 = math.sqrt(3.0)

# conforming FEM eigenvalues approximate from above; counting-function
# cross-checks are run at lambda * (1 + FEM_SLACK) to absorb that error
FEM_SLACK = 0.02


class VerificationError(RuntimeError):
    """An internal consistency check of the pipeline failed."""


class SpectrumIndexError(ValueError):
    """Requested an eigenvalue beyond the computed spectrum."""


def unit_ball_volume(d):
    """Volume of the unit ball in R^d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return math.pi ** (d / 2.0) / gamma_fn(d / 2.0 + 1.0)


def weyl_bounds(area, lam, d=2):
    """(polya, kroger): the Weyl-coefficient value and its 2/(d+2) multiple.

    polya = |B_1| * area * lam^(d/2) / (2 pi)^d is the conjectured lower bound
    for the Neumann counting function; the Kroger bound is proved for all
    domains.
    """
    if area <= 0:
        raise ValueError("area must be positive")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if not 1 <= d <= 24:
        raise ValueError("dimension out of the supported range [1, 24]")
    polya = unit_ball_volume(d) * area * lam ** (d / 2.0) / (2.0 * math.pi) ** d
    kroger = 2.0 / (d + 2.0) * polya
    return polya, kroger


def convex_bound(area, lam):
    """Counting-function lower bound area * lam / (2 sqrt(3) j_0^2) for convex domains."""
    if area <= 0:
        raise ValueError("area must be positive")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    j0 = bessel_zero(0)
    return area * lam / (2.0 * _SQRT3 * j0 * j0)


def eigenvalue_gap_check(s: NeumannSpectrum, l, slack=0.01):
    """Check mu_(l+1) <= 2 sqrt(3) j_0^2 l / area on a computed spectrum.

    This is the eigenvalue form of the convex counting bound. `slack` absorbs
    discretization error when s holds finite-element eigenvalues; pass 0 for
    analytic spectra.
    """
    if l < 1:
        raise ValueError("the eigenvalue form needs l >= 1")
    if l + 1 > len(s.eigenvalues):
        raise SpectrumIndexError(f"need mu_{l + 1} but only {len(s.eigenvalues)} computed")
    j0 = bessel_zero(0)
    rhs = 2.0 * _SQRT3 * j0 * j0 * l / s.domain_area
    return float(s.eigenvalues[l]) <= rhs * (1.0 + slack)


@dataclass
class BoundReport:
    """One verification row for a (domain, lambda) pair."""

    lam: float
    area: float
    n_N: int
    polya: float
    kroger: float
    convex: float
    packing_l: int
    certificate: float | None
    passed: bool

    CSV_COLUMNS = (
        "lambda", "area", "n_N", "bound_polya", "bound_kroger",
        "bound_convex", "packing_l", "certificate", "pass",
    )

    def to_row(self):
        return (
            self.lam, self.area, self.n_N, self.polya, self.kroger,
            self.convex, self.packing_l, self.certificate, self.passed,
        )

    def to_dict(self):
        return dict(zip(self.CSV_COLUMNS, self.to_row()))


def _spectrum_for(p: ConvexPolygon, lam_needed, h=None):
    """FEM spectrum trusted up to lam_needed (i.e. largest eigenvalue beyond lam/0.8)."""
    if h is None:
        # resolve the highest needed eigenvalue to ~1% (P1 error ~ mu h^2 / 12)
        h = math.sqrt(0.10 / lam_needed)
    h = min(h, p.diameter / 8.0)
    area, perim = p.area, float(np.sum(p._edge_lengths))
    target = lam_needed / 0.8
    m = int(math.ceil(1.25 * (area * target + perim * math.sqrt(target)) / (4.0 * math.pi))) + 8
    for _ in range(4):
        spec = neumann_spectrum(p, h, m)
        if 0.8 * spec.eigenvalues[-1] >= lam_needed:
            return spec
        m = int(m * 1.6) + 4
    raise VerificationError(f"could not push the computed spectrum beyond lambda={lam_needed}")


def verify_counting_bound(
    p: ConvexPolygon,
    lam,
    h=None,
    spectrum=None,
    n_angles=256,
    n_radial=128,
) -> BoundReport:
    """Run the constructive proof once and cross-check it against a spectrum.

    Steps: r = j_0 / sqrt(lam); pack 2r-separated lattice points (their number
    l meets area*lam/(2 sqrt(3) j_0^2)); certify mu_l <= j_0^2/r^2 = lam with
    the trial-function quotients; finally count eigenvalues and check
    N(lam) >= convex bound. The eigenvalue count comes from `spectrum` when
    given (use an analytic spectrum for exact checks), otherwise from FEM with
    a slack of FEM_SLACK on the cross-check.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    area = p.area
    j0 = bessel_zero(0)
    r = j0 / math.sqrt(lam)

    packing = packing_points(p, r)
    l = packing.count
    guaranteed = packing.guaranteed_min
    if l < guaranteed - 1e-9 and guaranteed >= 1.0:
        raise VerificationError(f"packing size {l} below the averaging guarantee {guaranteed}")

    certificate = None
    if l >= 1:
        pack = build_pack(p, packing.points, r, n_angles=n_angles, n_radial=n_radial)
        certificate = certified_upper_bound(pack)
        if certificate > lam * (1.0 + 1e-8):
            raise VerificationError(
                f"certificate {certificate} exceeds lambda {lam}; quadrature is broken"
            )

    slack = FEM_SLACK
    if spectrum is None:
        spectrum = _spectrum_for(p, lam * (1.0 + FEM_SLACK), h=h)
    elif spectrum.mesh_h == 0.0:
        slack = 0.0  # analytic spectrum: no discretization error to absorb

    n_N = counting_function(spectrum, lam)
    n_slack = counting_function(spectrum, lam * (1.0 + slack))
    if n_slack < l:
        raise VerificationError(
            f"spectrum count {n_slack} at lambda*(1+{slack}) is below the packing size {l}; "
            "either the mesh is too coarse for this lambda or the min-max certificate "
            "and the eigensolver genuinely disagree"
        )

    polya, kroger = weyl_bounds(area, lam, 2)
    convex = convex_bound(area, lam)
    return BoundReport(
        lam=float(lam),
        area=float(area),
        n_N=int(n_N),
        polya=polya,
        kroger=kroger,
        convex=convex,
        packing_l=int(l),
        certificate=certificate,
        passed=bool(n_N >= convex - 1e-12),
    )


def levenshtein_density(d):
    """Upper bound j_(d/2)^d / (2^(2d) Gamma((d+2)/2)^2) for the sphere-packing density."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    jz = bessel_zero(d / 2.0)
    return jz**d / (2.0 ** (2 * d) * gamma_fn((d + 2) / 2.0) ** 2)


@dataclass
class DimComparison:
    """Coefficient comparison in dimension d >= 3.

    remark_rhs is the lattice-bound coefficient with the cell volume replaced
    through the packing-density chain (|B_1|/|cell| <= delta_d <= Levenshtein);
    strict records that it stays below the Kroger coefficient.
    """

    d: int
    kroger_coeff: float
    levenshtein_density: float
    remark_rhs: float
    strict: bool

    CSV_COLUMNS = ("d", "kroger_coeff", "levenshtein_density", "remark_rhs", "strict")

    def to_row(self):
        return (self.d, self.kroger_coeff, self.levenshtein_density, self.remark_rhs, self.strict)

    def to_dict(self):
        return dict(zip(self.CSV_COLUMNS, self.to_row()))


def dimension_comparison_table(d_min=3, d_max=24):
    """Per-dimension check that the lattice construction cannot beat Kroger for d >= 3."""
    if not 3 <= d_min <= d_max <= 24:
        raise ValueError("need 3 <= d_min <= d_max <= 24")
    rows = []
    for d in range(d_min, d_max + 1):
        b1 = unit_ball_volume(d)
        lev = levenshtein_density(d)
        j_lower = bessel_zero(d / 2.0 - 1.0)
        chain = lev / (b1 * j_lower**d)
        kroger_coeff = 2.0 / (d + 2.0) * b1 / (2.0 * math.pi) ** d
        rows.append(
            DimComparison(
                d=d,
                kroger_coeff=kroger_coeff,
                levenshtein_density=lev,
                remark_rhs=chain,
                strict=bool(chain < kroger_coeff),
            )
        )
    return rows
