"""Sector membership, spectral-intersection detection, and shift selection.

The open sector of half-angle ``alpha`` is ``{z != 0 : |arg z| < alpha}``
with ``alpha`` in (0, pi/2); the union over all alpha is the open right
half-plane.  Replacing (a, b) by (a + lambda, b + lambda) leaves the solution
set of a x - x b = c untouched, so a nonnegative shift may always be used to
push both spectra into a requested sector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .numerics import SpectrumReport, frob

DEFAULT_ALPHA = math.pi / 4
DEFAULT_MARGIN = 0.05


@dataclass(frozen=True)
class SectorParams:
    """A sector half-angle together with the shift that realizes membership."""

    alpha: float
    lambda_shift: float

    def __post_init__(self):
        if not 0.0 < self.alpha < math.pi / 2:
            raise ParameterError(f"alpha must lie in (0, pi/2), got {self.alpha}")
        if self.lambda_shift < 0:
            raise ParameterError(f"lambda_shift must be nonnegative, got {self.lambda_shift}")


@dataclass(frozen=True)
class GateReport:
    """Pre-shift spectral classification of one problem instance."""

    in_sector_a: bool
    in_sector_b: bool
    spectra_intersect: bool
    intersection_tolerance: float
    suggested_lambda: float


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < math.pi / 2:
        raise ParameterError(f"alpha must lie in (0, pi/2), got {alpha}")


def _spectrum_values(spectrum) -> np.ndarray:
    if isinstance(spectrum, SpectrumReport):
        return spectrum.eigenvalues
    return np.atleast_1d(np.asarray(spectrum, dtype=np.complex128))


def sector_margin(z: complex, alpha: float) -> float:
    """sin of the angular gap between z and the sector boundary.

    Positive inside the sector, negative outside; -1 for z = 0.
    """
    if z == 0:
        return -1.0
    gap = alpha - abs(np.angle(z))
    return math.sin(min(max(gap, -math.pi / 2), math.pi / 2))


def sector_contains(spectrum, alpha: float, margin: float = 0.0,
                    modulus_floor: float = 0.0) -> bool:
    """True iff every eigenvalue z satisfies z != 0 and |arg z| < alpha.

    With ``margin`` > 0 the angular gap must additionally satisfy
    sin(alpha - |arg z|) >= margin, and |z| must reach ``modulus_floor``.
    """
    _check_alpha(alpha)
    values = _spectrum_values(spectrum)
    for z in values:
        if z == 0:
            return False
        gap = sector_margin(complex(z), alpha)
        if (gap < margin) if margin > 0 else (gap <= 0):
            return False
        if abs(z) < modulus_floor:
            return False
    return True


def spectra_intersect(sa, sb, tol: float) -> bool:
    """True iff the two eigenvalue sets come within ``tol`` of each other."""
    if tol <= 0:
        raise ParameterError(f"intersection tolerance must be positive, got {tol}")
    va = _spectrum_values(sa)
    vb = _spectrum_values(sb)
    dist = np.abs(va[:, None] - vb[None, :])
    return bool(dist.min() <= tol)


def default_intersection_tolerance(a: np.ndarray, b: np.ndarray) -> float:
    return max(1e-8 * (frob(a) + frob(b)), 1e-12)


def _shift_admissible(values: np.ndarray, lam: float, alpha: float,
                      margin: float, floor: float) -> bool:
    shifted = values + lam
    if np.any(shifted == 0):
        return False
    if np.any(np.abs(shifted) < floor):
        return False
    margins = np.array([sector_margin(complex(z), alpha) for z in shifted])
    return bool(np.all(margins >= margin))


def choose_shift(sa, sb, alpha: float, margin: float = DEFAULT_MARGIN) -> SectorParams:
    """Smallest practical shift placing both spectra inside the sector.

    Membership is demanded with an angular margin (sin of the gap to the
    boundary at least ``margin``) and a modulus floor of ``margin`` times the
    pre-shift spectral scale, so the shifted matrices stay comfortably
    invertible.  The shift is found by doubling then bisection, reported to
    three significant digits; lambda = 0 is returned when the spectra already
    qualify.
    """
    _check_alpha(alpha)
    values = np.concatenate([_spectrum_values(sa), _spectrum_values(sb)])
    margin_eff = min(margin, 0.99 * math.sin(alpha))
    radius = float(np.max(np.abs(values))) if values.size else 0.0
    scale = radius if radius > 0 else 1.0
    floor = margin_eff * scale

    if _shift_admissible(values, 0.0, alpha, margin_eff, floor):
        return SectorParams(alpha=alpha, lambda_shift=0.0)

    hi = scale
    for _ in range(200):
        if _shift_admissible(values, hi, alpha, margin_eff, floor):
            break
        hi *= 2.0
    else:  # pragma: no cover - admissibility is guaranteed for finite spectra
        raise ParameterError("no admissible shift found; spectra are not finite")
    lo = 0.0
    while hi - lo > 5e-3 * hi:
        mid = 0.5 * (lo + hi)
        if _shift_admissible(values, mid, alpha, margin_eff, floor):
            hi = mid
        else:
            lo = mid
    # round up to 3 significant digits, nudging until still admissible
    lam = hi
    if lam > 0:
        exponent = math.floor(math.log10(lam))
        quantum = 10.0 ** (exponent - 2)
        lam = math.ceil(lam / quantum) * quantum
        while not _shift_admissible(values, lam, alpha, margin_eff, floor):
            lam += quantum
    return SectorParams(alpha=alpha, lambda_shift=float(lam))


def gate_report(sa, sb, alpha: float, intersection_tolerance: float,
                margin: float = DEFAULT_MARGIN) -> GateReport:
    """Classify a pair of spectra and suggest the sector-placing shift."""
    _check_alpha(alpha)
    return GateReport(
        in_sector_a=sector_contains(sa, alpha),
        in_sector_b=sector_contains(sb, alpha),
        spectra_intersect=spectra_intersect(sa, sb, intersection_tolerance),
        intersection_tolerance=float(intersection_tolerance),
        suggested_lambda=choose_shift(sa, sb, alpha, margin).lambda_shift,
    )
