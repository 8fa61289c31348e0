"""Rounded tabulated dispersion coefficients for the ``para1`` preset.

These four-digit coefficient strings are the tabulation behind the
threshold values 6.889, 2.0834, 3.8144 and 0.1464.  They do not agree with
the coefficients assembled from the Jacobian at the same steady state (for
example the chemotaxis slope is listed as 1.02 while ``a21 a32 N`` is about
0.298), so they are kept here only to show that the tabulated thresholds
follow from them.  Every threshold the package reports is computed from the
assembled matrices.
"""

from __future__ import annotations

import math

from evasion.stability import ChiH, ModeSet, polynomial_threshold, xi_threshold_from_polynomials

# numerator of Psi~ (lowest order first) and the chi slope of rho3
PSI_NUMERATOR = (0.1994, 0.0546, 0.506, 0.0201)
CHI_SLOPE = 1.02
# rho2 = 0.0201 h^2 + 0.506 h + 0.1994
RHO2 = (0.1994, 0.506, 0.0201)
# prey-taxis denominator (0.9746 chi h - 0.0817) h
XI_CHI_SLOPE = 0.9746
XI_OFFSET = 0.0817


def tabulated_psi_tilde(h: float) -> float:
    num = sum(c * h**k for k, c in enumerate(PSI_NUMERATOR))
    return num / (CHI_SLOPE * h)


def tabulated_chi_H(L: float, j_max: int = 200) -> ChiH:
    return polynomial_threshold(PSI_NUMERATOR, CHI_SLOPE, ModeSet.interval(L, j_max))


def tabulated_xi_S(chi: float, L: float, j_max: int = 200) -> ChiH:
    return xi_threshold_from_polynomials(PSI_NUMERATOR, XI_CHI_SLOPE, XI_OFFSET, chi, ModeSet.interval(L, j_max))


def tabulated_tau0(h: float) -> float:
    return math.sqrt(sum(c * h**k for k, c in enumerate(RHO2)))
