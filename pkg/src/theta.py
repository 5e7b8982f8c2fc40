# Copyright 2023 Canonical
# See LICENSE file for licensing details.

"""Theta functions with characteristics and the identities they satisfy.

theta_{k,l}(y, tau) = sum over n of exp(pi i ((n + k/2)**2 tau + 2 (n + k/2)(y + l/2))).
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from errors import DomainError
from numerics import DEFAULT_TOLERANCE, Tolerance

logger = logging.getLogger(__name__)

MIN_IM_TAU = 0.05

IDENTITIES = ("quasi_period", "parity", "half_one", "half_tau", "half_tau_plus_one")


@dataclass(frozen=True)
class ThetaChar:
    """Characteristic (k, l) with k, l in {0, 1}."""

    k: int
    l: int  # noqa: E741

    def __post_init__(self):
        if self.k not in (0, 1) or self.l not in (0, 1):
            raise DomainError(f"theta characteristic must be in {{0, 1}}**2, got {self}")


TH00 = ThetaChar(0, 0)
TH01 = ThetaChar(0, 1)
TH10 = ThetaChar(1, 0)
TH11 = ThetaChar(1, 1)
THETA_CHARS = (TH00, TH01, TH10, TH11)


def check_tau(tau: complex) -> complex:
    """Validate a point of the upper half plane."""
    tau = complex(tau)
    if tau.imag <= 0:
        raise DomainError(f"tau = {tau} is not in the upper half plane")
    if tau.imag < MIN_IM_TAU:
        raise DomainError(f"Im(tau) = {tau.imag} is below the supported minimum {MIN_IM_TAU}")
    return tau


def truncation_order(y: complex, tau: complex, tol: Tolerance) -> int:
    """Number N of terms on each side of n = 0 needed for the requested truncation error."""
    log_eps = max(0.0, -math.log(tol.theta_trunc_eps))
    return int(math.ceil(abs(y.imag) / tau.imag + math.sqrt(log_eps / (math.pi * tau.imag)) + 2))


def theta(
    c: ThetaChar,
    y: complex,
    tau: complex,
    tol: Optional[Tolerance] = None,
    order: Optional[int] = None,
) -> complex:
    """Evaluate theta_{k,l}(y, tau) by symmetric truncation of the defining series."""
    tol = tol or DEFAULT_TOLERANCE
    tau = check_tau(tau)
    y = complex(y)
    return complex(np.sum(_terms(c, y, tau, tol, order)))


def theta_magnitude(
    c: ThetaChar, y: complex, tau: complex, tol: Optional[Tolerance] = None
) -> float:
    """Sum of the absolute values of the series terms of theta_{k,l}(y, tau)."""
    tol = tol or DEFAULT_TOLERANCE
    return float(np.sum(np.abs(_terms(c, complex(y), check_tau(tau), tol))))


def _terms(
    c: ThetaChar, y: complex, tau: complex, tol: Tolerance, order: Optional[int] = None
) -> np.ndarray:
    order = order or truncation_order(y, tau, tol)
    m = np.arange(-order, order + 1) + 0.5 * c.k
    return np.exp(1j * math.pi * (m * m * tau + 2 * m * (y + 0.5 * c.l)))


def theta_const(c: ThetaChar, tau: complex, tol: Optional[Tolerance] = None) -> complex:
    """Theta constant theta_{k,l}(0, tau)."""
    return theta(c, 0j, tau, tol)


def jacobi_residual(tau: complex, tol: Optional[Tolerance] = None) -> float:
    """Relative residual of theta01**4 + theta10**4 = theta00**4."""
    t00, t01, t10 = (theta_const(c, tau, tol) for c in (TH00, TH01, TH10))
    return abs(t01**4 + t10**4 - t00**4) / abs(t00**4)


def _relative(lhs: complex, rhs: complex) -> float:
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def basic_identity_residual(
    identity: str,
    c: ThetaChar,
    y: complex,
    tau: complex,
    p: int = 0,
    q: int = 0,
    tol: Optional[Tolerance] = None,
) -> float:
    """Residual of one of the five transformation laws under lattice and half-period shifts.

    Each law reads theta_c(y_shifted) = factor * theta_c'(y). The residual is |LHS - RHS| scaled
    by the largest of 1, |LHS|, |RHS| and the absolute series sums on either side.
    """
    if not (-3 <= p <= 3 and -3 <= q <= 3):
        raise DomainError(f"shift ({p}, {q}) outside [-3, 3]**2")
    k, l = c.k, c.l
    flipped_k = ThetaChar(1 - k, l)
    flipped_l = ThetaChar(k, 1 - l)
    flipped_both = ThetaChar(1 - k, 1 - l)
    tau = complex(tau)
    y = complex(y)
    half_tau_phase = cmath.exp(-1j * math.pi * (0.25 * tau + y))
    if identity == "quasi_period":
        shifted, other = y + p * tau + q, c
        factor = (-1) ** (k * q + l * p) * cmath.exp(-1j * math.pi * (p * p * tau + 2 * p * y))
    elif identity == "parity":
        shifted, other, factor = -y, c, (-1) ** (k * l)
    elif identity == "half_one":
        shifted, other, factor = y + 0.5, flipped_l, (-1) ** (k * l)
    elif identity == "half_tau":
        shifted, other = y + 0.5 * tau, flipped_k
        factor = (-1j) ** l * half_tau_phase
    elif identity == "half_tau_plus_one":
        shifted, other = y + 0.5 * (tau + 1), flipped_both
        factor = (-1) ** (k * l) * (-1j) ** (1 - l) * half_tau_phase
    else:
        raise DomainError(f"unknown theta identity {identity!r}")
    lhs = theta(c, shifted, tau, tol)
    rhs = factor * theta(other, y, tau, tol)
    scale = max(
        1.0,
        abs(lhs),
        abs(rhs),
        theta_magnitude(c, shifted, tau, tol),
        abs(factor) * theta_magnitude(other, y, tau, tol),
    )
    return abs(lhs - rhs) / scale


def modular_residual(
    kind: str, c: ThetaChar, y: complex, tau: complex, tol: Optional[Tolerance] = None
) -> float:
    """Residual of tau -> tau + 2 or tau -> -1/tau for theta00 and theta11."""
    if c not in (TH00, TH11):
        raise DomainError(f"modular laws are implemented for theta00 and theta11, not {c}")
    tau = complex(tau)
    y = complex(y)
    if kind == "shift2":
        lhs = theta(c, y, tau + 2, tol)
        rhs = theta(c, y, tau, tol) * (1 if c == TH00 else 1j)
    elif kind == "inversion":
        lhs = theta(c, y / tau, -1 / tau, tol)
        factor = cmath.sqrt(-1j * tau) * cmath.exp(1j * math.pi * y * y / tau)
        if c == TH11:
            factor *= -1j
        rhs = factor * theta(c, y, tau, tol)
    else:
        raise DomainError(f"unknown modular transformation {kind!r}")
    return _relative(lhs, rhs)


def theta11_ratio(y: complex, tau: complex, tol: Optional[Tolerance] = None) -> complex:
    return theta(TH11, y, tau, tol) / theta(TH00, y, tau, tol)


def ratio_derivative(
    y: complex, tau: complex, h: float = 1e-5, tol: Optional[Tolerance] = None
) -> complex:
    """Central difference derivative of theta11/theta00 in y."""
    return (theta11_ratio(y + h, tau, tol) - theta11_ratio(y - h, tau, tol)) / (2 * h)


def theta11_ratio_derivative_check(
    tau: complex, h: float = 1e-5, tol: Optional[Tolerance] = None
) -> Tuple[float, float]:
    """|d/dy theta11/theta00| at y = 1/2 and y = tau/2, where it vanishes."""
    tau = check_tau(tau)
    return abs(ratio_derivative(0.5, tau, h, tol)), abs(ratio_derivative(0.5 * tau, tau, h, tol))
