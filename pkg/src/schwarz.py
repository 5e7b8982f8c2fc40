# Copyright 2023 Canonical
# See LICENSE file for licensing details.

"""The Schwarz map of the Appell F2 system with parameters (1/2, 1/4, 1/4, 1/2, 1/2).

forward sends x = (x1, x2) to (y1, y2, tau) built from the periods f1..f4; inverse recovers x
from theta quotients. The y-values are kept unreduced: the image equation and the inverse
formulas hold for the lift produced by forward, not for independent lattice shifts of y1, y2.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from errors import DomainError, NotOnImage
from hypergeo import DomainPoint
from monodromy import q_matrix
from numerics import DEFAULT_TOLERANCE, Tolerance
from periods import periods
from theta import TH00, TH01, TH10, TH11, check_tau, theta, theta_const

logger = logging.getLogger(__name__)

NOT_ON_IMAGE_THRESHOLD = 1e-6


@dataclass(frozen=True)
class SchwarzImage:
    """A point (y1, y2, tau) of C**2 x H.

    `validated` is False when the source point lies outside the real chamber, where only
    principal branches were used.
    """

    y1: complex
    y2: complex
    tau: complex
    validated: bool = True

    def __post_init__(self):
        for name in ("y1", "y2", "tau"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.tau.imag <= 0:
            raise DomainError(f"tau = {self.tau} is not in the upper half plane")


def forward(
    x: DomainPoint, tol: Optional[Tolerance] = None, executor=None
) -> SchwarzImage:
    """tau = -f1/f2 - i, y1 = (1-i)/4 (f3-f4)/f2 + 1/2, y2 = (1+i)/4 (f3+f4)/f2 - i/2."""
    tol = tol or DEFAULT_TOLERANCE
    f = periods(x, tol, executor)
    tau = -f.f1 / f.f2 - 1j
    y1 = (1 - 1j) / 4 * (f.f3 - f.f4) / f.f2 + 0.5
    y2 = (1 + 1j) / 4 * (f.f3 + f.f4) / f.f2 - 0.5j
    image = SchwarzImage(y1, y2, tau, validated=x.real_chamber)
    if not image.validated:
        logger.warning("forward at %s: unvalidated homology outside the real chamber", x)
    logger.debug("forward at %s: %s", x, image)
    return image


def modified_solution_vector(x: DomainPoint, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Q (f1, f2, f3, f4); the ratios f'1/f'2, f'3/f'2, f'4/f'2 are tau, y1, y2."""
    return q_matrix() @ periods(x, tol).as_array()


def _theta_values(y: complex, tau: complex, tol: Tolerance):
    return {c: theta(c, y, tau, tol) for c in (TH00, TH01, TH10, TH11)}


def image_residual(img: SchwarzImage, tol: Optional[Tolerance] = None) -> float:
    """|theta00(y1) theta11(y2) - i theta11(y1) theta00(y2)| / |theta00(y1) theta00(y2)|."""
    tol = tol or DEFAULT_TOLERANCE
    tau = check_tau(img.tau)
    first = _theta_values(img.y1, tau, tol)
    second = _theta_values(img.y2, tau, tol)
    lhs = first[TH00] * second[TH11] - 1j * first[TH11] * second[TH00]
    return abs(lhs) / abs(first[TH00] * second[TH00])


def z_of_tau(tau: complex, tol: Optional[Tolerance] = None) -> complex:
    """z = 4 theta01**4 theta10**4 / theta00**8."""
    t00, t01, t10 = (theta_const(c, tau, tol) for c in (TH00, TH01, TH10))
    return 4 * t01**4 * t10**4 / t00**8


def _scale_and_quotients(y1: complex, y2: complex, tau: complex, tol: Tolerance):
    """theta00**4/(4 theta01**2 theta10**2) and theta01 theta10/theta00**2 at y1 and y2."""
    t00, t01, t10 = (theta_const(c, tau, tol) for c in (TH00, TH01, TH10))
    scale = t00**4 / (4 * t01**2 * t10**2)
    quotients = []
    for y in (y1, y2):
        values = _theta_values(y, tau, tol)
        quotients.append(values[TH01] * values[TH10] / values[TH00] ** 2)
    return scale, quotients[0], quotients[1]


def one_minus_v(
    y1: complex, y2: complex, tau: complex, tol: Optional[Tolerance] = None
) -> complex:
    """1 - v as a meromorphic function of (y1, y2) on the Abel-Jacobi image."""
    tol = tol or DEFAULT_TOLERANCE
    scale, first, second = _scale_and_quotients(complex(y1), complex(y2), check_tau(tau), tol)
    return scale * (first + second) ** 2


def inverse(img: SchwarzImage, tol: Optional[Tolerance] = None) -> DomainPoint:
    """Recover x from (y1, y2, tau).

    x1 = C (Q(y1) + Q(y2))**2 and x2 = C (-Q(y1) + Q(y2))**2 with Q = theta01 theta10/theta00**2
    and C = theta00**4/(4 theta01**2 theta10**2), all at the same tau.
    """
    tol = tol or DEFAULT_TOLERANCE
    residual = image_residual(img, tol)
    if residual >= NOT_ON_IMAGE_THRESHOLD:
        logger.error("inverse: image residual %.3e at %s", residual, img)
        raise NotOnImage(
            f"(y1, y2, tau) is not on the image: residual {residual:.3e} >= "
            f"{NOT_ON_IMAGE_THRESHOLD:.0e}",
            residual,
        )
    scale, first, second = _scale_and_quotients(img.y1, img.y2, img.tau, tol)
    x1 = scale * (first + second) ** 2
    x2 = scale * (second - first) ** 2
    logger.debug("inverse of %s: (%s, %s)", img, x1, x2)
    return DomainPoint(x1, x2)


def chamber_grid(values: Sequence[float], chamber_only: bool = True) -> List[DomainPoint]:
    """Points (x1, x2) of values x values off the singular locus, row-major.

    With `chamber_only`, keep those with x1 + x2 < 1 (compared exactly on the decimal values).
    """
    points = []
    for x1 in values:
        for x2 in values:
            exact = Fraction(str(x1)) + Fraction(str(x2))
            if chamber_only and exact >= 1:
                continue
            try:
                points.append(DomainPoint(x1, x2))
            except DomainError:
                logger.debug("grid point (%s, %s) is on the singular locus", x1, x2)
    return points


def forward_grid(
    points: Iterable[DomainPoint], tol: Optional[Tolerance] = None, workers: int = 1
) -> List[Tuple[DomainPoint, SchwarzImage]]:
    """forward over many points, in input order; threads are used when workers > 1."""
    tol = tol or DEFAULT_TOLERANCE
    points = list(points)
    if workers <= 1:
        images = [forward(x, tol) for x in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            images = list(pool.map(lambda x: forward(x, tol), points))
    logger.info("forward_grid: evaluated %d points", len(points))
    return list(zip(points, images))
