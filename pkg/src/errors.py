# Copyright 2023 Canonical
# See LICENSE file for licensing details.

"""Exception types raised by the Schwarz map library.

Every error carries the process exit code the command line front end maps it to.
"""


class SchwarzError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class DomainError(SchwarzError):
    """An input lies outside the domain of the requested operation."""

    exit_code = 2


class PoleError(DomainError):
    """A function was evaluated at one of its poles."""


class BranchError(DomainError):
    """A branch of a multivalued function could not be resolved unambiguously."""


class PathError(DomainError):
    """No supported integration path reaches the requested curve point."""


class NonConvergent(SchwarzError):
    """A quadrature or series did not reach the requested tolerance."""

    exit_code = 3


class CapacityError(SchwarzError):
    """An enumeration or exact computation exceeded its configured size limit."""

    exit_code = 3


class NotOnImage(SchwarzError):
    """A point does not satisfy the image equation of the Schwarz map."""

    exit_code = 4

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NotMember(SchwarzError):
    """A matrix does not belong to the monodromy group."""

    exit_code = 2


class ConfigError(SchwarzError, ValueError):
    """A configuration value or input document could not be parsed."""

    exit_code = 5
