"""Exception hierarchy and resource-cap handling.

Caps exist so that a mistyped command fails with a diagnostic instead of
grinding through an enormous Hall basis or letting exponents grow without
bound.  Defaults can be overridden per call, by CLI flags, or by the
environment variables NILMULT_MAX_BASIS and NILMULT_MAX_EXP_BITS.
"""

from __future__ import annotations

import os

DEFAULT_MAX_BASIS = 2000
DEFAULT_MAX_EXP_BITS = 4096

ENV_MAX_BASIS = "NILMULT_MAX_BASIS"
ENV_MAX_EXP_BITS = "NILMULT_MAX_EXP_BITS"


class NilmultError(Exception):
    """Base class for all errors raised by this package."""


class ResourceCapError(NilmultError):
    """A configured resource cap was exceeded (CLI exit code 3)."""


class BasisSizeError(ResourceCapError):
    """The requested Hall basis would exceed the basis-size cap."""


class ExponentLimitError(ResourceCapError):
    """An exponent exceeded the configured bit limit during collection."""


class BasisMismatchError(NilmultError):
    """Two elements over different bases were combined."""


class InvalidSpecError(NilmultError):
    """A product spec or operation argument is invalid (CLI exit code 2)."""


class PreconditionError(NilmultError):
    """A checked mathematical precondition failed."""


class ParseError(NilmultError):
    """A word or spec string could not be parsed."""


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidSpecError(f"{name} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise InvalidSpecError(f"{name} must be positive, got {value}")
    return value


def max_basis_size(override: int | None = None) -> int:
    if override is not None:
        return override
    return _env_int(ENV_MAX_BASIS, DEFAULT_MAX_BASIS)


def max_exponent_bits(override: int | None = None) -> int:
    if override is not None:
        return override
    return _env_int(ENV_MAX_EXP_BITS, DEFAULT_MAX_EXP_BITS)
