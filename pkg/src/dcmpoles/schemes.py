"""Control-scheme descriptions.

Fixed switching frequency: :class:`OpenLoop`, :class:`VMC`, :class:`CMC`.
Variable switching frequency: :class:`VCOTC`, :class:`BCM`, :class:`BCMCOT`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class OpenLoop:
    """Power stage driven by a constant duty cycle."""

    D: float

    def __post_init__(self):
        if not 0.0 <= self.D < 1.0:
            raise ValueError(f"duty must lie in [0, 1), got {self.D}")


@dataclass(frozen=True)
class VMC:
    """Proportional voltage-mode control: ``D = g (vc - v) / Vh``.

    Parameters
    ----------
    g : float
        Feedback gain (V/V).
    Vh : float
        PWM ramp amplitude (V).
    vc : float
        Reference voltage (V).
    """

    g: float
    Vh: float
    vc: float

    def __post_init__(self):
        if self.Vh <= 0:
            raise ValueError(f"ramp amplitude Vh must be positive, got {self.Vh}")


@dataclass(frozen=True)
class CMC:
    """Peak current-mode control with compensating ramp slope ``ma`` (A/s).

    The switch turns off when ``iL + ma t`` reaches ``vc`` (A).
    """

    vc: float
    ma: float = 0.0


@dataclass(frozen=True)
class VCOTC:
    """Valley-voltage constant-on-time control.

    The switch is on for ``d`` seconds; the next cycle starts when the output
    falls to ``vc + ma t`` with ``t`` measured from the cycle start.
    """

    d: float
    vc: float
    ma: float = 0.0

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError(f"on-time must be positive, got {self.d}")


@dataclass(frozen=True)
class BCM:
    """Boundary conduction mode with peak-current turn-off at ``vc`` (A)."""

    vc: float

    def __post_init__(self):
        if self.vc <= 0:
            raise ValueError(f"peak current must be positive, got {self.vc}")


@dataclass(frozen=True)
class BCMCOT:
    """Boundary conduction mode with constant on-time ``d`` (s)."""

    d: float

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError(f"on-time must be positive, got {self.d}")


Scheme = Union[OpenLoop, VMC, CMC, VCOTC, BCM, BCMCOT]

FIXED_FREQUENCY = (OpenLoop, VMC, CMC)
VARIABLE_FREQUENCY = (VCOTC, BCM, BCMCOT)


def is_fixed_frequency(scheme) -> bool:
    return isinstance(scheme, FIXED_FREQUENCY)


def scheme_name(scheme) -> str:
    return type(scheme).__name__
