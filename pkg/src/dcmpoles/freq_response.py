"""Single-pole pulse transfer functions and their frequency responses."""
from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass

from . import tables
from .errors import FrequencyOutOfRange, PoleAtUnity, SchemeMismatch
from .model import OperatingPoint, slope_factor
from .schemes import BCM, BCMCOT, CMC, OpenLoop
from .small_signal import SmallSignal

DEFAULT_POINTS = 200
_NYQUIST_FRACTION = 0.499


@dataclass(frozen=True)
class PulseTransfer:
    """``T(z) = gain / (z - pole)`` sampled with period ``period``."""

    gain: float
    pole: float
    period: float

    @property
    def ws(self) -> float:
        return 2.0 * math.pi / self.period

    def __call__(self, z: complex) -> complex:
        return self.gain / (z - self.pole)

    def at(self, omega: float) -> complex:
        return self(cmath.exp(1j * omega * self.period))

    def scaled(self, k: float) -> "PulseTransfer":
        return PulseTransfer(k * self.gain, self.pole, self.period)


@dataclass(frozen=True)
class BodePoint:
    omega: float
    mag_db: float
    phase_deg: float


def make_transfer(ss: SmallSignal, rho: float, which: str = "control", T: float | None = None) -> PulseTransfer:
    """Control-to-output or source-to-output transfer of the output voltage.

    The output voltage is ``rho`` times the capacitor voltage, hence the
    factor on the gain.
    """
    if which == "control":
        if ss.gamma_c is None:
            raise SchemeMismatch("scheme has no control input")
        gamma = ss.gamma_c
    elif which == "source":
        gamma = ss.gamma_s
    else:
        raise ValueError(f"which must be 'control' or 'source', got {which!r}")
    return PulseTransfer(rho * gamma, ss.p, ss.T if T is None else T)


def dc_gain(tf: PulseTransfer) -> float:
    """``T(1) = gain / (1 - pole)``."""
    if tf.pole == 1.0:
        raise PoleAtUnity("pole at z = 1: DC gain is unbounded")
    return tf.gain / (1.0 - tf.pole)


_FORMULA_KEYS = {
    ("control", False): "Toc0(1)",
    ("source", False): "Tos0(1)",
    ("control", True): "Toc(1) CMC",
    ("source", True): "Tos(1) CMC",
}


def dc_gain_formula(scheme, op: OperatingPoint, which: str = "control", printed: bool = False) -> float:
    """Tabulated closed-form DC gain for a resistive load.

    Covers the open-loop power stage, CMC, BCM and BCM-COT.  With
    ``printed`` the expression is returned in its commonly quoted form,
    which for a few entries omits a factor; otherwise the corrected one.
    """
    if isinstance(scheme, (OpenLoop, CMC)):
        mc = slope_factor(op.params, scheme, op.v) if isinstance(scheme, CMC) else 1.0
        key = _FORMULA_KEYS[(which, isinstance(scheme, CMC))]
        entries = tables.table2(op, mc)
    elif isinstance(scheme, (BCM, BCMCOT)):
        tag = "BCM" if isinstance(scheme, BCM) else "BCM-COT"
        key = f"{'Toc' if which == 'control' else 'Tos'}(1) {tag}"
        entries = tables.table4(op, scheme)
    else:
        raise SchemeMismatch(f"no tabulated DC gain for {type(scheme).__name__}")
    for e in entries:
        if e.quantity == key:
            return e.printed if printed else e.value
    raise SchemeMismatch(f"no tabulated {which} DC gain for {type(scheme).__name__}")


def default_grid(tf: PulseTransfer, n: int = DEFAULT_POINTS) -> list[float]:
    """``n`` log-spaced frequencies on ``[ws/1000, 0.499 ws]``."""
    lo = math.log10(tf.ws / 1000.0)
    hi = math.log10(_NYQUIST_FRACTION * tf.ws)
    return [10.0 ** (lo + (hi - lo) * k / (n - 1)) for k in range(n)]


def bode(tf: PulseTransfer, omegas=None) -> list[BodePoint]:
    """Frequency response ``T(exp(j w T))`` with unwrapped phase in degrees.

    The phase starts on the branch of the DC gain's sign (0 or -180).

    Raises
    ------
    FrequencyOutOfRange
        A frequency is not inside ``(0, ws/2)``.
    """
    omegas = default_grid(tf) if omegas is None else list(omegas)
    half = 0.5 * tf.ws
    for w in omegas:
        if not 0.0 < w < half:
            raise FrequencyOutOfRange(f"omega = {w:.6g} rad/s outside (0, {half:.6g})")
    if tf.pole == 1.0 or tf.gain == 0.0:
        base = 0.0
    else:
        base = 0.0 if dc_gain(tf) > 0 else -180.0
    out = []
    prev = None
    for w in omegas:
        h = tf.at(w)
        mag = abs(h)
        mag_db = 20.0 * math.log10(mag) if mag > 0 else -math.inf
        ph = math.degrees(cmath.phase(h)) if mag > 0 else 0.0
        ref = base if prev is None else prev
        ph += 360.0 * round((ref - ph) / 360.0)
        out.append(BodePoint(w, mag_db, ph))
        prev = ph
    return out


def gain_margin_db(tf: PulseTransfer) -> float:
    """Gain margin at half the switching frequency, ``-20 log10 |T(-1)|``.

    A real pole puts the loop's phase crossover exactly at ``ws/2``.
    """
    return -20.0 * math.log10(abs(tf(-1.0)))


def write_csv(points: list[BodePoint], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["omega_rad_s", "mag_db", "phase_deg"])
    for pt in points:
        w.writerow([f"{pt.omega:.12g}", f"{pt.mag_db:.12g}", f"{pt.phase_deg:.12g}"])
