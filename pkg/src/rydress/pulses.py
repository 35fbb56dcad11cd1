"""Ramp schedules for adiabatic dressing passages.

Two families are provided:

* :class:`OnePhotonRamp` -- Gaussian rise of the Rabi frequency to a
  plateau and back, with the detuning magnitude swept linearly from
  ``delta_max`` to ``delta_min`` during the rise and back during the fall.
* :class:`TwoPhotonRamp` -- flat top of the lower-leg Rabi frequency on
  ``[-t_stop, t_stop]`` with Gaussian shoulders; every laser frequency stays
  fixed and the effective detuning moves only through the light shifts.

Both serialize to JSON; the field order of ``FIELDS`` is the parameter
vector order used by :mod:`rydress.optimize`.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .model import EffectiveParams, ExcitationScheme, adiabatic_elimination

# Gaussian widths needed for the boundary Rabi frequency to fall below 1e-4
# of the peak, plus a little headroom.
TRUNCATION_LEVEL = 1e-4
TRUNCATION_SIGMAS = 4.3


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class OnePhotonRamp:
    """Gaussian-intensity, linear-detuning passage on ``[t1, t4]``.

    ``detuning_sign`` fixes the side of resonance the passage starts on; -1
    keeps the Rydberg level above |1> in the rotating frame.  The detuning
    is ``detuning_sign * d(t)`` with ``d`` linear between ``delta_max`` and
    ``delta_min``; a negative ``delta_min`` parks the plateau just past
    resonance.  Outside ``[t1, t4]`` both profiles are clamped to their
    boundary values.
    """

    omega_max: float
    delta_min: float
    delta_max: float
    t1: float
    t2: float
    t3: float
    t4: float
    t_w: float
    omega_min: float = 0.0
    detuning_sign: float = -1.0
    strict: bool = True

    FIELDS = ("omega_max", "delta_min", "delta_max", "t1", "t2", "t3", "t4", "t_w",
              "omega_min", "detuning_sign")
    kind = "one-photon"

    def __post_init__(self):
        if not (self.t1 < self.t2 <= self.t3 < self.t4):
            raise ScheduleError(f"need t1 < t2 <= t3 < t4, got "
                                f"{(self.t1, self.t2, self.t3, self.t4)}")
        if self.t_w <= 0:
            raise ScheduleError("t_w must be positive")
        if not self.omega_max >= self.omega_min >= 0:
            raise ScheduleError("need omega_max >= omega_min >= 0")
        if self.delta_max < 0:
            raise ScheduleError("delta_max is the far-detuned magnitude and must be >= 0")
        if self.detuning_sign not in (-1.0, 1.0):
            raise ScheduleError("detuning_sign must be +1 or -1")
        if self.strict:
            edge = max(self.omega(self.t1), self.omega(self.t4))
            if edge > TRUNCATION_LEVEL * self.omega_max * (1 + 1e-9):
                raise ScheduleError(
                    f"boundary Rabi frequency {edge:.3g} exceeds "
                    f"{TRUNCATION_LEVEL:g} of the peak; lengthen the ramps or shrink t_w")

    @classmethod
    def symmetric(cls, total: float, plateau: float, t_w: float, delta_min: float,
                  delta_max: float, omega_max: float = 1.0, t_start: float = 0.0,
                  **kw) -> "OnePhotonRamp":
        """Mirror-symmetric ramp starting at ``t_start``."""
        rise = (total - plateau) / 2
        t1 = t_start
        return cls(omega_max, delta_min, delta_max, t1, t1 + rise, t1 + rise + plateau,
                   t1 + total, t_w, **kw)

    @property
    def window(self) -> tuple[float, float]:
        return self.t1, self.t4

    @property
    def duration(self) -> float:
        return self.t4 - self.t1

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.t1 + self.t4)

    @property
    def peak_omega(self) -> float:
        return self.omega_max

    def omega(self, t):
        t = np.clip(t, self.t1, self.t4)
        amp = self.omega_max - self.omega_min
        rise = self.omega_min + amp * np.exp(-(t - self.t2) ** 2 / (2 * self.t_w ** 2))
        fall = self.omega_min + amp * np.exp(-(t - self.t3) ** 2 / (2 * self.t_w ** 2))
        out = np.where(t < self.t2, rise, np.where(t > self.t3, fall, self.omega_max))
        return out if np.ndim(out) else float(out)

    def delta_magnitude(self, t):
        t = np.clip(t, self.t1, self.t4)
        span = self.delta_max - self.delta_min
        rise = self.delta_max - span * (t - self.t1) / (self.t2 - self.t1)
        fall = self.delta_min + span * (t - self.t3) / (self.t4 - self.t3)
        out = np.where(t < self.t2, rise, np.where(t > self.t3, fall, self.delta_min))
        return out if np.ndim(out) else float(out)

    def delta(self, t):
        return self.detuning_sign * self.delta_magnitude(t)

    def drive(self, scheme: ExcitationScheme | None = None):
        from .dynamics import Drive
        gamma_r = scheme.gamma_r if scheme is not None else 0.0
        return Drive.one_photon(self, gamma_r)

    def scaled(self, factor: float) -> "OnePhotonRamp":
        """Same shape with every duration multiplied by ``factor``."""
        d = asdict(self)
        for k in ("t1", "t2", "t3", "t4", "t_w"):
            d[k] *= factor
        return OnePhotonRamp(**d)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **{k: getattr(self, k) for k in self.FIELDS}}


def evaluate_one_photon(r: OnePhotonRamp, t) -> tuple:
    """(omega_1r(t), delta_1r(t)); clamped outside the schedule window."""
    return r.omega(t), r.delta(t)


@dataclass(frozen=True)
class TwoPhotonRamp:
    """Flat-top lower-leg Rabi frequency centred on t = 0.

    ``duration`` is the support window ``[-duration/2, duration/2]`` used
    for propagation; the profile itself decays as a Gaussian beyond
    ``|t| > t_stop`` with width ``t_w``.
    """

    omega_1a_max: float
    t_stop: float
    t_w: float
    duration: float
    strict: bool = True

    FIELDS = ("omega_1a_max", "t_stop", "t_w", "duration")
    kind = "two-photon"

    def __post_init__(self):
        if self.t_stop < 0:
            raise ScheduleError("t_stop must be non-negative")
        if self.t_w <= 0:
            raise ScheduleError("t_w must be positive")
        if self.omega_1a_max < 0:
            raise ScheduleError("omega_1a_max must be non-negative")
        if self.duration <= 2 * self.t_stop:
            raise ScheduleError("duration must exceed the flat top 2 t_stop")
        if self.strict:
            edge = self.omega(self.duration / 2)
            if edge > TRUNCATION_LEVEL * self.omega_1a_max * (1 + 1e-9):
                raise ScheduleError(
                    f"boundary Rabi frequency {edge:.3g} exceeds "
                    f"{TRUNCATION_LEVEL:g} of the peak; lengthen the window")

    @classmethod
    def from_shape(cls, omega_1a_max: float, t_stop: float, t_w: float,
                   n_sigma: float = TRUNCATION_SIGMAS, **kw) -> "TwoPhotonRamp":
        return cls(omega_1a_max, t_stop, t_w, 2 * (t_stop + n_sigma * t_w), **kw)

    @property
    def window(self) -> tuple[float, float]:
        return -self.duration / 2, self.duration / 2

    @property
    def midpoint(self) -> float:
        return 0.0

    @property
    def peak_omega(self) -> float:
        return self.omega_1a_max

    def omega(self, t):
        excess = np.maximum(np.abs(t) - self.t_stop, 0.0)
        out = self.omega_1a_max * np.exp(-excess ** 2 / (2 * self.t_w ** 2))
        return out if np.ndim(out) else float(out)

    def scaled(self, factor: float) -> "TwoPhotonRamp":
        return TwoPhotonRamp(self.omega_1a_max, self.t_stop * factor, self.t_w * factor,
                             self.duration * factor, self.strict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **{k: getattr(self, k) for k in self.FIELDS}}


def evaluate_two_photon(r: TwoPhotonRamp, t):
    """omega_1a(t); defined for all t, decaying to zero in the tails."""
    return r.omega(t)


@dataclass
class EffectiveSweep:
    times: np.ndarray
    omega: np.ndarray
    delta: np.ndarray
    gamma_1: np.ndarray
    gamma_r: np.ndarray
    gamma_1r: np.ndarray
    valid: np.ndarray

    def params(self, k: int) -> EffectiveParams:
        return EffectiveParams(float(self.omega[k]), float(self.delta[k]),
                               gamma_1=float(self.gamma_1[k]), gamma_r=float(self.gamma_r[k]),
                               gamma_1r=float(self.gamma_1r[k]))


def effective_sweep(r: TwoPhotonRamp, s: ExcitationScheme, times) -> EffectiveSweep:
    """Effective two-level parameters along a two-photon passage.

    Only omega_1a follows the ramp; omega_ar and both intermediate detunings
    are taken from ``s``.
    """
    import warnings

    from .model import EliminationWarning

    times = np.atleast_1d(np.asarray(times, dtype=float))
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EliminationWarning)
        for t in times:
            rows.append(adiabatic_elimination(s.with_drive(r.omega(float(t)))))
    if not all(p.valid for p in rows):
        warnings.warn("adiabatic elimination strained along the sweep", EliminationWarning,
                      stacklevel=2)
    col = lambda name: np.array([getattr(p, name) for p in rows])  # noqa: E731
    return EffectiveSweep(times, col("omega"), col("delta"), col("gamma_1"),
                          col("gamma_r"), col("gamma_1r"), col("valid"))


def schedule_from_dict(data: dict):
    data = dict(data)
    kind = data.pop("kind")
    if kind == "one-photon":
        return OnePhotonRamp(**data)
    if kind == "two-photon":
        return TwoPhotonRamp(**data)
    raise ValueError(f"unknown schedule kind {kind!r}")


def schedule_to_json(r) -> str:
    return json.dumps(r.to_dict(), indent=2)


def schedule_from_json(text: str):
    return schedule_from_dict(json.loads(text))
