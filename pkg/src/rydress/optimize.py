"""Ramp optimization, parameter scans and the decay-limited fidelity bound.

All quantities are in reference units with the peak effective Rabi
frequency Omega_eff^max = 1, so the pair energy is ``V = 1 / ratio`` for a
blockade ratio ``ratio = Omega_eff^max / |V|``.

Two-photon shapes are expressed in the same units.  With the bare
detunings locked to ``delta_ar = -delta_1a`` and the upper-leg Rabi
frequency tied to ``omega_ar = ratio_ar * Omega_1a^max``, the coherent
effective dynamics do not depend on ``x = delta_1a / Omega_1a^max``; only the
scattering rates do.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from .dynamics import Drive, PropagationError
from .gate import GateReport, GateSequence, echo_composite, kappa_integral, leakage, \
    ms_fidelity, ramp_unitary, spin_echo_gate
from .model import EliminationWarning, ExcitationScheme, InteractionSpec
from .pulses import OnePhotonRamp, ScheduleError, TwoPhotonRamp
from .runner import ResultStore, map_points
from .spectrum import entangling_energy

ONE_PHOTON_PARAMS = ("t_w", "plateau", "delta_min", "delta_max", "total")
TWO_PHOTON_PARAMS = ("t_stop", "t_w", "delta_1a", "ratio_ar")

# Closed-system optimum of the one-photon family at Omega/|V| = 0.1 and of
# the two-photon family with ratio_ar = 1.4; used as seeds and presets.
STRONG_ONE_PHOTON = {"t_w": 3.4160, "plateau": 1.8430, "delta_min": -0.0020,
                     "delta_max": 3.7940, "total": 34.7790}
STRONG_TWO_PHOTON = {"t_stop": 0.873, "t_w": 6.324, "delta_1a": 10.0, "ratio_ar": 1.4}

DEFAULT_BOUNDS = {
    "one-photon": {"t_w": (0.5, 20.0), "plateau": (0.0, 5000.0), "delta_min": (-3.0, 10.0),
                   "delta_max": (0.0, 20.0), "total": (1.0, 10000.0)},
    "two-photon": {"t_stop": (0.0, 5000.0), "t_w": (0.5, 30.0), "delta_1a": (5.0, 1000.0),
                   "ratio_ar": (1.0, 5.0)},
}


@dataclass(frozen=True)
class TwoPhotonSetup:
    """Fixed ingredients of a two-photon passage.

    ``gamma_r_per_omega`` is Gamma_r / Omega_1a^max and
    ``gamma_a_per_gamma_r`` is Gamma_a / Gamma_r.
    """

    gamma_r_per_omega: float = 0.0
    gamma_a_per_gamma_r: float = 0.0
    shift_convention: str = "physical"
    n_sigma: float = 4.3

    def build(self, params: dict) -> tuple[TwoPhotonRamp, ExcitationScheme]:
        x, c = params["delta_1a"], params["ratio_ar"]
        if x <= 0 or c <= 0:
            raise ScheduleError("delta_1a and ratio_ar must be positive")
        omega_1a = 2 * x / c
        gamma_r = self.gamma_r_per_omega * omega_1a
        s = ExcitationScheme.two_photon(
            omega_1a, 2 * x, 2 * x * x / c, gamma_a=self.gamma_a_per_gamma_r * gamma_r,
            gamma_r=gamma_r, shift_convention=self.shift_convention)
        ramp = TwoPhotonRamp.from_shape(omega_1a, params["t_stop"], params["t_w"],
                                        self.n_sigma)
        return ramp, s


def one_photon_ramp(params: dict, omega_max: float = 1.0) -> OnePhotonRamp:
    return OnePhotonRamp.symmetric(params["total"], params["plateau"], params["t_w"],
                                   params["delta_min"], params["delta_max"], omega_max)


@dataclass
class OptimizationProblem:
    family: str = "one-photon"
    free: tuple = ()
    fixed: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    blockade_ratio: float = 0.1
    gamma_r: float = 0.0
    two_photon: TwoPhotonSetup = field(default_factory=TwoPhotonSetup)
    objective: str = "fidelity"
    fidelity_target: float = 0.999
    rr_cap: float | None = None
    antiblockade_margin: float = 0.1
    budget: int = 200
    seeds: list = field(default_factory=list)
    tol: float = 1e-8
    n_samples: int = 401

    def __post_init__(self):
        if self.family not in DEFAULT_BOUNDS:
            raise ValueError(f"unknown family {self.family!r}")
        if self.objective not in ("fidelity", "t_r"):
            raise ValueError(f"unknown objective {self.objective!r}")
        names = ONE_PHOTON_PARAMS if self.family == "one-photon" else TWO_PHOTON_PARAMS
        if not self.free:
            self.free = tuple(n for n in names if n not in ("delta_1a", "ratio_ar"))
        unknown = set(self.free) - set(names)
        if unknown:
            raise ValueError(f"unknown free parameters {sorted(unknown)}")
        bounds = dict(DEFAULT_BOUNDS[self.family])
        bounds.update({k: tuple(v) for k, v in self.bounds.items()})
        self.bounds = bounds
        for k in self.free:
            lo, hi = self.bounds[k]
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"bounds for {k} must be finite and increasing")
        if self.budget < 50:
            raise ValueError("budget must allow at least 50 evaluations")
        if self.blockade_ratio <= 0:
            raise ValueError("blockade ratio must be positive")

    @property
    def interaction(self) -> InteractionSpec:
        return InteractionSpec(1.0 / self.blockade_ratio)

    @property
    def defaults(self) -> dict:
        base = STRONG_ONE_PHOTON if self.family == "one-photon" else STRONG_TWO_PHOTON
        return {**base, **self.fixed}

    def params(self, x) -> dict:
        p = self.defaults
        p.update(zip(self.free, (float(v) for v in x)))
        return p

    def vector(self, params: dict) -> np.ndarray:
        return np.array([params[k] for k in self.free], dtype=float)

    def build(self, params: dict):
        """(ramp, scheme) for a full parameter dict."""
        if self.family == "one-photon":
            ramp = one_photon_ramp(params)
            return ramp, ExcitationScheme.one_photon(gamma_r=self.gamma_r)
        return self.two_photon.build(params)


@dataclass
class Evaluation:
    params: dict
    fidelity: float = float("nan")
    t_r: float = float("nan")
    rr_max: float = float("nan")
    leakage: float = float("nan")
    margin: float = float("nan")
    feasible: bool = False
    error: str = ""

    def meets(self, p: OptimizationProblem) -> bool:
        return self.feasible and self.fidelity >= p.fidelity_target

    def merit(self, p: OptimizationProblem) -> tuple:
        if self.error:
            return (0, 0.0, -math.inf)
        if p.objective == "fidelity":
            return (int(self.feasible), self.fidelity, -self.t_r)
        return (int(self.meets(p)), -self.t_r if self.meets(p) else self.fidelity, 0.0)

    def value(self, p: OptimizationProblem) -> float:
        """Scalar minimized by the simplex search."""
        if self.error:
            return 1e3
        violation = 0.0
        if p.rr_cap is not None:
            violation += max(0.0, self.rr_max - p.rr_cap)
        violation += max(0.0, p.antiblockade_margin - self.margin)
        if p.objective == "fidelity":
            return 1 - self.fidelity + 10 * violation
        shortfall = max(0.0, p.fidelity_target - self.fidelity)
        return self.t_r / (2 * math.pi) + 1e3 * shortfall + 10 * violation

    def row(self) -> dict:
        return {**self.params, "fidelity": self.fidelity, "t_r": self.t_r,
                "rr_max": self.rr_max, "leakage": self.leakage, "margin": self.margin,
                "feasible": self.feasible, "error": self.error}


def antiblockade_margin(ramp, s: ExcitationScheme, v: InteractionSpec, n: int = 401) -> float:
    """min over the ramp of |V - 2 delta_eff(t)| / |V|."""
    drive = Drive.from_ramp(ramp, s)
    t = np.linspace(*drive.window, n)
    deltas = np.array([drive.coefficients(float(x))[1] for x in t])
    return float(np.min(np.abs(v.V - 2 * deltas)) / abs(v.V))


def evaluate(p: OptimizationProblem, params: dict) -> Evaluation:
    ev = Evaluation(dict(params))
    v = p.interaction
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EliminationWarning)
            ramp, s = p.build(params)
            res = ramp_unitary(ramp, s, v, p.tol, p.n_samples)
            ev.margin = antiblockade_margin(ramp, s, v)
    except (ScheduleError, PropagationError, ValueError, ZeroDivisionError) as exc:
        ev.error = f"{type(exc).__name__}: {exc}"
        return ev
    m = echo_composite(res.matrix)
    ev.fidelity = ms_fidelity(m)
    ev.t_r = res.t_r
    ev.rr_max = res.rr_max
    ev.leakage = max(res.leakage, leakage(m))
    ev.feasible = ev.margin >= p.antiblockade_margin and (
        p.rr_cap is None or ev.rr_max <= p.rr_cap)
    return ev


@dataclass
class OptimizationResult:
    params: dict
    evaluation: Evaluation
    report: GateReport
    log: list

    @property
    def fidelity(self) -> float:
        return self.evaluation.fidelity


class OptimizationFailed(RuntimeError):
    def __init__(self, message, log):
        super().__init__(message)
        self.log = log


def _simplex(p: OptimizationProblem, x0: np.ndarray) -> np.ndarray:
    lo = np.array([p.bounds[k][0] for k in p.free])
    hi = np.array([p.bounds[k][1] for k in p.free])
    steps = 0.1 * np.maximum(np.abs(x0), 0.1 * np.minimum(hi - lo, 1.0))
    pts = [x0]
    for i in range(x0.size):
        y = x0.copy()
        y[i] = y[i] + steps[i] if y[i] + steps[i] <= hi[i] else y[i] - steps[i]
        pts.append(y)
    return np.clip(np.array(pts), lo, hi)


def optimize_ramp(p: OptimizationProblem) -> OptimizationResult:
    """Deterministic multi-start simplex search over the free ramp parameters.

    All seeds are evaluated first; the search starts from the best one.
    With the ``t_r`` objective a fidelity-only stage runs first whenever
    the incumbent misses ``fidelity_target``.
    """
    seeds = p.seeds or [default_seed(p)]
    log: list[Evaluation] = []
    lo = np.array([p.bounds[k][0] for k in p.free])
    hi = np.array([p.bounds[k][1] for k in p.free])

    def run(params):
        ev = evaluate(p, params)
        log.append(ev)
        return ev

    for sd in seeds:
        run({**p.defaults, **sd})

    def best():
        return max(log, key=lambda e: e.merit(p))

    def search(objective: str, start: dict, maxfev: int):
        if maxfev <= 0:
            return
        q = replace(p, objective=objective) if objective != p.objective else p

        def f(x):
            return run(p.params(np.clip(x, lo, hi))).value(q)

        x0 = np.clip(p.vector(start), lo, hi)
        minimize(f, x0, method="Nelder-Mead", bounds=list(zip(lo, hi)),
                 options={"maxfev": maxfev, "xatol": 1e-5, "fatol": 1e-9,
                          "initial_simplex": _simplex(p, x0), "adaptive": True})

    remaining = p.budget - len(log)
    if p.objective == "t_r" and not best().meets(p):
        search("fidelity", best().params, remaining // 2)
    search(p.objective, best().params, p.budget - len(log))

    top = best()
    if top.error:
        raise OptimizationFailed("every evaluation failed", log)
    ramp, s = p.build(top.params)
    report = spin_echo_gate(GateSequence(ramp, s), p.interaction, p.tol, p.n_samples)
    report.parameters["optimized"] = {k: top.params[k] for k in p.free}
    return OptimizationResult(top.params, top, report, log)


# --- seeds -------------------------------------------------------------------------

def _plateau_rr(p_omega: float, delta: float, v: InteractionSpec) -> float:
    from .model import EffectiveParams
    return entangling_energy(EffectiveParams(p_omega, delta), v, "-").populations[2]


def default_seed(p: OptimizationProblem, rr_fraction: float = 0.8) -> dict:
    """Adiabatic seed: shape from the strong-blockade optimum, duration from
    the condition that the integrated entangling energy equals pi/2.

    When an |r,r> cap is set, the plateau detuning is pushed away from
    resonance until the dressed |1,1> carries at most ``rr_fraction`` of
    the cap on |r,r>.
    """
    v = p.interaction
    if p.family == "one-photon":
        seed = p.defaults
        if p.rr_cap is not None and _plateau_rr(1.0, -seed["delta_min"], v) > \
                rr_fraction * p.rr_cap:
            target = rr_fraction * p.rr_cap
            d = brentq(lambda d: _plateau_rr(1.0, -d, v) - target, 0.0, 50.0)
            seed["delta_min"] = d
            seed["delta_max"] = max(seed["delta_max"], d + 3.0)
        rise = 0.5 * (seed["total"] - seed["plateau"])

        def phase(plateau):
            q = dict(seed, plateau=plateau, total=2 * rise + plateau)
            return kappa_integral(one_photon_ramp(q), None, v, n=801) - math.pi / 2
        if phase(0.0) < 0:
            hi = 10.0
            while phase(hi) < 0:
                hi *= 2
            seed["plateau"] = brentq(phase, 0.0, hi, xtol=1e-6)
        else:
            seed["plateau"] = 0.0
        seed["total"] = 2 * rise + seed["plateau"]
    else:
        seed = p.defaults
        if p.rr_cap is not None and "ratio_ar" in p.free:
            c = seed["ratio_ar"]
            target = rr_fraction * p.rr_cap
            if _plateau_rr(1.0, (1 - c * c) / (2 * c), v) > target:
                def excess(c):
                    return _plateau_rr(1.0, (1 - c * c) / (2 * c), v) - target
                seed["ratio_ar"] = brentq(excess, c, 50.0)
        setup = p.two_photon

        def phase(t_stop):
            ramp, s = setup.build(dict(seed, t_stop=t_stop))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", EliminationWarning)
                return kappa_integral(ramp, s, v, n=801) - math.pi / 2
        if phase(0.0) < 0:
            hi = 10.0
            while phase(hi) < 0:
                hi *= 2
            seed["t_stop"] = brentq(phase, 0.0, hi, xtol=1e-6)
        else:
            seed["t_stop"] = 0.0
    return {k: seed[k] for k in p.free}


# --- scans -----------------------------------------------------------------------------

@dataclass
class SweepResult:
    rows: list
    columns: list
    meta: dict = field(default_factory=dict)

    def to_csv(self, path) -> None:
        from .runner import write_csv
        write_csv(path, self.rows, self.columns)


LANDSCAPE_COLUMNS = ["index", "gamma_a_per_gamma_r", "omega_per_2pi_gamma_r", "delta_1a",
                     "fidelity", "log10_infidelity", "t_r", "evaluations", "error"]


def _landscape_point(task) -> dict:
    shape, ga, power, x_bounds, maxiter, ratio, tol, n_samples = task
    setup = TwoPhotonSetup(gamma_r_per_omega=1 / (2 * math.pi * power),
                           gamma_a_per_gamma_r=ga)
    p = OptimizationProblem("two-photon", free=("delta_1a",), fixed=dict(shape),
                            blockade_ratio=ratio, two_photon=setup, tol=tol,
                            n_samples=n_samples, budget=max(50, maxiter))
    evals = []

    def f(logx):
        ev = evaluate(p, p.params([math.exp(logx)]))
        evals.append(ev)
        return 1 - ev.fidelity if not ev.error else 1.0

    minimize_scalar(f, bounds=tuple(math.log(b) for b in x_bounds), method="bounded",
                    options={"xatol": 1e-3, "maxiter": maxiter})
    top = max(evals, key=lambda e: (not e.error, e.fidelity))
    if top.error:
        raise RuntimeError(top.error)
    return {"gamma_a_per_gamma_r": ga, "omega_per_2pi_gamma_r": power,
            "delta_1a": top.params["delta_1a"], "fidelity": top.fidelity,
            "log10_infidelity": math.log10(max(1 - top.fidelity, 1e-300)),
            "t_r": top.t_r, "evaluations": len(evals), "error": ""}


def scan_fidelity_landscape(gamma_a_ratios, powers, shape: dict | None = None,
                            blockade_ratio: float = 0.1, x_bounds=(5.0, 2000.0),
                            budget: int = 200, tol: float = 1e-8, n_samples: int = 401,
                            workers: int = 1, store: ResultStore | None = None) -> SweepResult:
    """log10(1 - F) over Gamma_a/Gamma_r x Omega_1a^max/(2 pi Gamma_r).

    Each point optimizes delta_1a = -delta_ar (as x = delta_1a/Omega_1a^max)
    with a bounded scalar search of at most ``budget`` evaluations; the ramp
    shape is shared by all points (``shape`` defaults to the closed-system
    optimum).
    """
    shape = {k: v for k, v in (shape or STRONG_TWO_PHOTON).items() if k != "delta_1a"}
    tasks = []
    for i, ga in enumerate(gamma_a_ratios):
        for j, power in enumerate(powers):
            idx = i * len(powers) + j
            tasks.append((idx, (shape, float(ga), float(power), tuple(x_bounds), budget,
                                blockade_ratio, tol, n_samples)))
    rows = map_points(_landscape_point, tasks, workers, store)
    for row in rows:
        i, j = divmod(row["index"], max(len(powers), 1))
        row.setdefault("gamma_a_per_gamma_r", float(gamma_a_ratios[i]))
        row.setdefault("omega_per_2pi_gamma_r", float(powers[j]))
    meta = {"shape": shape, "x_bounds": list(x_bounds), "budget": budget,
            "blockade_ratio": blockade_ratio, "tol": tol}
    return SweepResult(rows, LANDSCAPE_COLUMNS, meta)


TR_COLUMNS = ["index", "family", "ratio", "t_r", "t_r_per_2pi_omega", "t_r_times_V",
              "t_r_per_4pi_over_V", "fidelity", "rr_max", "margin", "feasible", "error"]


def _tr_point(task) -> dict:
    family, ratio, budget, rr_cap, margin, target, tol, n_samples = task
    free = ONE_PHOTON_PARAMS if family == "one-photon" else ("t_stop", "t_w", "ratio_ar")
    fixed = {} if family == "one-photon" else {"delta_1a": 10.0}
    p = OptimizationProblem(family, free=free, fixed=fixed, blockade_ratio=ratio,
                            objective="t_r", fidelity_target=target, rr_cap=rr_cap,
                            antiblockade_margin=margin, budget=budget, tol=tol,
                            n_samples=n_samples)
    res = optimize_ramp(p)
    ev = res.evaluation
    V = 1.0 / ratio
    return {"family": family, "ratio": ratio, "t_r": ev.t_r,
            "t_r_per_2pi_omega": ev.t_r / (2 * math.pi), "t_r_times_V": ev.t_r * V,
            "t_r_per_4pi_over_V": ev.t_r * V / (4 * math.pi), "fidelity": ev.fidelity,
            "rr_max": ev.rr_max, "margin": ev.margin, "feasible": ev.meets(p),
            "params": res.params, "error": ""}


def scan_tr_vs_blockade(ratios, family: str = "one-photon", budget: int = 150,
                        rr_cap: float | None = 0.05, antiblockade_margin: float = 0.1,
                        fidelity_target: float = 0.999, tol: float = 1e-8,
                        n_samples: int = 801, workers: int = 1,
                        store: ResultStore | None = None) -> SweepResult:
    """Shortest t_r of a perfect-entangler passage per blockade ratio.

    Every point minimizes t_r subject to F >= ``fidelity_target``, the
    |r,r> cap and the anti-blockade margin; t_r is reported per passage
    from |1,1>, both in units of 2 pi / Omega_eff^max and of hbar / |V|.
    """
    tasks = [(k, (family, float(r), budget, rr_cap, antiblockade_margin, fidelity_target,
                  tol, n_samples)) for k, r in enumerate(ratios)]
    rows = map_points(_tr_point, tasks, workers, store)
    for row in rows:
        row.setdefault("family", family)
        row.setdefault("ratio", float(ratios[row["index"]]))
    ok = [r for r in rows if not r.get("error")]
    meta = {"family": family, "budget": budget, "rr_cap": rr_cap,
            "antiblockade_margin": antiblockade_margin, "fidelity_target": fidelity_target}
    if ok:
        meta["saturation_t_r_times_V"] = ok[-1]["t_r_times_V"]
    return SweepResult(rows, TR_COLUMNS, meta)


def fidelity_bound(v: InteractionSpec, tau_r: float) -> float:
    """Upper bound 1 - 4 pi hbar / (|V| tau_r) on a decay-limited gate."""
    if tau_r <= 0:
        raise ValueError("tau_r must be positive")
    if v.V == 0:
        raise ValueError("V must be non-zero")
    return 1 - 4 * math.pi / (abs(v.V) * tau_r)
