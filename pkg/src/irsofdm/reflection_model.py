"""Analytical element reflection model and its least-squares fit.

The circuit response is summarized by two curve families parameterized by the
target phase x set at the design frequency.  The resonance location (in GHz)
and the phase slope are

    F1(x) = a1 * tan(x / 3) + a2 * sin(x) + b1
    F2(x) = a3 * x + b2

and the realized reflection across frequency f is

    theta(x, f) = -2 * arctan(F2(x) * (f / 1e9 - F1(x)))
    A(x, f)     = 1 - (a4 * x + b3) / (((f / 1e9 - F1(x)) / 0.05)^2 + 4)

with A clamped to [0, 1].  The defaults reproduce a varactor-tuned element
resonant near 2.4 GHz; `fit_model` refits the seven coefficients to sampled
circuit curves with a derivative-free simplex search.
"""

from __future__ import annotations

import csv
import dataclasses

import numpy as np
import scipy.optimize

from .circuit import wrap_phase

_GHZ = 1e9
_WIDTH_GHZ = 0.05  # resonance width scale of the amplitude dip


class FitConstraintError(ValueError):
    """Fit result violates the model validity constraints."""


@dataclasses.dataclass(frozen=True)
class ModelParams:
    """Coefficients of the analytical reflection model (dimensionless)."""

    alpha1: float = 0.2
    alpha2: float = -0.015
    alpha3: float = -0.75
    alpha4: float = -0.05
    beta1: float = 2.4
    beta2: float = 11.02
    beta3: float = 1.65

    def __post_init__(self):
        vec = self.as_array()
        if not np.all(np.isfinite(vec)):
            raise ValueError("model coefficients must be finite")
        # amplitude numerator a4*x + b3 is linear in x, so positivity on
        # [-pi, pi] reduces to the endpoints
        if min(self.beta3 - self.alpha4 * np.pi, self.beta3 + self.alpha4 * np.pi) <= 0.0:
            raise ValueError("amplitude numerator must stay positive on [-pi, pi]")

    def as_array(self):
        return np.array([self.alpha1, self.alpha2, self.alpha3, self.alpha4,
                         self.beta1, self.beta2, self.beta3])

    @classmethod
    def from_array(cls, vec):
        return cls(*(float(v) for v in vec))


def _check_center(center_phase):
    x = np.asarray(center_phase, dtype=float)
    if np.any(np.abs(x) > np.pi):
        raise ValueError("center phase must lie in [-pi, pi]")
    return x


def resonance_ghz(params, center_phase):
    """Resonance location F1 in GHz as a function of the target phase."""
    x = _check_center(center_phase)
    return params.alpha1 * np.tan(x / 3.0) + params.alpha2 * np.sin(x) + params.beta1


def phase_slope(params, center_phase):
    """Phase steepness F2 around the resonance."""
    x = _check_center(center_phase)
    return params.alpha3 * x + params.beta2


def model_phase(params, center_phase, f):
    """Reflection phase theta(x, f) in radians, always inside (-pi, pi)."""
    f_ghz = np.asarray(f, dtype=float) / _GHZ
    return -2.0 * np.arctan(phase_slope(params, center_phase)
                            * (f_ghz - resonance_ghz(params, center_phase)))


def model_amplitude(params, center_phase, f):
    """Reflection amplitude A(x, f), clamped to [0, 1]."""
    x = _check_center(center_phase)
    f_ghz = np.asarray(f, dtype=float) / _GHZ
    detune = (f_ghz - resonance_ghz(params, x)) / _WIDTH_GHZ
    a = 1.0 - (params.alpha4 * x + params.beta3) / (detune * detune + 4.0)
    return np.clip(a, 0.0, 1.0)


def model_reflection(params, center_phase, f):
    """Complex reflection coefficient A(x, f) * exp(j * theta(x, f))."""
    return model_amplitude(params, center_phase, f) * np.exp(1j * model_phase(params, center_phase, f))


@dataclasses.dataclass(frozen=True, eq=False)
class PhaseCodebook:
    """Uniform discrete phase set {2*pi*b / 2^bits - pi}."""

    bits: int
    values: np.ndarray  # ascending, inside [-pi, pi)

    @property
    def size(self):
        return self.values.size


def codebook(bits):
    if not 1 <= int(bits) <= 8:
        raise ValueError("codebook bits must be between 1 and 8")
    bits = int(bits)
    vals = 2.0 * np.pi * np.arange(2 ** bits) / (2 ** bits) - np.pi
    return PhaseCodebook(bits, vals)


def reflection_table(params, cb, frequencies):
    """Model reflection for every codebook phase, shape (size, K) complex."""
    freqs = np.asarray(frequencies, dtype=float)
    return model_reflection(params, cb.values[:, None], freqs[None, :])


@dataclasses.dataclass(frozen=True)
class FitSample:
    """One observed (phase, amplitude) point of a circuit sweep."""

    center_phase: float   # radians, the target phase of the swept capacitance
    frequency: float      # Hz
    observed_phase: float
    observed_amplitude: float

    def __post_init__(self):
        if abs(self.center_phase) > np.pi or abs(self.observed_phase) > np.pi:
            raise ValueError("phases must lie in [-pi, pi]")
        if not 0.0 <= self.observed_amplitude <= 1.0 + 1e-12:
            raise ValueError("amplitude must lie in [0, 1]")
        if self.frequency <= 0.0:
            raise ValueError("frequency must be positive")


_FIT_HEADER = ["center_phase_rad", "freq_hz", "phase_rad", "amplitude"]


def write_fit_samples(path, samples):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_FIT_HEADER)
        for s in samples:
            writer.writerow([str(s.center_phase), str(s.frequency),
                             str(s.observed_phase), str(s.observed_amplitude)])


def read_fit_samples(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _FIT_HEADER:
            raise ValueError(f"unexpected fit sample header: {header!r}")
        return [FitSample(float(r[0]), float(r[1]), float(r[2]), float(r[3]))
                for r in reader if r]


@dataclasses.dataclass
class FitReport:
    center_phases: np.ndarray      # unique curve identifiers, sorted
    max_phase_error: np.ndarray    # per curve, wrapped radians
    max_amplitude_error: np.ndarray
    objective_init: float
    objective_final: float
    n_evaluations: int
    no_improvement: bool


def _fit_objective(vec, x, f, obs_phase, obs_amp, weight):
    a1, a2, a3, a4, b1, b2, b3 = vec
    margin = min(b3 - a4 * np.pi, b3 + a4 * np.pi)
    if margin <= 0.0:
        # steer the simplex back inside the validity region
        return 1e12 * (1.0 + abs(margin))
    f1 = a1 * np.tan(x / 3.0) + a2 * np.sin(x) + b1
    f2 = a3 * x + b2
    detune_ghz = f / _GHZ - f1
    phase = -2.0 * np.arctan(f2 * detune_ghz)
    amp = np.clip(1.0 - (a4 * x + b3) / ((detune_ghz / _WIDTH_GHZ) ** 2 + 4.0), 0.0, 1.0)
    dphi = wrap_phase(phase - obs_phase)
    val = float(np.dot(dphi, dphi) + weight * np.sum((amp - obs_amp) ** 2))
    if not np.isfinite(val):
        return 1e15
    return val


def fit_model(samples, init=None, *, amplitude_weight=4.0, n_restarts=5,
              max_evals_per_restart=20000, seed=0):
    """Refit the model coefficients to sampled circuit curves.

    Minimizes the sum of squared wrapped phase errors plus `amplitude_weight`
    times the squared amplitude errors, using Nelder-Mead simplex descent from
    `init` and from `n_restarts - 1` perturbed copies of it.  Deterministic
    for a fixed seed.

    Parameters
    ----------
    samples : sequence of FitSample
        Must contain at least 50 points spanning at least 3 distinct center
        phases and 20 distinct frequencies.
    init : ModelParams, optional
        Starting coefficients; defaults to ModelParams().

    Returns
    -------
    (ModelParams, FitReport)
        The fitted coefficients (or `init` if no restart improved on it, with
        the report's no_improvement flag set) and per-curve error maxima.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("no fit samples given")
    x = np.array([s.center_phase for s in samples])
    f = np.array([s.frequency for s in samples])
    obs_phase = np.array([s.observed_phase for s in samples])
    obs_amp = np.array([s.observed_amplitude for s in samples])
    if len(samples) < 50 or np.unique(x).size < 3 or np.unique(f).size < 20:
        raise ValueError("fit needs >= 50 samples over >= 3 center phases and >= 20 frequencies")

    if init is None:
        init = ModelParams()
    v0 = init.as_array()
    args = (x, f, obs_phase, obs_amp, float(amplitude_weight))
    obj_init = _fit_objective(v0, *args)

    rng = np.random.default_rng(seed)
    best_vec, best_obj = v0.copy(), obj_init
    n_evals = 0
    for restart in range(n_restarts):
        if restart == 0:
            start = v0.copy()
        else:
            # small multiplicative kicks; additive floor keeps zero entries live
            kick = rng.uniform(-0.05, 0.05, size=v0.size)
            start = v0 * (1.0 + kick) + 0.01 * rng.standard_normal(v0.size) * (v0 == 0.0)
        budget = max_evals_per_restart
        current = start
        current_obj = _fit_objective(current, *args)
        n_evals += 1
        while budget > 100:
            res = scipy.optimize.minimize(
                _fit_objective, current, args=args, method="Nelder-Mead",
                options={"maxfev": budget, "xatol": 1e-10, "fatol": 1e-14,
                         "adaptive": True})
            n_evals += res.nfev
            budget -= res.nfev
            if res.fun < current_obj - 1e-15:
                current, current_obj = res.x, res.fun
            else:
                break
        if current_obj < best_obj:
            best_vec, best_obj = np.asarray(current, dtype=float), current_obj

    no_improvement = not best_obj < obj_init - 1e-12 * max(1.0, abs(obj_init))
    if no_improvement:
        fitted = init
        best_obj = obj_init
    else:
        try:
            fitted = ModelParams.from_array(best_vec)
        except ValueError as exc:
            raise FitConstraintError(f"fit left the model validity region: {exc}") from exc

    centers = np.unique(x)
    max_phi = np.empty(centers.size)
    max_amp = np.empty(centers.size)
    for i, c in enumerate(centers):
        sel = x == c
        max_phi[i] = np.max(np.abs(wrap_phase(model_phase(fitted, c, f[sel]) - obs_phase[sel])))
        max_amp[i] = np.max(np.abs(model_amplitude(fitted, c, f[sel]) - obs_amp[sel]))
    report = FitReport(centers, max_phi, max_amp, float(obj_init), float(best_obj),
                       int(n_evals), no_improvement)
    return fitted, report
