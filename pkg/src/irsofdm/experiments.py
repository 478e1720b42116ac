"""Monte Carlo experiments: model validation and rate trend scenarios.

Every scenario is deterministic in (config, seed).  Drop d of seed s draws
its channel from a child seed of (s, d) and its user angle from (s, d, 1),
so the same drops are reused across sweep points (common random numbers) and
results are reproducible byte for byte.
"""

from __future__ import annotations

import csv
import dataclasses

import numpy as np

from .channel import dbm_to_watts, generate_channels, take_elements
from .circuit import UnreachablePhaseError, reflection, solve_capacitance, wrap_phase
from .optimizer import (
    alternating_optimize,
    effective_gains,
    ideal_design,
    water_filling,
    _rate_from_power_gains,
)
from .reflection_model import codebook, model_amplitude, model_phase

SCHEMES = ("practical", "ideal", "no_irs")


def _drop_user_angle(seed, drop):
    rng = np.random.default_rng(np.random.SeedSequence((seed, drop, 1)))
    return float(rng.uniform(0.0, 2.0 * np.pi))


def _drop_channel_seed(seed, drop):
    return int(np.random.SeedSequence((seed, drop)).generate_state(1)[0])


def drop_channel(system, seed, drop):
    """The channel realization of Monte Carlo drop `drop` under `seed`."""
    return generate_channels(system, _drop_user_angle(seed, drop),
                             _drop_channel_seed(seed, drop))


def simulate_drop_rates(channel, model, cb, system, settings, backend=None):
    """Achievable rate of each scheme on one channel realization.

    practical: joint alternating design through the reflection model.
    ideal: beam chosen as if elements were flat unit reflectors, then
    evaluated through the model with water-filling on the realized gains.
    no_irs: water-filling over the direct link only.
    """
    sigma2 = system.noise_variance
    _, _, r_practical, _ = alternating_optimize(
        channel, model, cb, system, eps_rate=settings.eps_rate,
        max_outer=settings.max_outer, max_sweeps=settings.max_sweeps, backend=backend)

    state = ideal_design(channel, cb, system, model, eps_rate=settings.eps_rate,
                         max_outer=settings.max_outer, max_sweeps=settings.max_sweeps,
                         backend=backend)
    eff = effective_gains(channel, state)
    gains = eff.real ** 2 + eff.imag ** 2
    alloc = water_filling(gains, sigma2, system.max_power)
    r_ideal = _rate_from_power_gains(alloc.p, gains, sigma2)

    direct = channel.h_direct.real ** 2 + channel.h_direct.imag ** 2
    alloc_d = water_filling(direct, sigma2, system.max_power)
    r_direct = _rate_from_power_gains(alloc_d.p, direct, sigma2)
    return {"practical": r_practical, "ideal": r_ideal, "no_irs": r_direct}


@dataclasses.dataclass
class ValidationCurve:
    target_phase_deg: float
    capacitance: float
    frequencies: np.ndarray
    circuit_phase: np.ndarray
    circuit_amplitude: np.ndarray
    model_phase: np.ndarray
    model_amplitude: np.ndarray

    @property
    def max_phase_error(self):
        return float(np.max(np.abs(wrap_phase(self.model_phase - self.circuit_phase))))

    @property
    def max_amplitude_error(self):
        return float(np.max(np.abs(self.model_amplitude - self.circuit_amplitude)))


@dataclasses.dataclass
class ModelValidationResult:
    curves: list
    errors: list  # (target_phase_deg, message) for unreachable targets

    header = ("target_phase_deg", "freq_hz", "circuit_phase_rad", "circuit_amp",
              "model_phase_rad", "model_amp")

    def rows(self):
        for c in self.curves:
            for i in range(c.frequencies.size):
                yield (c.target_phase_deg, float(c.frequencies[i]),
                       float(c.circuit_phase[i]), float(c.circuit_amplitude[i]),
                       float(c.model_phase[i]), float(c.model_amplitude[i]))


def run_model_validation(cfg):
    """Sweep circuit and model responses for each target phase.

    Target phases that no capacitance can realize are reported in the result
    instead of aborting the sweep.
    """
    val = cfg.validation
    grid = np.linspace(val.f_min, val.f_max, val.n_points)
    f_c = cfg.system.center_frequency
    curves, errors = [], []
    for deg in val.target_phases_deg:
        x = float(wrap_phase(np.deg2rad(deg)))
        try:
            cap, _ = solve_capacitance(cfg.circuit, x, f_c)
        except UnreachablePhaseError as exc:
            errors.append((float(deg), str(exc)))
            continue
        phi = reflection(cfg.circuit, cap, grid)
        curves.append(ValidationCurve(
            float(deg), cap, grid,
            np.asarray(wrap_phase(np.angle(phi))), np.abs(phi),
            np.asarray(model_phase(cfg.model, x, grid)),
            np.asarray(model_amplitude(cfg.model, x, grid))))
    return ModelValidationResult(curves, errors)


@dataclasses.dataclass
class RateSweepResult:
    sweep_var: str
    sweep_values: tuple
    seed: int
    n_drops: int
    per_drop: dict  # (sweep_value, scheme) -> (n_drops,) rates

    header = ("sweep_var", "sweep_value", "scheme", "mean_rate_bps_hz",
              "std_rate", "n_drops", "seed")

    def mean_rate(self, value, scheme):
        return float(np.mean(self.per_drop[(value, scheme)]))

    def rows(self):
        for value in self.sweep_values:
            for scheme in SCHEMES:
                rates = self.per_drop[(value, scheme)]
                std = float(np.std(rates, ddof=1)) if rates.size > 1 else 0.0
                yield (self.sweep_var, value, scheme, float(np.mean(rates)),
                       std, self.n_drops, self.seed)


def run_rate_vs_power(cfg, backend=None):
    """Mean rate of every scheme across a transmit power sweep.

    The same channel drops are reused at every power, so scheme curves move
    together and small mean differences are paired comparisons.
    """
    cb = codebook(cfg.codebook_bits)
    values = tuple(float(v) for v in cfg.power_sweep_dbm)
    per_drop = {(v, s): np.empty(cfg.n_drops) for v in values for s in SCHEMES}
    for drop in range(cfg.n_drops):
        channel = drop_channel(cfg.system, cfg.seed, drop)
        for v in values:
            system_p = dataclasses.replace(cfg.system, max_power=float(dbm_to_watts(v)))
            rates = simulate_drop_rates(channel, cfg.model, cb, system_p,
                                        cfg.optimizer, backend=backend)
            for s in SCHEMES:
                per_drop[(v, s)][drop] = rates[s]
    return RateSweepResult("power_dbm", values, cfg.seed, cfg.n_drops, per_drop)


def run_rate_vs_elements(cfg, backend=None):
    """Mean rate of every scheme across element counts.

    Channels are generated once per drop at the largest count and sliced, so
    smaller surfaces see a subset of the same elements.
    """
    cb = codebook(cfg.codebook_bits)
    values = tuple(int(n) for n in cfg.element_sweep)
    n_max = max(values)
    system_full = dataclasses.replace(cfg.system, n_elements=n_max)
    per_drop = {(v, s): np.empty(cfg.n_drops) for v in values for s in SCHEMES}
    for drop in range(cfg.n_drops):
        channel_full = drop_channel(system_full, cfg.seed, drop)
        for v in values:
            channel = take_elements(channel_full, v)
            system_n = dataclasses.replace(cfg.system, n_elements=v)
            rates = simulate_drop_rates(channel, cfg.model, cb, system_n,
                                        cfg.optimizer, backend=backend)
            for s in SCHEMES:
                per_drop[(v, s)][drop] = rates[s]
    return RateSweepResult("n_elements", values, cfg.seed, cfg.n_drops, per_drop)


@dataclasses.dataclass
class TraceResult:
    trace: object
    final_rate: float

    header = ("stage", "iteration", "objective")

    def rows(self):
        return self.trace.rows()


def run_convergence_trace(cfg, backend=None):
    """Objective trace of one alternating optimization on drop 0."""
    cb = codebook(cfg.codebook_bits)
    channel = drop_channel(cfg.system, cfg.seed, 0)
    opt = cfg.optimizer
    _, _, rate, trace = alternating_optimize(
        channel, cfg.model, cb, cfg.system, eps_rate=opt.eps_rate,
        max_outer=opt.max_outer, max_sweeps=opt.max_sweeps, backend=backend)
    return TraceResult(trace, rate)


def write_result_csv(path, result):
    """Write a scenario result to CSV with plain str() number formatting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(result.header)
        for row in result.rows():
            writer.writerow([str(v) for v in row])
