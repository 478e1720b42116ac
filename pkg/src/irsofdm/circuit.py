"""Equivalent-circuit model of a single reflecting element.

Each element behaves as a parallel resonant tank: a bottom-layer inductor L1
in parallel with the series branch formed by the top-layer inductor L2, the
tunable capacitor C and the loss resistance R.  The chip impedance is

    Z(C, f) = jwL1 (jwL2 + 1/(jwC) + R) / (jwL1 + jwL2 + 1/(jwC) + R)

with w = 2*pi*f, and the reflection coefficient follows from the mismatch
against the free-space impedance Z0,

    phi(C, f) = (Z(C, f) - Z0) / (Z(C, f) + Z0).

Varying C moves the resonance, which steers the reflection phase at the
design frequency; the amplitude dips near resonance because R burns power.
"""

from __future__ import annotations

import dataclasses

import numpy as np


class SingularCircuitError(ArithmeticError):
    """Impedance evaluation produced a non-finite value."""


class UnreachablePhaseError(ValueError):
    """No capacitance in range realizes the target phase within tolerance.

    Carries the best capacitance found and its wrapped phase distance so the
    caller can decide whether the miss is acceptable.
    """

    def __init__(self, message, best_capacitance, achieved_distance):
        super().__init__(message)
        self.best_capacitance = best_capacitance
        self.achieved_distance = achieved_distance


def wrap_phase(x):
    """Wrap angles to the half-open interval [-pi, pi)."""
    return (np.asarray(x) + np.pi) % (2.0 * np.pi) - np.pi


@dataclasses.dataclass(frozen=True)
class CircuitParams:
    """Element circuit constants.  Defaults describe a varactor-tuned patch
    resonant near 2.4 GHz."""

    l1: float = 2.5e-9      # bottom-layer inductance, henry
    l2: float = 0.7e-9      # top-layer inductance, henry
    r: float = 1.0          # loss resistance, ohm
    z0: float = 377.0       # free-space impedance, ohm
    c_min: float = 0.47e-12  # capacitance range, farad
    c_max: float = 2.35e-12

    def __post_init__(self):
        if not (self.l1 > 0.0 and self.l2 > 0.0):
            raise ValueError("inductances must be positive")
        if self.r < 0.0:
            raise ValueError("loss resistance must be nonnegative")
        if self.z0 <= 0.0:
            raise ValueError("free-space impedance must be positive")
        if not (0.0 < self.c_min < self.c_max):
            raise ValueError("need 0 < c_min < c_max")


def impedance(params, c, f):
    """Chip impedance Z(C, f) of the element equivalent circuit.

    `c` and `f` may be scalars or arrays (broadcast together); both must be
    strictly positive.
    """
    c = np.asarray(c, dtype=float)
    f = np.asarray(f, dtype=float)
    if np.any(c <= 0.0) or np.any(f <= 0.0):
        raise ValueError("capacitance and frequency must be positive")
    with np.errstate(over="ignore", invalid="ignore"):
        w = 2.0 * np.pi * f
        # series branch keeps the real part exactly r, so r = 0 stays lossless
        # in floating point instead of picking up rounding dust
        series = params.r + 1j * (w * params.l2 - 1.0 / (w * c))
        shunt = 1j * (w * params.l1)
        z = shunt * series / (shunt + series)
    if not np.all(np.isfinite(z)):
        raise SingularCircuitError("impedance is non-finite; branch admittances cancel")
    return z


def reflection(params, c, f):
    """Complex reflection coefficient (Z - Z0) / (Z + Z0)."""
    z = impedance(params, c, f)
    denom = z + params.z0
    if np.any(denom == 0.0):
        # cannot happen for a passive circuit (Re Z >= 0 < Z0) but the
        # guard keeps a degenerate parameterization from dividing by zero
        raise ZeroDivisionError("Z == -Z0, reflection undefined")
    return (z - params.z0) / denom


@dataclasses.dataclass(frozen=True)
class PolarReflection:
    amplitude: float
    phase: float  # radians in [-pi, pi)


def sweep_reflection(params, c, f_grid):
    """Reflection amplitude/phase of a fixed capacitance over a frequency grid.

    Returns a list of (frequency, PolarReflection) pairs in grid order.
    """
    f_grid = np.asarray(f_grid, dtype=float)
    try:
        phi = reflection(params, c, f_grid)
    except SingularCircuitError as exc:
        # re-evaluate pointwise to name the offending frequency
        for f in np.atleast_1d(f_grid):
            try:
                impedance(params, c, float(f))
            except SingularCircuitError:
                raise SingularCircuitError(f"impedance non-finite at f = {f!r} Hz") from exc
        raise
    phi = np.atleast_1d(phi)
    amps = np.abs(phi)
    phases = wrap_phase(np.angle(phi))
    return [
        (float(f), PolarReflection(float(a), float(p)))
        for f, a, p in zip(np.atleast_1d(f_grid), amps, phases)
    ]


def _phase_error(params, c, f_c, target_phase):
    return float(wrap_phase(np.angle(reflection(params, c, f_c)) - target_phase))


def solve_capacitance(params, target_phase, f_c, *, tol=np.deg2rad(1.0),
                      n_grid=512, n_bisect=60):
    """Find the capacitance whose reflection phase at `f_c` hits `target_phase`.

    Scans a uniform grid over [c_min, c_max], then bisects the sign change of
    the wrapped phase error around the best grid point.  The phase is strictly
    monotone in C through the resonance, so the bracketed root is unique.

    Returns (capacitance, achieved_distance) with the distance in radians.
    Raises UnreachablePhaseError if the best achievable wrapped distance
    exceeds `tol`; the error carries the best capacitance anyway.
    """
    target_phase = float(target_phase)
    if not (-np.pi <= target_phase < np.pi):
        raise ValueError("target phase must lie in [-pi, pi)")
    f_c = float(f_c)
    if f_c <= 0.0:
        raise ValueError("design frequency must be positive")

    grid = np.linspace(params.c_min, params.c_max, n_grid)
    err = wrap_phase(np.angle(reflection(params, grid, f_c)) - target_phase)
    dist = np.abs(err)
    i = int(np.argmin(dist))
    best_c = float(grid[i])
    best_d = float(dist[i])

    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, n_grid - 1)])
    e_lo = _phase_error(params, lo, f_c, target_phase)
    e_hi = _phase_error(params, hi, f_c, target_phase)
    if e_lo == 0.0:
        best_c, best_d = lo, 0.0
    elif e_hi == 0.0:
        best_c, best_d = hi, 0.0
    elif np.sign(e_lo) != np.sign(e_hi):
        for _ in range(n_bisect):
            mid = 0.5 * (lo + hi)
            e_mid = _phase_error(params, mid, f_c, target_phase)
            if e_mid == 0.0:
                lo = hi = mid
                break
            if np.sign(e_mid) == np.sign(e_lo):
                lo, e_lo = mid, e_mid
            else:
                hi, e_hi = mid, e_mid
        for c in (lo, hi, 0.5 * (lo + hi)):
            d = abs(_phase_error(params, c, f_c, target_phase))
            if d < best_d:
                best_c, best_d = c, d

    if best_d > tol:
        raise UnreachablePhaseError(
            f"target phase {target_phase:.6f} rad unreachable at f = {f_c:.4g} Hz; "
            f"best C = {best_c:.6g} F misses by {np.rad2deg(best_d):.3f} deg",
            best_capacitance=best_c,
            achieved_distance=best_d,
        )
    return best_c, best_d
