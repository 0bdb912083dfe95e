"""Closed forms and numerics for the non-symmetric two-level Landau-Zener sweep.

Near an avoided crossing the lattice reduces to two modes governed by

    i d/dt (a1, a2) = [[ eps(t), (coupling + skew)/2 ],
                       [ (coupling - skew)/2, -eps(t) ]] (a1, a2)

with eps(t) = -rate*t/2.  The reduction from the lattice is
coupling = 2*v_real, skew = 2*v_imag, rate = 4*drive_rate; a reversed drive
maps onto the same problem with the sign of skew flipped (transposition).

Component 2 is the lower level for t -> -inf and component 1 for t -> +inf,
so a sweep prepared in the ground level starts as (0, 1).  After the
crossing the intensities approach

    |a2|^2 -> P = exp(-pi (coupling^2 - skew^2) / (2 rate))      (transition)
    |a1|^2 -> amplification_ratio * (1 - P)                      (survival)

where amplification_ratio = (coupling + skew)/(coupling - skew).  These are
relative intensities: total power is not conserved for skew != 0.  In the
vanishing-gap limit skew -> +coupling the survival tends to the finite value
2*pi*coupling^2/rate while skew -> -coupling empties the ground level
completely.  evolve_two_mode integrates the system directly and is the
independent numerical check of every formula here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .lattice import LatticeParams


@dataclass(frozen=True)
class TwoModeParams:
    """Reduced two-level problem: couplings, sweep speed, detuning offset."""

    coupling: float
    skew: float
    rate: float
    detuning_offset: float = 0.0

    def __post_init__(self):
        if self.coupling < 0:
            raise ParameterError("coupling must be non-negative")

    @classmethod
    def from_lattice(cls, lattice: LatticeParams, drive_rate: float) -> "TwoModeParams":
        """Map lattice amplitudes and drive rate onto the two-level problem.

        A negative drive rate is folded into the sign of skew, matching the
        transposition property of the lattice operator.
        """
        sign = 1.0 if drive_rate >= 0 else -1.0
        return cls(
            coupling=2.0 * lattice.v_real,
            skew=2.0 * lattice.v_imag * sign,
            rate=4.0 * abs(drive_rate),
            detuning_offset=2.0,
        )


@dataclass
class TwoModeState:
    a1: complex
    a2: complex
    t: float


@dataclass
class TwoModeTrace:
    """Sampled amplitudes of one two-level sweep."""

    t: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    metadata: dict = field(default_factory=dict)

    def tail_intensities(self, fraction: float = 0.05) -> tuple[float, float]:
        """Mean |a1|^2 and |a2|^2 over the trailing fraction of samples.

        Averaging suppresses the slowly decaying post-crossing oscillations,
        so this is the asymptotic-intensity estimator.
        """
        n = max(1, int(round(fraction * self.t.size)))
        return (
            float(np.mean(np.abs(self.a1[-n:]) ** 2)),
            float(np.mean(np.abs(self.a2[-n:]) ** 2)),
        )


def two_mode_eigenvalues(detuning: float, coupling: float, skew: float) -> tuple[complex, complex]:
    """Instantaneous level pair +-sqrt(detuning^2 + (coupling^2 - skew^2)/4)."""
    root = np.sqrt(complex(detuning**2 + (coupling**2 - skew**2) / 4.0))
    return complex(root), complex(-root)


def amplification_ratio(coupling: float, skew: float) -> float:
    """Survival amplification (coupling + skew)/(coupling - skew)."""
    if skew == coupling:
        raise ParameterError("amplification ratio is singular at skew == coupling")
    return (coupling + skew) / (coupling - skew)


def _exponent(coupling: float, skew: float, rate: float) -> float:
    if rate == 0.0:
        raise ParameterError("rate must be non-zero")
    if abs(skew) >= coupling:
        raise ParameterError("transition formulas require |skew| < coupling (real gap)")
    return math.pi * (coupling * coupling - skew * skew) / (2.0 * abs(rate))


def lz_probability(coupling: float, skew: float, rate: float) -> float:
    """Asymptotic transition intensity exp(-pi (coupling^2 - skew^2)/(2|rate|))."""
    return math.exp(-_exponent(coupling, skew, rate))


def lz_survival(coupling: float, skew: float, rate: float) -> float:
    """Asymptotic ground intensity amplification_ratio * (1 - P)."""
    # expm1 keeps 1 - P accurate when the gap is tiny and P is close to 1
    return amplification_ratio(coupling, skew) * -math.expm1(-_exponent(coupling, skew, rate))


def critical_survival(coupling: float, rate: float) -> float:
    """Ground intensity left per crossing in the vanishing-gap limit, 2 pi c^2/|rate|."""
    if rate == 0.0:
        raise ParameterError("rate must be non-zero")
    return 2.0 * math.pi * coupling * coupling / abs(rate)


def anti_critical_limit() -> tuple[float, float]:
    """(|a1|^2, |a2|^2) for skew -> -coupling: the ground level empties fully."""
    return 0.0, 1.0


def multicross_power(coupling: float, skew: float, rate: float, crossings: int) -> float:
    """Total power after the given number of consecutive avoided crossings.

    survival = lz_survival, P = lz_probability:
    power = survival**n + P * sum(survival**i for i in range(n)); n = 0 gives 1.
    """
    if int(crossings) != crossings or crossings < 0:
        raise ParameterError("crossings must be a non-negative integer")
    if crossings == 0:
        return 1.0
    survival = lz_survival(coupling, skew, rate)
    transition = lz_probability(coupling, skew, rate)
    return survival**crossings + transition * sum(survival**i for i in range(crossings))


def ground_state(params: TwoModeParams, t: float) -> TwoModeState:
    """Instantaneous lower-level right eigenvector at time t, unit power.

    Starting a sweep from this state (rather than from a bare component)
    avoids seeding a spurious coherent admixture of the upper level.
    """
    rate = abs(params.rate)
    skew = params.skew if params.rate >= 0 else -params.skew
    eps = -rate * t / 2.0
    upper_coupling = (params.coupling + skew) / 2.0
    lower_coupling = (params.coupling - skew) / 2.0
    low = -np.sqrt(complex(eps * eps + upper_coupling * lower_coupling))
    a1 = -upper_coupling / (eps - low) if eps != low else 0.0
    norm = math.sqrt(abs(a1) ** 2 + 1.0)
    return TwoModeState(a1=complex(a1 / norm), a2=complex(1.0 / norm), t=t)


def _default_step(rate: float, t_max: float, coupling: float, skew: float) -> float:
    lam_max = math.sqrt((rate * t_max / 2.0) ** 2 + abs(coupling**2 - skew**2) / 4.0) + 1e-12
    # cap the spurious RK4 norm drift integrated over the whole sweep
    drift = 5e-4 * 72.0 * 7.0 / (2.0 * (rate / 2.0) ** 6 * t_max**7 + 1e-300)
    return min(0.01, 0.3 / lam_max, drift**0.2)


def evolve_two_mode(
    params: TwoModeParams,
    t_span: tuple[float, float] | None = None,
    initial: TwoModeState | None = None,
    step: float | None = None,
    sample_stride: int | None = None,
    convergence_check: bool = False,
) -> TwoModeTrace:
    """Integrate the sweep with fixed-step RK4 and return sampled amplitudes.

    Defaults: t_span = (-T, T) with T = max(300, 20/sqrt(|rate|)), the
    initial state is the instantaneous ground level at -T, and the step
    keeps both the stability and the accumulated norm drift of the scheme in
    check.  A negative rate is integrated as the skew-flipped problem.
    """
    rate = abs(params.rate)
    if rate == 0.0:
        raise ParameterError("rate must be non-zero")
    skew = params.skew if params.rate >= 0 else -params.skew
    if t_span is None:
        t_max = max(300.0, 20.0 / math.sqrt(rate))
        t_span = (-t_max, t_max)
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not (math.isfinite(t0) and math.isfinite(t1) and t1 > t0):
        raise ParameterError("t_span must be finite and increasing")
    if initial is None:
        initial = ground_state(params, t0)
    if step is None:
        step = _default_step(rate, max(abs(t0), abs(t1)), params.coupling, skew)

    def run(dt_target: float, stride: int | None):
        n_steps = max(1, math.ceil((t1 - t0) / dt_target))
        dt = (t1 - t0) / n_steps
        cu = (params.coupling + skew) / 2.0
        cl = (params.coupling - skew) / 2.0
        half = rate / 2.0
        a1, a2 = complex(initial.a1), complex(initial.a2)
        ts, s1, s2 = [], [], []
        if stride is not None:
            ts.append(t0), s1.append(a1), s2.append(a2)
        t = t0
        for i in range(n_steps):
            e0 = half * t                     # equals -eps(t)
            em = half * (t + 0.5 * dt)
            e1 = half * (t + dt)
            k1a = -1j * (-e0 * a1 + cu * a2)
            k1b = -1j * (cl * a1 + e0 * a2)
            x1, x2 = a1 + 0.5 * dt * k1a, a2 + 0.5 * dt * k1b
            k2a = -1j * (-em * x1 + cu * x2)
            k2b = -1j * (cl * x1 + em * x2)
            x1, x2 = a1 + 0.5 * dt * k2a, a2 + 0.5 * dt * k2b
            k3a = -1j * (-em * x1 + cu * x2)
            k3b = -1j * (cl * x1 + em * x2)
            x1, x2 = a1 + dt * k3a, a2 + dt * k3b
            k4a = -1j * (-e1 * x1 + cu * x2)
            k4b = -1j * (cl * x1 + e1 * x2)
            a1 += dt / 6.0 * (k1a + 2.0 * (k2a + k3a) + k4a)
            a2 += dt / 6.0 * (k1b + 2.0 * (k2b + k3b) + k4b)
            t = t0 + (i + 1) * dt
            if stride is not None and ((i + 1) % stride == 0 or i == n_steps - 1):
                ts.append(t), s1.append(a1), s2.append(a2)
        return a1, a2, ts, s1, s2, dt, n_steps

    n_estimate = max(1, math.ceil((t1 - t0) / step))
    stride = sample_stride if sample_stride is not None else max(1, n_estimate // 20000)
    a1, a2, ts, s1, s2, dt, n_steps = run(step, stride)
    trace = TwoModeTrace(
        t=np.array(ts),
        a1=np.array(s1, dtype=complex),
        a2=np.array(s2, dtype=complex),
        metadata={"step": dt, "steps": n_steps, "warnings": []},
    )
    if convergence_check:
        b1, b2, *_ = run(dt / 2.0, None)
        diff = abs(abs(a1) ** 2 - abs(b1) ** 2) + abs(abs(a2) ** 2 - abs(b2) ** 2)
        trace.metadata["final_intensity_halving_diff"] = diff
        if diff > 1e-4:
            trace.metadata["warnings"].append(
                f"step too large: halving it changes final intensities by {diff:.3e}"
            )
    return trace
