"""Two-level sweep closed forms, exact identities, and the numerical check."""

import cmath
import math

import numpy as np
import pytest

from ptlattice import (
    ParameterError,
    TwoModeParams,
    amplification_ratio,
    anti_critical_limit,
    critical_survival,
    evolve_two_mode,
    lz_probability,
    lz_survival,
    multicross_power,
    two_mode_eigenvalues,
)
from ptlattice.lattice import LatticeParams
from ptlattice.twomode import ground_state


class TestEigenvalues:
    def test_real_gap(self):
        plus, minus = two_mode_eigenvalues(0.0, 0.4, 0.3)
        expected = math.sqrt((0.4**2 - 0.3**2) / 4.0)
        assert plus == pytest.approx(expected, rel=1e-12)
        assert minus == pytest.approx(-expected, rel=1e-12)

    def test_gap_closes_at_matched_amplitudes(self):
        assert two_mode_eigenvalues(0.0, 0.4, 0.4) == (0.0, 0.0)

    def test_imaginary_pair_beyond_criticality(self):
        plus, minus = two_mode_eigenvalues(0.0, 0.4, 0.5)
        assert plus == pytest.approx(0.15j, rel=1e-12)
        assert minus == pytest.approx(-0.15j, rel=1e-12)

    def test_large_detuning_keeps_levels_real(self):
        plus, _ = two_mode_eigenvalues(1.0, 0.4, 0.5)
        assert plus.imag == 0.0


class TestAmplificationRatio:
    def test_values(self):
        assert amplification_ratio(0.4, 0.0) == 1.0
        assert amplification_ratio(0.4, 0.2) == pytest.approx(3.0, rel=1e-14)
        assert amplification_ratio(0.4, -0.2) == pytest.approx(1.0 / 3.0, rel=1e-14)

    def test_singular_at_matched_amplitudes(self):
        with pytest.raises(ParameterError):
            amplification_ratio(0.4, 0.4)


class TestTransitionFormulas:
    def test_symmetric_case_value(self):
        assert lz_probability(0.4, 0.0, 0.12) == pytest.approx(
            math.exp(-math.pi * 0.16 / 0.24), rel=1e-15
        )

    def test_skewed_case_value(self):
        assert lz_probability(0.4, 0.3, 0.12) == pytest.approx(
            math.exp(-math.pi * 0.07 / 0.24), rel=1e-15
        )

    def test_sudden_limit(self):
        assert lz_probability(0.4, 0.0, 1e9) == pytest.approx(1.0, abs=1e-9)

    def test_domain_errors(self):
        with pytest.raises(ParameterError):
            lz_probability(0.4, 0.4, 0.12)
        with pytest.raises(ParameterError):
            lz_probability(0.4, -0.5, 0.12)
        with pytest.raises(ParameterError):
            lz_probability(0.4, 0.0, 0.0)

    def test_reduces_to_classic_form_exactly(self):
        for coupling, rate in ((0.4, 0.12), (0.2, 0.05), (0.7, 2.0)):
            assert lz_probability(coupling, 0.0, rate) == math.exp(
                -math.pi * coupling**2 / (2.0 * rate)
            )

    def test_skew_sign_symmetry_exact(self):
        for skew in (0.1, 0.25, 0.399):
            assert lz_probability(0.4, skew, 0.12) == lz_probability(0.4, -skew, 0.12)

    def test_rate_sign_is_ignored(self):
        assert lz_probability(0.4, 0.3, -0.12) == lz_probability(0.4, 0.3, 0.12)


class TestSurvival:
    def test_symmetric_reduction(self):
        p = lz_probability(0.4, 0.0, 0.12)
        assert lz_survival(0.4, 0.0, 0.12) == pytest.approx(1.0 - p, rel=1e-14)

    def test_skewed_value(self):
        # 7 * (1 - 0.3999956...) computed from the two factors directly
        expected = amplification_ratio(0.4, 0.3) * (1.0 - lz_probability(0.4, 0.3, 0.12))
        assert lz_survival(0.4, 0.3, 0.12) == pytest.approx(expected, rel=1e-12)
        assert lz_survival(0.4, 0.3, 0.12) == pytest.approx(4.2, abs=2e-4)

    def test_adiabatic_limit_is_amplification_ratio(self):
        assert lz_survival(0.4, 0.2, 1e-12) == pytest.approx(3.0, rel=1e-12)

    def test_tiny_gap_stays_accurate(self):
        # expm1 keeps amplification * (1 - P) finite and correct near the gap closure
        skew = 0.4 - 1e-7
        expected = 2.0 * math.pi * 0.4**2 / 0.12  # vanishing-gap limit
        assert lz_survival(0.4, skew, 0.12) == pytest.approx(expected, rel=1e-5)


class TestCriticalLimits:
    def test_critical_survival_values(self):
        assert critical_survival(0.4, 0.12) == pytest.approx(2 * math.pi * 0.16 / 0.12, rel=1e-14)
        assert critical_survival(0.4, 0.12) == pytest.approx(8.3776, abs=1e-4)
        assert critical_survival(0.4, 0.004) == pytest.approx(251.33, abs=1e-2)
        assert critical_survival(0.0, 0.12) == 0.0

    def test_rate_zero_rejected(self):
        with pytest.raises(ParameterError):
            critical_survival(0.4, 0.0)

    def test_anti_critical_limit(self):
        assert anti_critical_limit() == (0.0, 1.0)


class TestMulticross:
    def test_zero_crossings_is_unity(self):
        assert multicross_power(0.4, 0.3, 0.12, 0) == 1.0

    def test_single_crossing_identity_exact(self):
        for skew in (0.0, 0.15, 0.3, -0.3):
            total = multicross_power(0.4, skew, 0.12, 1)
            assert total == lz_survival(0.4, skew, 0.12) + lz_probability(0.4, skew, 0.12)

    def test_values(self):
        assert multicross_power(0.4, 0.3, 0.12, 1) == pytest.approx(4.6, abs=3e-4)
        assert multicross_power(0.4, 0.3, 0.12, 2) == pytest.approx(19.72, abs=2e-3)

    def test_anti_critical_power_is_flat(self):
        for n in (1, 2, 3):
            assert multicross_power(0.4, -0.4 + 1e-12, 0.12, n) == pytest.approx(1.0, abs=1e-6)

    def test_near_critical_matches_geometric_sum(self):
        skew = 0.4 - 1e-7
        lam = critical_survival(0.4, 0.12)
        assert multicross_power(0.4, skew, 0.12, 1) == pytest.approx(1 + lam, rel=1e-4)
        assert multicross_power(0.4, skew, 0.12, 2) == pytest.approx(1 + lam + lam**2, rel=1e-4)

    def test_monotonicity_in_skew(self):
        skews = np.linspace(0.0, 0.39, 14)
        probs = [lz_probability(0.4, s, 0.12) for s in skews]
        survs = [lz_survival(0.4, s, 0.12) for s in skews]
        assert np.all(np.diff(probs) > 0)
        assert np.all(np.diff(survs) > 0)

    def test_negative_crossings_rejected(self):
        with pytest.raises(ParameterError):
            multicross_power(0.4, 0.3, 0.12, -1)


class TestEvolution:
    def test_decoupled_component_at_matched_amplitudes(self):
        # the lower-at-start component feels no coupling when skew == coupling
        params = TwoModeParams(coupling=0.4, skew=0.4, rate=0.12)
        trace = evolve_two_mode(params, t_span=(-300.0, 300.0))
        mags = np.abs(trace.a2)
        assert abs(mags[0] ** 2 - 1.0) < 1e-3
        # default step allows a bounded integrator norm drift
        assert np.max(np.abs(mags - mags[0])) < 5e-4
        # a finer step shows the modulus is genuinely constant
        trace = evolve_two_mode(params, t_span=(-300.0, 300.0), step=1e-3)
        mags = np.abs(trace.a2)
        assert np.max(np.abs(mags - mags[0])) < 1e-6

    def test_matched_amplitudes_reach_critical_survival(self):
        params = TwoModeParams(coupling=0.4, skew=0.4, rate=0.12)
        trace = evolve_two_mode(params)
        tail1, _ = trace.tail_intensities()
        assert tail1 == pytest.approx(critical_survival(0.4, 0.12), rel=0.02)

    def test_symmetric_case_reaches_classic_value(self):
        params = TwoModeParams(coupling=0.4, skew=0.0, rate=0.12)
        trace = evolve_two_mode(params)
        _, tail2 = trace.tail_intensities()
        assert tail2 == pytest.approx(lz_probability(0.4, 0.0, 0.12), rel=0.01)

    def test_negative_rate_maps_to_flipped_skew(self):
        trace = evolve_two_mode(TwoModeParams(0.4, 0.3, -0.12))
        tail1, tail2 = trace.tail_intensities()
        assert tail1 == pytest.approx(lz_survival(0.4, -0.3, 0.12), rel=0.02)
        assert tail2 == pytest.approx(lz_probability(0.4, -0.3, 0.12), rel=0.02)

    def test_ground_state_is_instantaneous_eigenvector(self):
        params = TwoModeParams(0.4, 0.3, 0.12)
        t = -250.0
        state = ground_state(params, t)
        eps = -0.12 * t / 2.0
        h = np.array([[eps, (0.4 + 0.3) / 2.0], [(0.4 - 0.3) / 2.0, -eps]], dtype=complex)
        vec = np.array([state.a1, state.a2])
        low = min(np.linalg.eigvals(h).real)
        residual = h @ vec - low * vec
        assert np.linalg.norm(residual) < 1e-10
        assert abs(np.linalg.norm(vec) - 1.0) < 1e-14

    def test_convergence_check_metadata(self):
        trace = evolve_two_mode(
            TwoModeParams(0.4, 0.0, 0.12), t_span=(-50.0, 50.0), convergence_check=True
        )
        assert "final_intensity_halving_diff" in trace.metadata
        assert trace.metadata["warnings"] == []

    def test_zero_rate_rejected(self):
        with pytest.raises(ParameterError):
            evolve_two_mode(TwoModeParams(0.4, 0.0, 0.0))


class TestLatticeReduction:
    def test_amplitude_mapping(self):
        two = TwoModeParams.from_lattice(LatticeParams(0.2, 0.15), 0.03)
        assert (two.coupling, two.skew, two.rate) == (0.4, 0.3, 0.12)

    def test_reversed_drive_flips_skew(self):
        two = TwoModeParams.from_lattice(LatticeParams(0.2, 0.15), -0.03)
        assert (two.coupling, two.skew, two.rate) == (0.4, -0.3, 0.12)


def test_eigenvalue_root_is_principal():
    plus, _ = two_mode_eigenvalues(0.3, 0.4, 0.5)
    assert plus == pytest.approx(cmath.sqrt(0.3**2 + (0.16 - 0.25) / 4), rel=1e-12)
