import numpy as np
import pytest

from berlu.activations import (
    ActivationSpec,
    BerLUParams,
    berlu_dalpha,
    berlu_dx,
    berlu_forward,
    eval_dx,
    eval_forward,
)

P_DEFAULT = BerLUParams(0.01, 0.01)

ALL_SPECS = [
    ActivationSpec.berlu(0.01, 0.01),
    ActivationSpec.leaky_relu(0.01),
    ActivationSpec.relu(),
    ActivationSpec.prelu(0.25),
    ActivationSpec.gelu(),
    ActivationSpec.elu(1.0),
    ActivationSpec.celu(1.3),
    ActivationSpec.silu(),
    ActivationSpec.mish(),
    ActivationSpec.identity(),
]


class TestSpecValidation:
    def test_epsilon_must_be_positive(self):
        with pytest.raises(ValueError):
            BerLUParams(0.01, 0.0)
        with pytest.raises(ValueError):
            BerLUParams(0.01, -1.0)
        with pytest.raises(ValueError):
            ActivationSpec.berlu(0.01, 0.0)

    def test_params_must_be_finite(self):
        with pytest.raises(ValueError):
            BerLUParams(float("nan"), 0.01)
        with pytest.raises(ValueError):
            ActivationSpec.leaky_relu(float("inf"))

    def test_scale_must_be_positive(self):
        with pytest.raises(ValueError):
            ActivationSpec.elu(0.0)
        with pytest.raises(ValueError):
            ActivationSpec.celu(-2.0)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            ActivationSpec("softsign")

    def test_irrelevant_params_rejected(self):
        with pytest.raises(ValueError):
            ActivationSpec("relu", alpha=0.1)
        with pytest.raises(ValueError):
            ActivationSpec("gelu", scale=2.0)

    def test_spec_is_immutable(self):
        spec = ActivationSpec.berlu(0.01, 0.01)
        with pytest.raises(Exception):
            spec.alpha = 0.5

    def test_with_alpha_replaces(self):
        spec = ActivationSpec.berlu(0.01, 0.01)
        spec2 = spec.with_alpha(0.5)
        assert spec.alpha == 0.01 and spec2.alpha == 0.5
        assert spec2.epsilon == 0.01

    def test_alpha_outside_unit_interval_is_allowed(self):
        # the learnable slope is unclamped; analysis flags the expansive case
        assert BerLUParams(1.5, 0.01).alpha == 1.5
        assert ActivationSpec.berlu(-1.5, 0.01).alpha == -1.5


class TestBerLUScalar:
    def test_identity_branch(self):
        assert berlu_forward(1.0, P_DEFAULT) == 1.0

    def test_linear_branch(self):
        assert berlu_forward(-1.0, P_DEFAULT) == -0.01

    def test_transition_value_at_zero(self):
        # oracle: Bernstein sum with control points [-alpha*eps, 0, eps] at
        # t = 1/2: 0.25 * (-1e-4) + 0.25 * 1e-2 = 0.002475
        assert berlu_forward(0.0, P_DEFAULT) == pytest.approx(0.002475, abs=1e-15)

    def test_dx_branches(self):
        assert berlu_dx(0.02, P_DEFAULT) == 1.0
        assert berlu_dx(-0.02, P_DEFAULT) == 0.01
        assert berlu_dx(0.0, P_DEFAULT) == pytest.approx(0.505, abs=1e-15)

    def test_dx_matches_central_difference_at_zero(self):
        h = 1e-6
        fd = (berlu_forward(h, P_DEFAULT) - berlu_forward(-h, P_DEFAULT)) / (2 * h)
        assert berlu_dx(0.0, P_DEFAULT) == pytest.approx(fd, rel=1e-6)

    def test_dalpha_branches(self):
        assert berlu_dalpha(0.02, P_DEFAULT) == 0.0
        assert berlu_dalpha(-0.02, P_DEFAULT) == -0.02
        # -eps/4 by symbolic differentiation of the transition at x=0
        assert berlu_dalpha(0.0, P_DEFAULT) == pytest.approx(-0.0025, abs=1e-15)

    def test_dalpha_matches_finite_difference_over_alpha(self):
        h = 1e-6
        for x in (-0.02, -0.005, 0.0, 0.004, 0.02):
            up = berlu_forward(x, BerLUParams(0.01 + h, 0.01))
            dn = berlu_forward(x, BerLUParams(0.01 - h, 0.01))
            assert berlu_dalpha(x, P_DEFAULT) == pytest.approx(
                (up - dn) / (2 * h), abs=1e-9
            )

    def test_dalpha_continuous_at_seams(self):
        for alpha in (0.0, 0.01, 0.5, 1.0):
            for eps in (1e-4, 1e-2, 1.0):
                p = BerLUParams(alpha, eps)
                # left seam: both branches give -eps; right seam: both give 0
                assert berlu_dalpha(-eps, p) == pytest.approx(-eps, abs=1e-12)
                assert berlu_dalpha(eps, p) == pytest.approx(0.0, abs=1e-12)

    def test_rejects_non_finite_x(self):
        with pytest.raises(ValueError):
            berlu_forward(float("nan"), P_DEFAULT)
        with pytest.raises(ValueError):
            berlu_dx(float("inf"), P_DEFAULT)


class TestBerLUProperties:
    ALPHAS = (-1.0, -0.5, 0.0, 0.01, 0.5, 1.0)
    EPSILONS = (1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0)

    def test_seam_continuity(self):
        for alpha in self.ALPHAS:
            for eps in self.EPSILONS:
                p = BerLUParams(alpha, eps)
                assert abs(berlu_forward(-eps, p) - alpha * -eps) < 1e-12
                assert abs(berlu_forward(eps, p) - eps) < 1e-12
                assert abs(berlu_dx(-eps, p) - alpha) < 1e-12
                assert abs(berlu_dx(eps, p) - 1.0) < 1e-12

    def test_dominates_leaky_relu_with_gap_at_most_quarter(self):
        rng = np.random.default_rng(11)
        for alpha in (0.0, 0.01, 0.5, 0.99):
            for eps in (1e-3, 1e-2, 1.0):
                spec = ActivationSpec.berlu(alpha, eps)
                xs = np.concatenate(
                    [rng.uniform(-3 * eps, 3 * eps, 2000), [0.0, -eps, eps]]
                )
                gap = eval_forward(spec, xs) - eval_forward(
                    ActivationSpec.leaky_relu(alpha), xs
                )
                bound = (1 - alpha) * eps / 4
                assert gap.min() >= -1e-15
                assert gap.max() <= bound + 1e-15
                assert gap[xs == 0.0][0] == pytest.approx(bound, abs=1e-15)

    def test_monotone_for_alpha_in_unit_interval(self):
        xs = np.linspace(-5, 5, 20001)
        for alpha in (0.0, 0.3, 1.0):
            d = eval_dx(ActivationSpec.berlu(alpha, 0.05), xs)
            assert (d >= 0).all()

    def test_derivative_range_is_slope_interval(self):
        xs = np.linspace(-4, 4, 10001)
        for alpha in (0.0, 0.01, 0.7, 1.0):
            d = eval_dx(ActivationSpec.berlu(alpha, 0.02), xs)
            assert d.min() >= min(alpha, 1.0) - 1e-15
            assert d.max() <= max(alpha, 1.0) + 1e-15

    def test_collapses_to_leaky_relu_as_eps_vanishes(self):
        xs = np.linspace(-1, 1, 40001)
        spec = ActivationSpec.berlu(0.01, 1e-8)
        ref = eval_forward(ActivationSpec.leaky_relu(0.01), xs)
        assert np.max(np.abs(eval_forward(spec, xs) - ref)) < 1e-8


class TestBufferOps:
    def test_identity_roundtrip(self):
        xs = np.array([-1.0, 0.0, 2.0])
        np.testing.assert_array_equal(
            eval_forward(ActivationSpec.identity(), xs), xs
        )

    def test_relu_values(self):
        out = eval_forward(ActivationSpec.relu(), np.array([-1.0, 0.0, 2.0]))
        np.testing.assert_array_equal(out, [0.0, 0.0, 2.0])

    def test_silu_zero(self):
        assert eval_forward(ActivationSpec.silu(), np.array([0.0]))[0] == 0.0

    def test_relu_derivative_right_hand_at_zero(self):
        assert eval_dx(ActivationSpec.relu(), np.array([0.0]))[0] == 1.0

    def test_gelu_derivative_at_zero_is_half(self):
        # d/dx [x Phi(x)] at 0 equals Phi(0) = 0.5; cross-checked by the
        # finite-difference suite in test_analysis
        assert eval_dx(ActivationSpec.gelu(), np.array([0.0]))[0] == pytest.approx(
            0.5, abs=1e-15
        )

    def test_berlu_buffer_matches_scalar_api(self):
        spec = ActivationSpec.berlu(0.01, 0.01)
        xs = np.linspace(-0.05, 0.05, 101)
        out = eval_dx(spec, xs)
        assert out[50] == pytest.approx(0.505, abs=1e-15)

    def test_empty_buffer_passes_through(self):
        out = eval_forward(ActivationSpec.gelu(), np.zeros(0))
        assert out.shape == (0,)

    def test_non_finite_entry_names_first_offender(self):
        xs = np.array([0.0, 1.0, np.nan, np.inf])
        with pytest.raises(ValueError, match="index 2"):
            eval_forward(ActivationSpec.relu(), xs)

    def test_rejects_2d_input(self):
        with pytest.raises(ValueError):
            eval_forward(ActivationSpec.relu(), np.zeros((2, 2)))

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label())
    def test_vector_matches_per_element_bitwise(self, spec):
        rng = np.random.default_rng(5)
        xs = rng.uniform(-6, 6, 257)
        full_f = eval_forward(spec, xs)
        full_d = eval_dx(spec, xs)
        one_f = np.array([eval_forward(spec, xs[i : i + 1])[0] for i in range(len(xs))])
        one_d = np.array([eval_dx(spec, xs[i : i + 1])[0] for i in range(len(xs))])
        np.testing.assert_array_equal(full_f, one_f)
        np.testing.assert_array_equal(full_d, one_d)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label())
    def test_output_is_fresh_buffer_of_same_length(self, spec):
        xs = np.linspace(-2, 2, 33)
        out = eval_forward(spec, xs)
        assert out.shape == xs.shape
        assert out is not xs
        out[0] = 123.0
        assert xs[0] == -2.0
