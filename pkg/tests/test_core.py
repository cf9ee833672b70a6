"""Tests for profiles, effects, Q-matrices and the item response function"""

import numpy as np
import pytest
from scipy.special import logit

from core.effects import (
    canonical_subsets,
    design_matrix,
    design_vector,
    effect_label,
    parameter_label,
    parse_effect_label,
)
from core.profiles import profile_matrix, profile_space
from core.response import check_monotonicity, item_response_curve, item_response_prob
from custom_exceptions import ConfigurationException
from models import AttributeProfile, ItemParameterSet, QMatrix

FULL_PAIR = [(0,), (1,), (0, 1)]


class TestProfileSpace:
    """Tests for the profile enumeration."""

    def test_single_attribute(self):
        """Test A=1 gives the two profiles in order."""
        profiles = profile_space(1)

        assert [profile.bits for profile in profiles] == [(0,), (1,)]

    def test_three_attributes(self):
        """Test first and last of the eight A=3 profiles."""
        profiles = profile_space(3)

        assert len(profiles) == 8
        assert profiles[0].bits == (0, 0, 0)
        assert profiles[-1].bits == (1, 1, 1)

    def test_first_attribute_is_least_significant(self):
        """Test class index 5 of A=4 decodes to (1,0,1,0)."""
        assert profile_space(4)[5].bits == (1, 0, 1, 0)
        assert AttributeProfile.from_bits((1, 0, 1, 0)).class_index == 5

    def test_index_round_trip(self):
        """Test class index and bits are a bijection."""
        for index in range(16):
            profile = AttributeProfile.from_index(index, 4)
            assert AttributeProfile.from_bits(profile.bits).class_index == index

    def test_matrix_matches_profiles(self):
        """Test the vectorized matrix agrees with the profile list."""
        matrix = profile_matrix(3)

        for profile in profile_space(3):
            assert tuple(matrix[profile.class_index]) == profile.bits

    @pytest.mark.parametrize("attribute_count", [0, 17])
    def test_out_of_range(self, attribute_count):
        """Test A outside [1, 16] is rejected."""
        with pytest.raises(ConfigurationException, match="Attribute count"):
            profile_space(attribute_count)

    def test_inconsistent_profile(self):
        """Test bits and class index must agree."""
        with pytest.raises(ConfigurationException, match="does not encode"):
            AttributeProfile(bits=(1, 0), class_index=2)


class TestEffects:
    """Tests for effect ordering and labels."""

    def test_canonical_order(self):
        """Test singletons, then pairs, then the triple."""
        assert canonical_subsets([2, 0, 1]) == [
            (0,),
            (1,),
            (2,),
            (0, 1),
            (0, 2),
            (1, 2),
            (0, 1, 2),
        ]

    def test_effect_count(self):
        """Test 2^A - 1 non-intercept effects."""
        assert len(canonical_subsets(range(4))) == 15

    def test_max_order(self):
        """Test the level cap."""
        assert canonical_subsets(range(3), 1) == [(0,), (1,), (2,)]

    def test_labels(self):
        """Test the frozen external encoding."""
        assert effect_label(()) == "0"
        assert effect_label((0, 1, 2)) == "1x2x3"
        assert parse_effect_label("2x1") == (0, 1)
        assert parse_effect_label("intercept") == ()

    @pytest.mark.parametrize("label", ["1x1", "0x1", "ax2", ""])
    def test_malformed_labels(self, label):
        """Test malformed labels are rejected."""
        with pytest.raises(ConfigurationException, match="Malformed"):
            parse_effect_label(label)

    def test_parameter_label(self):
        """Test report labels."""
        assert parameter_label(4, (0, 1)) == "lambda_{4,2,(1,2)}"
        assert parameter_label(1, (1,)) == "lambda_{1,1,(2)}"
        assert parameter_label(3, ()) == "lambda_{3,0}"


class TestDesignVector:
    """Tests for design_vector and design_matrix."""

    def test_all_masters(self):
        """Test every product is one."""
        profile = AttributeProfile.from_bits((1, 1))

        np.testing.assert_array_equal(design_vector(profile, (1, 1), FULL_PAIR), [1, 1, 1])

    def test_missing_attribute_zeroes_products(self):
        """Test alpha_1 = 0 zeroes every product containing it."""
        profile = AttributeProfile.from_bits((0, 1))

        np.testing.assert_array_equal(design_vector(profile, (1, 1), FULL_PAIR), [0, 1, 0])

    def test_single_attribute_item(self):
        """Test an item measuring attribute 1 only."""
        profile = AttributeProfile.from_bits((1, 1))

        np.testing.assert_array_equal(design_vector(profile, (1, 0), [(0,)]), [1])

    def test_length_mismatch(self):
        """Test profile and Q-row must have the same length."""
        with pytest.raises(ConfigurationException, match="attributes"):
            design_vector(AttributeProfile.from_bits((1, 1)), (1, 1, 0), FULL_PAIR)

    def test_multiplicative(self):
        """Test the entry of a union is the product of the parts."""
        matrix = design_matrix(profile_matrix(3), [(0,), (1, 2), (0, 1, 2)])

        np.testing.assert_array_equal(matrix[:, 2], matrix[:, 0] * matrix[:, 1])
        assert set(np.unique(matrix)) <= {0.0, 1.0}


class TestQMatrix:
    """Tests for Q-matrix invariants."""

    def test_valid(self):
        """Test a valid Q-matrix keeps its labels."""
        q = QMatrix(np.array([[1, 0], [1, 1]]), ("I1", "I2"), ("A1", "A2"))

        assert q.n_items == 2
        assert q.measured(1) == (0, 1)

    def test_empty_row(self):
        """Test an item measuring nothing is rejected by name."""
        with pytest.raises(ConfigurationException, match="'I2' measures no attribute"):
            QMatrix(np.array([[1, 1], [0, 0]]), ("I1", "I2"), ("A1", "A2"))

    def test_empty_column(self):
        """Test an attribute measured by no item is rejected."""
        with pytest.raises(ConfigurationException, match="'A2'"):
            QMatrix(np.array([[1, 0], [1, 0]]), ("I1", "I2"), ("A1", "A2"))

    def test_non_binary(self):
        """Test entries must be 0 or 1."""
        with pytest.raises(ConfigurationException, match="0 or 1"):
            QMatrix(np.array([[2, 1]]), ("I1",), ("A1", "A2"))


class TestItemParameters:
    """Tests for ItemParameterSet masks."""

    def test_unmeasured_effect_rejected(self):
        """Test the subset rule of the mask."""
        with pytest.raises(ConfigurationException, match="does not measure"):
            ItemParameterSet.create((1, 0), [(0,), (1,)])

    def test_inactive_effects_are_zero(self):
        """Test effects outside the mask are stored as zero."""
        params = ItemParameterSet.create((1, 1), [(0, 1)], -1.0, [2.0])

        assert params.effects[(0,)] == 0.0
        assert params.effects[(1,)] == 0.0
        assert params.value((0, 1)) == 2.0

    def test_free_vector_round_trip(self):
        """Test free vector layout: intercept then active effects."""
        params = ItemParameterSet.create((1, 1), FULL_PAIR, -1.0, [0.5, 0.7, 0.2])

        np.testing.assert_allclose(params.free_vector(), [-1.0, 0.5, 0.7, 0.2])
        np.testing.assert_allclose(
            params.with_free_vector([0.0, 1.0, 2.0, 3.0]).active_values(), [1.0, 2.0, 3.0]
        )


class TestItemResponse:
    """Tests for item_response_prob and check_monotonicity."""

    def test_zero_parameters(self):
        """Test all-zero parameters give one half."""
        params = ItemParameterSet.create((1, 1), FULL_PAIR)

        for profile in profile_space(2):
            assert item_response_prob(params, profile, (1, 1), FULL_PAIR) == pytest.approx(0.5)

    def test_nonmaster_probability(self):
        """Test the intercept alone sets the non-master probability."""
        params = ItemParameterSet.create((1,), [(0,)], logit(0.18), [1.0])

        assert item_response_prob(
            params, AttributeProfile.from_bits((0,)), (1,), [(0,)]
        ) == pytest.approx(0.18)

    def test_master_probability(self):
        """Test intercept plus main effect reaches the master probability."""
        params = ItemParameterSet.create(
            (1,), [(0,)], logit(0.18), [logit(0.62) - logit(0.18)]
        )

        assert item_response_prob(
            params, AttributeProfile.from_bits((1,)), (1,), [(0,)]
        ) == pytest.approx(0.62)

    def test_extreme_logits(self):
        """Test the logistic stays finite at |eta| = 700."""
        params = ItemParameterSet.create((1,), [(0,)], -700.0, [1400.0])

        curve = item_response_curve(params, 1)
        assert np.all(np.isfinite(curve))
        assert curve[0] == pytest.approx(0.0, abs=1e-300)
        assert curve[1] == pytest.approx(1.0)

    def test_dina_item_monotone(self):
        """Test a positive DINA interaction never violates monotonicity."""
        params = ItemParameterSet.create((1, 1), [(0, 1)], -1.0, [2.5])

        assert check_monotonicity(params, (1, 1), [(0, 1)]) == []

    def test_negative_main_effect(self):
        """Test a negative main effect violates between (0,0) and (1,0)."""
        params = ItemParameterSet.create((1, 1), FULL_PAIR, 0.0, [-0.5, 0.0, 0.0])

        violations = check_monotonicity(params, (1, 1), FULL_PAIR)
        pairs = [(low.bits, high.bits) for low, high in violations]
        assert ((0, 0), (1, 0)) in pairs

    def test_interaction_above_minus_main(self):
        """Test an interaction of -0.5 with mains 1.0 stays monotone."""
        params = ItemParameterSet.create((1, 1), FULL_PAIR, 0.0, [1.0, 1.0, -0.5])

        assert check_monotonicity(params, (1, 1), FULL_PAIR) == []
