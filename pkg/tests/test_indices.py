"""Tests for candidate enumeration, modification indices and reporting"""

from math import comb

import numpy as np
import pytest

from custom_exceptions import ContractViolationException
from estimator.em import fit
from indices.candidates import (
    enumerate_candidates,
    enumerate_model_candidates,
    enumerate_qmatrix_candidates,
)
from indices.compute import IndexCalculator, compute_mis
from indices.report import apply_multiplicity, format_table
from model_templates.utils import get_template_class
from models import (
    Candidate,
    ItemParameterSet,
    ModificationIndex,
    ParameterSet,
    QMatrix,
    SimDesign,
    StructuralParameterSet,
)


def design_q() -> QMatrix:
    return SimDesign.from_settings("large").q_matrix()


def labels(candidates, item=None):
    return [c.label for c in candidates if item is None or c.item == item]


class TestQMatrixCandidates:
    """Tests for enumerate_qmatrix_candidates."""

    def test_two_attribute_example(self):
        """Test an item measuring attribute 1 of two."""
        q = QMatrix(np.array([[1, 0], [0, 1], [1, 1]]), ("I1", "I2", "I3"), ("A1", "A2"))
        spec = get_template_class("lcdm").build_spec(q)

        candidates = enumerate_qmatrix_candidates(spec, 2)

        assert labels(candidates, 0) == ["lambda_{1,1,(2)}", "lambda_{1,2,(1,2)}"]
        assert labels(candidates, 2) == []

    def test_four_attribute_example(self):
        """Test eight candidates for a two-attribute item of four."""
        q = QMatrix(
            np.array([[1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
            ("I1", "I2", "I3"),
            ("A1", "A2", "A3", "A4"),
        )
        spec = get_template_class("lcdm").build_spec(q)

        item_one = [c for c in enumerate_qmatrix_candidates(spec, 3) if c.item == 0]

        assert len(item_one) == 8
        assert [c.level for c in item_one if 2 in c.effect] == [1, 2, 2, 3]

    def test_simulation_design(self):
        """Test 105 candidates on the thirty-item design."""
        spec = get_template_class("lcdm").build_spec(design_q())

        assert len(enumerate_qmatrix_candidates(spec, 2)) == 105

    @pytest.mark.parametrize("max_order", [1, 2, 3])
    def test_closed_form_count(self, max_order):
        """Test counts match the binomial sum."""
        q = design_q()
        spec = get_template_class("lcdm").build_spec(q)
        expected = 0
        for item in range(q.n_items):
            measured = len(q.measured(item))
            unmeasured = q.n_attributes - measured
            expected += unmeasured * sum(
                comb(measured, j) for j in range(min(max_order - 1, measured) + 1)
            )

        assert len(enumerate_qmatrix_candidates(spec, max_order)) == expected

    def test_constraints(self):
        """Test mains are positive and interactions bounded by -k."""
        spec = get_template_class("lcdm").build_spec(design_q())

        for candidate in enumerate_qmatrix_candidates(spec, 2):
            if candidate.level == 1:
                assert candidate.constraint == "positive"
            else:
                assert candidate.constraint == "greater_than_minus_k"
                assert candidate.k >= 0.0

    def test_new_attribute_main_absent(self):
        """Test k collapses to 0 when a main effect is itself a candidate."""
        q = QMatrix(np.array([[1, 0], [0, 1]]), ("I1", "I2"), ("A1", "A2"))
        spec = get_template_class("lcdm").build_spec(q)
        items = (
            ItemParameterSet.create((1, 0), [(0,)], -1.0, [2.0]),
            ItemParameterSet.create((0, 1), [(1,)], -1.0, [2.0]),
        )
        params = ParameterSet(items, StructuralParameterSet.uniform(2, 2))

        interaction = [c for c in enumerate_qmatrix_candidates(spec, 2, params) if c.level == 2][0]

        assert interaction.k == 0.0
        assert dict(interaction.k_source) == {"1": 2.0, "2": 0.0}

    def test_max_order(self):
        """Test max_order below 1 is refused."""
        spec = get_template_class("lcdm").build_spec(design_q())

        with pytest.raises(ContractViolationException, match="max_order"):
            enumerate_qmatrix_candidates(spec, 0)


class TestModelCandidates:
    """Tests for enumerate_model_candidates."""

    def test_dina_two_attributes(self):
        """Test the two omitted main effects."""
        q = QMatrix(np.array([[1, 1], [1, 0], [0, 1]]), ("I1", "I2", "I3"), ("A1", "A2"))
        spec = get_template_class("dina").build_spec(q)

        candidates = enumerate_model_candidates(spec, 2)

        assert labels(candidates) == ["lambda_{1,1,(1)}", "lambda_{1,1,(2)}"]

    def test_dina_three_attributes(self):
        """Test three mains and three two-way interactions."""
        q = QMatrix(np.array([[1, 1, 1]]), ("I1",), ("A1", "A2", "A3"))
        spec = get_template_class("dina").build_spec(q)

        assert len(enumerate_model_candidates(spec, 2)) == 6

    def test_simulation_design(self):
        """Test thirty main-effect candidates with DINA everywhere."""
        spec = get_template_class("dina").build_spec(design_q())

        candidates = enumerate_model_candidates(spec, 2)

        assert len(candidates) == 30
        assert all(candidate.level == 1 for candidate in candidates)

    def test_full_lcdm_has_none(self):
        """Test nothing is masked out of the full LCDM."""
        spec = get_template_class("lcdm").build_spec(design_q())

        assert enumerate_model_candidates(spec, 3) == []

    def test_k_from_fitted_mains(self):
        """Test k is the smallest fitted main effect."""
        q = QMatrix(np.array([[1, 1]]), ("I1",), ("A1", "A2"))
        spec = get_template_class("mains").build_spec(q)
        item = ItemParameterSet.create((1, 1), [(0,), (1,)], -1.0, [0.8, 1.2])
        params = ParameterSet((item,), StructuralParameterSet.uniform(2, 2))

        (candidate,) = enumerate_model_candidates(spec, 2, params)

        assert candidate.effect == (0, 1)
        assert candidate.k == pytest.approx(0.8)

    def test_both(self):
        """Test Q-matrix candidates come first."""
        q = QMatrix(np.array([[1, 1, 0], [0, 0, 1]]), ("I1", "I2"), ("A1", "A2", "A3"))
        spec = get_template_class("dina").build_spec(q)

        kinds = [c.kind for c in enumerate_candidates(spec, "both", 1)]

        assert kinds == ["qmatrix"] * 3 + ["model"] * 2


class TestComputeMis:
    """Tests for compute_mis on a fitted model."""

    @pytest.fixture(name="candidates")
    def fixture_candidates(self, small_fit):
        return enumerate_qmatrix_candidates(small_fit.spec, 2, small_fit.params)

    def test_nonnegative(self, small_fit, small_data, candidates):
        """Test every index is nonnegative with a valid p-value."""
        indices = compute_mis(small_fit, candidates, small_data)

        assert len(indices) == len(candidates) == 42
        for index in indices:
            assert index.t_s >= 0.0
            assert 0.0 < index.p_value <= 1.0
            assert (index.t_s == 0.0) == index.boundary_case or index.unavailable

    def test_order_invariant(self, small_fit, small_data, candidates):
        """Test each index is computed independently."""
        forward = compute_mis(small_fit, candidates, small_data)
        backward = compute_mis(small_fit, candidates[::-1], small_data)

        assert [index.t_s for index in forward] == [index.t_s for index in backward[::-1]]

    def test_threads_identical(self, small_fit, small_data, candidates):
        """Test parallel computation merges in candidate order."""
        serial = compute_mis(small_fit, candidates, small_data, threads=1)
        parallel = compute_mis(small_fit, candidates, small_data, threads=3)

        assert [index.to_dict() for index in serial] == [index.to_dict() for index in parallel]

    def test_already_free(self, small_fit, small_data):
        """Test a parameter of the reduced model scores zero."""
        candidate = Candidate("model", 0, small_fit.spec.q.item_ids[0], (0,), "positive")

        index = IndexCalculator(small_fit, small_data).compute(candidate)

        assert index.t_s == 0.0
        assert index.p_value == 1.0
        assert "already free" in index.reason

    def test_omitted_entry_is_largest(self, small_design, small_data):
        """Test the index of a removed Q entry dominates."""
        q = small_design.q_matrix().with_entry(3, 1, 0)
        spec = get_template_class("lcdm").build_spec(q)
        reduced = fit(spec, small_data)
        candidates = enumerate_qmatrix_candidates(spec, 2, reduced.params)
        indices = compute_mis(reduced, candidates, small_data)
        best = max(indices, key=lambda index: index.t_s)

        assert best.candidate.item == 3
        assert 1 in best.candidate.effect

    def test_empty(self, small_fit, small_data):
        """Test no candidates give no indices."""
        assert compute_mis(small_fit, [], small_data) == []


def make_index(item, effect, t_s, p_value, unavailable=False):
    constraint = "positive" if len(effect) == 1 else "greater_than_minus_k"
    candidate = Candidate("qmatrix", item, f"Item{item + 1}", effect, constraint)
    return ModificationIndex(candidate, t_s, p_value, unavailable=unavailable)


class TestMultiplicity:
    """Tests for apply_multiplicity and format_table."""

    def test_counts_available_tests(self):
        """Test m counts the available indices."""
        indices = [
            make_index(0, (1,), 0.0, 1.0),
            make_index(0, (0, 1), 0.0, 1.0, unavailable=True),
            make_index(1, (0,), 12.0, 0.00027),
        ]

        report = apply_multiplicity(indices, 0.05)

        assert report.m == 2
        assert report.adjusted_alpha == pytest.approx(0.025)
        assert not report.indices[1].significant_raw
        assert report.indices[2].significant_adjusted

    def test_override(self):
        """Test m override and its critical value."""
        report = apply_multiplicity([make_index(0, (1,), 3.0, 0.04)], 0.05, m_override=148)

        assert report.m == 148
        assert report.critical_value == pytest.approx(11.55, abs=0.01)
        assert report.indices[0].significant_raw
        assert not report.indices[0].significant_adjusted
        assert "critical value = 11.55" in format_table(report).splitlines()[0]

    def test_single_test(self):
        """Test m = 1 keeps the unadjusted critical value."""
        report = apply_multiplicity([make_index(0, (1,), 3.0, 0.04)], 0.05)

        assert report.critical_value == pytest.approx(2.7055, abs=1e-4)

    def test_adjusted_implies_raw(self):
        """Test the flag implication on random p-values."""
        rng = np.random.default_rng(0)
        indices = [
            make_index(item, (1,), 1.0, float(p))
            for item, p in enumerate(rng.uniform(0, 0.02, 20))
        ]

        report = apply_multiplicity(indices, 0.05)

        for index in report.indices:
            assert index.significant_raw or not index.significant_adjusted

    def test_no_tests(self):
        """Test m = 0 gives an empty report."""
        report = apply_multiplicity([], 0.05)

        assert report.m == 0
        assert report.indices == ()
        assert report.suggested_changes == ()

    def test_alpha_range(self):
        """Test alpha must lie in (0, 0.5)."""
        with pytest.raises(ContractViolationException, match="alpha"):
            apply_multiplicity([], 0.5)

    def test_suggestions(self, small_design):
        """Test ranking, Q flips, hierarchy review and one recommendation."""
        spec = get_template_class("lcdm").build_spec(small_design.q_matrix())
        indices = [
            make_index(0, (1,), 2.0, 0.08),
            make_index(0, (0, 1), 20.0, 1e-6),
            make_index(1, (0,), 15.0, 1e-5),
        ]

        report = apply_multiplicity(indices, 0.05, spec=spec)
        changes = report.suggested_changes

        assert [change.parameter for change in changes] == [
            "lambda_{1,2,(1,2)}",
            "lambda_{2,1,(1)}",
        ]
        assert changes[0].action == "review"
        assert "lambda_{1,1,(2)}" in changes[0].note
        assert changes[1].action == "add"
        assert changes[1].recommended_next
        assert changes[1].q_flip == "q[Item2,A1] 0->1"
        assert sum(change.recommended_next for change in changes) == 1

    def test_main_effect_recommended_before_interaction(self, small_design):
        """Test a significant missing main effect goes before its interaction."""
        spec = get_template_class("lcdm").build_spec(small_design.q_matrix())
        indices = [
            make_index(0, (1,), 14.0, 1e-4),
            make_index(0, (0, 1), 25.0, 1e-7),
        ]

        changes = apply_multiplicity(indices, 0.05, spec=spec).suggested_changes

        assert [change.parameter for change in changes] == [
            "lambda_{1,2,(1,2)}",
            "lambda_{1,1,(2)}",
        ]
        assert changes[0].action == "add"
        assert "lambda_{1,1,(2)} first" in changes[0].note
        assert not changes[0].recommended_next
        assert changes[1].recommended_next

    def test_untested_main_effect_flagged(self, small_design):
        """Test an interaction whose absent main effect was never tested."""
        spec = get_template_class("lcdm").build_spec(small_design.q_matrix())

        changes = apply_multiplicity(
            [make_index(0, (0, 1), 25.0, 1e-7)], 0.05, spec=spec
        ).suggested_changes

        assert changes[0].action == "review"
        assert "lambda_{1,1,(2)}" in changes[0].note
        assert "not tested" in changes[0].note

    def test_present_main_effect_not_flagged(self, small_design):
        """Test an interaction of two measured attributes can be added."""
        spec = get_template_class("mains").build_spec(small_design.q_matrix())
        index = ModificationIndex(
            Candidate("model", 3, "Item4", (0, 1), "greater_than_minus_k"), 25.0, 1e-7
        )

        changes = apply_multiplicity([index], 0.05, spec=spec).suggested_changes

        assert changes[0].action == "add"
        assert changes[0].note == ""
        assert changes[0].recommended_next

    def test_one_recommendation_when_all_review(self, small_design):
        """Test the strongest entry is recommended when none can be added."""
        spec = get_template_class("lcdm").build_spec(small_design.q_matrix())
        indices = [
            make_index(0, (1,), 1.0, 0.2),
            make_index(0, (0, 1), 30.0, 1e-8),
            make_index(1, (0, 1), 20.0, 1e-6),
        ]

        changes = apply_multiplicity(indices, 0.05, spec=spec).suggested_changes

        assert [change.action for change in changes] == ["review", "review"]
        assert [change.recommended_next for change in changes] == [True, False]

    def test_table(self):
        """Test header, stars, zero rows and unavailable rows."""
        indices = [
            make_index(0, (1,), 0.0, 1.0),
            make_index(1, (0,), 15.0, 5e-5),
            make_index(2, (0,), 3.0, 0.04),
            make_index(3, (0,), 0.0, 1.0, unavailable=True),
        ]

        table = format_table(apply_multiplicity(indices, 0.05))
        lines = table.splitlines()

        assert lines[0].startswith("alpha = 0.05, m = 3, adjusted alpha = 0.0166667")
        rows = {line.split()[0]: line for line in lines if line.startswith("Item")}
        assert " 0.00 " in rows["Item1"]
        assert rows["Item2"].endswith("**")
        assert rows["Item3"].endswith("*") and not rows["Item3"].endswith("**")
        assert "n/a" in rows["Item4"]
