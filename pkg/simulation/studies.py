"""Contains the Monte Carlo Type I error and power studies"""

import concurrent.futures as pool
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.effects import canonical_sort
from estimator.em import EMEstimator
from indices.candidates import enumerate_model_candidates, enumerate_qmatrix_candidates
from indices.compute import IndexCalculator
from model_templates.utils import get_template_class
from models import (
    Candidate,
    FitConfig,
    ItemParameterSet,
    ModelSpec,
    ParameterSet,
    ResponseMatrix,
    SimDesign,
    StructuralParameterSet,
    StudyResult,
    StudyRow,
)
from score.statistics import mixture_pvalue
from settings import SETTINGS_MANAGER
from simulation.generator import build_item_params, gen_attribute_matrix, gen_responses

logger = logging.getLogger(__name__)

FAMILYWISE = "familywise"

Outcome = Dict[str, Any]


def replication_generator(seed: int, cell_id: int, replication: int) -> np.random.Generator:
    """Own PCG64 stream of one replication of one cell"""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence([seed, cell_id, replication]))
    )


class Study:
    """Basic Monte Carlo study abstract class

    A study generates data from a generating model, fits an estimated model
    and records the modification indices of a few target candidates.
    Sample sizes form the cells; the cell id inside the seed is the sample
    size itself, so a cell's data never depends on which other cells run.
    """

    study_name = ""
    target_item = 0
    target_attribute: Optional[int] = None
    generating_template = "lcdm"

    def __init__(
        self,
        design: SimDesign,
        alphas: Optional[Sequence[float]] = None,
        sample_sizes: Optional[Sequence[int]] = None,
        threads: int = 1,
        config: Optional[FitConfig] = None,
    ) -> None:
        self.design = design
        self.alphas = tuple(
            alphas if alphas else SETTINGS_MANAGER.simulation.alphas[self.study_name]
        )
        self.sample_sizes = tuple(sample_sizes) if sample_sizes else (design.examinees,)
        self.threads = max(1, threads)
        self.config = config or FitConfig()

    @property
    def structural_order(self) -> int:
        """Estimated structural order, saturated by default"""
        if self.design.structural_order is None:
            return self.design.attributes
        return self.design.structural_order

    def generating_params(self) -> List[ItemParameterSet]:
        """Item parameters the data are drawn from"""
        q = self.design.q_matrix()
        pairs = [
            build_item_params(
                q.row(item),
                self.design.p_nonmaster,
                self.design.p_master,
                self.design.split_rule,
                q.item_ids[item],
            )
            for item in range(q.n_items)
        ]
        index = 1 if self.generating_template == "dina" else 0
        return [pair[index] for pair in pairs]

    def estimated_spec(self) -> ModelSpec:
        """Model fitted to every replication"""
        raise NotImplementedError

    def targets(self, spec: ModelSpec) -> List[Candidate]:
        """Candidates whose indices are recorded"""
        raise NotImplementedError

    def _target_filter(self, candidates: Sequence[Candidate]) -> List[Candidate]:
        return [
            candidate
            for candidate in candidates
            if candidate.item == self.target_item
            and (
                self.target_attribute is None or self.target_attribute in candidate.effect
            )
        ]

    def simulate_data(self, examinees: int, replication: int) -> ResponseMatrix:
        """Responses of one replication"""
        rng = replication_generator(self.design.seed, examinees, replication)
        bits = gen_attribute_matrix(
            examinees, self.design.attributes, self.design.tetrachoric_rho, rng
        )
        return gen_responses(bits, self.generating_params(), self.design.q_matrix(), rng)

    def replicate(self, examinees: int, replication: int) -> Outcome:
        """Runs one replication

        Args:
            examinees (int): sample size of the cell
            replication (int): replication number

        Returns:
            dict: converged flag and {label: (t_s, p_value)}
        """
        data = self.simulate_data(examinees, replication)
        spec = self.estimated_spec()
        fit = EMEstimator(spec, self.config).fit(data)
        if not fit.converged:
            return {"converged": False, "statistics": {}}

        calculator = IndexCalculator(fit, data)
        statistics = {}
        for candidate in self.targets(spec):
            index = calculator.compute(candidate)
            if index.unavailable:
                return {"converged": False, "statistics": {}}
            statistics[candidate.label] = (index.t_s, index.p_value)
        return {"converged": True, "statistics": statistics}

    def _run_cell(self, examinees: int) -> List[Outcome]:
        replications = self.design.replications
        if self.threads == 1:
            return [self.replicate(examinees, r) for r in range(replications)]

        outcomes: List[Optional[Outcome]] = [None] * replications
        with pool.ProcessPoolExecutor(max_workers=self.threads) as executor:
            futures: List[Any] = [
                executor.submit(self.replicate, examinees, r) for r in range(replications)
            ]
            positions = {future: r for r, future in enumerate(futures)}
            for future in pool.as_completed(futures):
                outcomes[positions[future]] = future.result()
        return [outcome for outcome in outcomes if outcome is not None]

    def _rows(self, examinees: int, outcomes: List[Outcome]) -> Tuple[List[StudyRow], Dict]:
        retained = [outcome["statistics"] for outcome in outcomes if outcome["converged"]]
        excluded = len(outcomes) - len(retained)
        labels = list(retained[0]) if retained else [
            candidate.label for candidate in self.targets(self.estimated_spec())
        ]

        rows: List[StudyRow] = []
        for alpha in self.alphas:
            for label in labels:
                rejections = sum(1 for stats in retained if stats[label][1] < alpha)
                rows.append(
                    StudyRow(
                        self.study_name,
                        self.design.effect_size,
                        label,
                        examinees,
                        alpha,
                        rejections,
                        len(retained),
                        excluded,
                    )
                )
            familywise = sum(
                1 for stats in retained if any(stats[label][1] < alpha for label in labels)
            )
            rows.append(
                StudyRow(
                    self.study_name,
                    self.design.effect_size,
                    FAMILYWISE,
                    examinees,
                    alpha,
                    familywise,
                    len(retained),
                    excluded,
                )
            )

        zero_fraction = {
            f"{label}@{examinees}": (
                sum(1 for stats in retained if stats[label][0] == 0.0) / len(retained)
                if retained
                else float("nan")
            )
            for label in labels
        }
        return rows, zero_fraction

    def run(self) -> StudyResult:
        """Runs every cell

        Returns:
            StudyResult
        """
        rows: List[StudyRow] = []
        zero_fraction: Dict[str, float] = {}
        flagged = False
        limit = SETTINGS_MANAGER.simulation.exclusion_flag_fraction
        for examinees in self.sample_sizes:
            logger.info(
                "%s: %s effect, E=%d, %d replications",
                self.study_name,
                self.design.effect_size,
                examinees,
                self.design.replications,
            )
            outcomes = self._run_cell(examinees)
            cell_rows, cell_zero = self._rows(examinees, outcomes)
            rows.extend(cell_rows)
            zero_fraction.update(cell_zero)
            excluded = cell_rows[0].excluded if cell_rows else 0
            if excluded > limit * len(outcomes):
                flagged = True
                logger.warning(
                    "%s at E=%d excluded %d of %d replications",
                    self.study_name,
                    examinees,
                    excluded,
                    len(outcomes),
                )
        return StudyResult(
            self.study_name,
            tuple(rows),
            self.design.replications,
            self.design.seed,
            flagged,
            zero_fraction,
        )


class Type1QStudy(Study):
    """Item 1 measures attribute 1 only; tests adding attribute 2"""

    study_name = "type1-q"
    target_item = 0
    target_attribute = 1

    def estimated_spec(self) -> ModelSpec:
        return get_template_class("lcdm").build_spec(
            self.design.q_matrix(), self.structural_order
        )

    def targets(self, spec: ModelSpec) -> List[Candidate]:
        return self._target_filter(enumerate_qmatrix_candidates(spec, 2))


class PowerQStudy(Study):
    """Item 4 measures attributes 1 and 2 but is specified with attribute 1 only"""

    study_name = "power-q"
    target_item = 3
    target_attribute = 1

    def estimated_spec(self) -> ModelSpec:
        q = self.design.q_matrix().with_entry(self.target_item, self.target_attribute, 0)
        return get_template_class("lcdm").build_spec(q, self.structural_order)

    def targets(self, spec: ModelSpec) -> List[Candidate]:
        return self._target_filter(enumerate_qmatrix_candidates(spec, 2))


class Type1DinaStudy(Study):
    """DINA generates and is fitted; tests the main effects of item 4"""

    study_name = "type1-dina"
    target_item = 3
    generating_template = "dina"

    def estimated_spec(self) -> ModelSpec:
        return get_template_class("dina").build_spec(
            self.design.q_matrix(), self.structural_order
        )

    def targets(self, spec: ModelSpec) -> List[Candidate]:
        return self._target_filter(enumerate_model_candidates(spec, 1))


class PowerDinaStudy(Study):
    """Full LCDM generates; item 4 alone is fitted as DINA"""

    study_name = "power-dina"
    target_item = 3

    def estimated_spec(self) -> ModelSpec:
        full = get_template_class("lcdm").build_spec(
            self.design.q_matrix(), self.structural_order
        )
        masks = list(full.masks)
        masks[self.target_item] = (full.q.measured(self.target_item),)
        return full.with_masks(tuple(masks), "custom")

    def targets(self, spec: ModelSpec) -> List[Candidate]:
        return self._target_filter(enumerate_model_candidates(spec, 1))


def run_type1_q_study(
    design: SimDesign, alphas: Optional[Sequence[float]] = None, threads: int = 1
) -> StudyResult:
    """Type I error of the Q-matrix indices of item 1"""
    return Type1QStudy(design, alphas, threads=threads).run()


def run_power_q_study(
    design: SimDesign,
    alphas: Optional[Sequence[float]] = None,
    sample_sizes: Optional[Sequence[int]] = None,
    threads: int = 1,
) -> StudyResult:
    """Power of the Q-matrix indices for the omitted entry of item 4"""
    return PowerQStudy(design, alphas, sample_sizes, threads).run()


def run_type1_dina_study(
    design: SimDesign, alphas: Optional[Sequence[float]] = None, threads: int = 1
) -> StudyResult:
    """Type I error of the DINA main-effect indices of item 4"""
    return Type1DinaStudy(design, alphas, threads=threads).run()


def run_power_dina_study(
    design: SimDesign,
    alphas: Optional[Sequence[float]] = None,
    sample_sizes: Optional[Sequence[int]] = None,
    threads: int = 1,
) -> StudyResult:
    """Power of the DINA main-effect indices when item 4 is a full LCDM item"""
    return PowerDinaStudy(design, alphas, sample_sizes, threads).run()


def free_candidate(
    spec: ModelSpec, params: ParameterSet, candidate: Candidate
) -> Tuple[ModelSpec, ParameterSet]:
    """Adds a candidate to the model, starting it at zero

    The augmented spec no longer matches a built-in template and is marked
    custom.

    Args:
        spec (ModelSpec): reduced model
        params (ParameterSet): reduced estimates
        candidate (Candidate): parameter to free

    Returns:
        tuple[ModelSpec, ParameterSet]: augmented model and starting values
    """
    q = spec.q
    for attribute in candidate.effect:
        if q.entries[candidate.item, attribute] == 0:
            q = q.with_entry(candidate.item, attribute, 1)

    masks = list(spec.masks)
    masks[candidate.item] = tuple(canonical_sort(masks[candidate.item] + (candidate.effect,)))
    augmented = ModelSpec(q, tuple(masks), "custom", spec.structural_order)

    items: List[ItemParameterSet] = []
    for item, current in enumerate(params.items):
        mask = augmented.masks[item]
        values = [current.value(subset) for subset in mask]
        items.append(
            ItemParameterSet.create(
                q.row(item), mask, current.intercept, values, q.item_ids[item]
            )
        )
    structural = StructuralParameterSet(
        params.structural.attribute_count, params.structural.order, dict(params.structural.gammas)
    )
    return augmented, ParameterSet(tuple(items), structural)


def _agreement_replication(study: Study, examinees: int, replication: int, alpha: float):
    data = study.simulate_data(examinees, replication)
    spec = study.estimated_spec()
    reduced = EMEstimator(spec, study.config).fit(data)
    if not reduced.converged:
        return None
    candidate = study.targets(spec)[0]
    index = IndexCalculator(reduced, data).compute(candidate)
    if index.unavailable:
        return None

    augmented, start = free_candidate(spec, reduced.params, candidate)
    full = EMEstimator(augmented, study.config).fit(data, start)
    if not full.converged:
        return None
    estimate = full.params.items[candidate.item].value(candidate.effect)
    statistic = max(0.0, 2.0 * (full.loglik - reduced.loglik)) if estimate > -candidate.k else 0.0

    return index.p_value < alpha, mixture_pvalue(statistic) < alpha


def run_score_lr_agreement(study: Study, alpha: float = 0.05) -> StudyRow:
    """Fraction of replications where score and LR tests decide alike

    The first target candidate is tested by its one-sided index and by
    freeing it, refitting and comparing log-likelihoods.

    Args:
        study (Study): study supplying the design and targets
        alpha (float, optional): significance level

    Returns:
        StudyRow: rejections counts agreements, parameter names the candidate
    """
    examinees = study.sample_sizes[0]
    decisions = [
        _agreement_replication(study, examinees, replication, alpha)
        for replication in range(study.design.replications)
    ]
    retained = [decision for decision in decisions if decision is not None]
    label = study.targets(study.estimated_spec())[0].label
    agreements = sum(1 for score, lr in retained if score == lr)
    logger.info("%s score/LR agreement: %d of %d", study.study_name, agreements, len(retained))
    return StudyRow(
        f"{study.study_name}-agreement",
        study.design.effect_size,
        label,
        examinees,
        alpha,
        agreements,
        len(retained),
        len(decisions) - len(retained),
    )
