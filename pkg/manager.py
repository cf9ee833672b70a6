"""Contains Manager for running the analysis subcommands"""

import logging
import os
from dataclasses import replace
from functools import wraps
from typing import Any, Callable, Dict

from custom_exceptions import UsageException
from estimator.em import fit as fit_model
from indices.candidates import enumerate_candidates
from indices.compute import compute_mis
from indices.report import apply_multiplicity, format_table
from model_templates.custom import CUSTOM_TEMPLATE
from model_templates.utils import get_template_class
from models import FitConfig, FitResult, ModelSpec, QMatrix, RunConfig, SimDesign
from settings import SETTINGS_MANAGER
from simulation.utils import POWER_STUDIES, get_study_class
from utils.basic import config_hash, map_exception, map_exit_code
from utils.files import (
    read_fit,
    read_json,
    read_qmatrix,
    read_responses,
    write_classification,
    write_fit,
    write_json,
    write_manifest,
    write_study,
    write_text,
)

logger = logging.getLogger(__name__)


def _soft_run(func: Callable[..., Any]) -> Callable[..., int]:
    @wraps(func)
    def inner(self, config: RunConfig) -> int:
        try:
            func(self, config)
        except BaseException as manager_exc:  # pylint: disable=W0718
            if isinstance(manager_exc, (KeyboardInterrupt, SystemExit)):
                raise
            exit_code = map_exception(manager_exc)
            logger.error("%s failed (%s): %s", config.subcommand, exit_code, manager_exc)
            logger.debug("traceback", exc_info=True)
            return map_exit_code(exit_code)
        return map_exit_code("OK")

    return inner


def derived_path(out: str, suffix: str) -> str:
    """Sibling path of an output with another extension, e.g. mi.json -> mi.txt"""
    return os.path.splitext(out)[0] + suffix


class Manager:
    """Manages the fit, mi, classify and simulate subcommands"""

    def _build_spec(self, config: RunConfig, q: QMatrix) -> ModelSpec:
        if config.model == "custom":
            if config.mask is None:
                raise UsageException("--mask is required with --model custom", flag="--mask")
            return CUSTOM_TEMPLATE.build_spec(q, config.structural_order, read_json(config.mask))
        return get_template_class(config.model).build_spec(q, config.structural_order)

    def _fit_config(self, config: RunConfig) -> FitConfig:
        fit_config = FitConfig()
        if config.restarts is not None:
            fit_config.restarts = config.restarts
        if config.seed is not None:
            fit_config.seed = config.seed
        return fit_config

    @_soft_run
    def _handle_fit(self, config: RunConfig):
        q = read_qmatrix(config.qmatrix)
        data = read_responses(config.responses, q)
        spec = self._build_spec(config, q)
        result: FitResult = fit_model(spec, data, self._fit_config(config))
        result = replace(result, config_hash=config_hash(config.semantic_dict()))
        write_fit(config.out, result)
        logger.info("fit written to %s", config.out)

    @_soft_run
    def _handle_mi(self, config: RunConfig):
        data = read_responses(config.responses)
        result = read_fit(config.fit_path, data)
        max_order = config.max_order or SETTINGS_MANAGER.mod_indices.max_order
        alpha = config.alpha if config.alpha is not None else SETTINGS_MANAGER.mod_indices.alpha

        candidates = enumerate_candidates(result.spec, config.candidates, max_order, result.params)
        indices = compute_mis(result, candidates, data, config.threads)
        report = apply_multiplicity(indices, alpha, config.m_override, result.spec)
        for warning in report.warnings:
            logger.warning(warning)

        payload = report.to_dict()
        payload["config_hash"] = config_hash(config.semantic_dict())
        write_json(config.out, payload)
        table_path = config.table or derived_path(config.out, ".txt")
        write_text(table_path, format_table(report))
        logger.info("indices written to %s and %s", config.out, table_path)

    @_soft_run
    def _handle_classify(self, config: RunConfig):
        data = read_responses(config.responses)
        result = read_fit(config.fit_path, data)
        write_classification(config.out, result, data, config_hash(config.semantic_dict()))
        logger.info("classification written to %s", config.out)

    @_soft_run
    def _handle_simulate(self, config: RunConfig):
        design = SimDesign.from_settings(
            config.effect,
            examinees=config.examinees,
            replications=config.reps,
            seed=config.seed,
            split_rule=config.split_rule,
            structural_order=config.structural_order,
        )
        if config.examinees is not None:
            sample_sizes = (config.examinees,)
        elif config.study in POWER_STUDIES:
            sample_sizes = tuple(SETTINGS_MANAGER.simulation.sample_sizes)
        else:
            sample_sizes = (design.examinees,)

        study = get_study_class(config.study)(
            design, config.alphas, sample_sizes, config.threads
        )
        result = study.run()
        digest = config_hash(config.semantic_dict())
        write_study(config.out, result, digest)
        write_manifest(
            derived_path(config.out, ".manifest.json"),
            config.study,
            design,
            sample_sizes,
            study.alphas,
            digest,
        )
        if result.flagged:
            logger.warning("%s: more than the allowed share of replications excluded", config.study)
        logger.info("study written to %s", config.out)

    def __init__(self) -> None:
        self._subcommand_handler: Dict[str, Callable[[RunConfig], int]] = {
            "fit": self._handle_fit,
            "mi": self._handle_mi,
            "classify": self._handle_classify,
            "simulate": self._handle_simulate,
        }

    def run(self, config: RunConfig) -> int:
        """Runs a validated configuration

        Args:
            config (RunConfig): parsed command line

        Returns:
            int: process exit code
        """
        logger.info("running %s", config.subcommand)
        return self._subcommand_handler[config.subcommand](config)


MANAGER = Manager()
