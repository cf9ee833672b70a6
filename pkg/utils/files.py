"""Contains readers and writers of the CSV and JSON artifacts"""

import json
import logging
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from core.profiles import profile_matrix
from custom_exceptions import ConfigurationException, FileFormatException
from date import DATE_TIME_INFO
from estimator.inference import classify_indices, marginal_mastery
from estimator.likelihood import ModelEvaluator
from models import (
    FitResult,
    ModelSpec,
    ParameterSet,
    QMatrix,
    ResponseMatrix,
    SimDesign,
    StudyResult,
)
from settings import SETTINGS_MANAGER
from utils.soft_mkdir import soft_mkdir_for

logger = logging.getLogger(__name__)

EXAMINEE_COLUMN = "examinee_id"

STUDY_COLUMNS = [
    "study",
    "effect_size",
    "parameter",
    "examinees",
    "alpha",
    "rejections",
    "replications",
    "rate",
    "mc_se",
    "excluded",
]


def _read_table(path: str) -> pd.DataFrame:
    try:
        frame = pd.read_csv(
            path, header=None, dtype=str, keep_default_na=False, comment="#"
        )
    except pd.errors.EmptyDataError as exc:
        raise FileFormatException(f"{path}: file is empty", path=path) from exc
    except pd.errors.ParserError as exc:
        raise FileFormatException(f"{path}: {exc}", path=path) from exc
    return frame.apply(lambda column: column.str.strip())


def _binary_cells(frame: pd.DataFrame, row_ids, column_ids, path: str) -> np.ndarray:
    valid = frame.isin(["0", "1"]).to_numpy()
    if not valid.all():
        row, column = (int(value) for value in np.argwhere(~valid)[0])
        cell = frame.iat[row, column]
        reason = "missing value" if cell == "" else f"value '{cell}'"
        raise FileFormatException(
            f"{path}: {reason} at row '{row_ids[row]}', column '{column_ids[column]}'; "
            "only 0 and 1 are allowed",
            path=path,
        )
    return (frame.to_numpy() == "1").astype(np.int64)


def read_qmatrix(path: str) -> QMatrix:
    """Reads a Q-matrix CSV

    The first row holds a corner cell then the attribute ids, the first
    column the item ids.

    Args:
        path (str): CSV path

    Returns:
        QMatrix
    """
    frame = _read_table(path)
    if frame.shape[0] < 2 or frame.shape[1] < 2:
        raise FileFormatException(f"{path}: Q-matrix needs a header row and an id column", path=path)
    attribute_ids = tuple(frame.iloc[0, 1:])
    item_ids = tuple(frame.iloc[1:, 0])
    entries = _binary_cells(frame.iloc[1:, 1:], item_ids, attribute_ids, path)
    try:
        return QMatrix(entries, item_ids, attribute_ids)
    except ConfigurationException as exc:
        raise FileFormatException(f"{path}: {exc}", path=path) from exc


def read_responses(path: str, q: Optional[QMatrix] = None) -> ResponseMatrix:
    """Reads a response CSV

    The header holds the item ids, optionally after an examinee_id column.
    Missing cells are rejected.

    Args:
        path (str): CSV path
        q (QMatrix, optional): Q-matrix the items must match

    Returns:
        ResponseMatrix
    """
    frame = _read_table(path)
    if frame.shape[0] < 2:
        raise FileFormatException(f"{path}: no examinee rows", path=path)
    header = list(frame.iloc[0])
    body = frame.iloc[1:]
    if header[0] == EXAMINEE_COLUMN:
        examinee_ids = tuple(body.iloc[:, 0])
        header = header[1:]
        body = body.iloc[:, 1:]
    else:
        examinee_ids = tuple(f"E{index + 1}" for index in range(body.shape[0]))
    if len(set(header)) != len(header):
        raise FileFormatException(f"{path}: duplicate item ids in the header", path=path)

    values = _binary_cells(body, examinee_ids, header, path)
    responses = ResponseMatrix(values, examinee_ids, tuple(header))
    if q is not None:
        try:
            responses.check_against(q)
        except ConfigurationException as exc:
            raise FileFormatException(f"{path}: {exc}", path=path) from exc
    return responses


def _with_hash_line(path: str, frame: pd.DataFrame, config_hash: Optional[str]) -> None:
    soft_mkdir_for(path)
    with open(path, "w", encoding="utf8", newline="") as csv_file:
        if config_hash is not None:
            csv_file.write(f"# config_hash={config_hash}\n")
        frame.to_csv(csv_file, index=False, lineterminator="\n", float_format="%.10g")


def write_classification(
    path: str, fit: FitResult, data: ResponseMatrix, config_hash: Optional[str] = None
) -> None:
    """Writes posterior-mode profiles, mastery and class probabilities per examinee

    Args:
        path (str): CSV path
        fit (FitResult): fit whose posteriors belong to data
        data (ResponseMatrix): responses, provides examinee ids
        config_hash (str, optional): provenance hash
    """
    attribute_ids = fit.spec.q.attribute_ids
    classes = classify_indices(fit.posteriors)
    bits = profile_matrix(fit.spec.n_attributes)[classes]
    mastery = marginal_mastery(fit)

    columns: Dict[str, Any] = {
        EXAMINEE_COLUMN: list(data.examinee_ids),
        "class_index": classes,
    }
    for position, attribute_id in enumerate(attribute_ids):
        columns[attribute_id] = bits[:, position]
    for position, attribute_id in enumerate(attribute_ids):
        columns[f"p_{attribute_id}"] = mastery[:, position]
    for class_index in range(fit.spec.n_classes):
        columns[f"posterior_{class_index}"] = fit.posteriors[:, class_index]
    _with_hash_line(path, pd.DataFrame(columns), config_hash)


def write_study(path: str, result: StudyResult, config_hash: Optional[str] = None) -> None:
    """Writes the study CSV, one row per cell"""
    frame = pd.DataFrame(
        [{key: row.to_dict()[key] for key in STUDY_COLUMNS} for row in result.rows],
        columns=STUDY_COLUMNS,
    )
    _with_hash_line(path, frame, config_hash)


def write_json(path: str, payload: Dict[str, Any]) -> None:
    """Writes a JSON artifact"""
    soft_mkdir_for(path)
    with open(path, "w", encoding="utf8") as json_file:
        json.dump(payload, json_file, indent=2)
        json_file.write("\n")


def read_json(path: str) -> Dict[str, Any]:
    """Reads a JSON artifact"""
    try:
        with open(path, encoding="utf8") as json_file:
            return json.load(json_file)
    except json.JSONDecodeError as exc:
        raise FileFormatException(f"{path}: invalid JSON ({exc})", path=path) from exc


def write_text(path: str, text: str) -> None:
    """Writes a plain-text artifact"""
    soft_mkdir_for(path)
    with open(path, "w", encoding="utf8") as text_file:
        text_file.write(text)


def write_fit(path: str, fit: FitResult) -> None:
    """Writes fit.json; posteriors are not stored and read_fit recomputes them"""
    write_json(path, fit.to_dict())


def fit_from_dict(fit_dict: Dict[str, Any], data: ResponseMatrix) -> FitResult:
    """Rebuilds a fit and rescores the responses

    Args:
        fit_dict (dict): document written by write_fit
        data (ResponseMatrix): responses to compute posteriors for

    Returns:
        FitResult: with the stored convergence record and fresh posteriors
    """
    try:
        spec = ModelSpec.from_dict(fit_dict["spec"])
        params = ParameterSet.from_dict(spec, fit_dict["parameters"])
        convergence = fit_dict["convergence"]
    except (KeyError, TypeError, ValueError, ConfigurationException) as exc:
        raise FileFormatException(f"Malformed fit document: {exc}") from exc

    try:
        data.check_against(spec.q)
    except ConfigurationException as exc:
        raise FileFormatException(f"Responses do not match the fit: {exc}") from exc
    posteriors, loglik = ModelEvaluator(spec).e_step(params, data)
    return FitResult(
        spec=spec,
        params=params,
        loglik=loglik,
        loglik_trace=tuple(convergence.get("loglik_trace", ())),
        posteriors=posteriors,
        converged=bool(convergence.get("converged", False)),
        iterations=int(convergence.get("iterations", 0)),
        warnings=tuple(fit_dict.get("warnings", ())),
        config_hash=fit_dict.get("config_hash"),
    )


def read_fit(path: str, data: ResponseMatrix) -> FitResult:
    """Loads fit.json and rescores data"""
    return fit_from_dict(read_json(path), data)


def write_manifest(
    path: str,
    study: str,
    design: SimDesign,
    sample_sizes,
    alphas,
    config_hash: Optional[str] = None,
) -> None:
    """Writes the simulation run manifest"""
    write_json(
        path,
        {
            "study": study,
            "design": design.to_dict(),
            "sample_sizes": list(sample_sizes),
            "alphas": list(alphas),
            "seeds": {
                "seed": design.seed,
                "stream": "PCG64(SeedSequence([seed, examinees, replication]))",
            },
            "version": SETTINGS_MANAGER.version,
            "timestamp": DATE_TIME_INFO.get_manifest_timestamp(),
            "config_hash": config_hash,
        },
    )
