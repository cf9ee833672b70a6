"""Contains enumeration of modification-index candidates"""

from itertools import combinations
from typing import List, Literal, Optional, Tuple

from core.effects import Subset, canonical_subsets, effect_label
from custom_exceptions import ContractViolationException
from models import Candidate, ModelSpec, ParameterSet

CandidateKind = Literal["qmatrix", "model", "both"]


def _main_effect_k(
    item: int, effect: Subset, spec: ModelSpec, params: Optional[ParameterSet]
) -> Tuple[float, Tuple[Tuple[str, float], ...]]:
    """k = smallest fitted main effect of the attributes in an interaction

    A main effect missing from the reduced model, or a negative estimate,
    collapses k to 0.
    """
    mask = set(spec.masks[item])
    source: List[Tuple[str, float]] = []
    for attribute in effect:
        main = (attribute,)
        if main not in mask or params is None:
            source.append((effect_label(main), 0.0))
        else:
            source.append((effect_label(main), params.items[item].value(main)))
    k = max(0.0, min(value for _, value in source))
    return k, tuple(source)


def _candidate(
    kind: str,
    item: int,
    effect: Subset,
    spec: ModelSpec,
    params: Optional[ParameterSet],
) -> Candidate:
    item_id = spec.q.item_ids[item]
    if len(effect) == 1:
        return Candidate(kind, item, item_id, effect, "positive")
    k, source = _main_effect_k(item, effect, spec, params)
    return Candidate(kind, item, item_id, effect, "greater_than_minus_k", k, source)


def _check_order(max_order: int) -> None:
    if max_order < 1:
        raise ContractViolationException(f"max_order must be at least 1, got {max_order}")


def enumerate_qmatrix_candidates(
    spec: ModelSpec, max_order: int, params: Optional[ParameterSet] = None
) -> List[Candidate]:
    """Candidates adding an unmeasured attribute to an item

    For every zero q_ia: the main effect of a, then its interactions with
    subsets of the measured attributes, up to max_order attributes in all.

    Args:
        spec (ModelSpec): reduced model
        max_order (int): largest effect level
        params (ParameterSet, optional): fitted parameters, used for k

    Returns:
        list[Candidate]: in item, attribute, level order
    """
    _check_order(max_order)
    candidates: List[Candidate] = []
    for item in range(spec.n_items):
        measured = spec.q.measured(item)
        for attribute in range(spec.n_attributes):
            if attribute in measured:
                continue
            for size in range(0, min(max_order - 1, len(measured)) + 1):
                for partners in combinations(measured, size):
                    effect = tuple(sorted(partners + (attribute,)))
                    candidates.append(_candidate("qmatrix", item, effect, spec, params))
    return candidates


def enumerate_model_candidates(
    spec: ModelSpec, max_order: int, params: Optional[ParameterSet] = None
) -> List[Candidate]:
    """Candidates freeing masked-out effects of measured attributes

    Full LCDM items have nothing masked out and yield no candidates.

    Args:
        spec (ModelSpec): reduced model
        max_order (int): largest effect level
        params (ParameterSet, optional): fitted parameters, used for k

    Returns:
        list[Candidate]: in item then canonical effect order
    """
    _check_order(max_order)
    candidates: List[Candidate] = []
    for item, mask in enumerate(spec.masks):
        active = set(mask)
        for effect in canonical_subsets(spec.q.measured(item), max_order):
            if effect not in active:
                candidates.append(_candidate("model", item, effect, spec, params))
    return candidates


def enumerate_candidates(
    spec: ModelSpec,
    kind: CandidateKind,
    max_order: int,
    params: Optional[ParameterSet] = None,
) -> List[Candidate]:
    """Candidates of the requested kind, Q-matrix ones first for "both"

    Args:
        spec (ModelSpec): reduced model
        kind (CandidateKind): qmatrix, model or both
        max_order (int): largest effect level
        params (ParameterSet, optional): fitted parameters

    Returns:
        list[Candidate]
    """
    if kind not in ("qmatrix", "model", "both"):
        raise ContractViolationException(f"Unknown candidate kind '{kind}'")
    candidates: List[Candidate] = []
    if kind in ("qmatrix", "both"):
        candidates.extend(enumerate_qmatrix_candidates(spec, max_order, params))
    if kind in ("model", "both"):
        candidates.extend(enumerate_model_candidates(spec, max_order, params))
    return candidates
