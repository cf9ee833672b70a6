"""Contains multiplicity control, suggested changes and the text table"""

import logging
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple

from core.effects import Subset, canonical_subsets, parameter_label
from custom_exceptions import ContractViolationException
from models import MIReport, ModelSpec, ModificationIndex, SuggestedChange
from score.statistics import mixture_critical_value

logger = logging.getLogger(__name__)

RAW_STARS = "*"
ADJUSTED_STARS = "**"


def _q_flip(index: ModificationIndex, spec: Optional[ModelSpec]) -> Optional[str]:
    candidate = index.candidate
    if candidate.kind != "qmatrix" or spec is None:
        return None
    measured = set(spec.q.measured(candidate.item))
    new = [attribute for attribute in candidate.effect if attribute not in measured]
    names = [spec.q.attribute_ids[attribute] for attribute in new]
    return ", ".join(f"q[{candidate.item_id},{name}] 0->1" for name in names)


def _suggest(
    indices: Sequence[ModificationIndex], spec: Optional[ModelSpec]
) -> Tuple[SuggestedChange, ...]:
    """Ranks significant candidates and picks the one to add next

    Lower-order effects of an interaction that are neither in the reduced
    model nor significant turn it into "review". An interaction still
    waiting on a significant lower-order candidate keeps "add" but is not
    recommended before it.
    """
    significant: Dict[Tuple[int, Subset], ModificationIndex] = {
        (index.candidate.item, index.candidate.effect): index
        for index in indices
        if index.significant_adjusted
    }
    tested = {
        (index.candidate.item, index.candidate.effect)
        for index in indices
        if not index.unavailable
    }

    def in_model(item: int, subset: Subset) -> bool:
        return spec is not None and subset in spec.masks[item]

    changes: List[SuggestedChange] = []
    blocked: List[bool] = []
    for index in sorted(significant.values(), key=lambda value: -value.t_s):
        candidate = index.candidate
        item = candidate.item
        lower = canonical_subsets(candidate.effect, candidate.level - 1)
        pending = [subset for subset in lower if (item, subset) in significant]
        absent = [
            subset
            for subset in lower
            if not in_model(item, subset) and (item, subset) not in significant
        ]
        rejected = [subset for subset in absent if (item, subset) in tested]
        untested = [] if spec is None else [s for s in absent if (item, s) not in tested]

        action, notes = "add", []
        if rejected:
            action = "review"
            notes.append(f"lower-order effects {_labels(item, rejected)} not significant")
        if untested:
            action = "review"
            notes.append(f"lower-order effects {_labels(item, untested)} absent and not tested")
        if pending and action == "add":
            notes.append(f"add {_labels(item, pending)} first")
        changes.append(
            SuggestedChange(
                item_id=candidate.item_id,
                parameter=candidate.label,
                action=action,
                t_s=index.t_s,
                q_flip=_q_flip(index, spec),
                note="; ".join(notes),
            )
        )
        blocked.append(action != "add" or bool(pending))

    if changes:
        position = blocked.index(False) if False in blocked else 0
        changes[position] = replace(changes[position], recommended_next=True)
    return tuple(changes)


def _labels(item: int, subsets: Sequence[Subset]) -> str:
    return ", ".join(parameter_label(item + 1, subset) for subset in subsets)


def apply_multiplicity(
    indices: Sequence[ModificationIndex],
    alpha: float,
    m_override: Optional[int] = None,
    spec: Optional[ModelSpec] = None,
) -> MIReport:
    """Flags indices at alpha and at the Bonferroni level alpha / m

    Args:
        indices (Sequence[ModificationIndex]): computed indices
        alpha (float): familywise significance level
        m_override (int, optional): number of tests, available count when None
        spec (ModelSpec, optional): reduced model, names attributes in Q flips

    Returns:
        MIReport
    """
    if not 0 < alpha < 0.5:
        raise ContractViolationException(f"alpha must lie in (0, 0.5), got {alpha}")
    if m_override is not None and m_override < 1:
        raise ContractViolationException(f"m override must be positive, got {m_override}")

    available = sum(1 for index in indices if not index.unavailable)
    m = available if m_override is None else m_override
    if m == 0:
        return MIReport(
            tuple(indices),
            0,
            alpha,
            alpha,
            mixture_critical_value(alpha),
            warnings=("no modification index could be computed",) if indices else (),
        )

    adjusted_alpha = alpha / m
    flagged = tuple(
        index
        if index.unavailable
        else replace(
            index,
            significant_raw=index.p_value < alpha,
            significant_adjusted=index.p_value < adjusted_alpha,
        )
        for index in indices
    )
    report = MIReport(
        indices=flagged,
        m=m,
        alpha=alpha,
        adjusted_alpha=adjusted_alpha,
        critical_value=mixture_critical_value(adjusted_alpha),
        suggested_changes=_suggest(flagged, spec),
        warnings=tuple(
            f"{index.candidate.label}: {index.reason}" for index in flagged if index.unavailable
        ),
    )
    logger.info(
        "%d indices, m=%d, %d significant after adjustment",
        len(flagged),
        m,
        sum(1 for index in flagged if index.significant_adjusted),
    )
    return report


def _stars(index: ModificationIndex) -> str:
    if index.significant_adjusted:
        return ADJUSTED_STARS
    if index.significant_raw:
        return RAW_STARS
    return ""


def format_table(report: MIReport) -> str:
    """Renders the report as an aligned plain-text table

    Args:
        report (MIReport): report to render

    Returns:
        str: header, column titles and one row per index
    """
    lines = [
        f"alpha = {report.alpha:g}, m = {report.m}, "
        f"adjusted alpha = {report.adjusted_alpha:.6g}, "
        f"critical value = {report.critical_value:.2f}",
        f"{RAW_STARS} p < alpha, {ADJUSTED_STARS} p < adjusted alpha",
        "",
    ]
    rows = [("Item", "Kind", "Parameter", "MI", "p-value", "")]
    for index in report.indices:
        if index.unavailable:
            rows.append(
                (index.candidate.item_id, index.candidate.kind, index.candidate.label, "n/a", "n/a", "")
            )
        else:
            rows.append(
                (
                    index.candidate.item_id,
                    index.candidate.kind,
                    index.candidate.label,
                    f"{index.t_s:.2f}",
                    f"{index.p_value:.4g}",
                    _stars(index),
                )
            )

    widths = [max(len(row[column]) for row in rows) for column in range(len(rows[0]))]
    for row in rows:
        cells = [
            cell.ljust(width) if column < 3 else cell.rjust(width)
            for column, (cell, width) in enumerate(zip(row[:-1], widths[:-1]))
        ]
        lines.append(("  ".join(cells) + " " + row[-1]).rstrip())

    if report.suggested_changes:
        lines.append("")
        lines.append("Suggested changes:")
        for change in report.suggested_changes:
            marker = " (recommended next)" if change.recommended_next else ""
            flip = f", {change.q_flip}" if change.q_flip else ""
            note = f" [{change.note}]" if change.note else ""
            lines.append(
                f"  {change.action} {change.parameter} (MI {change.t_s:.2f}{flip}){marker}{note}"
            )
    for warning in report.warnings:
        lines.append(f"warning: {warning}")
    return "\n".join(lines) + "\n"
