"""Contains custom mask template class"""

from typing import List, Mapping, Optional, Sequence, Tuple

from core.effects import Subset, canonical_sort, parse_effect_label
from custom_exceptions import ConfigurationException
from model_templates.basic import ModelTemplate
from models import ModelSpec, QMatrix


class CustomTemplate(ModelTemplate):
    """Per-item masks given as effect labels, e.g. {"Item1": ["1", "1x2"]}"""

    spec_name = "custom"

    def get_item_mask(self, q_row: Sequence[int]):
        raise ConfigurationException("Custom masks are only built through build_spec")

    def build_spec(  # pylint:disable=W0221:arguments-differ
        self,
        q: QMatrix,
        structural_order: Optional[int] = None,
        labels: Optional[Mapping[str, List[str]]] = None,
    ) -> ModelSpec:
        """Builds a ModelSpec from per-item effect labels

        Args:
            q (QMatrix): Q-matrix
            structural_order (int, optional): log-linear order, saturated when None
            labels (Mapping[str, list[str]]): item id -> active effect labels

        Returns:
            ModelSpec
        """
        if labels is None:
            raise ConfigurationException("A custom model needs a mask mapping")
        unknown = sorted(set(labels) - set(q.item_ids))
        if unknown:
            raise ConfigurationException(f"Mask names unknown items: {unknown}")

        masks: List[Tuple[Subset, ...]] = []
        for item_id in q.item_ids:
            if item_id not in labels:
                raise ConfigurationException(f"Mask has no entry for item '{item_id}'")
            subsets = [parse_effect_label(label) for label in labels[item_id]]
            masks.append(tuple(canonical_sort(s for s in subsets if len(s) > 0)))

        order = q.n_attributes if structural_order is None else structural_order
        return ModelSpec(q, tuple(masks), self.spec_name, order)


CUSTOM_TEMPLATE = CustomTemplate()
