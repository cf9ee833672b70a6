"""Contains Basic Model Template class"""

from typing import Optional, Sequence, Tuple

from core.effects import Subset
from models import ModelSpec, QMatrix


class ModelTemplate:
    """Basic model template abstract class"""

    spec_name = ""

    def get_item_mask(self, q_row: Sequence[int]) -> Tuple[Subset, ...]:
        """Returns the active effects of an item

        Args:
            q_row (Sequence[int]): Q-row of the item

        Returns:
            tuple[Subset, ...]: nonempty attribute subsets in canonical order
        """

        raise NotImplementedError

    def build_spec(
        self, q: QMatrix, structural_order: Optional[int] = None
    ) -> ModelSpec:
        """Builds a ModelSpec applying the template to every item

        Args:
            q (QMatrix): Q-matrix
            structural_order (int, optional): log-linear order, saturated when None

        Returns:
            ModelSpec
        """
        masks = tuple(self.get_item_mask(q.row(item)) for item in range(q.n_items))
        order = q.n_attributes if structural_order is None else structural_order
        return ModelSpec(q, masks, self.spec_name, order)
