"""Contains full LCDM template class"""

from typing import Sequence

from core.effects import canonical_subsets, measured_attributes
from model_templates.basic import ModelTemplate


class LcdmFullTemplate(ModelTemplate):
    """Every main effect and interaction of the measured attributes"""

    spec_name = "lcdm_full"

    def get_item_mask(self, q_row: Sequence[int]):
        return tuple(canonical_subsets(measured_attributes(q_row)))


LCDM_FULL_TEMPLATE = LcdmFullTemplate()
