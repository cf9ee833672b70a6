"""Contains DINA template class"""

from typing import Sequence

from core.effects import measured_attributes
from model_templates.basic import ModelTemplate


class DinaTemplate(ModelTemplate):
    """Intercept plus the single highest-order interaction

    For a single-attribute item this is the intercept and its main effect.
    """

    spec_name = "dina"

    def get_item_mask(self, q_row: Sequence[int]):
        return (measured_attributes(q_row),)


DINA_TEMPLATE = DinaTemplate()
