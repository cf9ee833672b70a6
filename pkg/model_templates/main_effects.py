"""Contains main-effects-only template class"""

from typing import Sequence

from core.effects import measured_attributes
from model_templates.basic import ModelTemplate


class MainEffectsTemplate(ModelTemplate):
    """Intercept plus one main effect per measured attribute"""

    spec_name = "main_effects_only"

    def get_item_mask(self, q_row: Sequence[int]):
        return tuple((attribute,) for attribute in measured_attributes(q_row))


MAIN_EFFECTS_TEMPLATE = MainEffectsTemplate()
