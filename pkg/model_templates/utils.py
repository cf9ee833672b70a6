"""Contains templates aggregator"""

from custom_exceptions import ConfigurationException
from model_templates.basic import ModelTemplate
from model_templates.custom import CUSTOM_TEMPLATE
from model_templates.dina import DINA_TEMPLATE
from model_templates.lcdm_full import LCDM_FULL_TEMPLATE
from model_templates.main_effects import MAIN_EFFECTS_TEMPLATE

TEMPLATES_MAPPING = {
    "lcdm": LCDM_FULL_TEMPLATE,
    "dina": DINA_TEMPLATE,
    "mains": MAIN_EFFECTS_TEMPLATE,
    "custom": CUSTOM_TEMPLATE,
}


def get_template_class(template_short_name: str) -> ModelTemplate:
    """Returns suitable template class

    Args:
        template_short_name (str): lcdm, dina, mains or custom

    Returns:
        ModelTemplate: template class instance
    """
    try:
        return TEMPLATES_MAPPING[template_short_name]
    except KeyError as exc:
        raise ConfigurationException(
            f"No model template '{template_short_name}', expected one of "
            f"{sorted(TEMPLATES_MAPPING)}"
        ) from exc
