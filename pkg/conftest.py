"""Shared fixtures and the --runslow switch"""

import pytest

from estimator.em import fit
from model_templates.utils import get_template_class
from models import SimDesign
from simulation.generator import build_item_params, gen_attribute_matrix, gen_responses


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow acceptance tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def small_design():
    """Twelve items cycling the six patterns, large effect"""
    return SimDesign.from_settings(
        "large", items=12, examinees=400, replications=2, seed=20240
    )


@pytest.fixture(scope="session")
def small_data(small_design):
    """Responses drawn from the full LCDM of small_design"""
    q = small_design.q_matrix()
    params = [
        build_item_params(
            q.row(item),
            small_design.p_nonmaster,
            small_design.p_master,
            small_design.split_rule,
            q.item_ids[item],
        )[0]
        for item in range(q.n_items)
    ]
    bits = gen_attribute_matrix(
        small_design.examinees,
        small_design.attributes,
        small_design.tetrachoric_rho,
        small_design.seed,
    )
    return gen_responses(bits, params, q, small_design.seed + 1)


@pytest.fixture(scope="session")
def small_fit(small_design, small_data):
    """Correctly specified full LCDM fitted to small_data"""
    spec = get_template_class("lcdm").build_spec(small_design.q_matrix())
    return fit(spec, small_data)
