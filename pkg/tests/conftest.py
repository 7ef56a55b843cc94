import numpy as np
import pytest

from umbilic.families import list_families, make_field


def all_fields():
    """One instance of every registered family, default parameters."""
    return [make_field(spec.name) for spec in list_families()]


def sample_points(field, n, rng):
    """Random points inside the field's preferred sampling box."""
    lo, hi = field.sample_box
    return rng.uniform(lo, hi, size=(n, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
