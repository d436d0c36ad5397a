import os

import hypothesis
import numpy as np
import pytest

from flexlab.corpus import builtin_names

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=40, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

framework_names = builtin_names("framework")
curve_names = builtin_names("curve")
grid_names = builtin_names("grid")


@pytest.fixture(params=framework_names, ids=framework_names)
def framework_builtin(request: pytest.FixtureRequest) -> str:
    return f"builtin:{request.param}"


@pytest.fixture(params=curve_names, ids=curve_names)
def curve_builtin(request: pytest.FixtureRequest) -> str:
    return f"builtin:{request.param}"


@pytest.fixture(params=grid_names, ids=grid_names)
def grid_builtin(request: pytest.FixtureRequest) -> str:
    return f"builtin:{request.param}"
