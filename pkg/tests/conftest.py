import numpy as np
import pytest

from inghamlab import curves


@pytest.fixture(scope="session")
def mono2():
    return curves.build_curve("Monomial", {"a": 0.0, "b": 1.0, "alpha": 2.0})


@pytest.fixture(scope="session")
def mono3():
    return curves.build_curve("Monomial", {"a": 0.0, "b": 1.0, "alpha": 3.0})


@pytest.fixture(scope="session")
def arctan3():
    return curves.build_curve("ArctanModulated", {})


@pytest.fixture(scope="session")
def quarter_circle():
    return curves.build_measure(
        "ArcLengthOnCircle",
        {"radius": 1.0, "theta0": 0.0, "theta1": float(np.pi / 2)},
        resolution=4096)


@pytest.fixture(scope="session")
def full_circle():
    return curves.build_measure(
        "ArcLengthOnCircle",
        {"radius": 1.0, "theta0": 0.0, "theta1": float(2 * np.pi)},
        resolution=8192)
