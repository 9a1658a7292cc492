import numpy as np
import pytest

from contactsim import (
    BilliardSpec,
    Circle,
    ContactStateL,
    Ellipse,
    EventConfig,
    StepperConfig,
    make_circular_billiard,
    make_elliptical_billiard,
    simulate,
)

GAMMA_PAPER = 1e-4
Q0_PAPER = np.array([0.5, 0.0])
V0_PAPER = np.array([1.0, 1.0])


@pytest.fixture(scope="session")
def circle_billiard():
    return make_circular_billiard(BilliardSpec(boundary=Circle(1.0), gamma=GAMMA_PAPER))


@pytest.fixture(scope="session")
def ellipse_billiard():
    return make_elliptical_billiard(
        BilliardSpec(boundary=Ellipse(0.9, 1.1), gamma=GAMMA_PAPER))


@pytest.fixture(scope="session")
def fig1_trajectory(circle_billiard):
    """The reference circular run: gamma = 1e-4 from (0.5, 0) with v = (1, 1)."""
    s0 = ContactStateL(q=Q0_PAPER, qdot=V0_PAPER, z=0.0, t=0.0)
    return simulate(circle_billiard, s0, 20.0, StepperConfig(), EventConfig())
