import numpy as np
import pytest

from fairanneal import five_spin_problem
from fairanneal.ising import IsingProblem


@pytest.fixture(scope="session")
def five_spin():
    return five_spin_problem()


def random_problem(rng: np.random.Generator, n: int, scale: float = 2.0) -> IsingProblem:
    """Fully-coupled instance with J, h uniform in [-scale, scale]."""
    couplings = tuple(
        (i, j, float(rng.uniform(-scale, scale)))
        for i in range(n) for j in range(i + 1, n))
    fields = tuple(float(rng.uniform(-scale, scale)) for _ in range(n))
    return IsingProblem(n=n, couplings=couplings, fields=fields)
