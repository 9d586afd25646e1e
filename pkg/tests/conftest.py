import numpy as np
import pytest

from ivisim.cases import builtin_case


@pytest.fixture(scope="session")
def cases():
    return {cid: builtin_case(cid) for cid in (1, 2, 3)}


def within_se(mean: float, reference: float, std_error: float, n_se: float = 3.0) -> bool:
    return abs(mean - reference) <= n_se * std_error


def sample_variance_se(x: np.ndarray) -> float:
    """Standard error of the sample variance via the fourth central moment."""
    n = x.size
    m = x.mean()
    m2 = np.mean((x - m) ** 2)
    m4 = np.mean((x - m) ** 4)
    return float(np.sqrt(max(m4 - m2 * m2, 0.0) / n))
