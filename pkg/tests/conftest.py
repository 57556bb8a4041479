import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from skewdry.model import params_new
from skewdry.simulate import SimConfig, run_monte_carlo

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# acceptance-scale Monte Carlo setting, shared by several test modules
MC_N = 100_000
MC_DT = 1e-4
MC_SEED = 2024

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def mc_runs():
    """Lazily computed acceptance-scale runs keyed by ``(mu, eta)``."""
    cache = {}

    def get(mu, eta):
        key = (float(mu), float(eta))
        if key not in cache:
            cfg = SimConfig(MC_DT, 1.0, MC_N, seed=MC_SEED)
            cache[key] = run_monte_carlo(params_new(mu, eta), cfg)
        return cache[key]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def record_criterion(number, name, measured, threshold, passed):
    line = (f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {name}: "
            f"measured {measured:.3e}, threshold {threshold:.3g}")
    ACCEPTANCE_LINES.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES, key=lambda e: e[0]):
        terminalreporter.write_line(line)
