import pytest

from pspline_ci.basis import make_knots
from pspline_ci.coverage import ExperimentConfig, run_experiment
from pspline_ci.intervals import Hodges, IterativeBC, ThetaReduced
from pspline_ci.simgen import BrokenStick, ConstantNoise, EquallySpaced

# fixed once, before any coverage numbers were looked at
ACCEPTANCE_SEED = 12345

SYNTHETIC_METHODS = (
    ThetaReduced(1.0),
    ThetaReduced(0.2),
    ThetaReduced(0.1),
    ThetaReduced(0.05),
    ThetaReduced(0.0),
    IterativeBC(1),
    IterativeBC(5),
    IterativeBC(500),
    Hodges(),
)


def synthetic_config(replicates=1000, seed=ACCEPTANCE_SEED, methods=SYNTHETIC_METHODS):
    return ExperimentConfig(
        target=BrokenStick(),
        sampler=EquallySpaced(101),
        noise=ConstantNoise(0.1),
        knots=make_knots((0.0, 5.0), 24, 4),
        master_seed=seed,
        methods=methods,
        replicates=replicates,
    )


@pytest.fixture(scope="session")
def synthetic_report():
    """n = 101, sigma = 0.1, 24 interior knots, R = 1000, every method on paired replicates."""
    return run_experiment(synthetic_config())


# criterion number -> pass/fail of each test phase that reported
_CRITERIA: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is not None and (report.when == "call" or report.failed):
        _CRITERIA.setdefault(crit, []).append(report.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_CRITERIA):
        ok = all(_CRITERIA[crit])
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}")
