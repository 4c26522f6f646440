import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fsmt import optimizer
from fsmt.model import eval_formula

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# every Sat the solver returns anywhere in the session is re-checked exactly
SOUNDNESS = {"sat_claims": 0, "false_positives": 0}
_ACCEPTANCE: dict[int, tuple[str, str]] = {}
_NOTES: dict[int, str] = {}
_orig_single_run = optimizer._single_run


def _checked_single_run(f, *args, **kw):
    res = _orig_single_run(f, *args, **kw)
    if isinstance(res, optimizer.Sat):
        SOUNDNESS["sat_claims"] += 1
        obj, flags = eval_formula(f, res.assignment)
        if not (all(flags) and obj == -f.total_weight):
            SOUNDNESS["false_positives"] += 1
    return res


optimizer._single_run = _checked_single_run


@pytest.fixture
def note(request):
    """note("...") attaches a measurement to the criterion's summary line."""
    n = request.node.get_closest_marker("acceptance").args[0]
    return lambda text: _NOTES.__setitem__(n, text)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, name): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    n, name = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _ACCEPTANCE[n] = (name, "PASS" if rep.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE and not SOUNDNESS["sat_claims"]:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        name, status = _ACCEPTANCE[n]
        extra = f"  [{_NOTES[n]}]" if n in _NOTES else ""
        tr.write_line(f"ACCEPTANCE {n:>2} {status}  {name}{extra}")
    tr.write_line(f"solver Sat claims this session: {SOUNDNESS['sat_claims']}, "
                  f"false positives: {SOUNDNESS['false_positives']}")


def pytest_sessionfinish(session, exitstatus):
    if SOUNDNESS["false_positives"] and exitstatus == 0:
        session.exitstatus = 1
