import time

import pytest

from strongmult.forms import angles, cm32_sequence, e11_sequence, tau_sequence, twist

X_MAX = 10**5

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    number, text = mark.args
    if rep.when == "setup" and rep.passed:
        return
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    if rep.failed:
        msg = str(rep.longrepr).strip().splitlines()[-1] if rep.longrepr else ""
        detail = f"{detail}; {msg}" if detail else msg
    prev = _CRITERIA.get(number)
    passed = rep.passed and (prev is None or prev[1])
    _CRITERIA[number] = (text, passed, detail if prev is None else f"{prev[2]} | {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        text, passed, detail = _CRITERIA[number]
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}: {text}"
        terminalreporter.write_line(line + (f" [{detail}]" if detail else ""))


class _Timed(dict):
    """Sequences generated once per session, with their generation time in seconds."""


@pytest.fixture(scope="session")
def generated():
    out = _Timed()
    for name, fn in (("delta", tau_sequence), ("e11", e11_sequence), ("cm32", cm32_sequence)):
        t0 = time.perf_counter()
        seq = fn(X_MAX)
        out[name] = seq
        out[name + "_seconds"] = time.perf_counter() - t0
    return out


@pytest.fixture(scope="session")
def delta(generated):
    return generated["delta"]


@pytest.fixture(scope="session")
def e11(generated):
    return generated["e11"]


@pytest.fixture(scope="session")
def cm32(generated):
    return generated["cm32"]


@pytest.fixture(scope="session")
def delta_twist(delta):
    return twist(delta, -4)


@pytest.fixture(scope="session")
def delta_angles(delta):
    return angles(delta)


@pytest.fixture(scope="session")
def e11_angles(e11):
    return angles(e11)


@pytest.fixture(scope="session")
def cm32_angles(cm32):
    return angles(cm32)
