import os

import pytest

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    def _record(criterion: int, ok: bool, detail: str = ""):
        ACCEPTANCE[criterion] = (ok, detail)
        print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in range(1, 10):
        ok, detail = ACCEPTANCE.get(k, (False, "not reached"))
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def cache_dir(tmp_path):
    d = tmp_path / "cache"
    d.mkdir()
    return str(d)


def pytest_report_header(config):
    from qholonomic.oracle import backend

    return f"qholonomic oracle backend: {backend()} ({'QHOLONOMIC_DISABLE_NUMBA' in os.environ and 'flag set' or 'default'})"
