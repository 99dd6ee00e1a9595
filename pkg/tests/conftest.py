import pytest

_KEY = "sfor_wave_acceptance"


def pytest_configure(config):
    setattr(config, _KEY, {})


@pytest.fixture
def acceptance_report(request):
    """Dict criterion -> (passed, detail); printed in the terminal summary."""
    return getattr(request.config, _KEY)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, _KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(results):
        lines = results[crit]
        ok = all(p for p, _ in lines)
        detail = "; ".join(d for _, d in lines)
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}  {detail}")
