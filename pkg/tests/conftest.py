import pytest

# Acceptance results are collected here and echoed in the terminal summary so
# each criterion gets one visible pass/fail line even under output capture.
_acceptance_lines: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance-criterion outcome, then assert it."""

    def record(name: str, passed: bool, detail: str = ""):
        status = "PASS" if passed else "FAIL"
        suffix = f" ({detail})" if detail else ""
        _acceptance_lines.append(f"[{status}] {name}{suffix}")
        assert passed, f"{name}{suffix}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
