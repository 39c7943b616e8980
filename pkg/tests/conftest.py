import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# One "[PASS]/[FAIL] <criterion>" line per acceptance test, collected by the
# criterion decorator in test_acceptance.py and echoed after the run (the
# terminal reporter writes outside pytest's fd capture).
acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    for line in acceptance_lines:
        terminalreporter.write_line(line)
