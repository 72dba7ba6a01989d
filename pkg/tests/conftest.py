import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import helpers


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not helpers.CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for index in sorted(helpers.CRITERIA):
        passed, detail = helpers.CRITERIA[index]
        verdict = "PASS" if passed else "FAIL"
        line = f"criterion {index:02d}: {verdict}"
        if detail:
            line += f"  {detail}"
        terminalreporter.write_line(line)
