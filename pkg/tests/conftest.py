import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.OUTCOMES):
        terminalreporter.write_line(mod.OUTCOMES[k].line())
