from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import acceptance_log  # noqa: E402
from hypothesis import settings  # noqa: E402

# exact arithmetic has uneven per-example cost; fixed draws keep runs reproducible
settings.register_profile("repo", deadline=None, derandomize=True)
settings.load_profile("repo")


def pytest_terminal_summary(terminalreporter):
    if not acceptance_log.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acceptance_log.LINES):
        terminalreporter.write_line(acceptance_log.LINES[n])
