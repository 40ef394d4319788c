ACCEPTANCE = {}


def record(number, passed, seconds, note=""):
    ACCEPTANCE[number] = (passed, seconds, note)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, seconds, note = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {seconds:7.3f} s  {note}")
