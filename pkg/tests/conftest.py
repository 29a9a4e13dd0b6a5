"""Shared pytest configuration.

After a run that included the acceptance suite, prints one verdict line per
acceptance criterion so the gate can be read off the terminal directly.
"""

import re

CRITERIA = {
    1: "single-referendum coercion resistance holds at the start state",
    2: "knowledge-based double-referendum property holds on both variants",
    3: "uncertainty formula separates the two double-referendum variants",
    4: "coercer pattern counts: 4 on the opaque variant, 2 on the leaky one",
    5: "ThreeBallot coercer information sets match the expected 20-row table",
    6: "ThreeBallot: epistemic resistance holds, maximum-doubt invariant fails",
    7: "both translation directions agree with direct checking on 1000 random models",
    8: "translated uncertainty formulas blow up exponentially in length",
    9: "the family formula separates each model from its punctured variants",
    10: "formula-size game minima match enumerated minimal formulas",
    11: "randomized invariant suites report zero violations",
    12: "strategy enumeration agrees with the brute-force oracle",
}

_PATTERN = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter):
    verdicts = {}
    for status, verdict in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            found = _PATTERN.search(report.nodeid)
            if found and getattr(report, "when", "call") == "call":
                verdicts[int(found.group(1))] = verdict
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        description = CRITERIA.get(number, "")
        terminalreporter.write_line(f"criterion {number}: {verdicts[number]} - {description}")
