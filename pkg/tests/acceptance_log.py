"""Collects one result line per acceptance criterion for the end-of-run summary."""

LINES: dict[int, str] = {}


def report(number: int, title: str, passed: bool, detail: str) -> bool:
    LINES[number] = f"CRITERION {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    print(LINES[number])
    return passed
