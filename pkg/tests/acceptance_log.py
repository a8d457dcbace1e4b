"""Collects one line per acceptance criterion for the terminal summary."""

RESULTS: list[str] = []


def record(number: int, title: str, passed: bool, detail: str) -> str:
    line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    RESULTS.append(line)
    print(line)
    return line
