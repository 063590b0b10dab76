import pytest

_CRITERIA: dict[int, tuple[str, bool, str]] = {}


class CriterionRecorder:
    """Collects sub-check results for one acceptance criterion."""

    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.parts: list[tuple[str, bool, str]] = []

    def check(self, label: str, observed: float, threshold: float, relation: str = "<") -> bool:
        ok = observed < threshold if relation == "<" else observed > threshold
        self.parts.append((label, bool(ok), f"{label} {observed:.3e} {relation} {threshold:g}"))
        return ok

    def flag(self, label: str, ok: bool, detail: str = "") -> bool:
        self.parts.append((label, bool(ok), f"{label} {detail}".strip()))
        return ok

    @property
    def passed(self) -> bool:
        return bool(self.parts) and all(ok for _, ok, _ in self.parts)

    def failures(self) -> list[str]:
        return [d for _, ok, d in self.parts if not ok]

    def finish(self):
        details = self.failures() or [d for _, _, d in self.parts]
        _CRITERIA[self.number] = (self.title, self.passed, "; ".join(details))
        assert self.passed, "; ".join(self.failures())


@pytest.fixture
def criterion():
    def make(number: int, title: str) -> CriterionRecorder:
        return CriterionRecorder(number, title)
    return make


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"{status} criterion {number:>2} {title}: {detail}")
