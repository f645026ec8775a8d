from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self):
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError(f"span start after end: {self}")

    def __str__(self):
        return f"{self.file}:{self.start_line}:{self.start_col}"


UNKNOWN_SPAN = SourceSpan("<unknown>", 0, 0, 0, 0)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: SourceSpan = UNKNOWN_SPAN

    def render(self) -> str:
        return f"{self.span}: {self.severity}: {self.message}"

    def __str__(self):
        return self.render()


class ParseError(Exception):
    """Raised by the frontend; carries every syntax diagnostic found."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(d.render() for d in self.diagnostics))
