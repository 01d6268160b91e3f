"""Greedy word-wrap plus font-size search: the first stage of text fitting.

``fit_text`` finds the largest integer font size in [MIN_FONT, MAX_FONT]
whose wrapped lines fit a box interior in both width and height. When even
MIN_FONT overflows it raises ``DoesNotFitAtMinFont`` carrying the height
the caller would need, so layouts can grow the box or scale the canvas
(stages two and three of the optimization).
"""

from __future__ import annotations

from dataclasses import dataclass

from .fonts import measure_text

MIN_FONT = 10
MAX_FONT = 28
LINE_HEIGHT = 1.3  # multiple of font size


class DoesNotFitAtMinFont(Exception):
    def __init__(self, required_height: float):
        self.required_height = required_height
        super().__init__(
            f"text needs {required_height:.1f}px of height at minimum font size"
        )


class UnbreakableToken(Exception):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"cannot fit even one character of {token!r}")


@dataclass(frozen=True)
class TextBlock:
    lines: tuple[str, ...]
    font_size: float
    origin: tuple[float, float] = (0.0, 0.0)

    @property
    def line_height(self) -> float:
        return LINE_HEIGHT * self.font_size

    @property
    def height(self) -> float:
        return len(self.lines) * self.line_height

    @property
    def width(self) -> float:
        return max((measure_text(ln, self.font_size) for ln in self.lines), default=0.0)

    def at(self, x: float, y: float) -> "TextBlock":
        return TextBlock(lines=self.lines, font_size=self.font_size, origin=(x, y))


def _split_token(token: str, width: float, size: float) -> list[str]:
    """Hyphen-split a token wider than the line. Raises UnbreakableToken
    when a single character plus hyphen cannot fit."""
    pieces: list[str] = []
    rest = token
    while rest:
        if measure_text(rest, size) <= width:
            pieces.append(rest)
            break
        cut = len(rest) - 1
        while cut >= 1 and measure_text(rest[:cut] + "-", size) > width:
            cut -= 1
        if cut < 1:
            if measure_text(rest[0], size) > width:
                raise UnbreakableToken(token)
            # single char fits but char+hyphen does not; emit it bare
            pieces.append(rest[0])
            rest = rest[1:]
            continue
        pieces.append(rest[:cut] + "-")
        rest = rest[cut:]
    return pieces


def wrap(text: str, width: float, size: float) -> tuple[str, ...]:
    """Greedy wrap of whitespace-separated words into lines of at most
    ``width`` px at font ``size``. Overlong words are hyphen-split."""
    words = text.split()
    lines: list[str] = []
    current = ""
    for word in words:
        candidates = (
            [word] if measure_text(word, size) <= width else _split_token(word, width, size)
        )
        for piece in candidates:
            trial = piece if not current else current + " " + piece
            if measure_text(trial, size) <= width:
                current = trial
            else:
                if current:
                    lines.append(current)
                current = piece
    if current:
        lines.append(current)
    return tuple(lines)


def fits(text: str, width: float, height: float, size: float) -> bool:
    try:
        lines = wrap(text, width, size)
    except UnbreakableToken:
        return False
    if any(measure_text(ln, size) > width for ln in lines):
        return False
    return len(lines) * LINE_HEIGHT * size <= height


def fit_text(
    text: str,
    width: float,
    height: float,
    min_font: int = MIN_FONT,
    max_font: int = MAX_FONT,
) -> TextBlock:
    """Largest integer font size whose wrapped text fits width x height."""
    if width <= 0 or height <= 0:
        raise ValueError("box interior must have positive dimensions")
    if not text.split():
        return TextBlock(lines=(), font_size=float(max_font))
    for size in range(max_font, min_font - 1, -1):
        try:
            lines = wrap(text, width, size)
        except UnbreakableToken:
            continue
        if len(lines) * LINE_HEIGHT * size <= height:
            return TextBlock(lines=lines, font_size=float(size))
    try:
        lines = wrap(text, width, min_font)
    except UnbreakableToken as exc:
        raise UnbreakableToken(exc.token) from None
    raise DoesNotFitAtMinFont(required_height=len(lines) * LINE_HEIGHT * min_font)
