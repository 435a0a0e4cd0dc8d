"""Turning raw text into interval series.

A text becomes a stream of words and punctuation marks; the quantity of
interest is the number of words between consecutive marks of a chosen
family (sentence-ending stops, stops plus commas, or every mark). The
interval before the first mark counts; an unterminated trailing run of
words does not.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = [
    "MarkKind",
    "PunctMode",
    "LangConfig",
    "IntervalSeries",
    "IngestionError",
    "TextTooShortError",
    "default_config",
    "load_text",
    "preprocess",
    "tokenize",
    "extract_intervals",
    "intervals_from_text",
]


class IngestionError(ValueError):
    """A text file could not be read or decoded."""


class TextTooShortError(ValueError):
    """Fewer intervals than the caller's minimum were found."""


class MarkKind(Enum):
    FULL_STOP = "full_stop"
    QUESTION = "question"
    EXCLAMATION = "exclamation"
    ELLIPSIS = "ellipsis"
    COMMA = "comma"
    COLON = "colon"
    SEMICOLON = "semicolon"
    DASH = "dash"
    LEFT_BRACKET = "left_bracket"
    RIGHT_BRACKET = "right_bracket"


_STOPS = frozenset(
    {MarkKind.FULL_STOP, MarkKind.QUESTION, MarkKind.EXCLAMATION, MarkKind.ELLIPSIS}
)


class PunctMode(Enum):
    """Which mark kinds terminate an interval."""

    STOPS_ONLY = "stops"
    STOPS_AND_COMMAS = "stops+commas"
    ALL_MARKS = "all"

    @property
    def kinds(self) -> frozenset[MarkKind]:
        if self is PunctMode.STOPS_ONLY:
            return _STOPS
        if self is PunctMode.STOPS_AND_COMMAS:
            return _STOPS | {MarkKind.COMMA}
        return frozenset(MarkKind)

    @classmethod
    def from_string(cls, label: str) -> "PunctMode":
        label = label.strip().lower()
        for mode in cls:
            if mode.value == label:
                return mode
        valid = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown mode {label!r}; expected one of: {valid}")


# One token per match. Ellipses and multi-character dashes must come before
# the single characters they contain. A word is any run that is not
# whitespace or punctuation; leading/trailing hyphens and apostrophes are
# kept out of words so quote-like uses do not glue onto them, while
# interior ones (don't, well-known) stay put.
_PUNCT_CLASS = r"\s.?!,:;()\[\]{}\"«»„“”‘’…—–―"
_TOKEN = re.compile(
    rf"""
      (?P<ellipsis>…+|\.{{3,}})
    | (?P<dash>—|–|―|--+)
    | (?P<full_stop>\.)
    | (?P<question>\?)
    | (?P<exclamation>!)
    | (?P<comma>,)
    | (?P<colon>:)
    | (?P<semicolon>;)
    | (?P<left_bracket>[(\[{{])
    | (?P<right_bracket>[)\]}}])
    | (?P<word>[^{_PUNCT_CLASS}'-](?:[^{_PUNCT_CLASS}]*[^{_PUNCT_CLASS}'-])?)
    | (?P<lone_dash>-)
    """,
    re.VERBOSE,
)

_WORD_GROUPS = {"word"}
_KIND_BY_GROUP = {
    "ellipsis": MarkKind.ELLIPSIS,
    "dash": MarkKind.DASH,
    "lone_dash": MarkKind.DASH,
    "full_stop": MarkKind.FULL_STOP,
    "question": MarkKind.QUESTION,
    "exclamation": MarkKind.EXCLAMATION,
    "comma": MarkKind.COMMA,
    "colon": MarkKind.COLON,
    "semicolon": MarkKind.SEMICOLON,
    "left_bracket": MarkKind.LEFT_BRACKET,
    "right_bracket": MarkKind.RIGHT_BRACKET,
}

_NUMBER_COMMA = re.compile(r"(?<=\d),(?=\d)")
_INVERTED_MARKS = re.compile(r"[¿¡]")
# A dash opening a line of dialogue, optionally after quote characters.
_QUOTE_DASH = re.compile(r"(?m)^([ \t]*[\"'«»„“”‘’]*)[ \t]*(?:—|–|―|--+|-)[ \t]*")


@dataclass(frozen=True)
class LangConfig:
    """Language-specific preprocessing switches and abbreviation list."""

    language_code: str
    abbreviations: frozenset[str] = frozenset()
    strip_quote_dashes: bool = True
    strip_inverted_marks: bool = False

    def __post_init__(self) -> None:
        if not self.language_code:
            raise ValueError("language_code must be non-empty")
        for abbr in self.abbreviations:
            if not abbr or any(ch.isspace() for ch in abbr):
                raise ValueError(f"bad abbreviation entry {abbr!r}")

    def abbreviation_pattern(self) -> re.Pattern | None:
        if not self.abbreviations:
            return None
        alts = sorted(self.abbreviations, key=len, reverse=True)
        joined = "|".join(re.escape(a) for a in alts)
        # The lookbehind stops matches inside longer dotted tokens.
        return re.compile(rf"(?<![\w.])({joined})\.")


def _bundled_abbreviations(language_code: str) -> frozenset[str]:
    try:
        ref = resources.files("interpunct.data.abbreviations") / f"{language_code}.txt"
        text = ref.read_text(encoding="utf-8")
    except (FileNotFoundError, ModuleNotFoundError):
        return frozenset()
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.append(line)
    return frozenset(entries)


def default_config(language_code: str, abbreviations_dir: str | None = None) -> LangConfig:
    """Build a LangConfig for a language code, using bundled abbreviation
    lists or, when ``abbreviations_dir`` is given, ``<dir>/<code>.txt``."""
    abbrevs: frozenset[str] = frozenset()
    if abbreviations_dir is not None:
        path = Path(abbreviations_dir) / f"{language_code}.txt"
        if path.exists():
            entries = [
                ln.strip()
                for ln in path.read_text(encoding="utf-8").splitlines()
                if ln.strip() and not ln.strip().startswith("#")
            ]
            abbrevs = frozenset(entries)
    if not abbrevs:
        abbrevs = _bundled_abbreviations(language_code)
    return LangConfig(
        language_code=language_code,
        abbreviations=abbrevs,
        strip_inverted_marks=(language_code == "es"),
    )


def load_text(path, byte_range=None) -> str:
    """Read a UTF-8 text file, optionally slicing [start, end) in bytes.

    Either bound may be None (start of file / end of file).
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise IngestionError(f"{path}: {exc}") from exc
    if byte_range is not None:
        start = byte_range[0] if byte_range[0] is not None else 0
        end = byte_range[1] if byte_range[1] is not None else len(data)
        if not (0 <= start <= end <= len(data)):
            raise IngestionError(
                f"{path}: byte range [{start}, {end}) outside file of {len(data)} bytes"
            )
        data = data[start:end]
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IngestionError(
            f"{path}: not valid UTF-8 at byte {exc.start}: {exc.reason}"
        ) from exc


def preprocess(text: str, config: LangConfig) -> str:
    """Neutralize punctuation that does not delimit clauses.

    Removes thousands separators inside numbers, the trailing stop of known
    abbreviations, inverted question/exclamation marks when configured, and
    the dash that opens a line of quoted dialogue.
    """
    text = _NUMBER_COMMA.sub("", text)
    pattern = config.abbreviation_pattern()
    if pattern is not None:
        text = pattern.sub(r"\1", text)
    if config.strip_inverted_marks:
        text = _INVERTED_MARKS.sub("", text)
    if config.strip_quote_dashes:
        text = _QUOTE_DASH.sub(r"\1", text)
    return text


def tokenize(text: str) -> list:
    """Split text into word strings and MarkKind members, in order."""
    out: list = []
    for match in _TOKEN.finditer(text):
        group = match.lastgroup
        if group in _WORD_GROUPS:
            out.append(match.group())
        else:
            out.append(_KIND_BY_GROUP[group])
    return out


@dataclass(frozen=True)
class IntervalSeries:
    """Word counts between consecutive terminating marks of one text."""

    values: np.ndarray
    text_id: str = ""
    mode: PunctMode = PunctMode.ALL_MARKS

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.int64)
        if values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if values.size and values.min() < 1:
            raise ValueError("intervals must be >= 1")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)


def extract_intervals(
    tokens,
    mode: PunctMode,
    *,
    text_id: str = "",
    min_intervals: int = 2,
) -> IntervalSeries:
    """Collect word counts between terminating marks.

    Consecutive marks with no word between them extend the previous
    interval rather than emitting a zero. Words after the final
    terminating mark are dropped.
    """
    kinds = mode.kinds
    values: list[int] = []
    run = 0
    for token in tokens:
        if isinstance(token, MarkKind):
            if token in kinds and run > 0:
                values.append(run)
                run = 0
        else:
            run += 1
    if len(values) < min_intervals:
        raise TextTooShortError(
            f"text {text_id!r}: found {len(values)} intervals in mode "
            f"{mode.value!r}, need at least {min_intervals}"
        )
    return IntervalSeries(np.array(values, dtype=np.int64), text_id=text_id, mode=mode)


def intervals_from_text(
    text: str,
    mode: PunctMode,
    config: LangConfig,
    *,
    text_id: str = "",
    min_intervals: int = 2,
) -> IntervalSeries:
    """Preprocess, tokenize, and extract in one call."""
    tokens = tokenize(preprocess(text, config))
    return extract_intervals(tokens, mode, text_id=text_id, min_intervals=min_intervals)
