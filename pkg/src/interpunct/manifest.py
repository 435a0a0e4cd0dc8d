"""Run inputs: the text manifest and the run configuration.

A manifest is UTF-8 JSON Lines, one record per text:

    {"path": "texts/book.txt", "text_id": "book", "language_code": "en",
     "group": "original", "body_start": 764, "body_end": 154418,
     "translation_of": null}

``path`` is resolved relative to the manifest file. The optional byte
range [body_start, body_end) trims front and back matter; a record whose
``translation_of`` names another text_id marks a translated/original pair.

The config file is plain ``key = value`` lines (# comments allowed); every
output row carries a short hash of the effective configuration so tables
can be traced back to the settings that produced them.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .corpus import PunctMode

__all__ = [
    "TextRecord",
    "Manifest",
    "ManifestError",
    "ConfigError",
    "RunConfig",
    "load_manifest",
    "parse_config_file",
]


class ManifestError(ValueError):
    """Malformed manifest content."""


class ConfigError(ValueError):
    """Malformed or out-of-bounds configuration."""


@dataclass(frozen=True)
class TextRecord:
    path: Path
    text_id: str
    language_code: str
    group: str = "original"
    body_start: int | None = None
    body_end: int | None = None
    translation_of: str | None = None

    def byte_range(self) -> tuple[int | None, int | None] | None:
        if self.body_start is None and self.body_end is None:
            return None
        return (self.body_start, self.body_end)


@dataclass(frozen=True)
class Manifest:
    records: tuple[TextRecord, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for rec in self.records:
            if rec.text_id in seen:
                raise ManifestError(f"duplicate text_id {rec.text_id!r}")
            seen.add(rec.text_id)
        for rec in self.records:
            if rec.translation_of is not None and rec.translation_of not in seen:
                raise ManifestError(
                    f"{rec.text_id!r}: translation_of target "
                    f"{rec.translation_of!r} is not in the manifest"
                )

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def by_id(self, text_id: str) -> TextRecord:
        for rec in self.records:
            if rec.text_id == text_id:
                return rec
        raise KeyError(text_id)

    def translation_pairs(self) -> list[tuple[TextRecord, TextRecord]]:
        """(original, translated) record pairs, in manifest order."""
        return [
            (self.by_id(rec.translation_of), rec)
            for rec in self.records
            if rec.translation_of is not None
        ]


_REQUIRED_KEYS = {"path", "text_id", "language_code"}
_OPTIONAL_KEYS = {"group", "body_start", "body_end", "translation_of"}


def load_manifest(path) -> Manifest:
    """Parse a JSONL manifest; paths become absolute relative to it."""
    path = Path(path)
    base = path.parent
    records: list[TextRecord] = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ManifestError(f"{path}:{lineno}: expected a JSON object")
        missing = _REQUIRED_KEYS - obj.keys()
        if missing:
            raise ManifestError(f"{path}:{lineno}: missing keys {sorted(missing)}")
        unknown = obj.keys() - _REQUIRED_KEYS - _OPTIONAL_KEYS
        if unknown:
            raise ManifestError(f"{path}:{lineno}: unknown keys {sorted(unknown)}")
        rec_path = Path(obj["path"])
        if not rec_path.is_absolute():
            rec_path = base / rec_path
        records.append(
            TextRecord(
                path=rec_path,
                text_id=str(obj["text_id"]),
                language_code=str(obj["language_code"]),
                group=str(obj.get("group", "original")),
                body_start=obj.get("body_start"),
                body_end=obj.get("body_end"),
                translation_of=obj.get("translation_of"),
            )
        )
    return Manifest(records=tuple(records))


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by all pipeline commands.

    ``hazard_k`` is the k range for parametric hazard summaries; empirical
    averages are cut at each language's reliability bound instead.
    """

    modes: tuple[PunctMode, ...] = (
        PunctMode.STOPS_ONLY,
        PunctMode.STOPS_AND_COMMAS,
        PunctMode.ALL_MARKS,
    )
    dfa_poly_order: int = 2
    dfa_min_scale: int = 10
    dfa_max_scale: int | None = None
    dfa_num_scales: int = 30
    fit_xatol: float = 1e-6
    hazard_k: int = 15
    isoline_points: int = 25
    seed: int = 0
    jobs: int = 1
    abbreviations_dir: str | None = None
    figures: bool = True

    def __post_init__(self) -> None:
        if not self.modes:
            raise ConfigError("at least one punctuation mode is required")
        if not 1 <= self.dfa_poly_order <= 3:
            raise ConfigError("dfa_poly_order must be 1, 2, or 3")
        if self.dfa_min_scale < self.dfa_poly_order + 2:
            raise ConfigError(
                f"dfa_min_scale {self.dfa_min_scale} cannot constrain a "
                f"degree-{self.dfa_poly_order} detrending polynomial"
            )
        if self.dfa_max_scale is not None and self.dfa_max_scale < self.dfa_min_scale:
            raise ConfigError("dfa_max_scale must be >= dfa_min_scale")
        if self.dfa_num_scales < 10:
            raise ConfigError("dfa_num_scales must be >= 10 to classify scaling")
        if not self.fit_xatol > 0:
            raise ConfigError("fit_xatol must be positive")
        if self.hazard_k < 1:
            raise ConfigError("hazard_k must be >= 1")
        if self.isoline_points < 2:
            raise ConfigError("isoline_points must be >= 2")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def replace(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs)

    def as_mapping(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "modes":
                out[f.name] = ",".join(m.value for m in value)
            elif value is None:
                out[f.name] = ""
            else:
                out[f.name] = repr(value) if isinstance(value, float) else str(value)
        return out

    def fingerprint(self) -> str:
        """Short stable hash of the effective settings."""
        blob = "\n".join(f"{k}={v}" for k, v in sorted(self.as_mapping().items()))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "RunConfig":
        kwargs: dict = {}
        known = {f.name for f in fields(cls)}
        for key, raw in mapping.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            raw = raw.strip()
            if key == "modes":
                kwargs[key] = tuple(PunctMode.from_string(m) for m in raw.split(",") if m)
            elif key in {"dfa_poly_order", "dfa_min_scale", "dfa_num_scales",
                         "hazard_k", "isoline_points", "seed", "jobs"}:
                kwargs[key] = int(raw)
            elif key == "dfa_max_scale":
                kwargs[key] = int(raw) if raw else None
            elif key == "fit_xatol":
                kwargs[key] = float(raw)
            elif key == "abbreviations_dir":
                kwargs[key] = raw or None
            elif key == "figures":
                if raw.lower() not in {"true", "false"}:
                    raise ConfigError("figures must be 'true' or 'false'")
                kwargs[key] = raw.lower() == "true"
            else:  # pragma: no cover - key set and branch list kept in sync
                raise ConfigError(f"unhandled config key {key!r}")
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def parse_config_file(path) -> RunConfig:
    """Read ``key = value`` lines into a RunConfig."""
    path = Path(path)
    mapping: dict[str, str] = {}
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key in mapping:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        mapping[key] = value.strip()
    return RunConfig.from_mapping(mapping)
