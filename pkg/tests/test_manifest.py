import hashlib
import json

import pytest

from interpunct.corpus import PunctMode
from interpunct.manifest import (
    ConfigError,
    Manifest,
    ManifestError,
    RunConfig,
    TextRecord,
    load_manifest,
    parse_config_file,
)


def write_manifest(tmp_path, lines):
    path = tmp_path / "m.jsonl"
    path.write_text("\n".join(json.dumps(obj) for obj in lines) + "\n")
    return path


GOOD = {"path": "texts/a.txt", "text_id": "a", "language_code": "en"}


class TestLoadManifest:
    def test_relative_paths_resolve_against_manifest(self, tmp_path):
        manifest = load_manifest(write_manifest(tmp_path, [GOOD]))
        assert len(manifest) == 1
        rec = manifest.by_id("a")
        assert rec.path == tmp_path / "texts" / "a.txt"
        assert rec.group == "original"
        assert rec.byte_range() is None

    def test_byte_bounds_pass_through(self, tmp_path):
        manifest = load_manifest(
            write_manifest(tmp_path, [{**GOOD, "body_start": 5, "body_end": 99}])
        )
        assert manifest.by_id("a").byte_range() == (5, 99)
        manifest = load_manifest(write_manifest(tmp_path, [{**GOOD, "body_start": 5}]))
        assert manifest.by_id("a").byte_range() == (5, None)

    def test_comments_and_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text("# heading\n\n" + json.dumps(GOOD) + "\n")
        assert len(load_manifest(path)) == 1

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(ManifestError, match="unknown keys"):
            load_manifest(write_manifest(tmp_path, [{**GOOD, "tittle": "x"}]))

    def test_missing_required_key_rejected(self, tmp_path):
        with pytest.raises(ManifestError, match="missing keys"):
            load_manifest(write_manifest(tmp_path, [{"path": "a", "text_id": "a"}]))

    def test_invalid_json_line_reported_with_number(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text(json.dumps(GOOD) + "\n{nope\n")
        with pytest.raises(ManifestError, match=":2"):
            load_manifest(path)

    def test_duplicate_text_id_rejected(self, tmp_path):
        with pytest.raises(ManifestError, match="duplicate"):
            load_manifest(write_manifest(tmp_path, [GOOD, GOOD]))

    def test_dangling_translation_reference_rejected(self, tmp_path):
        bad = {**GOOD, "text_id": "b", "translation_of": "ghost"}
        with pytest.raises(ManifestError, match="ghost"):
            load_manifest(write_manifest(tmp_path, [GOOD, bad]))

    def test_translation_pairs_in_order(self, tmp_path):
        rows = [
            GOOD,
            {**GOOD, "text_id": "b", "language_code": "de"},
            {**GOOD, "text_id": "tb", "language_code": "en", "group": "translation",
             "translation_of": "b"},
            {**GOOD, "text_id": "ta", "language_code": "de", "group": "translation",
             "translation_of": "a"},
        ]
        pairs = load_manifest(write_manifest(tmp_path, rows)).translation_pairs()
        assert [(o.text_id, t.text_id) for o, t in pairs] == [("b", "tb"), ("a", "ta")]

    def test_fixture_manifest_loads(self, demo_manifest):
        manifest = load_manifest(demo_manifest)
        assert len(manifest) == 10
        assert len(manifest.translation_pairs()) == 2
        for rec in manifest:
            assert rec.path.exists()


class TestManifestContainer:
    def test_by_id_miss(self):
        manifest = Manifest(records=(TextRecord(path="x", text_id="a", language_code="en"),))
        with pytest.raises(KeyError):
            manifest.by_id("zzz")


class TestRunConfig:
    def test_defaults_are_valid(self):
        config = RunConfig()
        assert config.modes == (
            PunctMode.STOPS_ONLY, PunctMode.STOPS_AND_COMMAS, PunctMode.ALL_MARKS
        )
        assert config.figures is True

    def test_fingerprint_recomputable_from_documented_form(self):
        # sha256 of sorted "key=value" lines, first 12 hex digits.
        config = RunConfig()
        blob = "\n".join(f"{k}={v}" for k, v in sorted(config.as_mapping().items()))
        expected = hashlib.sha256(blob.encode()).hexdigest()[:12]
        assert config.fingerprint() == expected

    def test_fingerprint_tracks_every_field(self):
        base = RunConfig()
        assert base.fingerprint() == RunConfig().fingerprint()
        changed = [
            base.replace(seed=1),
            base.replace(jobs=3),
            base.replace(modes=(PunctMode.ALL_MARKS,)),
            base.replace(fit_xatol=1e-7),
            base.replace(figures=False),
        ]
        prints = {c.fingerprint() for c in changed} | {base.fingerprint()}
        assert len(prints) == len(changed) + 1

    def test_from_mapping_parses_types(self):
        config = RunConfig.from_mapping(
            {
                "modes": "stops,all",
                "seed": "7",
                "fit_xatol": "1e-5",
                "figures": "false",
                "dfa_max_scale": "",
                "abbreviations_dir": "",
            }
        )
        assert config.modes == (PunctMode.STOPS_ONLY, PunctMode.ALL_MARKS)
        assert config.seed == 7
        assert config.fit_xatol == 1e-5
        assert config.figures is False
        assert config.dfa_max_scale is None
        assert config.abbreviations_dir is None

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            RunConfig.from_mapping({"sneed": "1"})

    def test_validation(self):
        with pytest.raises(ConfigError):
            RunConfig(dfa_poly_order=4)
        with pytest.raises(ConfigError):
            RunConfig(dfa_min_scale=3)  # cannot constrain a quadratic
        with pytest.raises(ConfigError):
            RunConfig(dfa_num_scales=5)
        with pytest.raises(ConfigError):
            RunConfig(jobs=0)
        with pytest.raises(ConfigError):
            RunConfig(modes=())
        with pytest.raises(ConfigError, match="true"):
            RunConfig.from_mapping({"figures": "yes"})

    def test_mapping_round_trip(self):
        config = RunConfig(seed=5, modes=(PunctMode.ALL_MARKS,), fit_xatol=1e-7)
        again = RunConfig.from_mapping(config.as_mapping())
        assert again == config
        assert again.fingerprint() == config.fingerprint()


class TestParseConfigFile:
    def test_demo_config(self, demo_config):
        config = parse_config_file(demo_config)
        assert config.seed == 0
        assert config.hazard_k == 15
        assert len(config.modes) == 3

    def test_comments_and_spacing(self, tmp_path):
        path = tmp_path / "c.cfg"
        path.write_text("# hi\n\n  seed =  3 \nmodes= all\n")
        config = parse_config_file(path)
        assert config.seed == 3
        assert config.modes == (PunctMode.ALL_MARKS,)

    def test_line_without_equals_rejected(self, tmp_path):
        path = tmp_path / "c.cfg"
        path.write_text("seed 3\n")
        with pytest.raises(ConfigError, match="expected 'key = value'"):
            parse_config_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            parse_config_file(tmp_path / "none.cfg")
