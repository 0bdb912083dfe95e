"""Front end: configs, runners, CSV/SVG artifacts, exit codes, presets."""

import json
import math
import xml.etree.ElementTree as ET
from importlib import resources

import numpy as np
import pytest

from ptlattice.cli import main
from ptlattice.config import load_config, parse_config
from ptlattice.errors import ConfigError
from ptlattice.experiments import run_bands, run_evolve, run_multicross, run_sweep, run_twomode
from ptlattice.results import ResultTable, load_csv


def bands_doc(**overrides):
    doc = {
        "kind": "bands",
        "lattice": {"v_real": 0.2, "v_imag": 0.15, "l_max": 12},
        "q_grid": {"start": -1.0, "stop": 1.0, "count": 41},
        "band_count": 2,
    }
    doc.update(overrides)
    return doc


class TestConfig:
    def test_unknown_top_level_field(self):
        with pytest.raises(ConfigError, match="unknown field"):
            parse_config(bands_doc(extra=1))

    def test_unknown_nested_field(self):
        doc = bands_doc()
        doc["lattice"]["typo"] = 3
        with pytest.raises(ConfigError, match="typo"):
            parse_config(doc)

    def test_missing_required_field(self):
        doc = bands_doc()
        del doc["q_grid"]
        with pytest.raises(ConfigError, match="q_grid"):
            parse_config(doc)

    def test_bad_kind(self):
        with pytest.raises(ConfigError, match="kind"):
            parse_config({"kind": "nope"})

    def test_invalid_numbers_rejected(self):
        doc = bands_doc()
        doc["lattice"]["v_real"] = "0.2"
        with pytest.raises(ConfigError):
            parse_config(doc)

    def test_resolved_includes_defaults(self):
        cfg = parse_config(bands_doc())
        resolved = cfg.resolved()
        assert resolved["jobs"] == 1
        assert resolved["svg"] is False
        assert resolved["out"] == "bands"
        assert resolved["lattice"]["l_max"] == 12

    def test_sweep_requires_positive_rates(self):
        doc = {
            "kind": "sweep",
            "lattice": {"v_real": 0.2, "v_imag": 0.0},
            "sweep": {"rate_min": -0.1, "rate_max": 0.3, "count": 5,
                      "q_start": 0.0, "q_stop": 1.8},
        }
        with pytest.raises(ConfigError):
            parse_config(doc)

    def test_evolve_rejects_zero_rate(self):
        doc = {
            "kind": "evolve",
            "lattice": {"v_real": 0.2, "v_imag": 0.0},
            "drive": {"rate": 0.0, "q_start": 0.0, "q_stop": 1.0},
        }
        with pytest.raises(ConfigError):
            parse_config(doc)


class TestResultTable:
    def test_csv_round_trip(self, tmp_path):
        table = ResultTable(
            ["a", "b"], [(1.5, 2), (0.25, -3)], metadata={"config": {"x": 1}, "warnings": []}
        )
        path = table.write_csv(tmp_path / "t.csv")
        back = load_csv(path)
        assert back.columns == ["a", "b"]
        assert back.rows == [(1.5, 2), (0.25, -3)]
        assert back.metadata == {"config": {"x": 1}, "warnings": []}

    def test_rows_must_be_rectangular(self):
        with pytest.raises(ValueError):
            ResultTable(["a", "b"], [(1,)])


class TestRunners:
    def test_run_bands_gap_oracle(self):
        table = run_bands(parse_config(bands_doc()))
        q = table.column("q")
        band = table.column("band")
        energy = table.column("energy_re")
        gap_at = {}
        for qv in np.unique(q):
            sel = q == qv
            gap_at[qv] = energy[sel & (band == 2)][0] - energy[sel & (band == 1)][0]
        # avoided crossing: minimum gap 2 sqrt(v1^2 - v2^2) at the zone edge
        assert min(gap_at, key=gap_at.get) in (-1.0, 1.0)
        assert gap_at[1.0] == pytest.approx(2 * math.sqrt(0.04 - 0.0225), rel=0.01)
        assert table.metadata["phase"] == "unbroken"

    def test_run_bands_critical_touch(self):
        doc = bands_doc()
        doc["lattice"]["v_imag"] = 0.2
        table = run_bands(parse_config(doc))
        q = table.column("q")
        band = table.column("band")
        energy = table.column("energy_re")
        sel = q == 1.0
        gap = energy[sel & (band == 2)][0] - energy[sel & (band == 1)][0]
        assert abs(gap) < 1e-8

    def test_run_bands_hermitian_gap(self):
        doc = bands_doc()
        doc["lattice"]["v_imag"] = 0.0
        table = run_bands(parse_config(doc))
        q = table.column("q")
        band = table.column("band")
        energy = table.column("energy_re")
        sel = q == 1.0
        gap = energy[sel & (band == 2)][0] - energy[sel & (band == 1)][0]
        assert gap == pytest.approx(0.4, rel=0.01)

    def test_run_evolve_hermitian_conservation(self):
        doc = {
            "kind": "evolve",
            "lattice": {"v_real": 0.2, "v_imag": 0.0},
            "drive": {"rate": 0.03, "q_start": 0.0, "q_stop": 1.8},
        }
        table = run_evolve(parse_config(doc))
        assert np.max(np.abs(table.column("power") - 1.0)) < 1e-6
        assert table.metadata["final_power"] == pytest.approx(1.0, abs=1e-6)

    def test_run_sweep_parallel_deterministic(self):
        doc = {
            "kind": "sweep",
            "lattice": {"v_real": 0.2, "v_imag": 0.15},
            "sweep": {"rate_min": 0.05, "rate_max": 0.3, "count": 3,
                      "q_start": 0.0, "q_stop": 1.8},
            "jobs": 2,
        }
        table = run_sweep(parse_config(doc))
        again = run_sweep(parse_config(doc))
        assert table.rows == again.rows
        assert list(table.column("rate")) == sorted(table.column("rate"))
        assert np.all(table.column("abs_error") <= 0.03)
        # analytic column comes from the closed form
        two_ref = math.exp(-math.pi * (0.16 - 0.09) / (2 * 4 * 0.3))
        assert table.rows[-1][2] == pytest.approx(two_ref, rel=1e-12)

    def test_run_multicross_plateau_metadata(self):
        doc = {
            "kind": "multicross",
            "lattice": {"v_real": 0.2, "v_imag": 0.1},
            "drive": {"rate": 0.1, "q_start": 0.0, "q_stop": 3.9},
        }
        table = run_multicross(parse_config(doc))
        plateaus = {p["crossings"]: p for p in table.metadata["plateaus"]}
        assert set(plateaus) == {0, 1, 2}
        assert plateaus[0]["mean_power"] == pytest.approx(1.0, abs=0.02)
        assert "predicted_power" in plateaus[1]
        assert plateaus[2]["mean_power"] > plateaus[1]["mean_power"]

    def test_run_multicross_needs_two_crossings(self):
        doc = {
            "kind": "multicross",
            "lattice": {"v_real": 0.2, "v_imag": 0.1},
            "drive": {"rate": 0.1, "q_start": 0.0, "q_stop": 1.8},
        }
        with pytest.raises(ConfigError):
            run_multicross(parse_config(doc))

    def test_run_twomode_metadata(self):
        doc = {
            "kind": "twomode",
            "twomode": {"coupling": 0.4, "skew": 0.0, "rate": 0.12},
            "t_max": 80.0,
        }
        table = run_twomode(parse_config(doc))
        assert table.columns == ["t", "a1_sq", "a2_sq", "power"]
        assert table.metadata["analytic"]["transition"] == pytest.approx(
            math.exp(-math.pi * 0.16 / 0.24), rel=1e-12
        )
        rows = np.array(table.rows)
        np.testing.assert_allclose(rows[:, 3], rows[:, 1] + rows[:, 2], atol=1e-12)


class TestCli:
    def test_bands_end_to_end(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(bands_doc()))
        out = tmp_path / "bands_run"
        code = main(["bands", "--config", str(cfg), "--out", str(out), "--svg"])
        assert code == 0
        table = load_csv(out.with_suffix(".csv"))
        assert table.columns == ["q", "band", "energy_re", "energy_im"]
        assert table.metadata["config"]["lattice"]["v_real"] == 0.2
        tree = ET.parse(out.with_suffix(".svg"))
        assert tree.getroot().tag.endswith("svg")

    def test_deterministic_output_bytes(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(bands_doc()))
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["bands", "--config", str(cfg), "--out", str(a)]) == 0
        assert main(["bands", "--config", str(cfg), "--out", str(b)]) == 0
        a_bytes = a.with_suffix(".csv").read_bytes()
        b_bytes = b.with_suffix(".csv").read_bytes()
        # metadata echoes the out prefix; compare data payloads
        assert a_bytes.split(b"\n", 1)[1] == b_bytes.split(b"\n", 1)[1]

    def test_unknown_field_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(bands_doc(bogus=1)))
        assert main(["bands", "--config", str(cfg)]) == 2
        assert "unknown field" in capsys.readouterr().err

    def test_kind_mismatch_exits_2(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(bands_doc()))
        assert main(["evolve", "--config", str(cfg)]) == 2

    def test_missing_config_exits_2(self):
        assert main(["bands", "--config", "no_such_file.json"]) == 2

    def test_accuracy_failure_exits_3(self, tmp_path, capsys):
        doc = {
            "kind": "evolve",
            "lattice": {"v_real": 0.2, "v_imag": 0.1, "l_max": 4},
            "drive": {"rate": 0.3, "q_start": 0.0, "q_stop": 1.8},
            "integrator": {"step": 0.05, "convergence_check": True},
        }
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(doc))
        out = tmp_path / "coarse"
        assert main(["evolve", "--config", str(cfg), "--out", str(out)]) == 3
        assert "accuracy" in capsys.readouterr().err
        # the artifact is still written, with the warning recorded
        table = load_csv(out.with_suffix(".csv"))
        assert table.metadata["warnings"]

    def test_preset_name_resolution(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert main(["bands", "--config", "fig1b", "--out", "f1b"]) == 0
        table = load_csv(tmp_path / "f1b.csv")
        assert table.metadata["config"]["lattice"]["v_imag"] == 0.2


class TestPresets:
    def test_all_presets_parse(self):
        root = resources.files("ptlattice").joinpath("presets")
        names = sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))
        assert len(names) >= 10
        for name in names:
            cfg = load_config(str(root.joinpath(name)))
            assert cfg.kind in ("bands", "evolve", "sweep", "multicross", "twomode")

    def test_expected_presets_exist(self):
        root = resources.files("ptlattice").joinpath("presets")
        have = {p.name for p in root.iterdir()}
        for name in ("fig1a", "fig1b", "fig3", "fig4a", "fig4b", "fig4c",
                     "fig5a", "fig5a_critical", "fig5b", "fig5b_critical", "twomode"):
            assert f"{name}.json" in have
