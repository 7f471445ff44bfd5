import json

import pytest

from breatherlab import cli
from breatherlab.cli import ConfigError, ExperimentConfig


def test_config_text_round_trip():
    cfg = ExperimentConfig("evolve", kind="kmb", dt=1e-4, wavenumber=1.6, export=True, seed=3)
    again = ExperimentConfig.from_text(cfg.to_text())
    assert again == cfg


def test_config_defaults_lambda_by_kind():
    assert ExperimentConfig("verify", kind="kmb").lambda0 == 1.25
    assert ExperimentConfig("verify", kind="Akhmediev").tag == "ab_0.6"
    assert ExperimentConfig("verify", kind="constant").tag == "constant"


@pytest.mark.parametrize("text, match", [
    ("command = verify\nbogus = 1\n", "unknown key"),
    ("command = verify\nn = many\n", "bad value"),
    ("command = verify\nseed = none\n", "cannot be none"),
    ("kind = ab\n", "no command"),
    ("command = verify\njust words\n", "key = value"),
])
def test_bad_config_text(text, match):
    with pytest.raises(ConfigError, match=match):
        ExperimentConfig.from_text(text)


def test_comments_and_overrides():
    cfg = ExperimentConfig.from_text("# a run\ncommand = spectrum  # trailing\nkind = ab\n",
                                     lambda0=0.3)
    assert cfg.command == "spectrum" and cfg.lambda0 == 0.3


@pytest.mark.parametrize("argv", [["verify", "--kind", "ab", "--lambda0", "1.0"],
                                  ["verify", "--kind", "kmb", "--lambda0", "0.5"],
                                  ["spectrum", "--kind", "soliton"],
                                  ["evolve", "--kind", "prw"]])
def test_invalid_input_exits_2(argv, tmp_path, capsys):
    assert cli.main(argv + ["--output-dir", str(tmp_path)]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_config_file_and_flag_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("kind = ab\nlambda0 = 0.3\n")
    args = cli.build_parser().parse_args(["verify", "--config", str(conf), "--lambda0", "0.4"])
    cfg = cli.config_from_args(args)
    assert cfg.kind == "ab" and cfg.lambda0 == 0.4


def test_verify_is_deterministic(tmp_path):
    argv = ["verify", "--kind", "ab", "--seed", "7", "--output-dir", str(tmp_path)]
    assert cli.main(argv) == 0
    first = (tmp_path / "ab_0.6_verify.json").read_bytes()
    assert cli.main(argv) == 0
    assert (tmp_path / "ab_0.6_verify.json").read_bytes() == first
    report = json.loads(first)
    assert report["passed"] and report["failures"] == []


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.ENV_OUTPUT_DIR, str(tmp_path / "env"))
    assert cli.main(["verify", "--kind", "kmb"]) == 0
    assert (tmp_path / "env" / "kmb_1.25_verify.json").exists()


def test_spectrum_writes_tables_and_figure(tmp_path):
    assert cli.main(["spectrum", "--kind", "ab", "--n", "32", "--output-dir", str(tmp_path)]) == 0
    for name in ("ab_0.6_spectrum_periodic.csv", "ab_0.6_spectrum_antiperiodic.csv",
                 "ab_0.6_spectrum.svg", "ab_0.6_spectrum.json"):
        assert (tmp_path / name).exists(), name
    header = (tmp_path / "ab_0.6_spectrum_periodic.csv").read_text().splitlines()[0]
    assert header == "re,im,label"


def test_family_export(tmp_path):
    assert cli.main(["family", "--kind", "kmb", "--export", "--output-dir", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "kmb_1.25_family" / "manifest.json").read_text())
    assert {e["label"] for e in manifest["entries"]} == {"w1", "w2", "w3", "w4", "v1", "v2", "v3"}


def test_generate_and_svg(tmp_path):
    assert cli.main(["generate", "--kind", "kmb", "--n", "64", "--output-dir", str(tmp_path)]) == 0
    assert (tmp_path / "kmb_1.25_field.csv").exists()
    assert "<dc:date>" not in (tmp_path / "kmb_1.25_field.svg").read_text()


def test_instability_run(tmp_path):
    argv = ["evolve", "--kind", "constant", "--wavenumber", "1.4142135623730951",
            "--t-end", "20", "--output-dir", str(tmp_path)]
    assert cli.main(argv) == 0
    rate = json.loads((tmp_path / "constant_rate.json").read_text())
    assert rate["passed"]
    assert (tmp_path / "constant_growth.svg").exists()
