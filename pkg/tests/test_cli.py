import json
import subprocess
import sys

import pytest

from cylwave.cli import DEFAULTS, ConfigError, main, parse_config


def read_csv_rows(path):
    return path.read_text().strip().splitlines()


def test_airy_table(tmp_path):
    assert main(["airy-table", "--kmax", "10", "--out", str(tmp_path)]) == 0
    lines = read_csv_rows(tmp_path / "airy_table.csv")
    assert lines[0] == "k,omega_k,ai_prime,f_k"
    assert len(lines) == 11
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["command"] == "airy-table" and man["config"]["sweep"]["kmax"] == 10
    assert set(man["outputs"]) == {"airy_table.csv"}


def test_out_of_domain_value_names_the_field(tmp_path, capsys):
    code = main(["disp-sweep", "--set", "sweep.a=1.5", "--out", str(tmp_path)])
    assert code == 2
    err = capsys.readouterr().err
    assert "sweep.a" in err and "1.5" in err
    assert not (tmp_path / "manifest.json").exists()


def test_unknown_field_is_rejected(tmp_path, capsys):
    assert main(["airy-table", "--set", "sweep.kmx=3", "--out", str(tmp_path)]) == 2
    assert "sweep.kmx" in capsys.readouterr().err
    with pytest.raises(ConfigError) as info:
        parse_config("airy-table", overrides={"colour": 1, "out": "x"})
    assert info.value.field == "colour"


def test_precedence_flags_over_file_over_defaults(tmp_path):
    cfg_file = tmp_path / "c.json"
    cfg_file.write_text(json.dumps({"sweep": {"kmax": 7, "n_t": 4}, "solver": {"T": 0.5}}))
    cfg = parse_config("airy-table", cfg_file, {"sweep.kmax": 9, "out": "o"})
    assert cfg.sweep["kmax"] == 9          # flag wins
    assert cfg.sweep["n_t"] == 4           # file wins over default
    assert cfg.solver["T"] == 0.5
    assert cfg.solver["dt"] == DEFAULTS["solver"]["dt"]


def test_empty_config_gives_defaults(tmp_path, monkeypatch):
    monkeypatch.setenv("CYLWAVE_OUT", str(tmp_path / "env-out"))
    f = tmp_path / "empty.json"
    f.write_text("")
    cfg = parse_config("solve-evolve", f)
    assert cfg.solver == DEFAULTS["solver"]
    assert cfg.out == str(tmp_path / "env-out")


def test_bad_json_and_missing_file(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    with pytest.raises(ConfigError):
        parse_config("airy-table", f)
    with pytest.raises(ConfigError):
        parse_config("airy-table", tmp_path / "nope.json")


def test_resolution_failure_exits_3(tmp_path, capsys):
    code = main(["solve-evolve", "--dt", "0.1", "--T", "0.2", "--out", str(tmp_path)])
    assert code == 3
    assert "resolution" in capsys.readouterr().err


def test_disp_sweep_rows(tmp_path):
    code = main(["disp-sweep", "--set", "sweep.h=[0.0625, 0.03125]",
                 "--set", "sweep.a=[0.1, 0.2, 0.25]", "--n-t", "16",
                 "--set", "cutoff.levels=2", "--out", str(tmp_path)])
    assert code == 0
    lines = read_csv_rows(tmp_path / "disp_sweep.csv")
    assert len(lines) == 1 + 2 * 3 * 16
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["results"]["rows"] == 96
    assert man["results"]["C"] > 0


def _tree(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in root.rglob("*") if p.is_file()}


@pytest.mark.parametrize("argv", [
    ["solve-evolve", "--T", "0.1", "--dt", "0.005", "--set", "solver.save_every=4"],
    ["strichartz-sweep", "--set", "sweep.js=[3, 4]", "--set", "sweep.samples=1"],
])
def test_reruns_are_byte_identical(tmp_path, monkeypatch, argv):
    trees = []
    for run in ("a", "b"):
        d = tmp_path / run
        d.mkdir()
        monkeypatch.chdir(d)
        assert main(argv + ["--out", "out"]) == 0
        trees.append(_tree(d / "out"))
    assert trees[0] == trees[1]
    assert "manifest.json" in trees[0]


def test_threads_do_not_change_results(tmp_path):
    base = ["disp-sweep", "--set", "sweep.h=[0.0625, 0.03125]", "--set", "sweep.a=[0.25]",
            "--n-t", "3", "--set", "cutoff.levels=2"]
    assert main(base + ["--threads", "1", "--out", str(tmp_path / "t1")]) == 0
    assert main(base + ["--threads", "2", "--out", str(tmp_path / "t2")]) == 0
    a = (tmp_path / "t1" / "disp_sweep.csv").read_bytes()
    assert a == (tmp_path / "t2" / "disp_sweep.csv").read_bytes()


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "cylwave", "airy-table", "--kmax", "3",
                          "--out", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert len(read_csv_rows(tmp_path / "airy_table.csv")) == 4
