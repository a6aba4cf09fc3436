import json

import pytest

from specialpoint import cli, density


def run(argv):
    return cli.main(argv)


def test_expsum_defect_table(tmp_path, capsys):
    out = tmp_path / "rep"
    assert run(["expsum", "--luo", "--c-max", "30", "--out", str(out)]) == 0
    csv = (out.with_suffix(".csv")).read_text()
    lines = csv.strip().splitlines()
    assert lines[0].startswith("# specialpoint")
    assert "c,max_defect" in lines
    data = [l for l in lines if not l.startswith("#")][1:]
    assert len(data) == 30
    assert all(float(l.split(",")[1]) <= 1e-7 for l in data)


def test_json_mirrors_csv(tmp_path):
    out = tmp_path / "rep"
    assert run(["mollifier", "--M", "200", "--out", str(out)]) == 0
    payload = json.loads(out.with_suffix(".json").read_text())
    csv_body = [
        l
        for l in out.with_suffix(".csv").read_text().strip().splitlines()
        if not l.startswith("#")
    ]
    assert len(payload["rows"]) == len(csv_body) - 1
    assert payload["rows"][0]["M20_Xi_is_one"] is True
    # coefficient audit table emitted alongside
    assert (tmp_path / "rep.coeffs.tsv").exists()


def test_csv_byte_identical_across_threads(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["expsum", "--c-max", "40", "--threads", "1", "--out", str(a)]) == 0
    assert run(["expsum", "--c-max", "40", "--threads", "8", "--out", str(b)]) == 0
    assert a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()


def test_config_file_merging(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("T = 500\nPi = 25\n# comment line\n")
    assert run(["moments", "--config", str(cfg), "--m", "2"]) == 0
    body = capsys.readouterr().out
    assert "T=500.0" in body
    assert "m=2" in body  # flag wins over the built-in default


def test_config_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("bogus = 1\n")
    assert run(["moments", "--config", str(bad)]) == 2
    bad.write_text("no equals sign\n")
    assert run(["moments", "--config", str(bad)]) == 2
    assert run(["moments", "--config", str(tmp_path / "missing.txt")]) == 2


def test_computation_errors_exit_3(capsys):
    assert run(["moments", "--T", "5"]) == 3
    assert run(["moments", "--T", "1000", "--Pi", "1.2"]) == 3


def test_density_with_dataset(tmp_path, capsys):
    ds = tmp_path / "ds.txt"
    row = density.eisenstein_surrogate(6.0, 31.0)
    density.write_dataset(density.SpectralDataset(rows=[row]), ds)
    # mu = 0.2 -> v = 1, so eigenvalues up to T^1 = 30 suffice
    assert run(["density", "--T", "30", "--mu", "0.2", "--dataset", str(ds)]) == 0
    out = capsys.readouterr().out
    assert "H_quadrature" in out


def test_density_surrogate_seeded(capsys):
    assert run(["density", "--T", "50", "--mu", "0.2", "--seed", "7"]) == 0
    first = capsys.readouterr().out
    assert run(["density", "--T", "50", "--mu", "0.2", "--seed", "7"]) == 0
    second = capsys.readouterr().out
    assert first == second


def test_stdout_json_format(capsys):
    assert run(["expsum", "--c-max", "5", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["subcommand"] == "expsum"
    assert len(payload["rows"]) == 5
