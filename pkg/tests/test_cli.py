import pytest

from sfor_wave import cli

CFG = """example=EX1
alpha=1.5
scheme=Z_FORM
formula=L1
r_mode=OPTIMAL
N_list=4,8
N_ref=16
M_elems=10
"""


def test_run_csv(tmp_path, capsys):
    p = tmp_path / "a.cfg"
    p.write_text(CFG)
    assert cli.main(["run", "--config", str(p)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "N,error,order"
    assert len(out) == 3 and out[1].startswith("4,") and out[1].endswith(",")


def test_run_markdown_to_file(tmp_path):
    p = tmp_path / "a.cfg"
    p.write_text(CFG)
    out = tmp_path / "t.md"
    assert cli.main(["run", "--config", str(p), "--format", "markdown", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("| N |") and "Optimal order" in text


def test_validation_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text(CFG.replace("alpha=1.5", "alpha=3"))
    assert cli.main(["run", "--config", str(p)]) == cli.EXIT_VALIDATION
    assert "alpha" in capsys.readouterr().err
    assert cli.main(["run", "--config", str(tmp_path / "missing.cfg")]) == cli.EXIT_VALIDATION
    assert cli.main(["check-kernels", "--beta", "0.5", "--N", "8", "--r", "0.5"]) == cli.EXIT_VALIDATION


def test_numerical_exit_code(tmp_path, monkeypatch, capsys):
    from sfor_wave import harness
    from sfor_wave.errors import StepError

    def boom(cfg):
        raise StepError("forced", 3)

    monkeypatch.setattr(harness, "run_sweep", boom)
    p = tmp_path / "a.cfg"
    p.write_text(CFG)
    assert cli.main(["run", "--config", str(p)]) == cli.EXIT_NUMERICAL
    assert "level 3" in capsys.readouterr().err


def test_check_kernels_report(capsys):
    assert cli.main(["check-kernels", "--beta", "0.625", "--N", "32", "--r", "3"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") >= 10 and "OVERALL PASS" in out


def test_table_command(monkeypatch, capsys):
    from sfor_wave import harness

    small = harness.TableSpec(
        4, "small", (("a", harness.ExperimentConfig("EX1", 1.5, "Z_FORM", "ALIKHANOV", "OPTIMAL", (4, 8), 16, 10)),)
    )
    monkeypatch.setitem(harness.TABLES, 4, small)
    assert cli.main(["table", "4"]) == 0
    assert "**Table 4: small**" in capsys.readouterr().out


def test_table_rejects_unknown_number():
    with pytest.raises(SystemExit):
        cli.main(["table", "9"])
