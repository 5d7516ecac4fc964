"""Command line behaviour: subcommand dispatch, printed verdicts, and
exit codes driven end to end through main()."""

import csv
import io
import json

import pytest

from parabound import SpaceTimeField
from parabound.cli import main
from parabound.degiorgi import thm1_exponent
from parabound.iteration2 import thm2_exponent
from parabound.runner import SWEEP_COLUMNS


@pytest.fixture
def scenario_file(tmp_path):
    def write(name="cli_case", **over):
        doc = {"name": name, "p": 2.0, "N": 1, "nx": 41, "nt": 21,
               "dt": 0.01, "extent": 1.5, "rho": 1.0, "theta": 0.08,
               "sigma": 0.5, "amplitude": 2.0}
        doc.update(over)
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(doc))
        return str(path)
    return write


def test_solve_subcommand(tmp_path, scenario_file, capsys):
    code = main(["solve", "--scenario", scenario_file(),
                 "--out", str(tmp_path / "out")])
    assert code == 0
    out = capsys.readouterr().out
    assert "solve: exit 0" in out
    field = SpaceTimeField.load(tmp_path / "out" / "cli_case_solution.bin")
    assert field.grid.nx == 41


def test_verify_subcommand_prints_checks(tmp_path, scenario_file, capsys):
    code = main(["verify", "--scenario", scenario_file(),
                 "--out", str(tmp_path / "out")])
    assert code == 0
    out = capsys.readouterr().out
    for check in ("degiorgi", "energy", "thm1", "thm2", "classical"):
        assert f"{check}: ok" in out
    assert (tmp_path / "out" / "cli_case_summary.json").exists()


def test_verify_failure_exit_code(tmp_path, scenario_file, capsys):
    code = main(["verify",
                 "--scenario", scenario_file(k_override=0.1),
                 "--out", str(tmp_path / "out")])
    assert code == 4
    assert "degiorgi: FAILED" in capsys.readouterr().out


def test_config_error_exit_code(tmp_path, scenario_file, capsys):
    code = main(["verify", "--scenario", scenario_file(nx=40),
                 "--out", str(tmp_path / "out")])
    assert code == 2
    assert "config error" in capsys.readouterr().err


def test_solver_failure_exit_code(tmp_path, scenario_file, capsys):
    path = scenario_file(p=3.0, nt=5, theta=0.02, newton_tol=1e-300)
    code = main(["solve", "--scenario", path,
                 "--out", str(tmp_path / "out")])
    assert code == 3
    assert "did not converge" in capsys.readouterr().err


def test_sweep_subcommand_default_axis(tmp_path, scenario_file, capsys):
    path = scenario_file(sweep={"p": [1.9, 2.0, 2.1]})
    code = main(["sweep", "--scenario", path,
                 "--out", str(tmp_path / "out"), "--jobs", "2"])
    assert code == 0
    assert (tmp_path / "out" / "cli_case_sweep_p.csv").exists()
    assert "sweep: exit 0" in capsys.readouterr().out


def test_sweep_missing_axis_is_config_error(tmp_path, scenario_file,
                                            capsys):
    code = main(["sweep", "sigma", "--scenario", scenario_file(),
                 "--out", str(tmp_path / "out")])
    assert code == 2
    assert "config error" in capsys.readouterr().err


def write_sweep_csv(path, break_it=False):
    rows = []
    for p in (1.90, 1.95, 1.99, 2.00, 2.01, 2.05, 2.10):
        deg = 1.0 / (p - 2.0) if p > 2 else ""
        sing = 1.0 / (2.0 - p) if p < 2 else ""
        const = 0.05 if not break_it else (0.5 if p == 2.0 else 0.05)
        rows.append([p, 1, thm1_exponent(p, 1), thm2_exponent(p, 1),
                     deg, sing, 1.0, 0.5, 41, 1.0, const, 3e-4,
                     1.0, 1.0, 0.5, 0.5])
    buf = io.StringIO()
    buf.write("# scenario=syn\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    writer.writerows(rows)
    path.write_text(buf.getvalue())


def test_report_pass(tmp_path, capsys):
    path = tmp_path / "syn_sweep_p.csv"
    write_sweep_csv(path)
    code = main(["report", "--scenario", str(path)])
    assert code == 0
    assert capsys.readouterr().out.startswith("stability: PASS")


def test_report_fail(tmp_path, capsys):
    path = tmp_path / "syn_sweep_p.csv"
    write_sweep_csv(path, break_it=True)
    code = main(["report", "--scenario", str(path)])
    assert code == 4
    out = capsys.readouterr().out
    assert out.startswith("stability: FAIL")
    assert "thm1_const" in out


def test_report_insufficient_data(tmp_path, capsys):
    path = tmp_path / "short.csv"
    path.write_text("p,deg_exp\n1.9,\n2.1,0.5\n")
    code = main(["report", "--scenario", str(path)])
    assert code == 2
    assert "insufficient data" in capsys.readouterr().err
