import io
import json
import subprocess
import sys
from fractions import Fraction as F

import numpy as np

from repeatergates import cli
from repeatergates.config import parse_config, write_matrix
from repeatergates.groups import controlled_form
from repeatergates.qudit import gen_pauli_x

CNOT = controlled_form([1, 1], [np.eye(2), gen_pauli_x(2)]).unitary()


def run_main(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bounds_table(capsys):
    code, out, _ = run_main(["bounds", "--table"], capsys)
    assert code == 0
    for text in ("3/2", "7/5", "7/6", "CONJECTURED"):
        assert text in out


def test_timeline_config_with_svg(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "p13.cfg"
    cfg.write_text('variant = "1.3"\npositions = [1/6, 1/2, 5/6]\n')
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path / "out"))
    code, out, _ = run_main(["timeline", "--config", str(cfg), "--svg", "p13.svg"], capsys)
    assert code == 0 and "completion 7/6" in out
    svg = (tmp_path / "out" / "p13.svg").read_text()
    assert 'data-time-max="7/6"' in svg


def test_timeline_records(capsys):
    code, out, _ = run_main(["timeline", "--variant", "P3.2", "--positions", "1/5,3/5", "--dims", "2,2",
                             "--group-order", "16", "--format", "records"], capsys)
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    summary = [r for r in records if r["record"] == "timeline"][0]
    assert summary["completion"] == "7/5" and summary["variant"] == "P3.2(1/5,3/5)"
    assert all(r["start"] for r in records if r["record"] == "event")


def test_optimize_exact(capsys):
    code, out, _ = run_main(["optimize", "--family", "P3.2", "--n", "2", "--method", "exact", "--format", "records"],
                            capsys)
    rec = json.loads(out)
    assert code == 0 and rec["positions"] == ["1/5", "3/5"] and rec["time"] == "7/5"


def test_simulate_cnot_fixture(capsys):
    code, out, _ = run_main(["simulate", "--protocol", "P3", "--fixture", "cnot", "--format", "records"], capsys)
    records = [json.loads(line) for line in out.splitlines()]
    assert code == 0
    assert sum(r["record"] == "branch" for r in records) == 256
    assert records[-1]["passed"] is True


def test_simulate_from_files(tmp_path, capsys):
    (tmp_path / "u.txt").write_text(write_matrix((2, 2), CNOT))
    (tmp_path / "psi.txt").write_text(write_matrix((2, 2), np.array([1, 1, 0, 0]) / np.sqrt(2)))
    code, out, _ = run_main(["simulate", "--protocol", "P7", "--unitary", str(tmp_path / "u.txt"),
                             "--input", str(tmp_path / "psi.txt")], capsys)
    assert code == 0 and "PASS P7" in out


def test_simulate_refuses_inadmissible_unitary(tmp_path, capsys):
    t_gate = np.diag([1, np.exp(1j * np.pi / 4), 1, np.exp(1j * np.pi / 4)])
    (tmp_path / "t.txt").write_text(write_matrix((2, 2), t_gate))
    code, _, err = run_main(["simulate", "--protocol", "P7", "--unitary", str(tmp_path / "t.txt")], capsys)
    assert code == 1 and "Clifford" in err


def test_decompose(tmp_path, capsys):
    (tmp_path / "u.txt").write_text(write_matrix((2, 2), CNOT))
    code, out, _ = run_main(["decompose", "--unitary", str(tmp_path / "u.txt"), "--dims", "2,2"], capsys)
    assert code == 0 and out.count("->") == 4


def test_posver_config(tmp_path, capsys):
    cfg = tmp_path / "pv.cfg"
    cfg.write_text("verifiers = [[0, 0], [1, 0]]\nprover = [0.5, 0]\n")
    code, out, _ = run_main(["posver", "--config", str(cfg), "--format", "records"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["secure"] and rec["attacker_best_time"] == "7/6"


def test_misspelled_key_exit_two(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text('variant = "3.2"\npositons = [1/5, 3/5]\n')
    code, _, err = run_main(["timeline", "--config", str(cfg)], capsys)
    assert code == 2 and "line 2" in err and "'positons'" in err


def test_bad_flag_value_exit_two(capsys):
    code, _, err = run_main(["timeline", "--variant", "P3.2", "--positions", "3/5,1/5"], capsys)
    assert code == 2 and "increasing" in err
    code, _, _ = run_main(["frobnicate"], capsys)
    assert code == 2


def test_csv_output(capsys):
    code, out, _ = run_main(["report", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "completion,record,variant"
    assert '7/6,catalog,"P1.3(1/6,1/2,5/6)"' in lines


def test_plain_converts_rationals():
    assert cli.plain({"t": F(7, 6), "n": F(3), "xs": (F(1, 5),)}) == {"t": "7/6", "n": "3", "xs": ["1/5"]}


def test_console_script_runs():
    out = subprocess.run([sys.executable, "-m", "repeatergates.cli", "report"], capture_output=True, text=True)
    assert out.returncode == 0 and "P9.1(1/2)" in out.stdout


def test_run_accepts_parsed_config():
    buf = io.StringIO()
    assert cli.run(parse_config('command = "bounds"\nformat = "records"\n'), stdout=buf) == 0
    assert buf.getvalue().count("\n") == 18
