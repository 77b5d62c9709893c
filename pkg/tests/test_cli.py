import os
import subprocess
import sys

import pytest

CORPUS = os.path.join(os.path.dirname(__file__), "..", "corpus")


def run_cli(*args, **kw):
    return subprocess.run(
        [sys.executable, "-m", "molrew.cli", *args],
        capture_output=True, text=True, **kw,
    )


def test_validate_clean_corpus_file():
    out = run_cli("validate", os.path.join(CORPUS, "S.mol"))
    assert out.returncode == 0
    assert out.stdout.startswith("ok:")


def test_validate_broken_file(tmp_path):
    bad = tmp_path / "bad.mol"
    bad.write_text("T x\nFROUT x\n")
    out = run_cli("validate", str(bad))
    assert out.returncode == 1


def test_validate_usage_error():
    out = run_cli("validate")
    assert out.returncode == 2


def test_translate_identity():
    out = run_cli("translate", r"\x.x")
    assert out.returncode == 0
    assert out.stdout == "L e1 e1 e2\n"


def test_translate_bad_term():
    out = run_cli("translate", r"\x")
    assert out.returncode == 1
    assert "error:" in out.stderr


def test_reduce_lambda_skk():
    out = run_cli("reduce", "--lambda", "S K K", "--max-cycles", "50")
    assert out.returncode == 0
    assert "normal-form" in out.stderr
    assert out.stdout.count("\n") == 2  # one L node plus its FROUT


def test_reduce_omega_max_cycles():
    out = run_cli(
        "reduce", "--lambda", r"(\x.x x)(\x.x x)", "--max-cycles", "50",
        "--chemistry", "chemlambda-v2", "--strategy", "deterministic-greedy",
        "--seed", "1",
    )
    assert out.returncode == 0
    assert "max-cycles" in out.stderr


def test_reduce_corpus_file():
    out = run_cli("reduce", os.path.join(CORPUS, "OMEGA.mol"), "--max-cycles", "20")
    assert out.returncode == 0


def test_reduce_byte_identical_across_runs():
    args = ("reduce", "--lambda", "W (S K K)", "--strategy", "weighted-random",
            "--seed", "99", "--max-cycles", "60")
    a, b = run_cli(*args), run_cli(*args)
    assert a.stdout == b.stdout and a.stderr == b.stderr


def test_trace_replay_byte_identical(tmp_path):
    args = ("trace", "--lambda", "OMEGA", "--max-cycles", "30",
            "--strategy", "weighted-random", "--seed", "5")
    a, b = run_cli(*args), run_cli(*args)
    assert a.returncode == 0
    assert a.stdout == b.stdout
    assert "molrew-trace v1" in a.stdout
    assert "terminal: max-cycles" in a.stdout


def test_trace_report_dir_with_figures(tmp_path):
    outdir = tmp_path / "report"
    out = run_cli(
        "trace", "--lambda", "ADD C2 C3", "--max-cycles", "40",
        "--report-dir", str(outdir), "--figures",
    )
    assert out.returncode == 0
    names = sorted(os.listdir(outdir))
    assert names == ["node_counts.png", "rule_usage.png", "stats.csv", "trace.txt"]
    stats = (outdir / "stats.csv").read_text().splitlines()
    assert stats[0].startswith("cycle,")
    assert len(stats) > 1


def test_quine_check_negative_on_skk():
    out = run_cli("quine-check", "--lambda", "S K K", "--horizon", "30")
    assert out.returncode == 1
    assert "not detected" in out.stdout


def test_conflicts_lists_shared_node(tmp_path):
    mol = tmp_path / "conflict.mol"
    mol.write_text("L a b x\nA x c d\nFOE d e f\n")
    out = run_cli("conflicts", str(mol))
    assert out.returncode == 0
    assert "matches: 2" in out.stdout
    assert "conflicts: 1" in out.stdout
    assert "share node" in out.stdout


def test_translate_chem_roundtrip(tmp_path):
    src = tmp_path / "ic.mol"
    src.write_text("GAMMA a b c\nDELTA c d e\n")
    out = run_cli("translate-chem", str(src), "--from", "ic", "--to", "diric")
    assert out.returncode == 0
    assert out.stdout == "L a b c\nFOE c d e\n"


def test_chem_info_reports_shuffle():
    out = run_cli("chem-info", "--chemistry", "chemlambda-v2")
    assert out.returncode == 0
    assert "shuffle composition: ok" in out.stdout


def test_corpus_files_match_library(chem):
    from molrew.corpus import golden_molecules
    from molrew.graph import parse_mol, iso_check

    for name, expected in golden_molecules(chem).items():
        with open(os.path.join(CORPUS, f"{name}.mol")) as fh:
            on_disk = parse_mol(fh.read(), chem.kinds)
        assert iso_check(on_disk, expected), name


def test_serve_subcommand_starts_and_announces():
    proc = subprocess.Popen(
        [sys.executable, "-m", "molrew.cli", "serve", "--port", "8977"],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True,
    )
    try:
        line = proc.stdout.readline()
        assert "session server" in line and "8977" in line
    finally:
        proc.kill()
        proc.wait()
