import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from fission_lab import cli, fission_trees

ROOT = Path(__file__).resolve().parents[1]
JOBS = ROOT / "jobs"
SCHEMAS = {p.name.split(".")[0]: json.loads(p.read_text()) for p in (ROOT / "schema").glob("*.schema.json")}

BC_JOB = """\
name: bc
case: BC
commands: tree factorize weyl verify
entry: 1 | z^-1 + z^(-1/2)
entry: 1 | z^-1 + 2*z^(-1/2)
"""


def write(tmp_path, text, name="job.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def run(tmp_path, capsys, *argv):
    code = cli.main([*argv, "--out", str(tmp_path / "out")])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def validate(kind, path):
    jsonschema.validate(json.loads(path.read_text()), SCHEMAS[kind])


class TestParsing:
    def test_full_job(self):
        job = cli.parse_job(BC_JOB + "cutoff: 3/2\nbudget: 100\n")
        assert job.case == "BC" and len(job.entries) == 2
        assert job.commands == ["tree", "factorize", "weyl", "verify"]
        assert str(job.cutoff) == "3/2" and job.budget == 100

    def test_signs_and_comments(self):
        job = cli.parse_job("case: D  # comment\nentry: 1 | z^(-1/2) | -1\nentry: 1 | 0 | -1\n")
        assert [e.sign for e in job.entries] == [-1, -1]

    @pytest.mark.parametrize(
        "text",
        [
            "case: E\n",
            "nonsense\n",
            "colour: blue\n",
            "commands: tree paint\n",
            "entry: 1\n",
            "entry: 0 | z^-1\n",
            "entry: 1 | z^-1.5\n",
            "entry: 1 | z^-1 | 2\n",
            "cutoff: -1\n",
            "grid: D 4-4 sideways\n",
            "grid: A 3 twisted\n",
            "name: a/b\n",
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(cli.JobError):
            cli.parse_job(text)


class TestExitCodes:
    def test_empty_command_list(self, tmp_path, capsys):
        job = write(tmp_path, "case: BC\nentry: 1 | z^-1\n")
        code, _, err = run(tmp_path, capsys, "run", "--job", str(job))
        assert code == 2
        assert json.loads(err) == {"error": "parse", "exitCode": 2, "message": "empty command list"}

    def test_parse_error(self, tmp_path, capsys):
        job = write(tmp_path, "case: BC\nentry: 1 | z^^2\ncommands: tree\n")
        code, _, err = run(tmp_path, capsys, "run", "--job", str(job))
        assert code == 2
        validate("diagnostic", write(tmp_path, err, "err.json"))

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(tmp_path, capsys, "tree", "--job", str(tmp_path / "absent"))
        assert code == 2 and json.loads(err)["error"] == "io"

    def test_invalid_pointed_type(self, tmp_path, capsys):
        job = write(tmp_path, "case: D\nentry: 1 | z^(-1/2)\ncommands: tree\n")
        code, _, err = run(tmp_path, capsys, "run", "--job", str(job))
        assert code == 2

    def test_unknown_command(self, tmp_path, capsys):
        job = write(tmp_path, BC_JOB)
        code, _, _ = run(tmp_path, capsys, "paint", "--job", str(job))
        assert code == 2

    def test_budget_exceeded(self, tmp_path, capsys):
        job = write(tmp_path, "case: D\nentry: 1 | z^-1\nentry: 1 | 2*z^-1\nentry: 1 | 3*z^-1\nentry: 1 | 0\n")
        code, _, err = run(tmp_path, capsys, "weyl", "--job", str(job), "--budget", "10")
        assert code == 4
        assert json.loads(err)["error"] == "budget"

    def test_budget_from_environment(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("FISSION_LAB_BUDGET", "10")
        job = write(tmp_path, "case: D\nentry: 1 | z^-1\nentry: 1 | 2*z^-1\nentry: 1 | 3*z^-1\nentry: 1 | 0\n")
        code, _, _ = run(tmp_path, capsys, "verify", "--job", str(job))
        assert code == 4

    def test_invariant_violation(self, tmp_path, capsys, monkeypatch):
        def broken(pt):
            raise fission_trees.InvariantViolation("broken tree")

        monkeypatch.setattr(cli, "build_tree", broken)
        job = write(tmp_path, BC_JOB)
        code, _, err = run(tmp_path, capsys, "tree", "--job", str(job))
        assert code == 3
        assert json.loads(err)["message"] == "broken tree"

    def test_failed_verification(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setattr(cli.weyl_oracle, "marking_independence", lambda U, budget=None: False)
        job = write(tmp_path, BC_JOB)
        code, out, _ = run(tmp_path, capsys, "verify", "--job", str(job))
        assert code == 3
        assert json.loads(out)["results"]["verify"] == "FAIL"


class TestArtifacts:
    def test_bc_example_factorization(self, tmp_path, capsys):
        code, out, _ = run(tmp_path, capsys, "run", "--job", str(JOBS / "bc_example.job"))
        assert code == 0
        data = json.loads((tmp_path / "out" / "bc_example.factorization.json").read_text())
        factors = [(f["variant"], tuple(f["params"])) for f in data["factorization"]["factors"]]
        assert factors == [("Affine", (1,))] + [("Torus", (1,))] * 5 + [("MSharp", (4, 2))]
        assert json.loads(out)["results"]["factorize"] == "C x (C*)^5 x M#(4,2)"

    def test_d_small_verify_passes(self, tmp_path, capsys):
        code, _, _ = run(tmp_path, capsys, "verify", "--job", str(JOBS / "d_small.job"))
        assert code == 0
        data = json.loads((tmp_path / "out" / "d_small.verify.json").read_text())
        assert data["status"] == "PASS"
        assert {c["check"] for c in data["checks"]} >= {"order identity", "dimension identity"}

    def test_all_artifacts_match_schemas(self, tmp_path, capsys):
        job = write(tmp_path, BC_JOB)
        assert run(tmp_path, capsys, "run", "--job", str(job))[0] == 0
        out = tmp_path / "out"
        assert (out / "bc.dot").read_text().startswith("graph bc {")
        for kind, suffix in [("tree", "tree"), ("factorization", "factorization"), ("weyl", "weyl"), ("verify", "verify")]:
            validate(kind, out / f"bc.{suffix}.json")

    def test_springer_table(self, tmp_path, capsys):
        job = write(tmp_path, "name: sp\ncommands: springer-table\ngrid: BC 2-3\ngrid: D 4-4 twisted\n")
        code, out, _ = run(tmp_path, capsys, "run", "--job", str(job))
        assert code == 0
        path = tmp_path / "out" / "sp.springer.json"
        validate("springer-table", path)
        rows = json.loads(path.read_text())["rows"]
        assert len(rows) == 3 + 5 + 7  # r runs over 2..2m
        assert {r["verdicts"].get("clause 4") for r in rows if r["case"] == "D" and r["r"] == 2} == {"FAIL"}

    def test_springer_needs_grid(self, tmp_path, capsys):
        job = write(tmp_path, "commands: springer-table\n")
        assert run(tmp_path, capsys, "run", "--job", str(job))[0] == 2

    def test_cutoff_flag(self, tmp_path, capsys):
        job = write(tmp_path, "name: t\ncase: BC\nentry: 1 | z^-3\n")
        assert run(tmp_path, capsys, "tree", "--job", str(job), "--cutoff", "2")[0] == 0
        data = json.loads((tmp_path / "out" / "t.tree.json").read_text())
        assert data["cutoff"] == "2"


def test_output_is_byte_deterministic(tmp_path):
    outs = []
    for n in range(2):
        d = tmp_path / f"run{n}"
        subprocess.run(
            [sys.executable, "-m", "fission_lab.cli", "run", "--job", str(JOBS / "d_example.job"), "--out", str(d)],
            check=True,
            capture_output=True,
        )
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outs[0] == outs[1]
    assert set(outs[0]) == {"d_example.dot", "d_example.tree.json", "d_example.factorization.json", "d_example.weyl.json"}
