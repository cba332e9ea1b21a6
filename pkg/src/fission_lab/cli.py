"""Command-line driver: job files in, JSON and DOT artifacts out.

Job file format (one directive per line, ``#`` starts a comment)::

    name: bc_example
    case: BC
    commands: tree factorize weyl verify
    cutoff: 3
    budget: 46080
    entry: 1 | z^-1 + z^(-1/2) + z^(-1/3)
    entry: 1 | z^(-1/2) + z^(-1/6)
    entry: 1 | 0 | -1          (optional sign, type D only)
    grid: D 4-4 twisted        (springer-table only: case, rank range, cosets)
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .budget import BudgetExceeded, default_budget
from .config_spaces import factorize
from .fission_trees import (
    Entry,
    FissionError,
    InvariantViolation,
    PointedType,
    build_tree,
    realize,
    sample_realization,
    tree_iso,
)
from .level_data import admissible_exponents
from .puiseux_core import FactorSyntaxError, format_exponent, parse_factor
from .tree_weyl import tree_weyl_group
from . import weyl_oracle

SCHEMA_VERSION = "1.0"
COMMANDS = ("tree", "factorize", "weyl", "verify", "springer-table")
EXIT_OK, EXIT_PARSE, EXIT_INVARIANT, EXIT_BUDGET = 0, 2, 3, 4


class JobError(ValueError):
    pass


@dataclass
class GridSpec:
    case: str
    m_range: tuple[int, int]
    twisted: bool = False


@dataclass
class JobSpec:
    name: str = "job"
    case: Optional[str] = None
    entries: list[Entry] = field(default_factory=list)
    commands: list[str] = field(default_factory=list)
    cutoff: Optional[Fraction] = None
    budget: Optional[int] = None
    grids: list[GridSpec] = field(default_factory=list)

    def pointed_type(self) -> PointedType:
        if self.case is None:
            raise JobError("the job has no 'case' line")
        if not self.entries:
            raise JobError("the job has no 'entry' lines")
        try:
            return PointedType(self.case, tuple(self.entries))
        except FissionError as exc:
            raise JobError(str(exc)) from exc


def _parse_fraction(text: str, what: str) -> Fraction:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise JobError(f"bad {what} {text!r}") from exc
    if value <= 0:
        raise JobError(f"{what} must be positive")
    return value


def _parse_int(text: str, what: str) -> int:
    try:
        value = int(text.strip())
    except ValueError as exc:
        raise JobError(f"bad {what} {text!r}") from exc
    if value <= 0:
        raise JobError(f"{what} must be positive")
    return value


def _parse_entry(text: str, lineno: int) -> Entry:
    parts = [p.strip() for p in text.split("|")]
    if len(parts) not in (2, 3):
        raise JobError(f"line {lineno}: an entry is 'mult | factor [| sign]'")
    mult = _parse_int(parts[0], f"multiplicity on line {lineno}")
    try:
        q = parse_factor(parts[1])
    except FactorSyntaxError as exc:
        raise JobError(f"line {lineno}: {exc}") from exc
    sign = 1
    if len(parts) == 3:
        if parts[2] not in ("1", "+1", "-1"):
            raise JobError(f"line {lineno}: sign must be +1 or -1")
        sign = -1 if parts[2] == "-1" else 1
    try:
        return Entry(mult, q, sign)
    except FissionError as exc:
        raise JobError(f"line {lineno}: {exc}") from exc


def _parse_grid(text: str, lineno: int) -> GridSpec:
    parts = text.split()
    if len(parts) not in (2, 3) or parts[0] not in ("A", "BC", "D"):
        raise JobError(f"line {lineno}: a grid is '<case> <m0>-<m1> [twisted]'")
    lo, _, hi = parts[1].partition("-")
    m0 = _parse_int(lo, "rank")
    m1 = _parse_int(hi or lo, "rank")
    twisted = False
    if len(parts) == 3:
        if parts[2] != "twisted" or parts[0] != "D":
            raise JobError(f"line {lineno}: only type D grids take 'twisted'")
        twisted = True
    return GridSpec(parts[0], (m0, m1), twisted)


def parse_job(text: str) -> JobSpec:
    job = JobSpec()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise JobError(f"line {lineno}: expected 'key: value'")
        key, value = key.strip().lower(), value.strip()
        if key == "name":
            if not value or any(c in value for c in "/\\"):
                raise JobError(f"line {lineno}: bad job name")
            job.name = value
        elif key == "case":
            if value not in ("A", "BC", "D"):
                raise JobError(f"line {lineno}: case must be A, BC or D")
            job.case = value
        elif key == "commands":
            cmds = value.replace(",", " ").split()
            bad = [c for c in cmds if c not in COMMANDS]
            if bad:
                raise JobError(f"line {lineno}: unknown commands {bad}")
            job.commands = cmds
        elif key == "cutoff":
            job.cutoff = _parse_fraction(value, "cutoff")
        elif key == "budget":
            job.budget = _parse_int(value, "budget")
        elif key == "entry":
            job.entries.append(_parse_entry(value, lineno))
        elif key == "grid":
            job.grids.append(_parse_grid(value, lineno))
        else:
            raise JobError(f"line {lineno}: unknown key {key!r}")
    return job


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _envelope(kind: str, job: JobSpec, payload: dict) -> dict:
    return {"schemaVersion": SCHEMA_VERSION, "kind": kind, "job": job.name, "version": __version__, **payload}


# commands -----------------------------------------------------------------------


def cmd_tree(job: JobSpec, out: Path) -> dict:
    pt = job.pointed_type()
    T = build_tree(pt)
    cutoff = job.cutoff if job.cutoff is not None else pt.katz_rank
    leaves = []
    for lab in T.labels:
        adm, inc = admissible_exponents(T.leaf_info[lab].datum, cutoff)
        leaves.append(
            {
                "label": lab,
                "admissible": [format_exponent(k) for k in sorted(adm, reverse=True)],
                "inconsequential": [format_exponent(k) for k in sorted(inc, reverse=True)],
            }
        )
    data = _envelope("tree", job, {"tree": T.to_json(), "cutoff": format_exponent(cutoff), "exponents": leaves})
    (out / f"{job.name}.dot").write_text(T.to_dot(job.name))
    (out / f"{job.name}.tree.json").write_text(dumps(data))
    return data


def cmd_factorize(job: JobSpec, out: Path) -> dict:
    F = factorize(build_tree(job.pointed_type()))
    data = _envelope("factorization", job, {"factorization": F.to_json()})
    (out / f"{job.name}.factorization.json").write_text(dumps(data))
    return data


def cmd_weyl(job: JobSpec, out: Path) -> dict:
    G = tree_weyl_group(build_tree(job.pointed_type()), budget=_budget(job))
    data = _envelope("weyl", job, {"weyl": G.to_json()})
    (out / f"{job.name}.weyl.json").write_text(dumps(data))
    return data


def _budget(job: JobSpec) -> int:
    return job.budget if job.budget is not None else default_budget()


def verify_checks(pt: PointedType, budget: int) -> list[dict]:
    """Cross-checks between the tree pipeline and the brute-force oracle."""
    T = build_tree(pt)
    F = factorize(T)
    G = tree_weyl_group(T, budget=budget)
    U = weyl_oracle.untwist(pt)
    M = weyl_oracle.monodromy_group(U, budget)
    flats = weyl_oracle.flat_dims(U)
    cover = weyl_oracle.covering_degree(U, budget)
    rebuilt = build_tree(realize(T, sample_realization(T)))
    checks = [
        ("order identity", G.order == M.order, {"tree": G.order, "oracle": M.order}),
        ("covering degree", cover == M.order, {"covering": cover, "oracle": M.order}),
        (
            "dimension identity",
            sum(f.eigen_dim for f in flats) == F.dimension == len(T.admissible()),
            {"flats": sum(f.eigen_dim for f in flats), "factorization": F.dimension, "admissible": len(T.admissible())},
        ),
        ("flats meet their strata", all(f.regular for f in flats), {}),
        ("marking independence", weyl_oracle.marking_independence(U, budget), {}),
        ("realization round trip", tree_iso(T, rebuilt, labelled=True), {}),
    ]
    return [{"check": name, "status": "PASS" if ok else "FAIL", "details": det} for name, ok, det in checks]


def cmd_verify(job: JobSpec, out: Path) -> dict:
    checks = verify_checks(job.pointed_type(), _budget(job))
    data = _envelope("verify", job, {"checks": checks, "status": "PASS" if all(c["status"] == "PASS" for c in checks) else "FAIL"})
    (out / f"{job.name}.verify.json").write_text(dumps(data))
    return data


def cmd_springer(job: JobSpec, out: Path) -> dict:
    if not job.grids:
        raise JobError("springer-table needs at least one 'grid' line")
    rows = []
    for grid in job.grids:
        for m in range(grid.m_range[0], grid.m_range[1] + 1):
            rmax = m if grid.case == "A" else 2 * m
            rmin = 1 if grid.case == "A" else 2
            for r in range(rmin, rmax + 1):
                rep = weyl_oracle.validate_classification(grid.case, m, r, grid.twisted, _budget(job))
                rows.append(rep.to_json())
    data = _envelope("springer-table", job, {"rows": rows})
    (out / f"{job.name}.springer.json").write_text(dumps(data))
    return data


HANDLERS = {
    "tree": cmd_tree,
    "factorize": cmd_factorize,
    "weyl": cmd_weyl,
    "verify": cmd_verify,
    "springer-table": cmd_springer,
}


def _diagnostic(kind: str, message: str, code: int) -> int:
    sys.stderr.write(dumps({"error": kind, "message": message, "exitCode": code}))
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fission-lab", description="Fission trees, configuration spaces and Weyl groups.")
    p.add_argument("command", choices=COMMANDS + ("run",), help="command to run; 'run' uses the job's command list")
    p.add_argument("--job", required=True, help="job file")
    p.add_argument("--cutoff", help="exponent cutoff p/q for admissible-exponent listings")
    p.add_argument("--budget", type=int, help="enumeration cap (overrides the job and FISSION_LAB_BUDGET)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        job = parse_job(Path(args.job).read_text())
        if args.cutoff is not None:
            job.cutoff = _parse_fraction(args.cutoff, "cutoff")
        if args.budget is not None:
            if args.budget <= 0:
                raise JobError("budget must be positive")
            job.budget = args.budget
        commands = job.commands if args.command == "run" else [args.command]
        if not commands:
            raise JobError("empty command list")
        job.budget = _budget(job)
    except OSError as exc:
        return _diagnostic("io", str(exc), EXIT_PARSE)
    except (JobError, ValueError) as exc:
        return _diagnostic("parse", str(exc), EXIT_PARSE)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = {}
    try:
        for cmd in commands:
            results[cmd] = HANDLERS[cmd](job, out)
    except JobError as exc:
        return _diagnostic("parse", str(exc), EXIT_PARSE)
    except BudgetExceeded as exc:
        return _diagnostic("budget", str(exc), EXIT_BUDGET)
    except (InvariantViolation, AssertionError) as exc:
        return _diagnostic("invariant", str(exc), EXIT_INVARIANT)
    except FissionError as exc:
        return _diagnostic("input", str(exc), EXIT_PARSE)
    summary = {cmd: _summary(cmd, data) for cmd, data in results.items()}
    sys.stdout.write(dumps({"job": job.name, "results": summary}))
    failed = any(data.get("status") == "FAIL" for data in results.values())
    return EXIT_INVARIANT if failed else EXIT_OK


def _summary(cmd: str, data: dict):
    if cmd == "tree":
        t = data["tree"]
        return {"admissible": t["admissible"], "mandatory": t["mandatory"], "inconsequential": t["inconsequential"]}
    if cmd == "factorize":
        return data["factorization"]["text"]
    if cmd == "weyl":
        return data["weyl"]["order"]
    if cmd == "verify":
        return data["status"]
    return len(data["rows"])


if __name__ == "__main__":
    sys.exit(main())
