#!/usr/bin/env python3
"""Rebuild the checked-in fixtures and golden images.

Fixtures are real artifacts produced by the simulation CLI from the
configs in tests/fixtures/configs.  Goldens are the five spec files in
tests/specs rendered to PNG from those fixtures; tests byte-compare
against them, so rerun this script and commit the results after any
intentional style or schema change.  The horizon fixture runs a reduced
sweep (about three minutes); skip it with --skip-horizon when only the
cheap fixtures changed."""

import argparse
import dataclasses
import json
import shutil
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
FIG_ROOT = HERE.parent
FIXTURES = FIG_ROOT / "tests" / "fixtures"
SPECS = FIG_ROOT / "tests" / "specs"
GOLDEN = FIG_ROOT / "tests" / "golden"
PKG_ROOT = FIG_ROOT.parent

RUNS = (
    ("run-quantum", "ridge_sweep.yaml", "ridge"),
    ("run-quantum", "cat_snapshot.yaml", "cat"),
    ("run-classical", "ks_classical.yaml", "classical"),
    ("run-observer", "observer_d1.yaml", "observer/d1"),
    ("run-observer", "observer_d2.yaml", "observer/d2"),
    ("run-observer", "observer_d3.yaml", "observer/d3"),
    ("run-observer", "observer_d4.yaml", "observer/d4"),
    ("run-observer", "observer_sample.yaml", "observer/sample"),
    ("run-timescales", "timescales_all.yaml", "timescales"),
)


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--skip-horizon", action="store_true")
    parser.add_argument("--skip-golden", action="store_true")
    parser.add_argument(
        "--only-golden", action="store_true", help="re-render goldens from existing fixtures"
    )
    return parser.parse_args()


def run_cli(command, config_name, out_rel):
    out = FIXTURES / out_rel
    if out.exists():
        shutil.rmtree(out)
    subprocess.run(
        [
            sys.executable,
            "-m",
            "decolab.cli",
            command,
            "--config",
            str(FIXTURES / "configs" / config_name),
            "--out",
            str(out),
        ],
        check=True,
    )
    print(f"fixture {out_rel}: ok")


def run_horizon():
    out = FIXTURES / "horizon"
    if out.exists():
        shutil.rmtree(out)
    subprocess.run(
        [
            sys.executable,
            str(PKG_ROOT / "scripts" / "horizon_sweep.py"),
            "--decades",
            "1.0",
            "--t-end",
            "10.0",
            "--out",
            str(out),
        ],
        check=True,
    )
    print("fixture horizon: ok")


def render_goldens():
    import matplotlib
    from matplotlib import ft2font

    from decofig import load_spec, render

    GOLDEN.mkdir(parents=True, exist_ok=True)
    for spec_file in sorted(SPECS.glob("*.json")):
        spec = load_spec(spec_file)
        spec = dataclasses.replace(
            spec, format="png", out=str(GOLDEN / f"{spec_file.stem}.png")
        )
        result = render(spec, base_dir=FIXTURES)
        print(f"golden {result.path.name}: ok")
    env = {
        "matplotlib": matplotlib.__version__,
        "freetype": ft2font.__freetype_version__,
    }
    (GOLDEN / "env.json").write_text(json.dumps(env, sort_keys=True, indent=2) + "\n")


def main():
    args = parse_args()
    if not args.only_golden:
        for command, config_name, out_rel in RUNS:
            run_cli(command, config_name, out_rel)
        if not args.skip_horizon:
            run_horizon()
    if not args.skip_golden:
        render_goldens()


if __name__ == "__main__":
    main()
