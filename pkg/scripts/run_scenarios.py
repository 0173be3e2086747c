"""Run every scenario under scenarios/ and summarize exit codes.

Usage: python3 scripts/run_scenarios.py [--jobs N] [--out DIR]
With --out, each JSON report is written to DIR/<scenario>.json.
"""

import argparse
import json
import pathlib
import tempfile

from tauberlab.cli import run

ROOT = pathlib.Path(__file__).resolve().parents[1]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--jobs", default="1")
    ap.add_argument("--out")
    args = ap.parse_args()
    out_dir = pathlib.Path(args.out or tempfile.mkdtemp(prefix="tauberlab-"))
    out_dir.mkdir(parents=True, exist_ok=True)
    for path in sorted((ROOT / "scenarios").glob("*.json")):
        command = json.loads(path.read_text())["command"].split()
        target = out_dir / path.name
        code = run([*command, str(path), "--jobs", args.jobs, "--out", str(target)])
        report = json.loads(target.read_text())
        cause = report.get("error", {}).get("type", "")
        print(f"{path.stem:28s} {' '.join(command):18s} exit {code}  {cause}")
    print(f"reports in {out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
