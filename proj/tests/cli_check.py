#!/usr/bin/env python3
"""Runs the pshdf CLI and checks exit code, JSON schema and golden output."""
import argparse
import json
import pathlib
import subprocess
import sys

import jsonschema


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--expect-exit", type=int, required=True)
    ap.add_argument("--schema")
    ap.add_argument("--golden")
    ap.add_argument("--expect-status")
    ap.add_argument("--expect-stdout", help="substring required in stdout")
    ap.add_argument("args", nargs=argparse.REMAINDER)
    a = ap.parse_args()
    argv = [x for x in a.args if x != "--"]

    proc = subprocess.run([a.cli, *argv], capture_output=True, text=True)
    ok = True
    if proc.returncode != a.expect_exit:
        print(f"exit code {proc.returncode}, expected {a.expect_exit}\nstderr: {proc.stderr}")
        ok = False
    if a.expect_stdout and a.expect_stdout not in proc.stdout:
        print(f"stdout lacks {a.expect_stdout!r}:\n{proc.stdout}")
        ok = False
    if a.schema or a.golden or a.expect_status:
        report = json.loads(proc.stdout)
        if a.schema:
            schema = json.loads(pathlib.Path(a.schema).read_text())
            errors = list(jsonschema.Draft202012Validator(schema).iter_errors(report))
            for e in errors[:5]:
                print(f"schema: {list(e.path)}: {e.message}")
            ok = ok and not errors
        if a.expect_status and report.get("status") != a.expect_status:
            print(f"status {report.get('status')}, expected {a.expect_status}")
            ok = False
    if a.golden:
        expected = pathlib.Path(a.golden).read_text()
        if proc.stdout != expected:
            print(f"output differs from {a.golden}")
            ok = False
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
