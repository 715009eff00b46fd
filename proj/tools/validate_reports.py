#!/usr/bin/env python3
# Copyright 2026 The qspring Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Runs each JSON-emitting command once and validates it against the schema."""

import argparse
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

RUNS = {
    "ledger": ["check", "--preset", "paper", "--format", "json"],
    "derive": ["derive", "--preset", "paper", "--set", "membrane.reflectivity=0.9"],
    "transfer": ["transfer", "--preset", "paper", "--squeeze-db", "9", "--nbar", "5",
                 "--gamma-over-g", "0.1", "--samples", "41"],
    "adiabatic": ["adiabatic", "--preset", "paper", "--ratios", "5,100", "--samples", "11"],
    "oracle": ["evolve", "--preset", "paper", "--model", "fock-oracle", "--dims", "6,6",
               "--t-final", "0.2", "--samples", "3", "--format", "json"],
    "evolve": ["evolve", "--preset", "paper", "--model", "full", "--samples", "5", "--format", "json"],
    "sweep": ["sweep", "--preset", "paper", "--gammas", "0,0.2", "--squeeze-db", "3",
              "--samples", "41", "--format", "json"],
}


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--schema", required=True)
    a = ap.parse_args()
    schema = json.loads(Path(a.schema).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        model_path = Path(tmp) / "model.json"
        docs = {}
        for name, args in RUNS.items():
            extra = ["--dump-model", str(model_path)] if name == "evolve" else []
            proc = subprocess.run([a.cli, *args, *extra], capture_output=True, text=True)
            if proc.returncode != 0:
                print(f"FAIL {name}: exit {proc.returncode}: {proc.stderr.strip()}")
                failures += 1
                continue
            docs[name] = json.loads(proc.stdout)
        if model_path.exists():
            docs["model"] = json.loads(model_path.read_text())
        for name, doc in docs.items():
            errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
            if errors:
                failures += 1
                for e in errors[:5]:
                    print(f"FAIL {name}: /{'/'.join(map(str, e.path))}: {e.message}")
            else:
                print(f"ok   {name} ({doc['kind']})")
    broken = {"kind": "ledger", "conditions": {}}
    if validator.is_valid(broken):
        print("FAIL schema accepts an incomplete ledger")
        failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
