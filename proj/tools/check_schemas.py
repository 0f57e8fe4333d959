"""Validates every sample config and the report it produces against the shipped schemas."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def main() -> int:
    cli, root = sys.argv[1], pathlib.Path(sys.argv[2])
    config_schema = json.loads((root / "schemas" / "config.schema.json").read_text())
    report_schema = json.loads((root / "schemas" / "report.schema.json").read_text())
    for schema in (config_schema, report_schema):
        jsonschema.Draft202012Validator.check_schema(schema)

    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for sample in sorted((root / "samples").glob("*.json")):
            jsonschema.validate(json.loads(sample.read_text()), config_schema)
            out = pathlib.Path(tmp) / sample.name
            proc = subprocess.run([cli, "--config", str(sample), "--out", str(out), "--quiet"], capture_output=True, text=True)
            if proc.returncode == 2:
                print(f"{sample.name}: rejected: {proc.stderr.strip()}")
                continue
            jsonschema.validate(json.loads(out.read_text()), report_schema)
            status = "ok" if proc.returncode == 0 else f"exit {proc.returncode}"
            failures += proc.returncode != 0
            print(f"{sample.name}: {status}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
