"""Checks CLI ontology output against docs/ontology.schema.json."""

import json
import subprocess
import sys

import jsonschema


def main() -> int:
    cli, root = sys.argv[1], sys.argv[2]
    with open(f"{root}/docs/ontology.schema.json", encoding="utf-8") as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    out = subprocess.run(
        [cli, "ontology", f"{root}/models/service_queue.usp", "--format", "json"],
        check=True, capture_output=True, text=True,
    ).stdout
    doc = json.loads(out)
    jsonschema.validate(doc, schema, cls=jsonschema.Draft202012Validator)
    jsonschema.validate({"frames": [], "relations": []}, schema, cls=jsonschema.Draft202012Validator)
    frames = {f["name"]: f["concept"] for f in doc["frames"]}
    assert len(frames) == 5, frames
    print(f"schema ok: {len(doc['frames'])} frames, {len(doc['relations'])} relations")
    return 0


if __name__ == "__main__":
    sys.exit(main())
