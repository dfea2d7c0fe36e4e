#!/usr/bin/env python3
"""Regenerate include/gbf/experiment_schema.hpp from configs/schema/experiment.schema.json."""
import pathlib

root = pathlib.Path(__file__).resolve().parent.parent
schema = (root / "configs/schema/experiment.schema.json").read_text()
out = root / "include/gbf/experiment_schema.hpp"
out.write_text(
    "#pragma once\n\n"
    "// Generated by scripts/embed_schema.py from configs/schema/experiment.schema.json.\n\n"
    "namespace gbf {\n\n"
    'inline constexpr const char* kExperimentSchema = R"schema(' + schema + ')schema";\n\n'
    "}  // namespace gbf\n"
)
print(f"wrote {out.relative_to(root)}")
