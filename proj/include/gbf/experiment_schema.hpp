#pragma once

// Generated by scripts/embed_schema.py from configs/schema/experiment.schema.json.

namespace gbf {

inline constexpr const char* kExperimentSchema = R"schema({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "gbf experiment config",
  "type": "object",
  "required": ["dataset", "graph", "gbf", "gamma", "label_counts"],
  "additionalProperties": false,
  "properties": {
    "name": {"type": "string"},
    "description": {"type": "string"},
    "dataset": {
      "oneOf": [
        {
          "type": "object",
          "required": ["generator"],
          "additionalProperties": false,
          "properties": {
            "generator": {"enum": ["two-moon", "slashed-o"]},
            "n_per_class": {"type": "integer", "minimum": 1},
            "noise": {"type": "number", "minimum": 0}
          }
        },
        {
          "type": "object",
          "required": ["csv", "schema"],
          "additionalProperties": false,
          "properties": {
            "csv": {"type": "string", "minLength": 1},
            "schema": {"anyOf": [{"enum": ["wbc", "ionosphere"]}, {"$ref": "#/$defs/csv_schema"}]},
            "scale": {"enum": ["minmax", "none"]}
          }
        }
      ]
    },
    "graph": {
      "oneOf": [
        {
          "type": "object",
          "required": ["type", "radius"],
          "additionalProperties": false,
          "properties": {
            "type": {"const": "epsilon"},
            "radius": {"type": "number", "exclusiveMinimum": 0},
            "kind": {"$ref": "#/$defs/laplacian_kind"}
          }
        },
        {
          "type": "object",
          "required": ["type"],
          "additionalProperties": false,
          "properties": {
            "type": {"const": "complete-similarity"},
            "alpha": {"anyOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "median"}]},
            "alpha_scale": {"type": "number", "exclusiveMinimum": 0},
            "kind": {"$ref": "#/$defs/laplacian_kind"}
          }
        }
      ]
    },
    "gbf": {
      "oneOf": [
        {
          "type": "object",
          "required": ["type", "t"],
          "additionalProperties": false,
          "properties": {"type": {"const": "diffusion"}, "t": {"type": "number", "minimum": 0}}
        },
        {
          "type": "object",
          "required": ["type", "eps", "s"],
          "additionalProperties": false,
          "properties": {
            "type": {"const": "spline"},
            "eps": {"type": "number", "exclusiveMinimum": 0},
            "s": {"type": "number", "exclusiveMinimum": 0}
          }
        },
        {
          "type": "object",
          "required": ["type", "coeffs"],
          "additionalProperties": false,
          "properties": {
            "type": {"const": "poly"},
            "coeffs": {"type": "array", "minItems": 1, "items": {"type": "number"}}
          }
        }
      ]
    },
    "features": {"type": "array", "items": {"$ref": "#/$defs/feature"}},
    "feature_sets": {
      "type": "array",
      "minItems": 1,
      "items": {
        "type": "object",
        "required": ["name", "features"],
        "additionalProperties": false,
        "properties": {
          "name": {"type": "string", "minLength": 1},
          "features": {"type": "array", "items": {"type": "integer", "minimum": 0}, "uniqueItems": true}
        }
      }
    },
    "gamma": {"type": "number", "minimum": 0},
    "interpolate": {"type": "boolean"},
    "label_counts": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
    "labeled_nodes": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 0}, "uniqueItems": true},
    "trials": {"type": "integer", "minimum": 1},
    "seed": {"type": "integer", "minimum": 0},
    "sampling": {"enum": ["stratified", "uniform"]},
    "output": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "table": {"type": "string", "minLength": 1},
        "trials": {"type": "string", "minLength": 1},
        "predictions": {"type": "string", "minLength": 1},
        "diagnostics": {"type": "string", "minLength": 1}
      }
    }
  },
  "$defs": {
    "laplacian_kind": {"enum": ["adjacency", "standard", "normalized"]},
    "feature": {
      "oneOf": [
        {
          "type": "object",
          "required": ["kind", "alpha", "source"],
          "additionalProperties": false,
          "properties": {
            "kind": {"const": "binary"},
            "alpha": {"type": "number", "minimum": -1, "maximum": 1},
            "source": {"type": "string", "minLength": 1}
          }
        },
        {
          "type": "object",
          "required": ["kind", "alpha", "source"],
          "additionalProperties": false,
          "properties": {
            "kind": {"const": "similarity"},
            "alpha": {"type": "number", "exclusiveMinimum": 0},
            "source": {"enum": ["circle-distance", "line-distance", "attributes"]}
          }
        }
      ]
    },
    "csv_schema": {
      "type": "object",
      "required": ["label_column", "positive_label", "negative_label", "feature_columns"],
      "additionalProperties": false,
      "properties": {
        "label_column": {"type": "integer", "minimum": 0},
        "positive_label": {"type": "string"},
        "negative_label": {"type": "string"},
        "missing_marker": {"type": "string"},
        "drop_missing": {"type": "boolean"},
        "feature_columns": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 0}},
        "name_column": {"type": "integer", "minimum": 0}
      }
    }
  }
}
)schema";

}  // namespace gbf
