"""JSON schema for run configurations (``rydress schema`` prints it)."""

SCHEMA_VERSION = "1"

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}
_numlist = {"type": "array", "items": _num}
_poslist = {"type": "array", "items": _pos}
_branch = {"enum": ["-", "+"]}
_family = {"enum": ["one-photon", "two-photon"]}
_linspace = {
    "type": "object",
    "additionalProperties": False,
    "required": ["start", "stop", "num"],
    "properties": {"start": _num, "stop": _num, "num": {"type": "integer", "minimum": 0}},
}
_params = {"type": "object", "additionalProperties": _num}
_two_photon = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "gamma_r_per_omega": _nonneg,
        "gamma_a_per_gamma_r": _nonneg,
        "shift_convention": {"enum": ["physical", "as-printed"]},
        "n_sigma": _pos,
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "rydress run configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["subcommand"],
    "properties": {
        "subcommand": {"enum": ["spectrum", "ramp", "gate", "optimize", "sweep", "forces"]},
        "tol": _pos,
        "n_samples": {"type": "integer", "minimum": 5},
        "plots": {"type": "boolean"},
        "spectrum": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"ratios": _poslist, "delta_over_omega": _linspace,
                           "branch": _branch},
        },
        "ramp": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "preset": {"enum": ["strong-blockade", "strong-blockade-two-photon"]},
                "family": _family,
                "params": _params,
                "blockade_ratio": _pos,
                "gamma_r": _nonneg,
                "two_photon": _two_photon,
            },
        },
        "optimize": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "family": _family,
                "free": {"type": "array", "items": {"type": "string"}},
                "fixed": _params,
                "bounds": {"type": "object",
                           "additionalProperties": {"type": "array", "items": _num,
                                                    "minItems": 2, "maxItems": 2}},
                "blockade_ratio": _pos,
                "gamma_r": _nonneg,
                "two_photon": _two_photon,
                "objective": {"enum": ["fidelity", "t_r"]},
                "fidelity_target": {"type": "number", "minimum": 0, "maximum": 1},
                "rr_cap": {"type": ["number", "null"], "minimum": 0},
                "antiblockade_margin": _nonneg,
                "budget": {"type": "integer", "minimum": 50},
                "seeds": {"type": "array", "items": _params},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["landscape", "t_r"]},
                "gamma_a_ratios": {"type": "array", "items": _nonneg},
                "powers": _poslist,
                "shape": _params,
                "x_bounds": {"type": "array", "items": _pos, "minItems": 2, "maxItems": 2},
                "ratios": _poslist,
                "families": {"type": "array", "items": _family},
                "budget": {"type": "integer", "minimum": 1},
                "blockade_ratio": _pos,
                "rr_cap": {"type": ["number", "null"], "minimum": 0},
                "antiblockade_margin": _nonneg,
                "fidelity_target": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
        "forces": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"r_over_rb": _linspace, "omega_eff": _pos, "delta_eff": _num,
                           "branch": _branch},
        },
    },
}
