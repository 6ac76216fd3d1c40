"""Run configuration: enumeration caps, LP tolerance, calibrated constants.

Values resolve in order: built-in defaults, then a JSON config file (path
from the COLORCUT_CONFIG environment variable or the --config flag), then
explicit command-line flags.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace

from . import embedding, flows, instances

ENV_CONFIG_PATH = "COLORCUT_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    trials: int = 100
    cap_cmc_vertices: int = instances.DEFAULT_CMC_VERTEX_CAP
    cap_dual_combinations: int = instances.DEFAULT_COMBINATION_CAP
    cap_psi_assignments: int = instances.DEFAULT_ASSIGNMENT_CAP
    cap_csp_assignments: int = instances.DEFAULT_ASSIGNMENT_CAP
    cap_sat_variables: int = instances.DEFAULT_SAT_VARIABLE_CAP
    expander_exhaustive_cap: int = embedding.DEFAULT_EXHAUSTIVE_CAP
    expander_target: float = embedding.DEFAULT_EXPANSION_TARGET
    expander_seed: int = embedding.DEFAULT_EXPANDER_SEED
    expander_retries: int = embedding.DEFAULT_EXPANDER_RETRIES
    lp_tolerance: float = flows.DEFAULT_LP_TOLERANCE
    embed_retries: int = embedding.DEFAULT_EMBED_RETRIES
    c_hat: float = embedding.DEFAULT_C_HAT
    big_c_hat: float = embedding.DEFAULT_BIG_C_HAT

    def __post_init__(self) -> None:
        for name in (
            "trials",
            "cap_cmc_vertices",
            "cap_dual_combinations",
            "cap_psi_assignments",
            "cap_csp_assignments",
            "cap_sat_variables",
            "expander_exhaustive_cap",
            "expander_retries",
            "embed_retries",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.lp_tolerance <= 0.1:
            raise ValueError("lp_tolerance must be in (0, 0.1]")
        if not 0 < self.expander_target <= 1:
            raise ValueError("expander_target must be in (0, 1]")
        if self.c_hat <= 0 or self.big_c_hat <= 0:
            raise ValueError("calibrated constants must be positive")


_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def load_config(path: str | None = None, **overrides) -> RunConfig:
    """Defaults, overlaid with the JSON file (explicit path wins over the
    environment variable), overlaid with keyword overrides (None skipped)."""
    cfg = RunConfig()
    file_path = path or os.environ.get(ENV_CONFIG_PATH)
    if file_path:
        with open(file_path, encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - _FIELD_NAMES
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(cfg, **data)
    live = {k: v for k, v in overrides.items() if v is not None}
    unknown = set(live) - _FIELD_NAMES
    if unknown:
        raise ValueError(f"unknown config overrides: {sorted(unknown)}")
    if live:
        cfg = replace(cfg, **live)
    return cfg


__all__ = ["ENV_CONFIG_PATH", "RunConfig", "load_config"]
