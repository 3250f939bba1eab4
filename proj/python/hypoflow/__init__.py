"""Python access to the hypoflow experiment runner and a few numerical kernels."""

import json
from pathlib import Path

from ._hypoflow import (
    ConfigError,
    DomainError,
    NumericError,
    __version__,
    coercivity_constant,
    collision_frequency,
    exit_code_for,
    experiments,
    korn_constant,
    korn_gradient_constant,
    poincare_constant,
    run_experiment_json,
    sigma_index_exact,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "NumericError",
    "__version__",
    "coercivity_constant",
    "collision_frequency",
    "experiments",
    "korn_constant",
    "korn_gradient_constant",
    "poincare_constant",
    "run",
    "sigma_index_exact",
]


def _config_text(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    lines = []
    sections = {}
    for key, value in config.items():
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        if "." in key:
            section, name = key.split(".", 1)
            sections.setdefault(section, []).append(f"{name} = {value}")
        else:
            lines.append(f"{key} = {value}")
    for section, entries in sections.items():
        lines.append(f"[{section}]")
        lines.extend(entries)
    return "\n".join(lines) + "\n"


def run(experiment, config=None, out_dir="runs", seed=None):
    """Run an experiment and return its manifest as a dict.

    ``config`` is either configuration text or a mapping; dotted keys such as
    ``"tolerance.slope"`` are placed in the matching section.
    """
    manifest = run_experiment_json(experiment, _config_text(config), str(Path(out_dir)), seed)
    return json.loads(manifest)
