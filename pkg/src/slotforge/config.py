"""Layered CLI configuration: flags > environment > TOML file > defaults.

The TOML file has three sections whose keys are exactly the fields of the
corresponding config dataclass:

    [forge]                      # ForgeConfig
    master_seed = 7
    [metrics]                    # MatchConfig
    matching = "containment"
    [adapter]                    # AdapterConfig
    d_llm = 2048

    [[forge.template_banks.with_query]]
    text = "Find slot values for {queried_slots} in the current audio."
    format_directive = "Format the output as JSON."

Environment overrides use SLOTFORGE_<SECTION>_<KEY> (scalars only), e.g.
SLOTFORGE_FORGE_MASTER_SEED=7. Every effective key remembers where its value
came from for --verbose output.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .adapter_sim import AdapterConfig, AdapterError
from .prompt_forge import CASES, ForgeConfig, ForgeError, PromptTemplate, default_template_banks
from .slotmetrics import MatchConfig, MetricsError

ENV_PREFIX = "SLOTFORGE_"


class ConfigError(Exception):
    pass


@dataclass
class CliConfig:
    forge: ForgeConfig
    metrics: MatchConfig
    adapter: AdapterConfig
    provenance: dict[str, str]  # "forge.master_seed" -> flag|env|file|default


_SECTIONS = (
    ("forge", ForgeConfig),
    ("metrics", MatchConfig),
    ("adapter", AdapterConfig),
)


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean from {raw!r}")


def _coerce_env(raw: str, default_value) -> object:
    if isinstance(default_value, bool):
        return _parse_bool(raw)
    if isinstance(default_value, int):
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"cannot parse integer from {raw!r}") from exc
    if isinstance(default_value, str):
        return raw
    raise ConfigError("only scalar keys can be set from the environment")


def _banks_from_file(value) -> dict[str, list[PromptTemplate]]:
    if not isinstance(value, Mapping):
        raise ConfigError("template_banks must be a table of case -> template list")
    banks = default_template_banks()  # cases not mentioned keep the stock bank
    for case, entries in value.items():
        if case not in CASES:
            raise ConfigError(f"unknown template case {case!r}")
        bank = []
        for entry in entries:
            try:
                bank.append(PromptTemplate(case, entry["text"], entry["format_directive"]))
            except (KeyError, TypeError) as exc:
                raise ConfigError(f"template entry under {case!r} needs text and format_directive") from exc
        banks[case] = bank
    return banks


def _from_file(section: str, name: str, value):
    if section == "forge" and name == "template_banks":
        return _banks_from_file(value)
    if section == "forge" and name == "case_weights":
        if not isinstance(value, Mapping):
            raise ConfigError("case_weights must be a table of case -> integer weight")
        return dict(value)
    return value


def load_cli_config(
    path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    flag_overrides: Mapping[str, object] | None = None,
) -> CliConfig:
    import os

    env = os.environ if env is None else env
    flag_overrides = dict(flag_overrides or {})

    file_cfg: dict = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                file_cfg = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc

    built: dict[str, object] = {}
    provenance: dict[str, str] = {}
    for section, cls in _SECTIONS:
        defaults = cls()
        kwargs = {}
        section_cfg = file_cfg.get(section, {})
        if not isinstance(section_cfg, Mapping):
            raise ConfigError(f"[{section}] must be a table")
        for f in fields(cls):
            key = f"{section}.{f.name}"
            env_key = f"{ENV_PREFIX}{section.upper()}_{f.name.upper()}"
            if flag_overrides.get(key) is not None:
                kwargs[f.name] = flag_overrides[key]
                provenance[key] = "flag"
            elif env_key in env:
                kwargs[f.name] = _coerce_env(env[env_key], getattr(defaults, f.name))
                provenance[key] = "env"
            elif f.name in section_cfg:
                kwargs[f.name] = _from_file(section, f.name, section_cfg[f.name])
                provenance[key] = "file"
            else:
                provenance[key] = "default"
        try:
            built[section] = cls(**kwargs)
        except (ForgeError, MetricsError, AdapterError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid [{section}] config: {exc}") from exc

    return CliConfig(
        forge=built["forge"],
        metrics=built["metrics"],
        adapter=built["adapter"],
        provenance=provenance,
    )


def format_effective(config: CliConfig) -> str:
    """One provenance-annotated line per key, for --verbose."""
    lines = []
    for section, obj in (("forge", config.forge), ("metrics", config.metrics), ("adapter", config.adapter)):
        for f in fields(obj):
            key = f"{section}.{f.name}"
            value = getattr(obj, f.name)
            if f.name == "template_banks":
                value = "{" + ", ".join(f"{c}: {len(b)} templates" for c, b in value.items()) + "}"
            lines.append(f"{key} = {value}  ({config.provenance.get(key, 'default')})")
    return "\n".join(lines)
