#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Experiment config service - YAML loading, bundled-config lookup and validation.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import ValidationError

from ..core.errors import ConfigError
from ..domain.schemas.config import ExperimentConfig

logger = logging.getLogger(__name__)

BUNDLED_DIR = Path(__file__).parent.parent / "domain" / "experiments"


def list_bundled() -> List[str]:
    """Names of the experiment configs shipped with the package."""
    return sorted(p.stem for p in BUNDLED_DIR.glob("*.yaml"))


def resolve_config_path(ref: Union[str, Path]) -> Path:
    path = Path(ref)
    if path.is_file():
        return path
    bundled = BUNDLED_DIR / f"{path.stem if path.suffix in ('.yaml', '.yml') else ref}.yaml"
    if bundled.is_file():
        return bundled
    raise ConfigError(
        f"config '{ref}' is neither a file nor a bundled config ({', '.join(list_bundled())})",
        source=str(ref),
    )


def _load_yaml(path: Path) -> Dict[str, Any]:
    try:
        with path.open("r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}", source=str(path), original_error=e)
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {path}: {e}", source=str(path), original_error=e)
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping at top level", source=str(path))
    return data


def _format_validation(e: ValidationError) -> str:
    parts = []
    for err in e.errors():
        loc = ".".join(str(x) for x in err.get("loc", ())) or "<root>"
        parts.append(f"{loc}: {err.get('msg')}")
    return "; ".join(parts)


def parse_config(data: Dict[str, Any], source: str = "<dict>") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid config {source}: {_format_validation(e)}", source=source, original_error=e)


def load_config(ref: Union[str, Path]) -> ExperimentConfig:
    path = resolve_config_path(ref)
    cfg = parse_config(_load_yaml(path), source=str(path))
    logger.info(f"loaded config '{cfg.name}' from {path}")
    return cfg


def apply_overrides(
    cfg: ExperimentConfig,
    runs: Optional[int] = None,
    seed: Optional[int] = None,
    out: Optional[str] = None,
    render: Optional[bool] = None,
) -> ExperimentConfig:
    """CLI 覆盖项；重新校验整个配置。"""
    data = cfg.model_dump(mode="json")
    if runs is not None:
        data["runs"] = runs
    if seed is not None:
        data["master_seed"] = seed
    if out is not None:
        data.setdefault("outputs", {})["dir"] = out
    if render is not None:
        data.setdefault("outputs", {})["render"] = render
    return parse_config(data, source=f"{cfg.name} (with overrides)")


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.model_dump(mode="json"), sort_keys=False, allow_unicode=True)
