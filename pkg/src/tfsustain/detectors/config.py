"""Detector thresholds and resource-type catalogs.

Every value here is a project default, tunable through a JSON config file.
The oversized-instance catalog lists sizes with 16 or more vCPUs according
to the providers' published size charts; it is data, not detection logic.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

# Attribute names that carry an instance size, per provider resource prefix.
SIZE_ATTRS = ("vm_size", "instance_type", "machine_type")

# Log-group style resources and the attribute holding their retention days.
LOG_GROUP_TYPES: dict[str, str] = {
    "aws_cloudwatch_log_group": "retention_in_days",
    "azurerm_log_analytics_workspace": "retention_in_days",
    "google_logging_project_bucket_config": "retention_days",
}

# Region-class attribute precedence when a resource declares several.
REGION_ATTR_ORDER = ("region", "location", "zone", "availability_zone")

_AWS_LARGE = [
    f"{family}.{size}"
    for family in ("m5", "m5a", "m6i", "c5", "c5a", "c6i", "r5", "r5a", "r6i")
    for size in ("4xlarge", "8xlarge", "9xlarge", "12xlarge", "16xlarge", "24xlarge")
] + ["m4.4xlarge", "m4.10xlarge", "m4.16xlarge", "c4.4xlarge", "c4.8xlarge", "r4.4xlarge", "r4.8xlarge", "r4.16xlarge"]

_AZURE_LARGE = [
    f"Standard_{family}{cores}{suffix}"
    for family in ("D", "DS", "E", "ES", "F", "FS")
    for cores in (16, 32, 48, 64)
    for suffix in ("", "s_v3", "s_v4", "s_v5", "_v3", "_v4", "_v5")
]

_GCP_LARGE = [
    f"{family}-{kind}-{cores}"
    for family in ("n1", "n2", "n2d", "e2", "c2", "c2d")
    for kind in ("standard", "highmem", "highcpu")
    for cores in (16, 30, 32, 48, 60, 64, 80, 96, 128)
]

DEFAULT_LARGE_SIZES: dict[str, frozenset[str]] = {
    "aws_": frozenset(_AWS_LARGE),
    "azurerm_": frozenset(_AZURE_LARGE),
    "google_": frozenset(_GCP_LARGE),
}

DEFAULT_COMPUTE_TYPES = frozenset(
    {
        "aws_instance",
        "azurerm_virtual_machine",
        "azurerm_linux_virtual_machine",
        "azurerm_windows_virtual_machine",
        "google_compute_instance",
    }
)

DEFAULT_AUTOSCALER_TYPES = frozenset(
    {
        "aws_autoscaling_group",
        "aws_appautoscaling_target",
        "azurerm_virtual_machine_scale_set",
        "azurerm_linux_virtual_machine_scale_set",
        "azurerm_windows_virtual_machine_scale_set",
        "azurerm_monitor_autoscale_setting",
        "google_compute_autoscaler",
        "google_compute_region_autoscaler",
    }
)

DEFAULT_LIFECYCLE_TYPES = frozenset(
    {
        "aws_ebs_volume",
        "aws_db_instance",
        "aws_rds_cluster",
        "azurerm_managed_disk",
        "azurerm_mssql_database",
        "google_compute_disk",
        "google_sql_database_instance",
    }
)

DEFAULT_REGION_ATTRS = frozenset(REGION_ATTR_ORDER)


class ConfigError(ValueError):
    """Raised for malformed or invalid detector configuration."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        super().__init__(message)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class DetectorConfig:
    ss1_large_sizes: dict[str, frozenset[str]] = field(
        default_factory=lambda: dict(DEFAULT_LARGE_SIZES)
    )
    ss2_fixed_count_min: int = 2
    ss2_compute_types: frozenset[str] = DEFAULT_COMPUTE_TYPES
    ss2_autoscaler_types: frozenset[str] = DEFAULT_AUTOSCALER_TYPES
    ss3_lifecycle_required_types: frozenset[str] = DEFAULT_LIFECYCLE_TYPES
    ss4_retention_max_days: int = 90
    ss4_flag_missing_retention: bool = True
    ss5_region_attrs: frozenset[str] = DEFAULT_REGION_ATTRS
    ss5_pattern_scan_comments: bool = False
    ss7_max_resources_per_file: int = 10

    def __post_init__(self) -> None:
        if self.ss2_fixed_count_min < 1:
            raise ConfigError("ss2_fixed_count_min must be >= 1")
        if self.ss4_retention_max_days < 1:
            raise ConfigError("ss4_retention_max_days must be >= 1")
        if self.ss7_max_resources_per_file < 1:
            raise ConfigError("ss7_max_resources_per_file must be >= 1")
        for name in (
            "ss2_compute_types",
            "ss2_autoscaler_types",
            "ss3_lifecycle_required_types",
            "ss5_region_attrs",
        ):
            if not getattr(self, name):
                raise ConfigError(f"{name} must not be empty")
        if not self.ss1_large_sizes or not any(self.ss1_large_sizes.values()):
            raise ConfigError("ss1_large_sizes must list at least one size")

    def digest(self) -> str:
        """Stable hash of the effective configuration."""
        return hashlib.sha256(
            json.dumps(self.to_json_dict(), sort_keys=True).encode("utf-8")
        ).hexdigest()

    def to_json_dict(self) -> dict:
        return {
            "ss1_large_sizes": {
                k: sorted(v) for k, v in sorted(self.ss1_large_sizes.items())
            },
            "ss2_fixed_count_min": self.ss2_fixed_count_min,
            "ss2_compute_types": sorted(self.ss2_compute_types),
            "ss2_autoscaler_types": sorted(self.ss2_autoscaler_types),
            "ss3_lifecycle_required_types": sorted(self.ss3_lifecycle_required_types),
            "ss4_retention_max_days": self.ss4_retention_max_days,
            "ss4_flag_missing_retention": self.ss4_flag_missing_retention,
            "ss5_region_attrs": sorted(self.ss5_region_attrs),
            "ss5_pattern_scan_comments": self.ss5_pattern_scan_comments,
            "ss7_max_resources_per_file": self.ss7_max_resources_per_file,
        }


_FIELD_KINDS = {
    "ss1_large_sizes": "size_map",
    "ss2_fixed_count_min": "int",
    "ss2_compute_types": "str_set",
    "ss2_autoscaler_types": "str_set",
    "ss3_lifecycle_required_types": "str_set",
    "ss4_retention_max_days": "int",
    "ss4_flag_missing_retention": "bool",
    "ss5_region_attrs": "str_set",
    "ss5_pattern_scan_comments": "bool",
    "ss7_max_resources_per_file": "int",
}


def config_from_dict(data: dict, source_text: str | None = None) -> DetectorConfig:
    """Build a DetectorConfig from parsed JSON; unknown keys are an error."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    kwargs: dict = {}
    for key, value in data.items():
        kind = _FIELD_KINDS.get(key)
        if kind is None:
            line, col = _locate_key(source_text, key)
            raise ConfigError(f"unknown config key {key!r}", line, col)
        if kind == "int":
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{key} must be an integer")
            kwargs[key] = value
        elif kind == "bool":
            if not isinstance(value, bool):
                raise ConfigError(f"{key} must be a boolean")
            kwargs[key] = value
        elif kind == "str_set":
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise ConfigError(f"{key} must be a list of strings")
            kwargs[key] = frozenset(value)
        else:  # size_map
            if not isinstance(value, dict):
                raise ConfigError(f"{key} must map provider prefixes to size lists")
            sizes: dict[str, frozenset[str]] = {}
            for prefix, names in value.items():
                if not isinstance(names, list) or not all(
                    isinstance(v, str) for v in names
                ):
                    raise ConfigError(f"{key}[{prefix!r}] must be a list of strings")
                sizes[prefix] = frozenset(names)
            kwargs[key] = sizes
    return DetectorConfig(**kwargs)


def load_config_file(path: str | Path) -> DetectorConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(
            f"malformed config JSON: {err.msg}", err.lineno, err.colno
        ) from err
    return config_from_dict(data, source_text=text)


def _locate_key(source_text: str | None, key: str) -> tuple[int | None, int | None]:
    """Line/column of a key's first occurrence in the raw config text."""
    if source_text is None:
        return None, None
    needle = f'"{key}"'
    idx = source_text.find(needle)
    if idx < 0:
        return None, None
    line = source_text.count("\n", 0, idx) + 1
    col = idx - (source_text.rfind("\n", 0, idx) + 1) + 1
    return line, col
