"""Steering conditions.

A condition is the set of workspace layers exposed to the model. Two
implications hold by construction: clustering only makes sense over a
filtered document set, and cluster names only exist once there are clusters.
The eleven presets E1..E11 form the standard ablation ladder from the bare
corpus up to the fully steered space (which deliberately leaves connections
out).
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any

from .errors import InvalidCondition, UnknownCondition

FLAG_NAMES = (
    "filtering",
    "clustering",
    "cluster_names",
    "highlights",
    "annotations",
    "connections",
)


@dataclass(frozen=True)
class Condition:
    name: str
    filtering: bool = False
    clustering: bool = False
    cluster_names: bool = False
    highlights: bool = False
    annotations: bool = False
    connections: bool = False

    def __post_init__(self) -> None:
        if not self.name:
            raise InvalidCondition("condition name is empty")
        if self.clustering and not self.filtering:
            raise InvalidCondition(
                f"{self.name}: clustering requires filtering (clusters are "
                f"built over the filtered documents)")
        if self.cluster_names and not self.clustering:
            raise InvalidCondition(
                f"{self.name}: cluster_names requires clustering")

    def flags(self) -> frozenset[str]:
        return frozenset(f for f in FLAG_NAMES if getattr(self, f))

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name}
        out.update({f: getattr(self, f) for f in FLAG_NAMES})
        return out


def condition_from_dict(raw: Any) -> Condition:
    if not isinstance(raw, dict) or not isinstance(raw.get("name"), str):
        raise InvalidCondition(f"condition must be an object with a name, got {raw!r}")
    known = {f.name for f in fields(Condition)}
    unknown = set(raw) - known
    if unknown:
        raise InvalidCondition(f"unknown condition fields: {sorted(unknown)}")
    return Condition(**{k: raw[k] for k in raw})


def _preset(name: str, *flags: str) -> Condition:
    return Condition(name, **{f: True for f in flags})


PRESETS: dict[str, Condition] = {
    c.name: c
    for c in (
        _preset("E1"),
        _preset("E2", "filtering"),
        _preset("E3", "filtering", "clustering"),
        _preset("E4", "highlights"),
        _preset("E5", "annotations"),
        _preset("E6", "connections"),
        _preset("E7", "filtering", "clustering", "highlights"),
        _preset("E8", "filtering", "clustering", "annotations"),
        _preset("E9", "filtering", "clustering", "connections"),
        _preset("E10", "filtering", "clustering", "cluster_names"),
        _preset("E11", "filtering", "clustering", "cluster_names",
                "highlights", "annotations"),
    )
}


def get_condition(name: str) -> Condition:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownCondition(
            f"unknown condition {name!r}; presets are {', '.join(PRESETS)}") from None
