import math
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class IntervalEstimate(BaseModel):
    point: float
    lower: float
    upper: float
    level: float
    method: Literal["percentile_bootstrap"] = "percentile_bootstrap"
    replicates: int
    seed: int
    undefined_replicates: int = 0
    point_outside: bool = Field(False, description="Point estimate falls outside [lower, upper].")


class IndexEntry(BaseModel):
    name: str
    value: Optional[float] = None
    infinite: bool = False
    undefined: bool = False
    components: Dict[str, Optional[float]] = Field(default_factory=dict)
    params: Dict[str, Any] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    interval: Optional[IntervalEstimate] = None

    @classmethod
    def from_value(cls, name: str, value: float, components: Optional[Dict[str, float]] = None,
                   params: Optional[Dict[str, Any]] = None, notes: Optional[List[str]] = None) -> "IndexEntry":
        """Builds an entry, turning inf into a flagged null and NaN into an undefined null."""
        notes = list(notes or [])
        clean: Dict[str, Optional[float]] = {}
        for key, comp in (components or {}).items():
            if comp is not None and not math.isfinite(comp):
                notes.append(f"component {key} is {'undefined' if math.isnan(comp) else 'infinite'}")
                comp = None
            clean[key] = comp
        entry = cls(name=name, components=clean, params=dict(params or {}), notes=notes)
        if math.isnan(value):
            entry.undefined = True
        elif math.isinf(value):
            entry.infinite = True
        else:
            entry.value = float(value)
        return entry


class IndexReport(BaseModel):
    schema_version: Literal[1] = 1
    tool: str = "capq"
    version: str
    command: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    model: Optional[Dict[str, Any]] = None
    seeds: Dict[str, int] = Field(default_factory=dict)
    defaults_applied: List[Dict[str, Any]] = Field(default_factory=list)
    entries: List[IndexEntry] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)

    def entry(self, name: str) -> IndexEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)
