"""Instance model and plain-text instance files.

File format, one record per non-blank line::

    x y r

whitespace-separated decimal numbers, meters.  The first record is the
depot and must have radius 0.  Lines starting with '#' and inline
'#'-suffixes are comments.  Files are UTF-8 with '\\n' line endings and
numbers carry at most 6 fractional digits (micrometer resolution), so
``generate_instance`` rounds to 6 decimals and round-tripping through
``write_instance``/``parse_instance`` is exact for anything this library
produces.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

from cetsp.rng import SplitMix64


class ParseError(ValueError):
    """Malformed instance text; message carries the 1-based line number."""


@dataclass(frozen=True)
class Sensor:
    id: int
    x: float
    y: float
    r: float

    @property
    def center(self) -> Tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Instance:
    """Depot plus sensors; sensors[0] is always the depot with r = 0."""

    sensors: Tuple[Sensor, ...]
    name: str = ""

    @property
    def n_nodes(self) -> int:
        return len(self.sensors)

    @property
    def depot(self) -> Sensor:
        return self.sensors[0]


def parse_instance(text: str, name: str = "") -> Instance:
    sensors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ParseError(f"line {lineno}: expected 3 fields, got {len(fields)}")
        try:
            x, y, r = (float(f) for f in fields)
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric field in {fields!r}") from None
        sensors.append(Sensor(id=len(sensors), x=x, y=y, r=r))
    if not sensors:
        raise ParseError("no records: an instance needs at least a depot line")
    if sensors[0].r != 0.0:
        raise ValueError(f"depot radius must be 0, got {sensors[0].r}")
    for s in sensors[1:]:
        if s.r < 0.0:
            raise ValueError(f"sensor {s.id}: negative radius {s.r}")
    return Instance(sensors=tuple(sensors), name=name)


def _fmt(v: float) -> str:
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def write_instance(inst: Instance) -> str:
    lines = [f"{_fmt(s.x)} {_fmt(s.y)} {_fmt(s.r)}" for s in inst.sensors]
    return "\n".join(lines) + "\n"


def load_instance(path: str | Path) -> Instance:
    p = Path(path)
    return parse_instance(p.read_text(encoding="utf-8"), name=p.stem)


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(write_instance(inst), encoding="utf-8")


def generate_instance(
    n: int,
    bbox: Tuple[float, float] = (1000.0, 1000.0),
    r_range: Tuple[float, float] = (50.0, 150.0),
    seed: int = 0,
) -> Instance:
    """n sensors uniform in [0,w]x[0,h], radii uniform in r_range, depot at the
    bbox center with r = 0.  Per sensor the draw order is x, y, r.  All values
    are rounded to 6 decimals (see the module docstring)."""
    w, h = bbox
    r_lo, r_hi = r_range
    if n < 1:
        raise ValueError(f"need at least one sensor, got n={n}")
    if w <= 0 or h <= 0:
        raise ValueError(f"bbox sides must be positive, got {bbox}")
    if r_lo < 0 or r_lo > r_hi:
        raise ValueError(f"bad radius range {r_range}")
    rng = SplitMix64(seed)
    sensors = [Sensor(id=0, x=round(w / 2, 6), y=round(h / 2, 6), r=0.0)]
    for i in range(1, n + 1):
        x = min(max(round(rng.uniform(0.0, w), 6), 0.0), w)
        y = min(max(round(rng.uniform(0.0, h), 6), 0.0), h)
        r = min(max(round(rng.uniform(r_lo, r_hi), 6), r_lo), r_hi)
        sensors.append(Sensor(id=i, x=x, y=y, r=r))
    return Instance(sensors=tuple(sensors), name=f"gen-n{n}-s{seed}")
