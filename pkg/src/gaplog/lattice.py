"""The lower semi-lattice of interval annotations.

Elements are intervals [l, u] with 0 <= l <= u <= 1, stored as integer
coordinates on a grid of resolution N (point k has value k/N), so ordering,
suprema and negation are exact. The knowledge order puts [0,1] at the bottom
and every point interval [x,x] at a top: a <= b holds when b is contained in
a, i.e. knowing more means a tighter interval. Pairs whose intervals overlap
have a least upper bound; pairs that have pulled apart (max lower > min
upper) have none, which is surfaced as an explicit `Conflict` marker rather
than a pseudo-element.

Two value modes exist. ``unit`` is the grid itself at a user-chosen
resolution. ``signed`` is the three-element classical lattice (uncertain,
false, true) rendered over {-1, 1}; it is the N=1 grid under the value map
x = 2l - 1 and is the mode the trainer operates in.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Union

from .errors import ConfigMismatchError, ConversionError, OffGridError


class LatticeMode(Enum):
    UNIT = "unit"
    SIGNED = "signed"


@dataclass(frozen=True)
class LatticeConfig:
    """Value mode plus grid resolution (signed mode is pinned to N=1)."""

    mode: LatticeMode = LatticeMode.SIGNED
    resolution: int = 1

    def __post_init__(self):
        if self.resolution < 1:
            raise ValueError(f"resolution must be >= 1, got {self.resolution}")
        if self.mode is LatticeMode.SIGNED and self.resolution != 1:
            raise ValueError("signed mode uses resolution 1")

    @property
    def is_signed(self) -> bool:
        return self.mode is LatticeMode.SIGNED


SIGNED = LatticeConfig(LatticeMode.SIGNED, 1)


def unit(resolution: int) -> LatticeConfig:
    return LatticeConfig(LatticeMode.UNIT, resolution)


@dataclass(frozen=True)
class Interval:
    """A lattice element: grid coordinates lower <= upper."""

    lower: int
    upper: int
    cfg: LatticeConfig = SIGNED

    def __post_init__(self):
        n = self.cfg.resolution
        if not (0 <= self.lower <= self.upper <= n):
            raise ValueError(
                f"invalid interval coordinates ({self.lower},{self.upper}) at resolution {n}"
            )

    @property
    def is_bottom(self) -> bool:
        return self.lower == 0 and self.upper == self.cfg.resolution

    @property
    def is_top(self) -> bool:
        return self.lower == self.upper

    def values(self) -> tuple[Fraction, Fraction]:
        """Exact numeric bounds in the configured value space."""
        n = self.cfg.resolution
        lo, up = Fraction(self.lower, n), Fraction(self.upper, n)
        if self.cfg.is_signed:
            return 2 * lo - 1, 2 * up - 1
        return lo, up

    def __str__(self) -> str:
        return format_interval(self)


@dataclass(frozen=True)
class Conflict:
    """Marker for a supremum that does not exist (max lower > min upper)."""

    lower: int
    upper: int
    cfg: LatticeConfig = SIGNED


def bottom(cfg: LatticeConfig) -> Interval:
    return Interval(0, cfg.resolution, cfg)


def top(cfg: LatticeConfig, coord: int) -> Interval:
    """The point interval at grid coordinate `coord`."""
    return Interval(coord, coord, cfg)


def true_top(cfg: LatticeConfig) -> Interval:
    return Interval(cfg.resolution, cfg.resolution, cfg)


def false_top(cfg: LatticeConfig) -> Interval:
    return Interval(0, 0, cfg)


def _check_cfg(a: Interval, b: Interval) -> None:
    if a.cfg != b.cfg:
        raise ConfigMismatchError(f"mixed lattice configurations: {a.cfg} vs {b.cfg}")


def leq(a: Interval, b: Interval) -> bool:
    """Knowledge order: a <= b iff b's interval is contained in a's."""
    _check_cfg(a, b)
    return a.lower <= b.lower and b.upper <= a.upper


def incomparable(a: Interval, b: Interval) -> bool:
    return not leq(a, b) and not leq(b, a)


def sup(items: Iterable[Interval]) -> Union[Interval, Conflict]:
    """Least upper bound of a nonempty set, or Conflict if none exists."""
    items = list(items)
    if not items:
        raise ValueError("sup of an empty set is undefined")
    first = items[0]
    for other in items[1:]:
        _check_cfg(first, other)
    lo = max(x.lower for x in items)
    up = min(x.upper for x in items)
    if lo > up:
        return Conflict(lo, up, first.cfg)
    return Interval(lo, up, first.cfg)


def negate(a: Interval) -> Interval:
    """not([l,u]) = [1-u, 1-l]; an involution."""
    n = a.cfg.resolution
    return Interval(n - a.upper, n - a.lower, a.cfg)


def height(cfg: LatticeConfig) -> int:
    """Elements on the longest chain from bottom to a top.

    Every strict step up shrinks the span u-l by at least one grid unit, and
    the chain [0,N] > [0,N-1] > ... > [0,0] realises the maximum, so the
    height is N+1.
    """
    return cfg.resolution + 1


def elements(cfg: LatticeConfig) -> list[Interval]:
    """All lattice elements, ordered by (lower, upper). Small N only."""
    n = cfg.resolution
    return [Interval(lo, up, cfg) for lo in range(n + 1) for up in range(lo, n + 1)]


def convert(a: Interval, to_cfg: LatticeConfig) -> Interval:
    """Map a onto another configuration's grid; exact or ConversionError.

    signed <-> unit(1) is a pure relabelling (x = 2l - 1 on values); between
    unit resolutions a point k/N must land exactly on a point of the target
    grid.
    """
    if a.cfg == to_cfg:
        return a
    n_from, n_to = a.cfg.resolution, to_cfg.resolution
    lo, rlo = divmod(a.lower * n_to, n_from)
    up, rup = divmod(a.upper * n_to, n_from)
    if rlo or rup:
        raise ConversionError(
            f"{format_interval(a)} has no exact image at resolution {n_to}"
        )
    return Interval(lo, up, to_cfg)


def from_values(cfg: LatticeConfig, lo, up) -> Interval:
    """Build an interval from numeric bounds in the configured value space.

    Values must sit exactly on the grid; floats are taken at face value via
    Fraction(str(...)) so 0.1 means the decimal 0.1.
    """
    return Interval(_coord_from_value(cfg, lo), _coord_from_value(cfg, up), cfg)


def _coord_from_value(cfg: LatticeConfig, value) -> int:
    if isinstance(value, float):
        frac = Fraction(str(value))
    else:
        frac = Fraction(value)
    if cfg.is_signed:
        frac = (frac + 1) / 2
    coord = frac * cfg.resolution
    if coord.denominator != 1 or not (0 <= coord <= cfg.resolution):
        raise OffGridError(
            f"value {value} is not on the grid of {cfg.mode.value} resolution {cfg.resolution}"
        )
    return int(coord)


def format_value(cfg: LatticeConfig, coord: int) -> str:
    """Shortest exact textual form of a grid coordinate's value."""
    if cfg.is_signed:
        return str(2 * coord - 1)
    frac = Fraction(coord, cfg.resolution)
    if frac.denominator == 1:
        return str(frac.numerator)
    # Denominator 2^a * 5^b has a terminating decimal expansion.
    den = frac.denominator
    places = 0
    while den % 2 == 0:
        den //= 2
        places += 1
    fives = 0
    while den % 5 == 0:
        den //= 5
        fives += 1
    places = max(places, fives)
    if den != 1:
        return f"{frac.numerator}/{frac.denominator}"
    scaled = frac.numerator * 10**places // frac.denominator
    text = f"{scaled:0{places + 1}d}"
    return f"{text[:-places]}.{text[-places:]}".rstrip("0").rstrip(".") or "0"


def format_interval(a: Interval) -> str:
    return f"[{format_value(a.cfg, a.lower)},{format_value(a.cfg, a.upper)}]"
