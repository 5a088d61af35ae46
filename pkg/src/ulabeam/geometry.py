"""Uniform linear array geometry and the half-wavelength spacing bound."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidFrequencyError, InvalidGeometryError

SPEED_OF_SOUND = 343.0
UNIFORM_TOL_M = 1e-9


@dataclass(frozen=True)
class ArrayGeometry:
    """Element positions (meters, ascending) along the array axis."""

    element_positions: tuple[float, ...]
    speed_of_sound: float = SPEED_OF_SOUND

    def __post_init__(self):
        pos = tuple(float(p) for p in self.element_positions)
        object.__setattr__(self, "element_positions", pos)
        if len(pos) < 2:
            raise InvalidGeometryError(f"need at least 2 elements, got {len(pos)}")
        if not all(np.isfinite(pos)):
            raise InvalidGeometryError("element positions must be finite")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise InvalidGeometryError("element positions must be strictly increasing")
        if not (self.speed_of_sound > 0 and np.isfinite(self.speed_of_sound)):
            raise InvalidGeometryError(f"speed of sound must be positive, got {self.speed_of_sound}")

    @property
    def positions(self) -> np.ndarray:
        return np.asarray(self.element_positions)

    @property
    def n_elements(self) -> int:
        return len(self.element_positions)

    @property
    def spacings(self) -> np.ndarray:
        return np.diff(self.positions)

    @property
    def spacing(self) -> float:
        """Largest consecutive spacing (the one that limits aliasing)."""
        return float(self.spacings.max())

    @property
    def is_uniform(self) -> bool:
        s = self.spacings
        return bool(np.all(np.abs(s - s[0]) <= UNIFORM_TOL_M))

    @property
    def aperture(self) -> float:
        return self.element_positions[-1] - self.element_positions[0]

    @property
    def centroid(self) -> float:
        return float(self.positions.mean())

    def to_dict(self) -> dict:
        return {
            "positions_m": list(self.element_positions),
            "speed_of_sound_mps": self.speed_of_sound,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArrayGeometry":
        try:
            return cls(tuple(d["positions_m"]), float(d.get("speed_of_sound_mps", SPEED_OF_SOUND)))
        except (KeyError, TypeError) as exc:
            raise InvalidGeometryError(f"bad geometry document: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ArrayGeometry":
        return cls.from_dict(json.loads(text))


def uniform_linear(n: int, spacing: float, c: float = SPEED_OF_SOUND) -> ArrayGeometry:
    """``n`` elements at ``0, spacing, ..., (n-1)*spacing``."""
    if int(n) != n or n < 2:
        raise InvalidGeometryError(f"need at least 2 elements, got {n}")
    if not spacing > 0:
        raise InvalidGeometryError(f"spacing must be positive, got {spacing}")
    return ArrayGeometry(tuple(i * float(spacing) for i in range(int(n))), float(c))


def min_spacing_for(f_max: float, c: float = SPEED_OF_SOUND) -> float:
    """Supremum of spacings that avoid spatial aliasing up to ``f_max``: c / (2 f_max)."""
    if not f_max > 0:
        raise InvalidFrequencyError(f"f_max must be positive, got {f_max}")
    if not c > 0:
        raise InvalidGeometryError(f"speed of sound must be positive, got {c}")
    return c / (2.0 * f_max)


def max_unaliased_frequency(geometry: ArrayGeometry) -> float:
    """Frequency at which the widest spacing reaches half a wavelength.

    The bound is strict: a frequency equal to this value counts as aliased.
    """
    return geometry.speed_of_sound / (2.0 * geometry.spacing)


def is_aliased(geometry: ArrayGeometry, f: float) -> bool:
    return f >= max_unaliased_frequency(geometry)
