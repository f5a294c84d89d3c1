"""Fixed-point spin expansion of real model weights.

Each real weight w_i is represented by n_spins binary spins sigma in {-1,+1}:

    w_i = c_i + s_i * sum_{a=1..n_spins} sigma_i^(a) * 2^(-a)

Spins are laid out weight-major with a=1 (the most significant place) first.
Multiplying the offset sum by 2^n_spins always yields an odd integer, so the
representable values form a symmetric grid around c_i that never contains
c_i itself, with step s_i * 2^(1 - n_spins).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class SpinAssignment:
    """A full spin configuration: a vector over {-1, +1}, weight-major."""

    spins: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.spins)
        if arr.ndim != 1:
            raise ValidationError("spins must be one-dimensional")
        if not np.all(np.isin(arr, (-1, 1))):
            raise ValidationError("spin values must be exactly -1 or +1")
        arr = arr.astype(np.int8)
        arr.flags.writeable = False
        object.__setattr__(self, "spins", arr)

    def __len__(self) -> int:
        return self.spins.size

    @classmethod
    def from_bits(cls, bits) -> "SpinAssignment":
        """Build from 0/1 variables via sigma = 2x - 1."""
        arr = np.asarray(bits)
        if not np.all(np.isin(arr, (0, 1))):
            raise ValidationError("bit values must be exactly 0 or 1")
        return cls(2 * arr.astype(np.int8) - 1)

    def to_bits(self) -> np.ndarray:
        """0/1 view via x = (sigma + 1) / 2."""
        return ((self.spins + 1) // 2).astype(np.int8)


@dataclass(frozen=True, eq=False)
class SpinEncoding:
    """Per-weight center, scale, and spin count defining the spin-to-real map."""

    n_weights: int
    n_spins: int
    centers: np.ndarray
    scales: np.ndarray
    shrink_factor: float = 0.5

    def __post_init__(self):
        if self.n_weights < 1:
            raise ValidationError("n_weights must be at least 1")
        if self.n_spins < 1:
            raise ValidationError("n_spins must be at least 1")
        if not (0.0 < self.shrink_factor < 1.0):
            raise ValidationError("shrink_factor must lie in (0, 1)")
        centers = np.asarray(self.centers, dtype=np.float64).copy()
        scales = np.asarray(self.scales, dtype=np.float64).copy()
        if centers.shape != (self.n_weights,) or scales.shape != (self.n_weights,):
            raise ValidationError("centers and scales must have length n_weights")
        if not (np.all(np.isfinite(centers)) and np.all(np.isfinite(scales))):
            raise ValidationError("centers and scales must be finite")
        if np.any(scales <= 0.0):
            raise ValidationError("scales must be strictly positive")
        centers.flags.writeable = False
        scales.flags.writeable = False
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "scales", scales)

    @property
    def total_spins(self) -> int:
        return self.n_weights * self.n_spins

    def place_values(self) -> np.ndarray:
        """Bit weights 2^-1 .. 2^-n_spins, most significant first."""
        return 2.0 ** -np.arange(1, self.n_spins + 1)

    def decode(self, assignment: SpinAssignment) -> np.ndarray:
        """Real weight vector for a spin configuration."""
        if len(assignment) != self.total_spins:
            raise ValidationError(
                f"assignment has {len(assignment)} spins, expected {self.total_spins}"
            )
        grid = assignment.spins.astype(np.float64).reshape(self.n_weights, self.n_spins)
        return self.centers + self.scales * (grid @ self.place_values())

    def representable_range(self, weight: int):
        """(min, max, grid_step) of the representable values for one weight."""
        if not (0 <= weight < self.n_weights):
            raise ValidationError("weight index out of range")
        c = self.centers[weight]
        s = self.scales[weight]
        span = s * (1.0 - 2.0 ** -self.n_spins)
        return c - span, c + span, s * 2.0 ** (1 - self.n_spins)

    def nearest_assignment(self, target) -> SpinAssignment:
        """Assignment whose decode is closest to `target`, per weight.

        Ties are broken toward the lexicographically smallest spin string
        (-1 before +1), which is also the smaller decoded value.
        """
        t = np.asarray(target, dtype=np.float64)
        if t.shape != (self.n_weights,):
            raise ValidationError("target must have length n_weights")
        scale_pow = float(2 ** self.n_spins)
        # Offsets decode to odd multiples of 2^-n_spins; work on that lattice.
        y = (t - self.centers) / self.scales * scale_pow
        low = 2.0 * np.floor((y - 1.0) / 2.0) + 1.0
        high = low + 2.0
        odd = np.where(np.abs(y - low) <= np.abs(high - y), low, high)
        odd = np.clip(odd, -(scale_pow - 1.0), scale_pow - 1.0)
        # Map odd lattice values to bit patterns: B = (U + 2^n - 1) / 2.
        codes = ((odd + scale_pow - 1.0) / 2.0).astype(np.int64)
        shifts = np.arange(self.n_spins - 1, -1, -1)
        bits = (codes[:, None] >> shifts[None, :]) & 1
        return SpinAssignment((2 * bits - 1).reshape(-1))

    def refine(self, best_weights) -> "SpinEncoding":
        """Next-epoch encoding: recenter on the best weights, shrink the scales."""
        w = np.asarray(best_weights, dtype=np.float64)
        if w.shape != (self.n_weights,):
            raise ValidationError("best_weights must have length n_weights")
        if not np.all(np.isfinite(w)):
            raise ValidationError("best_weights must be finite")
        return SpinEncoding(
            n_weights=self.n_weights,
            n_spins=self.n_spins,
            centers=w,
            scales=self.shrink_factor * self.scales,
            shrink_factor=self.shrink_factor,
        )
