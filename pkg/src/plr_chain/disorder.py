"""Random decaying field and the one-body hopping matrix.

The chain Hamiltonian maps under Jordan-Wigner onto free fermions hopping on
the half line with on-site potential ``lam * V_j / j**alpha``.  This module
holds the model description (:class:`DisorderConfig`), reproducible sampling
of the i.i.d. variables ``V_j`` and construction of the symmetric tridiagonal
matrix :class:`OneBodyOperator`.

Seeding
-------
Realization ``i`` of an ensemble draws its potential from
``numpy.random.Generator(PCG64(realization_seed(master_seed, i)))`` where::

    realization_seed(m, i) = splitmix64(m XOR splitmix64(i))

and ``splitmix64`` is the standard SplitMix64 finalizer (increment
``0x9E3779B97F4A7C15``, multipliers ``0xBF58476D1CE4E5B9`` and
``0x94D049BB133111EB``, shifts 30/27/31), all arithmetic modulo 2**64.
The potential is the first ``n`` variates of ``Generator.uniform(-h, h, n)``.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One step of the SplitMix64 generator applied to ``x`` (mod 2**64)."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def realization_seed(master_seed: int, realization_index: int) -> int:
    """64-bit seed of one realization, derived from the ensemble's master seed."""
    if realization_index < 0:
        raise ConfigurationError(f"realization_index must be >= 0, got {realization_index}")
    return splitmix64((master_seed & _MASK64) ^ splitmix64(realization_index))


@dataclass(frozen=True)
class UniformSymmetric:
    """Uniform law on ``[-halfwidth, halfwidth]``; zero mean by construction."""

    halfwidth: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.halfwidth) and self.halfwidth > 0):
            raise ConfigurationError(f"halfwidth must be > 0, got {self.halfwidth}")

    @property
    def mean(self) -> float:
        return 0.0

    @property
    def variance(self) -> float:
        return self.halfwidth**2 / 3.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(-self.halfwidth, self.halfwidth, size)

    def to_dict(self) -> dict:
        return {"law": "uniform_symmetric", "halfwidth": float(self.halfwidth)}


@dataclass(frozen=True)
class DisorderConfig:
    """Full description of the random model.

    Parameters
    ----------
    n : int
        Number of sites.
    lam : float
        Disorder strength, strictly positive.
    envelope_exponent : float
        Exponent ``alpha`` of the decaying envelope ``j**-alpha``.  The
        critical value 1/2 is the default.
    distribution : UniformSymmetric
        Single-site law of ``V_j``.
    master_seed : int
        Root of all randomness of an ensemble (unsigned 64-bit).
    """

    n: int
    lam: float
    envelope_exponent: float = 0.5
    distribution: UniformSymmetric = field(default_factory=UniformSymmetric)
    master_seed: int = 0

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ConfigurationError(f"n must be a positive integer, got {self.n!r}")
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ConfigurationError(f"lambda must be > 0, got {self.lam!r}")
        if not np.isfinite(self.envelope_exponent):
            raise ConfigurationError("envelope_exponent must be finite")
        if not isinstance(self.master_seed, (int, np.integer)) or not 0 <= self.master_seed <= _MASK64:
            raise ConfigurationError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed!r}")

    @property
    def envelope(self) -> np.ndarray:
        """``j**-alpha`` for j = 1..n."""
        return np.arange(1, self.n + 1, dtype=float) ** (-self.envelope_exponent)

    def replace(self, **changes) -> "DisorderConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "n": int(self.n),
            "lambda": float(self.lam),
            "envelope_exponent": float(self.envelope_exponent),
            "distribution": self.distribution.to_dict(),
            "master_seed": int(self.master_seed),
        }

    def to_json(self) -> str:
        """Canonical JSON (sorted keys, no whitespace) used to stamp outputs."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "DisorderConfig":
        dist = data.get("distribution", {"law": "uniform_symmetric", "halfwidth": 1.0})
        if dist.get("law") != "uniform_symmetric":
            raise ConfigurationError(f"unsupported single-site law {dist.get('law')!r}")
        return cls(
            n=int(data["n"]),
            lam=float(data["lambda"]),
            envelope_exponent=float(data.get("envelope_exponent", 0.5)),
            distribution=UniformSymmetric(float(dist.get("halfwidth", 1.0))),
            master_seed=int(data.get("master_seed", 0)),
        )


@dataclass(frozen=True)
class OneBodyOperator:
    """Symmetric tridiagonal matrix with potential ``diag`` and unit hopping."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diag, dtype=float)
        offdiag = np.array(self.offdiag, dtype=float)
        if diag.ndim != 1 or diag.size < 1:
            raise ConfigurationError("diag must be a non-empty vector")
        if offdiag.shape != (diag.size - 1,):
            raise ConfigurationError(
                f"offdiag must have length {diag.size - 1}, got shape {offdiag.shape}"
            )
        if not np.all(offdiag == 1.0):
            raise ConfigurationError("every hopping entry must equal 1")
        if not np.all(np.isfinite(diag)):
            raise ConfigurationError("diag entries must be finite")
        diag.setflags(write=False)
        offdiag.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def norm_bound(self) -> float:
        """Gershgorin bound on the operator norm."""
        return 2.0 + float(np.max(np.abs(self.diag)))


def sample_potential(config: DisorderConfig, realization_index: int) -> np.ndarray:
    """Draw ``(V_1, ..., V_n)`` for one realization; bitwise reproducible."""
    rng = np.random.Generator(np.random.PCG64(realization_seed(config.master_seed, realization_index)))
    return config.distribution.sample(rng, config.n)


def build_one_body(config: DisorderConfig, potential, lam: float | None = None) -> OneBodyOperator:
    """Assemble ``H_n`` with diagonal ``lam * V_j / j**alpha``.

    ``lam`` overrides ``config.lam``; unlike the config it may be zero, which
    yields the free chain used as a test reference.
    """
    potential = np.asarray(potential, dtype=float)
    if potential.shape != (config.n,):
        raise ConfigurationError(
            f"potential has shape {potential.shape}, expected ({config.n},)"
        )
    strength = config.lam if lam is None else float(lam)
    if not strength >= 0:
        raise ConfigurationError(f"lambda override must be >= 0, got {lam!r}")
    return OneBodyOperator(strength * potential * config.envelope, np.ones(config.n - 1))


def free_chain(n: int) -> OneBodyOperator:
    """The disorder-free hopping matrix on n sites."""
    return OneBodyOperator(np.zeros(n), np.ones(n - 1))
