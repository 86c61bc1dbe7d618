"""Interaction designs, weight vectors and dense NK landscapes.

Genotypes are indexed by the integer whose base-2 digits are
``x_1 x_2 ... x_N`` with ``x_1`` the most significant bit, so genotype 0 is
all zeros and row ``j`` of every dense matrix is genotype ``j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CapacityError, DesignError, ParameterError

DEFAULT_CAP = 20
DISTRIBUTIONS = ("normal", "uniform")


@dataclass(frozen=True)
class InteractionDesign:
    """The N interaction sets ``V_1..V_N`` of a (generalized) NK landscape.

    Sets are stored as sorted tuples of 1-based loci; order of the input sets
    is kept (set ``i`` feeds locus ``i``), order inside each set is not.

    Parameters
    ----------
    n : int
        Number of loci.
    sets : sequence of sequences of int
        ``n`` nonempty interaction sets with entries in ``1..n``.
    require_self : bool
        Enforce ``i in V_i``.
    """

    n: int
    sets: tuple
    require_self: bool = True

    def __post_init__(self):
        if int(self.n) < 1:
            raise DesignError(f"n must be >= 1, got {self.n}")
        canon = []
        for s in self.sets:
            vals = sorted(int(v) for v in s)
            if not vals:
                raise DesignError("interaction sets must be nonempty")
            if len(set(vals)) != len(vals):
                raise DesignError(f"repeated locus in interaction set {list(s)}")
            if vals[0] < 1 or vals[-1] > self.n:
                raise DesignError(f"interaction set {list(s)} has loci outside 1..{self.n}")
            canon.append(tuple(vals))
        if len(canon) != self.n:
            raise DesignError(f"expected {self.n} interaction sets, got {len(canon)}")
        if self.require_self:
            for i, s in enumerate(canon, start=1):
                if i not in s:
                    raise DesignError(f"locus {i} is not a member of V_{i}={list(s)}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "sets", tuple(canon))

    @property
    def k_of(self) -> tuple:
        """Per-set epistasis ``K_i = |V_i| - 1``."""
        return tuple(len(s) - 1 for s in self.sets)

    @property
    def block_sizes(self) -> tuple:
        return tuple(2 ** len(s) for s in self.sets)

    @property
    def n_weights(self) -> int:
        """Total weight-vector length ``C``."""
        return sum(self.block_sizes)

    @property
    def block_offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.block_sizes)[:-1]]).astype(np.int64)

    def membership(self) -> np.ndarray:
        """``a[i-1]`` = number of sets containing locus ``i``."""
        counts = np.zeros(self.n, dtype=np.int64)
        for s in self.sets:
            counts[np.asarray(s) - 1] += 1
        return counts

    def is_classic(self) -> bool:
        ks = set(self.k_of)
        if len(ks) != 1:
            return False
        k = ks.pop()
        return bool(np.all(self.membership() == k + 1))

    def to_dict(self) -> dict:
        return {"n": self.n, "sets": [list(s) for s in self.sets]}

    @classmethod
    def from_dict(cls, d: dict, require_self: bool = True) -> "InteractionDesign":
        try:
            return cls(d["n"], d["sets"], require_self=require_self)
        except KeyError as exc:
            raise DesignError(f"design file is missing key {exc}") from None


@dataclass(frozen=True)
class WeightVector:
    """Seeded weights, one block of length ``2**(K_i+1)`` per locus."""

    blocks: tuple
    mu: float
    sigma2: float
    distribution: str = "normal"
    seed: int | None = None

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate(self.blocks)

    def __len__(self):
        return sum(len(b) for b in self.blocks)


@dataclass(frozen=True)
class Landscape:
    design: InteractionDesign
    weights: WeightVector
    _flat: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sizes = tuple(len(b) for b in self.weights.blocks)
        if sizes != self.design.block_sizes:
            raise DesignError(f"weight block sizes {sizes} do not match design "
                              f"{self.design.block_sizes}")
        object.__setattr__(self, "_flat", self.weights.flat)

    @property
    def n(self) -> int:
        return self.design.n


def _check_cap(n, cap):
    if cap is None:
        cap = DEFAULT_CAP
    if n > cap:
        raise CapacityError(f"N={n} exceeds the dense-materialization cap {cap}")


def subvector_index(x: Sequence[int], vset: Sequence[int]) -> int:
    """Decimal value of the bits of ``x`` at the loci in ``vset``.

    The smallest locus is the most significant bit.

    >>> subvector_index([1, 0, 1], [1, 2])
    2
    """
    loci = sorted(int(v) for v in vset)
    if not loci or loci[0] < 1 or loci[-1] > len(x):
        raise DesignError(f"interaction set {list(vset)} is invalid for genotype length {len(x)}")
    value = 0
    for locus in loci:
        b = int(x[locus - 1])
        if b not in (0, 1):
            raise ParameterError(f"genotype entries must be 0/1, got {x[locus - 1]!r}")
        value = (value << 1) | b
    return value


def decode_subvector(value: int, width: int) -> tuple:
    """Inverse of :func:`subvector_index` for a set of ``width`` loci."""
    if not 0 <= value < 2 ** width:
        raise ParameterError(f"{value} does not fit in {width} bits")
    return tuple((value >> (width - 1 - t)) & 1 for t in range(width))


def genotype_bits(index: int, n: int) -> np.ndarray:
    return np.array([(index >> (n - 1 - t)) & 1 for t in range(n)], dtype=np.int8)


def genotype_index(x: Sequence[int]) -> int:
    return subvector_index(x, range(1, len(x) + 1))


def all_genotypes(n: int, cap: int | None = DEFAULT_CAP) -> np.ndarray:
    """All ``2**n`` genotypes as a ``(2**n, n)`` 0/1 array in index order."""
    _check_cap(n, cap)
    idx = np.arange(2 ** n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).astype(np.int8)


def subpattern_indices(design: InteractionDesign, cap: int | None = DEFAULT_CAP) -> np.ndarray:
    """``(N, 2**N)`` array whose entry ``[i, j]`` is ``e_i`` of genotype ``j``."""
    bits = all_genotypes(design.n, cap).astype(np.int64)
    out = np.empty((design.n, 2 ** design.n), dtype=np.int64)
    for i, s in enumerate(design.sets):
        cols = np.asarray(s) - 1
        weights = 1 << np.arange(len(s) - 1, -1, -1)
        out[i] = bits[:, cols] @ weights
    return out


def generate_weights(design: InteractionDesign, mu: float = 0.0, sigma2: float = 1.0,
                     distribution: str = "normal", seed=None) -> WeightVector:
    """Draw iid weights with mean ``mu/N`` and variance ``sigma2/N``.

    ``uniform`` uses the interval centred on ``mu/N`` with half-width
    ``sqrt(3*sigma2/N)``, which has exactly that variance.
    """
    if not sigma2 > 0:
        raise ParameterError(f"sigma2 must be positive, got {sigma2}")
    if distribution not in DISTRIBUTIONS:
        raise ParameterError(f"unknown distribution {distribution!r}; expected one of {DISTRIBUTIONS}")
    rng = np.random.default_rng(seed)
    flat = draw_weights(rng, design.n_weights, design.n, mu, sigma2, distribution)
    blocks = tuple(np.split(flat, np.cumsum(design.block_sizes)[:-1]))
    return WeightVector(blocks, float(mu), float(sigma2), distribution,
                        None if seed is None else int(seed))


def draw_weights(rng: np.random.Generator, size, n: int, mu: float, sigma2: float,
                 distribution: str = "normal") -> np.ndarray:
    """Raw weight draws; ``size`` may be a shape tuple for batched replicates."""
    loc = mu / n
    scale2 = sigma2 / n
    if distribution == "normal":
        return rng.normal(loc, np.sqrt(scale2), size=size)
    if distribution == "uniform":
        half = np.sqrt(3.0 * scale2)
        return rng.uniform(loc - half, loc + half, size=size)
    raise ParameterError(f"unknown distribution {distribution!r}")


def random_landscape(design: InteractionDesign, mu=0.0, sigma2=1.0, distribution="normal",
                     seed=None) -> Landscape:
    return Landscape(design, generate_weights(design, mu, sigma2, distribution, seed))


def fitness(ls: Landscape, x: Sequence[int]) -> float:
    """Sum over loci of the weight selected by each locus' sub-pattern."""
    if len(x) != ls.n:
        raise ParameterError(f"genotype has length {len(x)}, landscape has N={ls.n}")
    total = 0.0
    for block, s in zip(ls.weights.blocks, ls.design.sets):
        total += block[subvector_index(x, s)]
    return float(total)


def model_matrix(design: InteractionDesign, cap: int | None = DEFAULT_CAP) -> np.ndarray:
    """The ``2**N x C`` 0/1 model matrix; row ``j`` is ``f_1(x_j) | ... | f_N(x_j)``."""
    idx = subpattern_indices(design, cap)
    F = np.zeros((2 ** design.n, design.n_weights), dtype=np.int8)
    rows = np.arange(2 ** design.n)
    for i, off in enumerate(design.block_offsets):
        F[rows, off + idx[i]] = 1
    return F


def fitness_table(design: InteractionDesign, weights: np.ndarray,
                  cap: int | None = DEFAULT_CAP) -> np.ndarray:
    """Fitness of every genotype for one or many flat weight vectors.

    Parameters
    ----------
    weights : ndarray, shape (C,) or (R, C)

    Returns
    -------
    ndarray, shape (2**N,) or (R, 2**N)
    """
    weights = np.asarray(weights, dtype=float)
    if weights.shape[-1] != design.n_weights:
        raise DesignError(f"weight length {weights.shape[-1]} != C={design.n_weights}")
    idx = subpattern_indices(design, cap)
    cols = idx + design.block_offsets[:, None]
    return weights[..., cols].sum(axis=-2)


def full_fitness_vector(ls: Landscape, cap: int | None = DEFAULT_CAP) -> np.ndarray:
    """``p = F w`` evaluated by table lookup, without building ``F``."""
    return fitness_table(ls.design, ls._flat, cap)


# -- files -------------------------------------------------------------------

def save_design(design: InteractionDesign, path) -> None:
    Path(path).write_text(json.dumps(design.to_dict()) + "\n")


def load_design(path, require_self: bool = True) -> InteractionDesign:
    data = json.loads(Path(path).read_text())
    return InteractionDesign.from_dict(data, require_self=require_self)


def landscape_to_dict(ls: Landscape) -> dict:
    w = ls.weights
    return {**ls.design.to_dict(), "mu": w.mu, "sigma2": w.sigma2,
            "distribution": w.distribution, "seed": w.seed}


def landscape_from_dict(d: dict, require_self: bool = True) -> Landscape:
    design = InteractionDesign.from_dict(d, require_self=require_self)
    if d.get("seed") is None:
        raise ParameterError("landscape file needs an integer seed to regenerate weights")
    return random_landscape(design, d.get("mu", 0.0), d.get("sigma2", 1.0),
                            d.get("distribution", "normal"), d["seed"])
