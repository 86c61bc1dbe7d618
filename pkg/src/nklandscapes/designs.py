"""Constructions of interaction designs.

Maximal-rank classic designs come from cyclic difference sets: the ``N``
translates of a difference set in ``Z_N`` form a packing (no pair of loci
shares two sets), and a classic design is of maximal rank exactly when it is
a packing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, Sequence

import numba
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import DesignError, ParameterError
from .landscape import InteractionDesign


class TableEntry(NamedTuple):
    elements: tuple
    min_n: int


# K -> (difference set, smallest N for which the table guarantees it)
DIFFERENCE_SETS = {
    2: TableEntry((0, 1, 3), 7),
    3: TableEntry((0, 1, 4, 6), 13),
    4: TableEntry((0, 2, 7, 8, 11), 23),
    5: TableEntry((0, 1, 4, 10, 12, 17), 35),
    6: TableEntry((0, 1, 4, 10, 18, 23, 25), 51),
    7: TableEntry((0, 4, 5, 17, 19, 25, 28, 35), 71),
    8: TableEntry((0, 2, 10, 24, 25, 29, 36, 42, 45), 91),
    9: TableEntry((0, 1, 6, 10, 23, 26, 34, 41, 53, 55), 111),
}

# K -> (first N of the unbroken range, sporadic N below it, exceptions inside the range)
_EXISTENCE = {
    2: (7, (), ()),
    3: (13, (), ()),
    4: (21, (), (22,)),
    5: (31, (), (32, 33, 34)),
    6: (51, (), ()),
    7: (71, (57, 64, 67, 69), ()),
    8: (91, (73, 89), ()),
    9: (111, (91,), ()),
}


class MaximalStatus(str, enum.Enum):
    EXISTS = "exists"
    UNKNOWN = "unknown"
    BELOW_NECESSARY = "below_necessary"


@dataclass(frozen=True)
class DifferenceSet:
    elements: tuple
    modulus: int

    def __post_init__(self):
        els = tuple(sorted(int(e) % self.modulus for e in self.elements))
        if len(set(els)) != len(els):
            raise DesignError(f"difference set elements must be distinct mod {self.modulus}")
        object.__setattr__(self, "elements", els)

    @property
    def kappa(self) -> int:
        return len(self.elements)

    def is_valid(self) -> bool:
        return is_difference_set(self.elements, self.modulus)


@dataclass(frozen=True)
class LatinSquare:
    """An ``order x order`` grid over symbols ``1..order``."""

    order: int
    grid: np.ndarray

    def is_valid(self) -> bool:
        target = np.arange(1, self.order + 1)
        g = np.asarray(self.grid)
        if g.shape != (self.order, self.order):
            return False
        return (all(np.array_equal(np.sort(r), target) for r in g)
                and all(np.array_equal(np.sort(c), target) for c in g.T))


def builtin_difference_set(k: int) -> TableEntry:
    """Tabulated difference set for epistasis ``k`` (2..9) and its minimum N."""
    try:
        return DIFFERENCE_SETS[int(k)]
    except KeyError:
        raise DesignError(f"no tabulated difference set for K={k} (supported: 2..9)") from None


def differences(elements: Sequence[int], modulus: int) -> list:
    return [(a - b) % modulus for a, b in ((a, b) for a in elements for b in elements) if a != b]


def is_difference_set(elements: Sequence[int], modulus: int) -> bool:
    """True iff all ordered differences of ``elements`` are distinct and nonzero mod ``modulus``."""
    if modulus < 1:
        raise ParameterError(f"modulus must be positive, got {modulus}")
    res = [int(e) % modulus for e in elements]
    if len(set(res)) != len(res):
        raise DesignError(f"elements {list(elements)} are not distinct mod {modulus}")
    diffs = differences(res, modulus)
    return len(set(diffs)) == len(diffs) and 0 not in diffs


def translate_design(ds, n: int | None = None) -> InteractionDesign:
    """Design whose ``g``-th set is ``D + g`` (mod ``n``), shifted to 1-based loci."""
    if not isinstance(ds, DifferenceSet):
        if n is None:
            raise ParameterError("n is required when passing raw elements")
        ds = DifferenceSet(tuple(ds), n)
    elif n is not None and n != ds.modulus:
        ds = DifferenceSet(ds.elements, n)
    n = ds.modulus
    if not ds.is_valid():
        raise DesignError(f"{list(ds.elements)} is not a difference set mod {n}")
    sets = [[(d + g) % n + 1 for d in ds.elements] for g in range(n)]
    # locus g+1 lies in V_{g+1} only if 0 is in D
    return InteractionDesign(n, sets, require_self=0 in ds.elements)


def adjacent_design(n: int, k: int) -> InteractionDesign:
    """``V_i = {i, i+1, ..., i+k}`` with wraparound."""
    if not 0 <= k <= n - 1:
        raise ParameterError(f"need 0 <= k <= n-1, got n={n}, k={k}")
    return InteractionDesign(n, [[(i + t) % n + 1 for t in range(k + 1)] for i in range(n)])


def maximal_rank_known(n: int, k: int) -> MaximalStatus:
    """Whether a maximal-rank classic design is known to exist for ``(n, k)``."""
    if n < k * k + k + 1:
        return MaximalStatus.BELOW_NECESSARY
    if k <= 1:
        return MaximalStatus.EXISTS
    if k not in _EXISTENCE:
        return MaximalStatus.UNKNOWN
    start, sporadic, exceptions = _EXISTENCE[k]
    if (n >= start and n not in exceptions) or n in sporadic:
        return MaximalStatus.EXISTS
    return MaximalStatus.UNKNOWN


def maximal_difference_set(n: int, k: int) -> tuple:
    """Difference set used by :func:`maximal_design`, or raise :class:`DesignError`."""
    status = maximal_rank_known(n, k)
    if status is MaximalStatus.BELOW_NECESSARY:
        raise DesignError(f"N={n}, K={k} is below the necessary condition "
                          f"N >= K^2+K+1 = {k * k + k + 1}")
    if k == 0:
        return (0,)
    if k == 1:
        return (0, (n - 1) // 2)
    if k in DIFFERENCE_SETS and n >= DIFFERENCE_SETS[k].min_n:
        return DIFFERENCE_SETS[k].elements
    raise DesignError(f"no maximal-rank construction available for N={n}, K={k} "
                      f"(existence status: {status.value})")


def maximal_design(n: int, k: int) -> InteractionDesign:
    """A classic packing design of maximal rank built from a difference set."""
    return translate_design(maximal_difference_set(n, k), n)


def is_packing(design: InteractionDesign) -> bool:
    """True iff no pair of loci occurs together in more than one set."""
    seen = set()
    for s in design.sets:
        for pair in combinations(s, 2):
            if pair in seen:
                return False
            seen.add(pair)
    return True


# -- random Latin squares ------------------------------------------------------

@numba.njit(cache=True)
def _jm_moves(cube, state, u, stop_when_proper):
    # cube: incidence cube (row, col, symbol) with entries in {-1, 0, 1}
    # state: [improper flag, x, y, z] of the -1 cell
    n = cube.shape[0]
    for m in range(u.shape[0]):
        if state[0] == 0:
            x = min(int(u[m, 0] * n), n - 1)
            y = min(int(u[m, 1] * n), n - 1)
            z1 = 0
            while cube[x, y, z1] != 1:
                z1 += 1
            z = min(int(u[m, 2] * (n - 1)), n - 2)
            if z >= z1:
                z += 1
            x1 = 0
            while cube[x1, y, z] != 1:
                x1 += 1
            y1 = 0
            while cube[x, y1, z] != 1:
                y1 += 1
        else:
            x, y, z = state[1], state[2], state[3]
            pick = 0 if u[m, 0] < 0.5 else 1
            x1 = -1
            for t in range(n):
                if cube[t, y, z] == 1:
                    x1 = t
                    if pick == 0:
                        break
                    pick -= 1
            pick = 0 if u[m, 1] < 0.5 else 1
            y1 = -1
            for t in range(n):
                if cube[x, t, z] == 1:
                    y1 = t
                    if pick == 0:
                        break
                    pick -= 1
            pick = 0 if u[m, 2] < 0.5 else 1
            z1 = -1
            for t in range(n):
                if cube[x, y, t] == 1:
                    z1 = t
                    if pick == 0:
                        break
                    pick -= 1
        cube[x, y, z] += 1
        cube[x, y1, z1] += 1
        cube[x1, y, z1] += 1
        cube[x1, y1, z] += 1
        cube[x, y, z1] -= 1
        cube[x, y1, z] -= 1
        cube[x1, y, z] -= 1
        cube[x1, y1, z1] -= 1
        if cube[x1, y1, z1] < 0:
            state[0] = 1
            state[1] = x1
            state[2] = y1
            state[3] = z1
        else:
            state[0] = 0
            if stop_when_proper:
                return m + 1
    return u.shape[0]


def random_latin_square(n: int, seed=None, steps: int | None = None,
                        chunk: int = 1 << 16) -> LatinSquare:
    """Sample a Latin square with the Jacobson-Matthews +-1 move chain.

    The walk starts from the cyclic square and makes ``steps`` moves
    (default ``10 n^3``), continuing until the cube is proper. A uniformly
    random row, column and symbol relabeling is applied to the result; this
    keeps the uniform distribution invariant and removes the period-2
    behaviour of the chain at ``n = 2``.
    """
    if n < 2:
        raise ParameterError(f"Latin square order must be >= 2, got {n}")
    rng = np.random.default_rng(seed)
    if steps is None:
        steps = 10 * n ** 3
    cube = np.zeros((n, n, n), dtype=np.int8)
    r = np.arange(n)
    cube[r[:, None], r[None, :], (r[:, None] + r[None, :]) % n] = 1
    state = np.zeros(4, dtype=np.int64)
    remaining = int(steps)
    while remaining > 0:
        m = min(chunk, remaining)
        _jm_moves(cube, state, rng.random((m, 3)), False)
        remaining -= m
    while state[0]:
        _jm_moves(cube, state, rng.random((64, 3)), True)
    grid = np.argmax(cube, axis=2)
    grid = grid[rng.permutation(n)][:, rng.permutation(n)]
    grid = rng.permutation(n)[grid] + 1
    return LatinSquare(n, grid)


def _self_matching(columns: list, n: int) -> list:
    # columns[c] holds 1-based symbols; returns, for each locus i, the column assigned to it
    rows, cols = [], []
    for c, col in enumerate(columns):
        for s in col:
            rows.append(s - 1)
            cols.append(c)
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    match = maximum_bipartite_matching(graph, perm_type="column")
    if np.any(match < 0):
        raise DesignError("no assignment of sets to loci with i in V_i exists")
    return [columns[c] for c in match]


def random_classic_design(n: int, k: int, seed=None, steps: int | None = None) -> InteractionDesign:
    """Classic design from ``k+1`` random rows of a random Latin square.

    Each column of the selected rows is one interaction set; columns are
    assigned to loci by a perfect matching so that locus ``i`` lies in ``V_i``.
    """
    if not 0 <= k <= n - 1:
        raise ParameterError(f"need 0 <= k <= n-1, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    if n == 1:
        return InteractionDesign(1, [[1]])
    square = random_latin_square(n, rng, steps)
    rows = rng.choice(n, size=k + 1, replace=False)
    columns = [list(square.grid[rows, c]) for c in range(n)]
    return InteractionDesign(n, _self_matching(columns, n))


def random_generalized_design(n: int, k: int, seed=None) -> InteractionDesign:
    """``V_i = {i}`` plus ``k`` loci drawn without replacement from the other ``n-1``."""
    if not 0 <= k <= n - 1:
        raise ParameterError(f"need 0 <= k <= n-1, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    sets = []
    for i in range(1, n + 1):
        others = np.delete(np.arange(1, n + 1), i - 1)
        sets.append([i, *rng.choice(others, size=k, replace=False).tolist()])
    return InteractionDesign(n, sets)


DESIGN_KINDS = ("maximal", "adjacent", "random_classic", "random_generalized")


def make_design(kind: str, n: int, k: int, seed=None) -> InteractionDesign:
    if kind == "maximal":
        return maximal_design(n, k)
    if kind == "adjacent":
        return adjacent_design(n, k)
    if kind == "random_classic":
        return random_classic_design(n, k, seed)
    if kind == "random_generalized":
        return random_generalized_design(n, k, seed)
    raise ParameterError(f"unknown design kind {kind!r}; expected one of {DESIGN_KINDS}")
