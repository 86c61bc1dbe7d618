"""Interaction-model (Walsh) representation of generalized NK landscapes.

A landscape with interaction sets ``V_1..V_N`` equals an interaction model
whose terms are the union of the power sets of the ``V_i``. Loci are coded
``x~ = 2x - 1`` and the column for term ``U`` is the product of the coded
loci in ``U``.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError
from .landscape import (DEFAULT_CAP, InteractionDesign, all_genotypes, decode_subvector,
                        fitness_table)

INTERCEPT = ()


def term_key(term):
    return (len(term), term)


def canonical_term(loci: Iterable[int]) -> tuple:
    return tuple(sorted(int(v) for v in loci))


def term_label(term) -> str:
    """CSV label: loci joined by ``+``, ``0`` for the intercept."""
    return "+".join(str(v) for v in term) if term else "0"


def parse_term_label(label: str) -> tuple:
    label = label.strip()
    if label in ("0", ""):
        return INTERCEPT
    return canonical_term(label.split("+"))


class TermSet:
    """Deduplicated terms in canonical order (interaction order, then lexicographic)."""

    def __init__(self, terms: Iterable[Sequence[int]]):
        uniq = {canonical_term(t) for t in terms}
        self.terms = tuple(sorted(uniq, key=term_key))
        self._pos = {t: k for k, t in enumerate(self.terms)}

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __getitem__(self, k):
        return self.terms[k]

    def __contains__(self, term):
        return canonical_term(term) in self._pos

    def __eq__(self, other):
        return isinstance(other, TermSet) and self.terms == other.terms

    def __repr__(self):
        return f"TermSet({[term_label(t) for t in self.terms]})"

    def index(self, term) -> int:
        return self._pos[canonical_term(term)]

    def counts_by_order(self) -> dict:
        out = {}
        for t in self.terms:
            out[len(t)] = out.get(len(t), 0) + 1
        return out

    def is_subset_closed(self) -> bool:
        return all(sub in self._pos
                   for t in self.terms for r in range(len(t))
                   for sub in combinations(t, r))


def power_set(vset: Sequence[int]):
    for r in range(len(vset) + 1):
        yield from combinations(vset, r)


def term_set(design: InteractionDesign) -> TermSet:
    """Union of the power sets of all interaction sets.

    Always contains the intercept; contains every main effect whenever each
    locus appears in some set.
    """
    terms = set()
    for s in design.sets:
        terms.update(power_set(s))
    return TermSet(terms)


def rank(design: InteractionDesign) -> int:
    """Rank of the landscape's model matrix, i.e. the number of model terms."""
    return len(term_set(design))


def max_rank_bound(n: int, k: int) -> int:
    """Upper bound on the rank of a classic design with constant ``K = k``."""
    if not 0 <= k <= n - 1:
        raise ParameterError(f"need 0 <= k <= n-1, got n={n}, k={k}")
    return min(2 ** n, n * 2 ** (k + 1) + 1 - n * (k + 1))


def signed_genotypes(n: int, cap: int | None = DEFAULT_CAP) -> np.ndarray:
    return (2 * all_genotypes(n, cap) - 1).astype(np.int8)


def walsh_matrix(design: InteractionDesign, terms: Iterable[Sequence[int]] | None = None,
                 cap: int | None = DEFAULT_CAP) -> np.ndarray:
    """The ``2**N x L`` +-1 matrix of the interaction model.

    ``terms`` fixes the column order; the default is the canonical
    :func:`term_set` order.
    """
    if terms is None:
        terms = term_set(design)
    terms = [canonical_term(t) for t in terms]
    S = signed_genotypes(design.n, cap)
    X = np.ones((S.shape[0], len(terms)), dtype=np.int8)
    for c, t in enumerate(terms):
        for locus in t:
            X[:, c] *= S[:, locus - 1]
    return X


def extract_coefficients(design: InteractionDesign, weights, terms=None,
                         cap: int | None = DEFAULT_CAP) -> np.ndarray:
    """Model coefficients ``beta = 2**-N F~^T (F w)``.

    ``weights`` may be a flat vector of length ``C`` or an ``(R, C)`` batch;
    the result is aligned with ``terms`` (canonical :func:`term_set` order by
    default).
    """
    if terms is None:
        terms = term_set(design)
    p = fitness_table(design, weights, cap)
    X = walsh_matrix(design, terms, cap).astype(float)
    return (p @ X) / 2.0 ** design.n


def variance_factors(design: InteractionDesign) -> dict:
    """Exact ``Var[beta_U] / sigma^2`` for every ``U`` in the term set."""
    out = {}
    n = design.n
    for s in design.sets:
        share = Fraction(1, n * 2 ** len(s))
        for u in power_set(s):
            out[u] = out.get(u, 0) + share
    return {t: out[t] for t in sorted(out, key=term_key)}


def coefficient_moments(design: InteractionDesign, mu=0, sigma2=1, terms=None) -> dict:
    """Analytic ``(mean, variance)`` of each coefficient under iid weights.

    Coefficients are uncorrelated. Pass ``int``/``Fraction`` moments to get
    exact rational results; floats give floats. Terms outside the model get
    variance 0.
    """
    factors = variance_factors(design)
    keys = factors.keys() if terms is None else [canonical_term(t) for t in terms]
    return {t: (mu if t == INTERCEPT else 0, factors.get(t, 0) * sigma2) for t in keys}


def h_function(design: InteractionDesign, i: int, j: int, term) -> int:
    """Sign pattern linking column ``k`` of ``F~`` with column ``j`` of block ``i`` of ``F``.

    ``term`` is a locus collection or a 1-based index into the canonical term
    set. Returns 0 when the term is not a subset of ``V_i``; otherwise the
    product over the term's loci of ``2b - 1`` where ``b`` are the bits of
    ``j - 1`` read against ``V_i``.
    """
    if not 1 <= i <= design.n:
        raise IndexError(f"locus index {i} outside 1..{design.n}")
    vset = design.sets[i - 1]
    if not 1 <= j <= 2 ** len(vset):
        raise IndexError(f"pattern index {j} outside 1..{2 ** len(vset)}")
    if isinstance(term, (int, np.integer)):
        ts = term_set(design)
        if not 1 <= term <= len(ts):
            raise IndexError(f"term index {term} outside 1..{len(ts)}")
        term = ts[term - 1]
    term = canonical_term(term)
    if not set(term) <= set(vset):
        return 0
    bits = dict(zip(vset, decode_subvector(j - 1, len(vset))))
    sign = 1
    for locus in term:
        sign *= 2 * bits[locus] - 1
    return sign


def numeric_rank(A, tol: float = 1e-9) -> int:
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > tol * s[0])) if s[0] > 0 else 0


def column_spaces_equal(A, B, tol: float = 1e-9) -> bool:
    """True iff ``A`` and ``B`` span the same column space (numerically)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or B.ndim != 2 or A.shape[0] != B.shape[0]:
        raise ParameterError(f"row counts differ: {A.shape} vs {B.shape}")
    ra = numeric_rank(A, tol)
    return ra == numeric_rank(B, tol) == numeric_rank(np.hstack([A, B]), tol)


def moments_csv(design: InteractionDesign, mu=0.0, sigma2=1.0, observed=None) -> str:
    """CSV table ``term,mean,variance,observed`` over the canonical term set.

    ``observed`` is an optional coefficient vector aligned with :func:`term_set`.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["term", "mean", "variance", "observed"])
    moments = coefficient_moments(design, mu, sigma2)
    for k, (t, (m, v)) in enumerate(moments.items()):
        obs = "" if observed is None else repr(float(observed[k]))
        w.writerow([term_label(t), repr(float(m)), repr(float(v)), obs])
    return buf.getvalue()
