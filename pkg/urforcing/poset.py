"""
Finite forcing posets. The order is held as a boolean numpy matrix, leq[i, j] == True
iff element i <= element j, closed under reflexivity and transitivity.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from urforcing.exceptions import BudgetExceededError, InvalidPosetError, PreconditionError, UnknownConditionError
from urforcing.universe import DEFAULT_BUDGET

logger = logging.getLogger('UrforcingPoset')

@dataclass(frozen=True)
class PosetReport:
    ok: bool
    law: Optional[str] = None
    witnesses: Tuple[str, ...] = ()
    message: str = ''

    def to_json(self):
        if self.ok:
            return {'ok': True}
        return {'ok': False, 'law': self.law, 'witnesses': list(self.witnesses), 'message': self.message}

@dataclass(frozen=True)
class Filter:
    members: FrozenSet[str]

    def __contains__(self, condition):
        return condition in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self):
        return len(self.members)

    def sorted(self) -> List[str]:
        return sorted(self.members)

def _reflexive_transitive_closure(size, index, pairs):
    leq = np.eye(size, dtype=bool)
    for p, q in pairs:
        leq[index[p], index[q]] = True
    for k in range(size):
        leq |= np.outer(leq[:, k], leq[k, :])
    return leq

def validate_poset(elements: Iterable[str], leq: Iterable[Sequence[str]] = (), top: str = '1') -> PosetReport:
    """Checks the partial-order laws after closing leq; reports the first violated law."""
    elements = list(elements)
    if not elements:
        return PosetReport(False, 'empty', (), 'A poset needs at least its top element')
    duplicates = sorted({e for e in elements if elements.count(e) > 1})
    if duplicates:
        return PosetReport(False, 'duplicate-element', tuple(duplicates), 'Condition ids must be unique')
    ordered = sorted(elements)
    index = {e: i for i, e in enumerate(ordered)}
    pairs = [tuple(pair) for pair in leq]
    for pair in pairs:
        if len(pair) != 2 or any(e not in index for e in pair):
            return PosetReport(False, 'unknown-element', tuple(str(e) for e in pair),
                               f"Pair {list(pair)} mentions a condition outside the poset")
    matrix = _reflexive_transitive_closure(len(ordered), index, pairs)
    both = matrix & matrix.T & ~np.eye(len(ordered), dtype=bool)
    if both.any():
        i, j = np.argwhere(both)[0]
        return PosetReport(False, 'antisymmetry', (ordered[i], ordered[j]),
                           f"{ordered[i]} <= {ordered[j]} and {ordered[j]} <= {ordered[i]} but they differ")
    if top not in index:
        return PosetReport(False, 'missing-top', (str(top),), f"Top element {top} is not a condition")
    not_below = [ordered[i] for i in range(len(ordered)) if not matrix[i, index[top]]]
    if not_below:
        return PosetReport(False, 'top-not-maximum', (top, not_below[0]), f"{not_below[0]} is not below the top {top}")
    return PosetReport(True)

class Poset:
    """
    A finite partial order with a top element 1_P. Smaller conditions carry more
    information. The leq input may omit reflexive and transitive pairs.
    """

    def __init__(self, elements: Iterable[str], leq: Iterable[Sequence[str]] = (), top: str = '1'):
        elements = list(elements)
        pairs = [tuple(pair) for pair in leq]
        report = validate_poset(elements, pairs, top)
        if not report.ok:
            raise InvalidPosetError(report.message, law=report.law, witnesses=list(report.witnesses))
        self.elements: Tuple[str, ...] = tuple(sorted(elements))
        self.top = top
        self._index = {e: i for i, e in enumerate(self.elements)}
        self.leq_matrix = _reflexive_transitive_closure(len(self.elements), self._index, pairs)
        self.leq_matrix.setflags(write=False)
        as_int = self.leq_matrix.astype(np.int64)
        self.compatibility_matrix = (as_int.T @ as_int) > 0
        self.compatibility_matrix.setflags(write=False)
        self._key = (self.elements, self.top, tuple(map(tuple, np.argwhere(self.leq_matrix).tolist())))
        self._hash = hash(self._key)

    def __eq__(self, other):
        return isinstance(other, Poset) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Poset, (self.elements, self.leq_pairs(), self.top))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, condition):
        return condition in self._index

    def __repr__(self):
        return f"Poset({list(self.elements)}, top={self.top})"

    def index(self, condition: str) -> int:
        try:
            return self._index[condition]
        except (KeyError, TypeError):
            raise UnknownConditionError(f"Unknown condition '{condition}'", condition=str(condition))

    def mask(self, conditions: Iterable[str]) -> np.ndarray:
        result = np.zeros(len(self.elements), dtype=bool)
        for condition in conditions:
            result[self.index(condition)] = True
        return result

    def ids(self, mask: np.ndarray) -> FrozenSet[str]:
        return frozenset(self.elements[i] for i in np.flatnonzero(mask))

    def leq(self, p: str, q: str) -> bool:
        return bool(self.leq_matrix[self.index(p), self.index(q)])

    def leq_pairs(self) -> List[Tuple[str, str]]:
        """All strict pairs of the closed order, sorted."""
        return sorted((self.elements[i], self.elements[j]) for i, j in np.argwhere(self.leq_matrix) if i != j)

    def compatible(self, p: str, q: str) -> bool:
        return bool(self.compatibility_matrix[self.index(p), self.index(q)])

    def incompatible(self, p: str, q: str) -> bool:
        return not self.compatible(p, q)

    def below(self, p: str) -> Tuple[str, ...]:
        return tuple(self.elements[i] for i in np.flatnonzero(self.leq_matrix[:, self.index(p)]))

    def above(self, p: str) -> Tuple[str, ...]:
        return tuple(self.elements[i] for i in np.flatnonzero(self.leq_matrix[self.index(p), :]))

    def atoms(self) -> Tuple[str, ...]:
        """Minimal conditions."""
        counts = self.leq_matrix.sum(axis=0)
        return tuple(self.elements[i] for i in np.flatnonzero(counts == 1))

    def top_down(self) -> Tuple[str, ...]:
        """Conditions ordered from the top downwards (fewest conditions above first), ties by id."""
        above_counts = self.leq_matrix.sum(axis=1)
        return tuple(sorted(self.elements, key=lambda e: (int(above_counts[self._index[e]]), e)))

    def upward_closure(self, conditions: Iterable[str]) -> FrozenSet[str]:
        mask = self.mask(conditions)
        return self.ids(self.leq_matrix[mask].any(axis=0))

    def dense_below_mask(self, mask: np.ndarray) -> np.ndarray:
        has_extension = (mask.astype(np.int64) @ self.leq_matrix.astype(np.int64)) > 0
        return ~(self.leq_matrix & ~has_extension[:, None]).any(axis=0)

    def dense_below_set(self, conditions: Iterable[str]) -> FrozenSet[str]:
        """The conditions p below which the given set is dense."""
        return self.ids(self.dense_below_mask(self.mask(conditions)))

    def is_dense_below(self, conditions: Iterable[str], p: str) -> bool:
        self.index(p)
        return p in self.dense_below_set(conditions)

    def is_dense(self, conditions: Iterable[str]) -> bool:
        return self.is_dense_below(conditions, self.top)

    def is_antichain(self, conditions: Iterable[str]) -> bool:
        members = sorted(set(conditions))
        return all(self.incompatible(p, q) for p, q in itertools.combinations(members, 2))

    def is_maximal_antichain(self, conditions: Iterable[str]) -> bool:
        members = set(conditions)
        if not self.is_antichain(members):
            return False
        return all(any(self.compatible(r, m) for m in members) for r in self.elements)

    def _check_subset_budget(self, budget, what):
        if 2 ** len(self.elements) > budget:
            raise BudgetExceededError(f"Enumerating {what} of a {len(self.elements)}-element poset exceeds the budget of {budget}")

    def subsets(self, budget: int = DEFAULT_BUDGET):
        self._check_subset_budget(budget, 'subsets')
        for r in range(len(self.elements) + 1):
            for combo in itertools.combinations(self.elements, r):
                yield frozenset(combo)

    def maximal_antichains(self, budget: int = DEFAULT_BUDGET) -> List[FrozenSet[str]]:
        return [s for s in self.subsets(budget) if s and self.is_maximal_antichain(s)]

    def dense_subsets(self, budget: int = DEFAULT_BUDGET) -> List[FrozenSet[str]]:
        return [s for s in self.subsets(budget) if self.is_dense(s)]

    def is_filter(self, conditions: Iterable[str]) -> bool:
        members = set(conditions)
        if self.top not in members:
            return False
        if any(q not in members for p in members for q in self.above(p)):
            return False
        return all(any(self.leq(r, p) and self.leq(r, q) for r in members)
                   for p, q in itertools.combinations(sorted(members), 2))

    def filters(self, budget: int = DEFAULT_BUDGET) -> List[Filter]:
        return [Filter(s) for s in self.subsets(budget) if self.is_filter(s)]

    def meets_every_dense(self, conditions: Iterable[str], budget: int = DEFAULT_BUDGET) -> bool:
        members = frozenset(conditions)
        return all(members & dense for dense in self.dense_subsets(budget))

    def generic_filters(self) -> List[Filter]:
        """Over a finite poset the generic filters are exactly the upward closures of atoms."""
        return [Filter(self.upward_closure([atom])) for atom in self.atoms()]

    def generics_containing(self, p: str) -> List[Filter]:
        self.index(p)
        return [g for g in self.generic_filters() if p in g]

    def to_json(self):
        return {'elements': list(self.elements), 'leq': [list(pair) for pair in self.leq_pairs()], 'top': self.top}

def fn_poset(domain: Iterable[str], budget: int = DEFAULT_BUDGET) -> Poset:
    """Finite partial functions from domain to 2, ordered by reverse inclusion; the empty function is the top '1'."""
    domain = sorted(set(domain))
    for point in domain:
        if not isinstance(point, str) or any(ch in point for ch in ',=') or point == '1':
            raise PreconditionError(f"Invalid domain point for a partial-function poset: {point!r}")
    if 3 ** len(domain) > budget:
        raise BudgetExceededError(f"Fn({domain}, 2) has {3 ** len(domain)} conditions, over the budget of {budget}")
    functions = []
    for choice in itertools.product((None, 0, 1), repeat=len(domain)):
        functions.append(tuple((point, bit) for point, bit in zip(domain, choice) if bit is not None))

    def condition_id(function):
        return ','.join(f"{point}={bit}" for point, bit in function) if function else '1'

    leq = [(condition_id(f), condition_id(g)) for f in functions for g in functions if f != g and set(g) <= set(f)]
    return Poset([condition_id(f) for f in functions], leq, top='1')

def enumerate_posets(max_size: int) -> Iterable[Poset]:
    """Every labeled poset with a top element and at most max_size elements."""
    for size in range(1, max_size + 1):
        below_top = [f"p{i}" for i in range(size - 1)]
        m = len(below_top)
        off_diagonal = [(i, j) for i in range(m) for j in range(m) if i != j]
        for bits in itertools.product((False, True), repeat=len(off_diagonal)):
            rel = np.eye(m, dtype=bool)
            for (i, j), bit in zip(off_diagonal, bits):
                rel[i, j] = bit
            if (rel & rel.T & ~np.eye(m, dtype=bool)).any():
                continue
            composed = (rel.astype(np.int64) @ rel.astype(np.int64)) > 0
            if (composed & ~rel).any():
                continue
            leq = [(below_top[i], below_top[j]) for i, j in off_diagonal if rel[i, j]]
            leq += [(p, '1') for p in below_top]
            yield Poset(below_top + ['1'], leq, top='1')
