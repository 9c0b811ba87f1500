"""
Finite shadows of the urelement axioms: ideals of urelement sets with their swap
permutations, homogeneity automorphisms, duplicates and tails over a finite pool,
internal ultrapowers by principal ultrafilters, and the implication diagram between
the urelement axioms as static data.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from urforcing.exceptions import (NoSpareUrelementError, NotAnIdealError, OverlapError, PreconditionError,
                                  UnsupportedFormulaError)
from urforcing.formulas import And, Equal, Formula, HfuStructure, IsUr, Member, Not, holds
from urforcing.universe import Automorphism, HfuValue, Urelement, sort_values

logger = logging.getLogger('UrforcingAxiomLab')

UrelementSet = FrozenSet[Urelement]

def _sorted_set(urelements: Iterable[Urelement]) -> List[str]:
    return [u.id for u in sort_values(urelements)]

@dataclass(frozen=True)
class Ideal:
    """
    A family of subsets of a finite urelement pool. With pool_is_set the pool plays a
    set of urelements, so the full pool must be excluded; otherwise the pool is a
    fragment of a proper class and that condition is vacuous.
    """
    pool: UrelementSet
    family: FrozenSet[UrelementSet]
    pool_is_set: bool = True

    @classmethod
    def of(cls, pool: Iterable[Urelement], family: Iterable[Iterable[Urelement]], pool_is_set: bool = True):
        return cls(frozenset(pool), frozenset(frozenset(s) for s in family), pool_is_set)

    def to_json(self):
        return {'pool': _sorted_set(self.pool),
                'family': sorted((_sorted_set(s) for s in self.family), key=lambda s: (len(s), s)),
                'pool_is_set': self.pool_is_set}

@dataclass(frozen=True)
class IdealReport:
    ok: bool
    condition: Optional[int] = None
    witnesses: Tuple[Tuple[str, ...], ...] = ()
    message: str = ''

    def to_json(self):
        if self.ok:
            return {'ok': True}
        return {'ok': False, 'condition': self.condition, 'witnesses': [list(w) for w in self.witnesses],
                'message': self.message}

def _report(condition, witnesses, message):
    return IdealReport(False, condition, tuple(tuple(_sorted_set(w)) for w in witnesses), message)

def is_a_ideal(candidate: Ideal, conditions: Iterable[int] = (1, 2, 3, 4)) -> IdealReport:
    """Checks the ideal conditions in order and reports the first one that fails."""
    conditions = set(conditions)
    family = sorted(candidate.family, key=lambda s: (len(s), _sorted_set(s)))
    outside = [s for s in family if not s <= candidate.pool]
    if outside:
        return _report(0, [outside[0]], 'Family member is not a subset of the pool')
    if 1 in conditions and candidate.pool_is_set and candidate.pool in candidate.family:
        return _report(1, [candidate.pool], 'The full pool belongs to the family')
    if 2 in conditions:
        for s, t in itertools.combinations(family, 2):
            if s | t not in candidate.family:
                return _report(2, [s, t], 'Family is not closed under unions')
    if 3 in conditions:
        for s in family:
            for r in range(len(s)):
                for subset in itertools.combinations(sort_values(s), r):
                    if frozenset(subset) not in candidate.family:
                        return _report(3, [s, frozenset(subset)], 'Family is not closed under subsets')
    if 4 in conditions:
        for a in sort_values(candidate.pool):
            if frozenset([a]) not in candidate.family:
                return _report(4, [frozenset([a])], f"Singleton {{{a.id}}} is missing")
    return IdealReport(True)

def ideals_on(pool: Iterable[Urelement], pool_is_set: bool = True) -> List[Ideal]:
    """Every ideal over a small pool, by enumerating all families."""
    pool = frozenset(pool)
    subsets = [frozenset(c) for r in range(len(pool) + 1) for c in itertools.combinations(sort_values(pool), r)]
    found = []
    for mask in range(2 ** len(subsets)):
        family = frozenset(s for i, s in enumerate(subsets) if mask >> i & 1)
        candidate = Ideal(pool, family, pool_is_set)
        if is_a_ideal(candidate).ok:
            found.append(candidate)
    return found

def verify_ideal_swap(pi: Automorphism, a: Urelement, A: UrelementSet, ideal: Ideal) -> Dict[str, bool]:
    return {
        'preserves_ideal': frozenset(pi.image(s) for s in ideal.family) == ideal.family,
        'moves_a': pi(a) != a,
        'fixes_rest': pi.fixes_pointwise(A - {a}),
    }

def ideal_swap(a: Urelement, A: Iterable[Urelement], ideal: Ideal) -> Automorphism:
    """
    Swaps a with the least urelement of the pool outside A. Closure under unions and
    subsets makes the family invariant; a family that the swap does not preserve is
    rejected.
    """
    A = frozenset(A)
    if a not in A:
        raise PreconditionError(f"{a.id} is not in {_sorted_set(A)}")
    if A not in ideal.family:
        raise PreconditionError(f"{_sorted_set(A)} is not in the family")
    spare = sort_values(ideal.pool - A)
    if not spare:
        raise NoSpareUrelementError(f"No urelement of the pool lies outside {_sorted_set(A)}")
    pi = Automorphism.swap(a, spare[0], ideal.pool)
    checks = verify_ideal_swap(pi, a, A, ideal)
    if not checks["preserves_ideal"]:
        closure = is_a_ideal(ideal, conditions=(2, 3, 4))
        raise NotAnIdealError(f"Swapping {a.id} with {spare[0].id} does not preserve the family",
                              condition=closure.condition, witnesses=[list(w) for w in closure.witnesses])
    assert checks["moves_a"] and checks["fixes_rest"], checks
    return pi

def _require_within(pool: UrelementSet, **sets: UrelementSet):
    for label, s in sets.items():
        if not s <= pool:
            raise PreconditionError(f"{label} is not within the pool: {_sorted_set(s - pool)}")

def homogeneity_automorphism(A: Iterable[Urelement], B: Iterable[Urelement], C: Iterable[Urelement],
                             pool: Iterable[Urelement]) -> Optional[Automorphism]:
    """An automorphism fixing A pointwise with pi[B] = C, or None when |B| != |C|."""
    A, B, C, pool = frozenset(A), frozenset(B), frozenset(C), frozenset(pool)
    _require_within(pool, A=A, B=B, C=C)
    if A & (B | C):
        raise OverlapError(f"B and C must be disjoint from A, shared {_sorted_set(A & (B | C))}")
    if len(B) != len(C):
        return None
    mapping = {}
    for src, dst in zip(sort_values(B - C), sort_values(C - B)):
        mapping[src] = dst
        mapping[dst] = src
    return Automorphism.from_mapping(mapping, pool)

def homogeneity_holds_over(A: Iterable[Urelement], pool: Iterable[Urelement]) -> bool:
    A, pool = frozenset(A), frozenset(pool)
    rest = sort_values(pool - A)
    subsets = [frozenset(c) for r in range(len(rest) + 1) for c in itertools.combinations(rest, r)]
    for B in subsets:
        for C in subsets:
            if len(B) != len(C):
                continue
            pi = homogeneity_automorphism(A, B, C, pool)
            if pi is None or pi.image(B) != C or not pi.fixes_pointwise(A):
                return False
    return True

def is_realized_by(x: Iterable, A: Iterable[Urelement]) -> bool:
    return len(frozenset(x)) == len(frozenset(A))

def is_duplicate(B: Iterable[Urelement], A: Iterable[Urelement]) -> bool:
    B, A = frozenset(B), frozenset(A)
    return not (A & B) and len(A) == len(B)

def duplicate_of(A: Iterable[Urelement], pool: Iterable[Urelement]) -> Optional[UrelementSet]:
    A, pool = frozenset(A), frozenset(pool)
    _require_within(pool, A=A)
    rest = sort_values(pool - A)
    if len(rest) < len(A):
        return None
    return frozenset(rest[:len(A)])

def tail_of(A: Iterable[Urelement], pool: Iterable[Urelement]) -> UrelementSet:
    """Over a finite pool the tail of A is its complement: every tail must absorb pool - A injectively."""
    A, pool = frozenset(A), frozenset(pool)
    _require_within(pool, A=A)
    return pool - A

def is_tail(B: Iterable[Urelement], A: Iterable[Urelement], pool: Iterable[Urelement]) -> bool:
    B, A, pool = frozenset(B), frozenset(A), frozenset(pool)
    if A & B or not B <= pool:
        return False
    rest = sort_values(pool - A)
    return all(len(C) <= len(B) for r in range(len(rest) + 1) for C in itertools.combinations(rest, r))

@dataclass(frozen=True)
class Ultrafilter:
    """The principal ultrafilter {S ⊆ index : generator ∈ S}; every ultrafilter on a finite set is one."""
    index: FrozenSet[str]
    generator: str

    def __post_init__(self):
        if self.generator not in self.index:
            raise PreconditionError(f"Generator {self.generator} is not in the index set")

    def contains(self, subset: Iterable[str]) -> bool:
        return self.generator in frozenset(subset)

    def members(self) -> List[FrozenSet[str]]:
        rest = sorted(self.index - {self.generator})
        return [frozenset(c) | {self.generator} for r in range(len(rest) + 1) for c in itertools.combinations(rest, r)]

class UltrapowerStructure(HfuStructure):
    """
    Classes of functions equal F-almost everywhere, with membership and the urelement
    predicate holding when they hold on a set in F.
    """

    def __init__(self, functions: Mapping[str, Mapping[str, HfuValue]], ultrafilter: Ultrafilter):
        self.functions = functions
        self.ultrafilter = ultrafilter
        labels = sorted(functions)
        self.classes: Dict[str, FrozenSet[str]] = {
            f: frozenset(g for g in labels if self._almost_everywhere(lambda y: functions[f][y] == functions[g][y]))
            for f in labels
        }
        super().__init__(sorted(set(self.classes.values()), key=sorted), lambda label: self.classes[label])

    def _almost_everywhere(self, predicate) -> bool:
        return self.ultrafilter.contains(y for y in self.ultrafilter.index if predicate(y))

    def _representative(self, cls):
        return self.functions[min(cls)]

    def member(self, v, w) -> bool:
        g, f = self._representative(v), self._representative(w)
        return self._almost_everywhere(lambda y: HfuStructure.member(self, g[y], f[y]))

    def equal(self, v, w) -> bool:
        return v == w

    def is_ur(self, v) -> bool:
        f = self._representative(v)
        return self._almost_everywhere(lambda y: isinstance(f[y], Urelement))

@dataclass(frozen=True)
class LosResult:
    quotient_side: bool
    pointwise_side: bool
    classes: Tuple[Tuple[str, ...], ...]

    @property
    def agree(self) -> bool:
        return self.quotient_side == self.pointwise_side

    def to_json(self):
        return {'agree': self.agree, 'quotient_side': self.quotient_side, 'pointwise_side': self.pointwise_side,
                'classes': [list(c) for c in self.classes]}

def _require_ultrapower_formula(phi: Formula):
    if isinstance(phi, (Member, Equal, IsUr)):
        return
    if isinstance(phi, Not):
        return _require_ultrapower_formula(phi.body)
    if isinstance(phi, And):
        _require_ultrapower_formula(phi.left)
        return _require_ultrapower_formula(phi.right)
    raise UnsupportedFormulaError(f"Ultrapower formulas use ∈, =, A with ¬ and ∧, got {phi}")

def internal_ultrapower(functions: Mapping[str, Mapping[str, HfuValue]], ultrafilter: Ultrafilter,
                        phi: Formula) -> LosResult:
    """
    Evaluates phi, whose constants are function labels, in the quotient by the
    ultrafilter and pointwise: the set of indices where phi holds of the values must
    belong to the ultrafilter exactly when the quotient satisfies phi.
    """
    _require_ultrapower_formula(phi)
    for label, f in functions.items():
        if frozenset(f) != ultrafilter.index:
            raise PreconditionError(f"Function {label} is not total on the index set", function=label)
    quotient = UltrapowerStructure(functions, ultrafilter)
    quotient_side = holds(quotient, phi)
    satisfied = [y for y in sorted(ultrafilter.index)
                 if holds(HfuStructure((), lambda label, y=y: functions[label][y]), phi)]
    pointwise_side = ultrafilter.contains(satisfied)
    classes = tuple(sorted(tuple(sorted(c)) for c in set(quotient.classes.values())))
    return LosResult(quotient_side, pointwise_side, classes)

@dataclass(frozen=True)
class DiagramEdge:
    source: str
    target: str
    citation: str
    justification: str

    def to_json(self):
        return {'source': self.source, 'target': self.target, 'citation': self.citation,
                'justification': self.justification}

HIERARCHY_NODES = (
    'A is a set', 'Plenitude', 'Closure ∧ Duplication', 'Tail', 'DC<Ord', 'Duplication', 'Collection',
    'DCω1-scheme', 'DCω-scheme', 'Closure', 'RP', 'RP⁻',
)

_HIERARCHY_EDGES = (
    ('A is a set', 'Tail', 'Def. 2.5',
     'The complement of A among all urelements is a tail of A.'),
    ('A is a set', 'DC<Ord', 'Thm. 2.17(1)',
     'With a set of urelements, dependent choice of every length holds as it does over pure sets.'),
    ('Plenitude', 'Closure ∧ Duplication', 'Thm. 2.12(2)',
     'Plenitude gives Closure directly, and a set realizing the successor of |A| holds a duplicate of A.'),
    ('Tail', 'Collection', 'Thm. 2.13',
     'Homogeneity moves every witness into V_γ over the parameters together with a tail of their kernel.'),
    ('Collection', 'DCω-scheme', 'Thm. 2.17(6)',
     'When Plenitude fails over a proper class of urelements, Collection gives every set of urelements an infinite tail.'),
    ('DCω1-scheme', 'DCω-scheme', 'Thm. 2.9',
     'Dependent choice of length ω1 restricts to length ω.'),
    ('Closure ∧ Duplication', 'Collection', 'Thm. 2.12(1)',
     'Closure together with Duplication suffices for Collection.'),
    ('Closure ∧ Duplication', 'Duplication', 'Thm. 2.9',
     'Conjunction elimination.'),
    ('Plenitude', 'DC<Ord', 'Thm. 2.11',
     'Plenitude realizes every cardinal, so chains of any length can draw fresh urelements.'),
    ('DC<Ord', 'Collection', 'Thm. 2.17(2)',
     'Dependent choice of every length forces Plenitude or a set of urelements, and either yields Collection.'),
    ('Collection', 'Closure', 'Thm. 2.17(4)',
     'Collection gathers sets realizing every smaller cardinal into a single set.'),
    ('Collection', 'RP', 'Thm. 2.17(7)',
     'Collection with ω-dependent choice gives reflection.'),
    ('RP', 'RP⁻', 'Cor. 2.18',
     'Reflection implies its weak form.'),
    ('RP⁻', 'Collection', 'Cor. 2.18',
     'Reflecting the realized cardinals below the least unrealized one produces a tail.'),
)

def hierarchy_edges() -> List[DiagramEdge]:
    """The implications between the urelement axioms over ZFCU_R, as static data."""
    return [DiagramEdge(*edge) for edge in _HIERARCHY_EDGES]

def diagram_to_dot(edges: Iterable[DiagramEdge]) -> str:
    edges = list(edges)
    nodes = [n for n in HIERARCHY_NODES if any(n in (e.source, e.target) for e in edges)]
    lines = ['digraph urelement_axioms {', '  rankdir=TB;']
    lines += [f'  "{n}";' for n in nodes]
    lines += [f'  "{e.source}" -> "{e.target}" [label="{e.citation}", tooltip="{e.justification}"];' for e in edges]
    lines.append('}')
    return '\n'.join(lines) + '\n'
