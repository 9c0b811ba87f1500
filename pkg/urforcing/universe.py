"""
Hereditarily finite sets with urelements: canonical values, kernels, ranks,
the V_alpha(A) hierarchy and automorphisms induced by permuting urelements.
"""

import itertools
import logging
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Mapping, Tuple, Union

from urforcing.exceptions import BudgetExceededError, PreconditionError, UnknownUrelementError

logger = logging.getLogger('UrforcingUniverse')

DEFAULT_BUDGET = 100000
# bound for the per-value memo caches here and in names
CACHE_SIZE = 1 << 16
_ID_PATTERN = re.compile(r'^[A-Za-z0-9_.\-]+$')

@dataclass(frozen=True)
class Urelement:
    """An object without members, identified by a token from a declared pool."""
    id: str

    def __post_init__(self):
        if not isinstance(self.id, str) or not _ID_PATTERN.match(self.id):
            raise PreconditionError(f"Invalid urelement id: {self.id!r}", id=str(self.id))

    @property
    def key(self) -> str:
        return '@' + self.id

    def __repr__(self):
        return self.id

class HfuSet:
    """
    A finite set of HfuValues. Members are kept sorted by their canonical key, so two
    sets are equal exactly when their keys are equal. Build instances with make_set.
    """
    __slots__ = ('members', 'key', '_keys', '_hash')

    def __init__(self, members: tuple, key: str):
        object.__setattr__(self, 'members', members)
        object.__setattr__(self, 'key', key)
        object.__setattr__(self, '_keys', frozenset(m.key for m in members))
        object.__setattr__(self, '_hash', hash(key))

    def __setattr__(self, name, value):
        raise AttributeError('HfuSet is immutable')

    def __reduce__(self):
        return (HfuSet, (self.members, self.key))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (isinstance(other, HfuSet) and self.key == other.key)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, value):
        return getattr(value, 'key', None) in self._keys

    def __repr__(self):
        if not self.members:
            return '∅'
        return '{' + ', '.join(repr(m) for m in self.members) + '}'

HfuValue = Union[Urelement, HfuSet]

def is_urelement(value) -> bool:
    return isinstance(value, Urelement)

def is_set(value) -> bool:
    return isinstance(value, HfuSet)

def make_set(members: Iterable[HfuValue] = ()) -> HfuSet:
    unique = {}
    for member in members:
        if not isinstance(member, (Urelement, HfuSet)):
            raise PreconditionError(f"Not a hereditarily finite value: {member!r}")
        unique[member.key] = member
    keys = sorted(unique)
    return HfuSet(tuple(unique[k] for k in keys), '{' + ','.join(keys) + '}')

EMPTY = make_set()

def ordinal(n: int) -> HfuSet:
    """The von Neumann natural n as a pure set."""
    value = EMPTY
    for _ in range(n):
        value = make_set(value.members + (value,))
    return value

@lru_cache(maxsize=CACHE_SIZE)
def kernel(value: HfuValue) -> FrozenSet[Urelement]:
    if isinstance(value, Urelement):
        return frozenset([value])
    result = frozenset()
    for member in value.members:
        result |= kernel(member)
    return result

@lru_cache(maxsize=CACHE_SIZE)
def transitive_closure(value: HfuValue) -> FrozenSet[HfuValue]:
    if isinstance(value, Urelement):
        return frozenset()
    result = set(value.members)
    for member in value.members:
        result |= transitive_closure(member)
    return frozenset(result)

@lru_cache(maxsize=CACHE_SIZE)
def rank(value: HfuValue) -> int:
    if isinstance(value, Urelement):
        return 0
    return max((rank(m) + 1 for m in value.members), default=0)

@lru_cache(maxsize=CACHE_SIZE)
def hierarchy_stage(value: HfuValue) -> int:
    """Least alpha with value in V_alpha(A) for any A containing kernel(value)."""
    if isinstance(value, Urelement):
        return 0
    return max((hierarchy_stage(m) + 1 for m in value.members), default=1)

def is_pure(value: HfuValue) -> bool:
    return not kernel(value)

def is_transitive(collection: Iterable[HfuValue]) -> bool:
    values = frozenset(collection)
    return all(m in values for v in values if isinstance(v, HfuSet) for m in v.members)

def sort_values(values: Iterable[HfuValue]):
    return sorted(values, key=lambda v: v.key)

def build_V(alpha: int, A: Iterable[Urelement], budget: int = DEFAULT_BUDGET) -> FrozenSet[HfuValue]:
    """V_0(A) = A and V_{n+1}(A) = P(V_n(A)) ∪ A; only finite stages exist here."""
    if alpha < 0:
        raise PreconditionError(f"Stage must be a natural number, got {alpha}")
    atoms = frozenset(A)
    for atom in atoms:
        if not isinstance(atom, Urelement):
            raise PreconditionError(f"V_alpha(A) needs a set of urelements, got {atom!r}")
    stage = atoms
    for n in range(alpha):
        if len(stage) >= math.log2(budget + 1):
            raise BudgetExceededError(
                f"V_{n + 1}(A) would hold at least 2^{len(stage)} values, over the budget of {budget}",
                stage=n + 1, budget=budget,
            )
        size = 2 ** len(stage) + len(atoms)
        if size > budget:
            raise BudgetExceededError(f"V_{n + 1}(A) would hold {size} values, over the budget of {budget}",
                                      stage=n + 1, size=size, budget=budget)
        elements = sort_values(stage)
        subsets = [make_set(c) for r in range(len(elements) + 1) for c in itertools.combinations(elements, r)]
        stage = frozenset(subsets) | atoms
        logger.debug(f"V_{n + 1}(A) built with {len(stage)} values")
    return stage

@dataclass(frozen=True)
class UrelementPool:
    """The finite collection of urelements declared for a session."""
    urelements: Tuple[Urelement, ...]

    @classmethod
    def from_ids(cls, ids: Iterable[str]):
        ids = list(ids)
        if len(set(ids)) != len(ids):
            raise PreconditionError(f"Urelement ids must be unique: {ids}")
        return cls(tuple(sorted((Urelement(i) for i in ids), key=lambda u: u.id)))

    def get(self, id: str) -> Urelement:
        for urelement in self.urelements:
            if urelement.id == id:
                return urelement
        raise UnknownUrelementError(f"Urelement '{id}' is not declared in the pool", id=id)

    def __contains__(self, urelement):
        return urelement in self.urelements

    def __iter__(self):
        return iter(self.urelements)

    def __len__(self):
        return len(self.urelements)

    def as_set(self) -> FrozenSet[Urelement]:
        return frozenset(self.urelements)

    def subsets(self):
        for r in range(len(self.urelements) + 1):
            for combo in itertools.combinations(self.urelements, r):
                yield frozenset(combo)

    def automorphisms(self, budget: int = DEFAULT_BUDGET):
        if math.factorial(len(self.urelements)) > budget:
            raise BudgetExceededError(f"{len(self.urelements)}! permutations exceed the budget of {budget}")
        for image in itertools.permutations(self.urelements):
            yield Automorphism.from_mapping(dict(zip(self.urelements, image)), self.urelements)

@dataclass(frozen=True)
class Automorphism:
    """
    A permutation of an urelement pool, identity off its support, extended to all
    values by pi(x) = {pi(y) : y in x}.
    """
    pool: FrozenSet[Urelement]
    mapping: Tuple[Tuple[Urelement, Urelement], ...] = ()

    @classmethod
    def identity(cls, pool: Iterable[Urelement] = ()):
        return cls(frozenset(pool))

    @classmethod
    def swap(cls, a: Urelement, b: Urelement, pool: Iterable[Urelement] = ()):
        return cls.from_mapping({a: b, b: a}, frozenset(pool) | {a, b})

    @classmethod
    def from_mapping(cls, mapping: Mapping[Urelement, Urelement], pool: Iterable[Urelement] = ()):
        pool = frozenset(pool) | frozenset(mapping) | frozenset(mapping.values())
        full = {u: mapping.get(u, u) for u in pool}
        if len(set(full.values())) != len(pool):
            raise PreconditionError(f"Mapping is not a bijection of the pool: {mapping}")
        moved = sorted(((src, dst) for src, dst in full.items() if src != dst), key=lambda pair: pair[0].id)
        return cls(pool, tuple(moved))

    @property
    def as_dict(self) -> Dict[Urelement, Urelement]:
        return dict(self.mapping)

    def __call__(self, urelement: Urelement) -> Urelement:
        for src, dst in self.mapping:
            if src == urelement:
                return dst
        return urelement

    def support(self) -> FrozenSet[Urelement]:
        return frozenset(src for src, _ in self.mapping)

    def is_identity(self) -> bool:
        return not self.mapping

    def image(self, urelements: Iterable[Urelement]) -> FrozenSet[Urelement]:
        return frozenset(self(u) for u in urelements)

    def fixes_pointwise(self, urelements: Iterable[Urelement]) -> bool:
        return all(self(u) == u for u in urelements)

    def compose(self, other: 'Automorphism') -> 'Automorphism':
        """self after other."""
        pool = self.pool | other.pool
        return Automorphism.from_mapping({u: self(other(u)) for u in pool}, pool)

    def inverse(self) -> 'Automorphism':
        return Automorphism.from_mapping({dst: src for src, dst in self.mapping}, self.pool)

    def apply(self, value: HfuValue) -> HfuValue:
        return apply_automorphism(self, value)

    def __repr__(self):
        if not self.mapping:
            return 'id'
        return '(' + ' '.join(f"{src.id}->{dst.id}" for src, dst in self.mapping) + ')'

@lru_cache(maxsize=CACHE_SIZE)
def apply_automorphism(pi: Automorphism, value: HfuValue) -> HfuValue:
    if isinstance(value, Urelement):
        return pi(value)
    if pi.is_identity():
        return value
    return make_set(apply_automorphism(pi, m) for m in value.members)
