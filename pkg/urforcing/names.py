"""
P-names with urelements and the legacy calculus in which each urelement names itself.

A PName is a finite set of (entry, condition) pairs where an entry is a urelement or
another PName. An urelement entry (a, p) means the name denotes a itself in every
generic filter through p, so any other entry beside it must sit on an incompatible
condition. Legacy names are urelements or sets of (legacy name, condition) pairs.
"""

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

from urforcing.exceptions import (AmbiguousValuationError, BudgetExceededError, InvalidNameError,
                                  NotAnAntichainError, NotInRangeError, PoolNotClosedError)
from urforcing.poset import Filter, Poset
from urforcing.universe import (CACHE_SIZE, DEFAULT_BUDGET, Automorphism, HfuSet, HfuValue, Urelement, make_set,
                                ordinal, sort_values)

logger = logging.getLogger('UrforcingNames')

def _entry_key(entry, condition):
    return f"({entry.key} {json.dumps(condition)})"

class _NameBase:
    __slots__ = ('entries', 'key', '_hash')
    _open, _close = '<', '>'

    def __init__(self, entries: tuple, key: str):
        object.__setattr__(self, 'entries', entries)
        object.__setattr__(self, 'key', key)
        object.__setattr__(self, '_hash', hash(key))

    @classmethod
    def _build(cls, entries):
        unique = {}
        for entry, condition in entries:
            unique[_entry_key(entry, condition)] = (entry, condition)
        keys = sorted(unique)
        return cls(tuple(unique[k] for k in keys), cls._open + ','.join(keys) + cls._close)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __reduce__(self):
        return (type(self), (self.entries, self.key))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (type(other) is type(self) and self.key == other.key)

    def __lt__(self, other):
        return self.key < other.key

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self):
        return '{' + ', '.join(f"({entry!r}, {condition})" for entry, condition in self.entries) + '}'

    def conditions(self) -> FrozenSet[str]:
        return frozenset(condition for _, condition in self.entries)

    def urelement_entries(self) -> Tuple[Tuple[Urelement, str], ...]:
        return tuple(pair for pair in self.entries if isinstance(pair[0], Urelement))

class PName(_NameBase):
    """A name of the urelement-aware calculus. Build instances with make_name."""
    __slots__ = ()
    _open, _close = '<', '>'

    def name_entries(self) -> Tuple[Tuple['PName', str], ...]:
        return tuple(pair for pair in self.entries if isinstance(pair[0], PName))

class LegacySetName(_NameBase):
    """The set-shaped legacy names; urelements are legacy names of themselves."""
    __slots__ = ()
    _open, _close = '[', ']'

    def set_entries(self) -> Tuple[Tuple['LegacySetName', str], ...]:
        return tuple(pair for pair in self.entries if isinstance(pair[0], LegacySetName))

LegacyName = Union[Urelement, LegacySetName]

def make_name(entries: Iterable[Tuple[Union[Urelement, PName], str]] = ()) -> PName:
    entries = list(entries)
    for entry, condition in entries:
        if not isinstance(entry, (Urelement, PName)) or not isinstance(condition, str):
            raise InvalidNameError(f"Name entries must be (urelement or name, condition id) pairs, got ({entry!r}, {condition!r})")
    return PName._build(entries)

def make_legacy_name(entries: Iterable[Tuple[LegacyName, str]] = ()) -> LegacySetName:
    entries = list(entries)
    for entry, condition in entries:
        if not isinstance(entry, (Urelement, LegacySetName)) or not isinstance(condition, str):
            raise InvalidNameError(f"Legacy entries must be (legacy name, condition id) pairs, got ({entry!r}, {condition!r})")
    return LegacySetName._build(entries)

EMPTY_NAME = make_name()

@dataclass(frozen=True)
class NameReport:
    ok: bool
    law: Optional[str] = None
    path: Tuple[str, ...] = ()
    witnesses: Tuple[str, ...] = ()
    message: str = ''

    def to_json(self):
        if self.ok:
            return {'ok': True}
        return {'ok': False, 'law': self.law, 'path': list(self.path), 'witnesses': list(self.witnesses),
                'message': self.message}

def _pair_repr(entry, condition):
    return f"({entry!r}, {condition})"

def _name_violation(poset: Poset, name: PName, path: Tuple[str, ...]) -> Optional[NameReport]:
    for entry, condition in name.entries:
        if condition not in poset:
            return NameReport(False, 'unknown-condition', path, (_pair_repr(entry, condition),),
                              f"Condition '{condition}' is not in the poset")
    for a, p in name.urelement_entries():
        for entry, q in name.entries:
            if entry != a and poset.compatible(p, q):
                return NameReport(False, 'incompatibility', path, (_pair_repr(a, p), _pair_repr(entry, q)),
                                  f"Urelement entry ({a!r}, {p}) sits on a condition compatible with {q}")
    for index, (entry, condition) in enumerate(name.entries):
        if isinstance(entry, PName):
            report = _name_violation(poset, entry, path + (f"{index}:{_pair_repr(entry, condition)}",))
            if report is not None:
                return report
    return None

def is_valid_name(poset: Poset, candidate) -> NameReport:
    """The incompatibility condition, checked hereditarily; a violation carries the path of entries leading to it."""
    if not isinstance(candidate, PName):
        return NameReport(False, 'malformed', (), (repr(candidate),), 'Not a name of the urelement-aware calculus')
    return _valid_name_report(poset, candidate)

@lru_cache(maxsize=CACHE_SIZE)
def _valid_name_report(poset: Poset, name: PName) -> NameReport:
    return _name_violation(poset, name, ()) or NameReport(True)

def require_valid(poset: Poset, name: PName) -> PName:
    report = is_valid_name(poset, name)
    if not report.ok:
        raise InvalidNameError(report.message, law=report.law, path=list(report.path), witnesses=list(report.witnesses))
    return name

def is_valid_legacy_name(poset: Poset, candidate) -> bool:
    if isinstance(candidate, Urelement):
        return True
    if not isinstance(candidate, LegacySetName):
        return False
    return all(condition in poset and is_valid_legacy_name(poset, entry) for entry, condition in candidate.entries)

@lru_cache(maxsize=CACHE_SIZE)
def check_name(poset: Poset, value: HfuValue) -> PName:
    if isinstance(value, Urelement):
        return make_name([(value, poset.top)])
    return make_name((check_name(poset, member), poset.top) for member in value.members)

def condition_value(poset: Poset, condition: str) -> HfuSet:
    """Conditions live in the universe as pure naturals: their index in the poset's element order."""
    return ordinal(poset.index(condition))

def gamma_name(poset: Poset) -> PName:
    """The canonical name for the generic filter."""
    return make_name((check_name(poset, condition_value(poset, p)), p) for p in poset.elements)

def generic_value(poset: Poset, generic: Union[Filter, Iterable[str]]) -> HfuSet:
    return make_set(condition_value(poset, p) for p in _conditions_of(generic))

def _conditions_of(generic) -> FrozenSet[str]:
    if isinstance(generic, Filter):
        return generic.members
    return frozenset(generic)

def valuate(name: PName, generic: Union[Filter, Iterable[str]]) -> HfuValue:
    return _valuate(name, _conditions_of(generic))

@lru_cache(maxsize=CACHE_SIZE)
def _valuate(name: PName, generic: FrozenSet[str]) -> HfuValue:
    fired = {entry for entry, condition in name.urelement_entries() if condition in generic}
    if len(fired) > 1:
        raise AmbiguousValuationError(f"Name {name!r} denotes several urelements {sort_values(fired)}",
                                      urelements=[u.id for u in sort_values(fired)])
    if fired:
        return next(iter(fired))
    return make_set(_valuate(entry, generic) for entry, condition in name.name_entries() if condition in generic)

def legacy_valuate(name: LegacyName, generic: Union[Filter, Iterable[str]]) -> HfuValue:
    return _legacy_valuate(name, _conditions_of(generic))

@lru_cache(maxsize=CACHE_SIZE)
def _legacy_valuate(name: LegacyName, generic: FrozenSet[str]) -> HfuValue:
    if isinstance(name, Urelement):
        return name
    return make_set(_legacy_valuate(entry, generic) for entry, condition in name.entries if condition in generic)

def mix(poset: Poset, assignment: Mapping[str, PName]) -> PName:
    """
    A single name that agrees with assignment[p] in every generic filter through p,
    for each p in the antichain dom(assignment).
    """
    domain = sorted(assignment)
    if not poset.is_antichain(domain):
        raise NotAnAntichainError(f"Mixing needs an antichain, got {domain}", domain=domain)
    for p in domain:
        require_valid(poset, assignment[p])
    entries = []
    for p in domain:
        for entry, q in assignment[p].entries:
            entries.extend((entry, r) for r in poset.below(p) if poset.leq(r, q))
    return make_name(entries)

def purify(name: PName, A: Iterable[Urelement]) -> PName:
    """Hereditarily throws out urelement entries outside A."""
    return _purify(name, frozenset(A))

@lru_cache(maxsize=CACHE_SIZE)
def _purify(name: PName, A: FrozenSet[Urelement]) -> PName:
    entries = []
    for entry, condition in name.entries:
        if isinstance(entry, PName):
            entries.append((_purify(entry, A), condition))
        elif entry in A:
            entries.append((entry, condition))
    return make_name(entries)

@lru_cache(maxsize=CACHE_SIZE)
def set_counterpart(poset: Poset, name: PName) -> PName:
    """
    A name in the range of embed_j that valuates to the same set as name
    whenever name valuates to a set, and to the set of urelements name would have
    mixed in otherwise.
    """
    entries = []
    for child, p in name.name_entries():
        child_conditions = [r for _, r in child.urelement_entries()]
        counterpart = set_counterpart(poset, child)
        for s in poset.below(p):
            if all(poset.incompatible(s, r) for r in child_conditions):
                entries.append((counterpart, s))
        for a, r in child.urelement_entries():
            checked = check_name(poset, a)
            entries.extend((checked, s) for s in poset.below(p) if poset.leq(s, r))
    return make_name(entries)

@lru_cache(maxsize=CACHE_SIZE)
def embed_j(poset: Poset, name: LegacyName) -> PName:
    if isinstance(name, Urelement):
        return make_name([(name, poset.top)])
    return make_name((embed_j(poset, entry), condition) for entry, condition in name.entries)

@lru_cache(maxsize=CACHE_SIZE)
def j_preimage(poset: Poset, name: PName) -> LegacyName:
    """The legacy name sigma with embed_j(sigma) == name."""
    urelement_entries = name.urelement_entries()
    if urelement_entries:
        if len(name.entries) == 1 and urelement_entries[0][1] == poset.top:
            return urelement_entries[0][0]
        raise NotInRangeError(f"{name!r} is not the image of a legacy name", name=repr(name))
    return make_legacy_name((j_preimage(poset, entry), condition) for entry, condition in name.entries)

@lru_cache(maxsize=CACHE_SIZE)
def act(pi: Automorphism, name: PName) -> PName:
    if pi.is_identity():
        return name
    return make_name((pi(entry) if isinstance(entry, Urelement) else act(pi, entry), condition)
                     for entry, condition in name.entries)

@lru_cache(maxsize=CACHE_SIZE)
def name_rank(name: Union[PName, LegacyName]) -> int:
    if isinstance(name, Urelement):
        return 0
    return max((name_rank(entry) + 1 for entry, _ in name.entries), default=0)

@lru_cache(maxsize=CACHE_SIZE)
def name_kernel(name: Union[PName, LegacyName]) -> FrozenSet[Urelement]:
    if isinstance(name, Urelement):
        return frozenset([name])
    result = frozenset()
    for entry, _ in name.entries:
        result |= name_kernel(entry)
    return result

@lru_cache(maxsize=CACHE_SIZE)
def subnames(name: PName) -> FrozenSet[PName]:
    """Every name occurring as an entry, hereditarily; name itself is not included."""
    result = set()
    for entry, _ in name.name_entries():
        result.add(entry)
        result |= subnames(entry)
    return frozenset(result)

@lru_cache(maxsize=CACHE_SIZE)
def legacy_subnames(name: LegacyName) -> FrozenSet[LegacyName]:
    if isinstance(name, Urelement):
        return frozenset()
    result = set()
    for entry, _ in name.entries:
        result.add(entry)
        result |= legacy_subnames(entry)
    return frozenset(result)

def is_check_name(poset: Poset, name: PName) -> Optional[HfuValue]:
    """The ground value v with check_name(v) == name, or None."""
    if any(condition != poset.top for _, condition in name.entries):
        return None
    urelement_entries = name.urelement_entries()
    if urelement_entries:
        return urelement_entries[0][0] if len(name.entries) == 1 else None
    members = []
    for entry, _ in name.entries:
        value = is_check_name(poset, entry)
        if value is None:
            return None
        members.append(value)
    value = make_set(members)
    return value if check_name(poset, value) == name else None

@dataclass(frozen=True)
class NamePool:
    """A finite subname-closed collection of names standing in for the ground model's names."""
    poset: Poset
    names: FrozenSet[PName]

    def __contains__(self, name):
        return name in self.names

    def __iter__(self):
        return iter(self.sorted_names())

    def __len__(self):
        return len(self.names)

    def sorted_names(self) -> List[PName]:
        return sorted(self.names, key=lambda n: n.key)

    def urelements(self) -> FrozenSet[Urelement]:
        result = frozenset()
        for name in self.names:
            result |= name_kernel(name)
        return result

    def missing_subnames(self) -> FrozenSet[PName]:
        result = set()
        for name in self.names:
            result |= subnames(name) - self.names
        return frozenset(result)

    def missing_checks(self) -> FrozenSet[PName]:
        return frozenset(check_name(self.poset, a) for a in self.urelements()) - self.names

    def is_closed(self, require_checks: bool = False) -> bool:
        if self.missing_subnames():
            return False
        return not (require_checks and self.missing_checks())

    def require_closed(self):
        missing = self.missing_subnames()
        if missing:
            raise PoolNotClosedError(f"Pool misses {len(missing)} subnames, e.g. {min(missing, key=lambda n: n.key)!r}",
                                     missing=len(missing))

@dataclass(frozen=True)
class LegacyPool:
    poset: Poset
    names: FrozenSet[LegacyName]

    def __contains__(self, name):
        return name in self.names

    def __iter__(self):
        return iter(self.sorted_names())

    def __len__(self):
        return len(self.names)

    def sorted_names(self) -> List[LegacyName]:
        return sorted(self.names, key=lambda n: n.key)

def close_pool(poset: Poset, seeds: Iterable[PName], include_checks: bool = True,
               budget: int = DEFAULT_BUDGET) -> NamePool:
    """The smallest subname-closed pool holding seeds, plus check-names of every urelement mentioned."""
    names = set()
    for seed in seeds:
        require_valid(poset, seed)
        names.add(seed)
        names |= subnames(seed)
        if len(names) > budget:
            raise BudgetExceededError(f"Pool exceeds the budget of {budget} names", budget=budget)
    if include_checks:
        kernel = frozenset().union(*(name_kernel(n) for n in names)) if names else frozenset()
        names |= {check_name(poset, a) for a in kernel}
    logger.debug(f"Closed pool with {len(names)} names")
    return NamePool(poset, frozenset(names))

def close_legacy_pool(poset: Poset, seeds: Iterable[LegacyName]) -> LegacyPool:
    names = set()
    for seed in seeds:
        if not is_valid_legacy_name(poset, seed):
            raise InvalidNameError(f"Not a legacy name over the poset: {seed!r}")
        names.add(seed)
        names |= legacy_subnames(seed)
    return LegacyPool(poset, frozenset(names))

def legacy_companion(pool: NamePool) -> LegacyPool:
    """Legacy names covering the pool: preimages of set-counterparts plus the urelements the pool mentions."""
    seeds = set(pool.urelements())
    for name in pool.names:
        seeds.add(j_preimage(pool.poset, set_counterpart(pool.poset, name)))
    return close_legacy_pool(pool.poset, seeds)

def paired_pools(pool: NamePool) -> Tuple[NamePool, LegacyPool]:
    """A name pool and a legacy pool whose extensions coincide under every generic filter."""
    legacy = legacy_companion(pool)
    images = [embed_j(pool.poset, sigma) for sigma in legacy.names]
    return close_pool(pool.poset, list(pool.names) + images), legacy

def exhaustive_legacy_names(poset: Poset, urelements: Iterable[Urelement], budget: int = DEFAULT_BUDGET) -> LegacyPool:
    """The urelements together with every legacy set whose entries pair a urelement with a condition."""
    urelements = sort_values(frozenset(urelements))
    pairs = [(a, p) for a in urelements for p in poset.elements]
    if 2 ** len(pairs) > budget:
        raise BudgetExceededError(f"{2 ** len(pairs)} legacy sets exceed the budget of {budget}")
    names = set(urelements)
    for mask in range(2 ** len(pairs)):
        names.add(make_legacy_name(pair for i, pair in enumerate(pairs) if mask >> i & 1))
    return LegacyPool(poset, frozenset(names))

