"""
Generic extensions of a name pool, the recursive forcing relation ⊩*, semantic forcing
over generic filters, the forcing-theorem checker and the mixing witness-finder.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from urforcing.exceptions import ConstantNotInPoolError, PreconditionError, UnboundVariableError
from urforcing.formulas import (AEqual, And, Const, Equal, Exists, Formula, HfuStructure, IsUr, Member, Not, Subset,
                                Var, constants, free_vars, holds, hfu_structure, substitute)
from urforcing.names import (LegacyPool, LegacySetName, NamePool, PName, close_legacy_pool, close_pool, embed_j,
                             exhaustive_legacy_names, gamma_name, generic_value, is_check_name, legacy_valuate,
                             make_legacy_name, mix, name_kernel, valuate)
from urforcing.poset import Filter, Poset
from urforcing.universe import HfuSet, HfuValue, Urelement, kernel, is_transitive

logger = logging.getLogger('UrforcingForcingEngine')

@dataclass(frozen=True)
class Extension:
    pool: NamePool
    generic: Filter
    values: FrozenSet[HfuValue]

    def structure(self) -> HfuStructure:
        return hfu_structure(self.values, lambda name: valuate(name, self.generic))

@dataclass(frozen=True)
class ExtensionReport:
    """Finite-scale checks that the extension sits over the ground pool the way a generic extension must."""
    ground_included: bool
    generic_present: Optional[bool]
    transitive: bool
    same_urelements: bool
    kernel_bound: bool
    urelement_sets_covered: bool

    @property
    def ok(self) -> bool:
        return all(v is not False for v in (self.ground_included, self.generic_present, self.transitive,
                                             self.same_urelements, self.kernel_bound, self.urelement_sets_covered))

    def to_json(self):
        return {'ok': self.ok, 'ground_included': self.ground_included, 'generic_present': self.generic_present,
                'transitive': self.transitive, 'same_urelements': self.same_urelements,
                'kernel_bound': self.kernel_bound, 'urelement_sets_covered': self.urelement_sets_covered}

def extension_values(pool: NamePool, generic: Filter) -> FrozenSet[HfuValue]:
    return frozenset(valuate(name, generic) for name in pool.names)

def build_extension(pool: NamePool, generic: Filter) -> Tuple[Extension, ExtensionReport]:
    pool.require_closed()
    poset = pool.poset
    values = extension_values(pool, generic)
    ground = {v for v in (is_check_name(poset, name) for name in pool.names) if v is not None}
    gamma = gamma_name(poset)
    generic_present = generic_value(poset, generic) in values if gamma in pool else None
    ground_urelements = {v for v in ground if isinstance(v, Urelement)}
    extension_urelements = {v for v in values if isinstance(v, Urelement)}
    pool_urelements = pool.urelements()
    urelement_sets = [v for v in values if isinstance(v, HfuSet) and v.members
                      and all(isinstance(m, Urelement) for m in v.members)]
    report = ExtensionReport(
        ground_included=ground <= values,
        generic_present=generic_present,
        transitive=is_transitive(values),
        same_urelements=ground_urelements == extension_urelements,
        kernel_bound=all(kernel(valuate(name, generic)) <= name_kernel(name) for name in pool.names),
        urelement_sets_covered=all(frozenset(v.members) <= pool_urelements for v in urelement_sets),
    )
    logger.debug(f"Extension over {generic.sorted()} has {len(values)} values")
    return Extension(pool, generic, values), report

def satisfies(extension: Extension, phi: Formula) -> bool:
    _require_constants(extension.pool, phi)
    return holds(extension.structure(), phi)

def _require_constants(pool: NamePool, phi: Formula):
    missing = [c for c in constants(phi) if c not in pool]
    if missing:
        raise ConstantNotInPoolError(f"Constant {missing[0]!r} is not a name in the pool", constant=repr(missing[0]))

def _require_closed_formula(phi: Formula):
    unbound = free_vars(phi)
    if unbound:
        raise UnboundVariableError(f"Formula has free variables {sorted(unbound)}", variables=sorted(unbound))

class ForcingEngine:
    """
    Computes, for each formula, the set of conditions forcing it in the sense of ⊩*.
    Results are memoized per formula; name quantifiers range over the pool.
    """

    def __init__(self, pool: NamePool):
        pool.require_closed()
        self.pool = pool
        self.poset = pool.poset
        self.names = pool.sorted_names()
        self._memo: Dict[Formula, np.ndarray] = {}

    def forcing_mask(self, phi: Formula) -> np.ndarray:
        cached = self._memo.get(phi)
        if cached is None:
            cached = self._compute(phi)
            cached.setflags(write=False)
            self._memo[phi] = cached
        return cached

    def forcing_set(self, phi: Formula) -> FrozenSet[str]:
        _require_closed_formula(phi)
        _require_constants(self.pool, phi)
        return self.poset.ids(self.forcing_mask(phi))

    def forces(self, p: str, phi: Formula) -> bool:
        self.poset.index(p)
        return p in self.forcing_set(phi)

    def _dense_below(self, mask: np.ndarray) -> np.ndarray:
        return self.poset.dense_below_mask(mask)

    def _below(self, condition: str) -> np.ndarray:
        return self.poset.leq_matrix[:, self.poset.index(condition)]

    def _no_extension_in(self, mask: np.ndarray) -> np.ndarray:
        """Conditions with no extension in mask."""
        return ~self.poset.leq_matrix[mask].any(axis=0)

    def _compute(self, phi: Formula) -> np.ndarray:
        poset = self.poset
        if isinstance(phi, IsUr):
            dense = np.zeros(len(poset), dtype=bool)
            for _, r in phi.term.value.urelement_entries():
                dense |= self._below(r)
            return self._dense_below(dense)
        if isinstance(phi, AEqual):
            x1, x2 = phi.lhs.value, phi.rhs.value
            same = np.zeros(len(poset), dtype=bool)
            for a, r1 in x1.urelement_entries():
                for b, r2 in x2.urelement_entries():
                    if a == b:
                        same |= self._below(r1) & self._below(r2)
            neither = np.ones(len(poset), dtype=bool)
            for _, r in x1.urelement_entries() + x2.urelement_entries():
                neither &= ~poset.compatibility_matrix[:, poset.index(r)]
            return self._dense_below(same | neither)
        if isinstance(phi, Member):
            x1, x2 = phi.lhs, phi.rhs.value
            dense = np.zeros(len(poset), dtype=bool)
            for y, r in x2.name_entries():
                dense |= self._below(r) & self.forcing_mask(Equal(Const(y), x1))
            return self._dense_below(dense)
        if isinstance(phi, Subset):
            x1, x2 = phi.lhs.value, phi.rhs
            bad = np.zeros(len(poset), dtype=bool)
            for y, r in x1.name_entries():
                bad |= self._below(r) & ~self.forcing_mask(Member(Const(y), x2))
            return self._no_extension_in(bad)
        if isinstance(phi, Equal):
            return (self.forcing_mask(Subset(phi.lhs, phi.rhs)) & self.forcing_mask(Subset(phi.rhs, phi.lhs))
                    & self.forcing_mask(AEqual(phi.lhs, phi.rhs)))
        if isinstance(phi, Not):
            return self._no_extension_in(self.forcing_mask(phi.body))
        if isinstance(phi, And):
            return self.forcing_mask(phi.left) & self.forcing_mask(phi.right)
        dense = np.zeros(len(poset), dtype=bool)
        for name in self.names:
            dense |= self.forcing_mask(substitute(phi.body, phi.var, name))
        return self._dense_below(dense)

@lru_cache(maxsize=32)
def engine_for(pool: NamePool) -> ForcingEngine:
    return ForcingEngine(pool)

def forces_star(pool: NamePool, p: str, phi: Formula) -> bool:
    return engine_for(pool).forces(p, phi)

@lru_cache(maxsize=32)
def _extensions(pool: NamePool) -> Tuple[Tuple[Filter, HfuStructure], ...]:
    return tuple((g, Extension(pool, g, extension_values(pool, g)).structure())
                 for g in pool.poset.generic_filters())

def semantic_set(pool: NamePool, phi: Formula) -> FrozenSet[str]:
    """Conditions p such that phi holds in every extension by a generic filter through p."""
    _require_closed_formula(phi)
    _require_constants(pool, phi)
    truth = {g: holds(structure, phi) for g, structure in _extensions(pool)}
    return frozenset(p for p in pool.poset.elements if all(truth[g] for g in truth if p in g))

def forces_semantic(pool: NamePool, p: str, phi: Formula) -> bool:
    pool.poset.index(p)
    return p in semantic_set(pool, phi)

@dataclass
class ForcingTheoremReport:
    formulas_checked: int = 0
    instances_checked: int = 0
    counterexamples: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def merge(self, other: 'ForcingTheoremReport'):
        self.formulas_checked += other.formulas_checked
        self.instances_checked += other.instances_checked
        self.counterexamples.extend(other.counterexamples)

    def to_json(self):
        return {'ok': self.ok, 'formulas_checked': self.formulas_checked,
                'instances_checked': self.instances_checked, 'counterexamples': self.counterexamples}

def _check_formulas(pool: NamePool, formulas: Sequence[Formula]) -> ForcingTheoremReport:
    engine = engine_for(pool)
    extensions = _extensions(pool)
    report = ForcingTheoremReport()
    for phi in formulas:
        star = engine.forcing_set(phi)
        truth = {g: holds(structure, phi) for g, structure in extensions}
        for p in pool.poset.elements:
            semantic = all(truth[g] for g in truth if p in g)
            if (p in star) != semantic:
                report.counterexamples.append({'kind': 'star-vs-semantic', 'formula': str(phi), 'condition': p,
                                               'star': p in star, 'semantic': semantic})
        for g, value in truth.items():
            if value != bool(star & g.members):
                report.counterexamples.append({'kind': 'truth-lemma', 'formula': str(phi), 'generic': g.sorted(),
                                               'satisfied': value, 'forced_in_generic': bool(star & g.members)})
        report.formulas_checked += 1
        report.instances_checked += len(pool.poset) + len(truth)
    return report

def check_forcing_theorem(pool: NamePool, formulas: Sequence[Formula], n_jobs: int = 1,
                          chunk_size: int = 64) -> ForcingTheoremReport:
    """
    For every condition and formula: p ⊩* phi iff phi holds in every extension through p;
    and for every generic G: phi holds in the extension by G iff some p in G forces it.
    """
    pool.require_closed()
    formulas = list(formulas)
    for phi in formulas:
        _require_closed_formula(phi)
        _require_constants(pool, phi)
    chunks = [formulas[i:i + chunk_size] for i in range(0, len(formulas), chunk_size)]
    if n_jobs == 1 or len(chunks) <= 1:
        parts = [_check_formulas(pool, chunk) for chunk in chunks]
    else:
        parts = Parallel(n_jobs=n_jobs)(delayed(_check_formulas)(pool, chunk) for chunk in chunks)
    report = ForcingTheoremReport()
    for part in parts:
        report.merge(part)
    if report.counterexamples:
        logger.warning(f"Forcing theorem failed on {len(report.counterexamples)} instances")
    return report

def find_witness(pool: NamePool, p: str, exists_phi: Formula) -> Optional[PName]:
    """
    A single name w with p ⊩ phi(w) for p ⊩ ∃x phi(x). A pool name is returned when one
    works at p; otherwise pool witnesses below a maximal antichain of conditions under p
    are mixed. None when the pool holds no witness below some condition under p.
    """
    if not isinstance(exists_phi, Exists):
        raise PreconditionError(f"Expected an existential formula, got {exists_phi}")
    if not forces_semantic(pool, p, exists_phi):
        raise PreconditionError(f"{p} does not force {exists_phi}", condition=p)
    engine = engine_for(pool)
    poset = pool.poset

    def instance(name):
        return substitute(exists_phi.body, exists_phi.var, name)

    for name in engine.names:
        if forces_semantic(pool, p, instance(name)):
            return name
    witnessed = {q: next((n for n in engine.names if engine.forces(q, instance(n))), None) for q in poset.below(p)}
    candidates = [q for q, name in witnessed.items() if name is not None]
    if p not in poset.dense_below_set(candidates):
        logger.info(f"Pool holds no witness below some condition under {p}")
        return None
    antichain = []
    for q in poset.top_down():
        if q in candidates and all(poset.incompatible(q, chosen) for chosen in antichain):
            antichain.append(q)
    witness = mix(poset, {q: witnessed[q] for q in antichain})
    extended = close_pool(poset, list(pool.names) + [witness])
    if not forces_semantic(extended, p, instance(witness)):
        logger.warning(f"Mixture {witness!r} does not certify at {p}")
        return None
    return witness

def legacy_extension_values(pool: LegacyPool, generic: Filter) -> FrozenSet[HfuValue]:
    return frozenset(legacy_valuate(name, generic) for name in pool.names)

@lru_cache(maxsize=64)
def _legacy_structure(pool: LegacyPool, generic: Filter) -> HfuStructure:
    return hfu_structure(legacy_extension_values(pool, generic), lambda name: legacy_valuate(name, generic))

def forces_legacy(pool: LegacyPool, p: str, phi: Formula) -> bool:
    """Semantic forcing for the legacy calculus."""
    _require_closed_formula(phi)
    missing = [c for c in constants(phi) if c not in pool]
    if missing:
        raise ConstantNotInPoolError(f"Constant {missing[0]!r} is not a legacy name in the pool", constant=repr(missing[0]))
    return all(holds(_legacy_structure(pool, g), phi) for g in pool.poset.generics_containing(p))

def legacy_witnesses(pool: LegacyPool, p: str, exists_phi: Exists) -> list:
    return [name for name in pool.sorted_names()
            if forces_legacy(pool, p, substitute(exists_phi.body, exists_phi.var, name))]

@dataclass
class FullnessReport:
    """
    The legacy calculus against the urelement-aware one on the name that mixes
    urelements over a maximal antichain.
    """
    legacy_name: LegacySetName
    legacy_forces_existential: bool
    legacy_names_checked: int
    legacy_witnesses: List
    name: PName
    witness: Optional[PName]
    witness_certified: bool

    @property
    def legacy_full(self) -> bool:
        return bool(self.legacy_witnesses)

    @property
    def ok(self) -> bool:
        """Both calculi force the existential; the urelement-aware one also has a certified witness."""
        return self.legacy_forces_existential and self.witness is not None and self.witness_certified

    def to_json(self):
        return {'ok': self.ok, 'legacy_name': repr(self.legacy_name),
                'legacy_forces_existential': self.legacy_forces_existential,
                'legacy_names_checked': self.legacy_names_checked,
                'legacy_witnesses': [repr(w) for w in self.legacy_witnesses], 'legacy_full': self.legacy_full,
                'name': repr(self.name), 'witness': repr(self.witness) if self.witness is not None else None,
                'witness_certified': self.witness_certified}

def fullness_harness(poset: Poset, assignment: Mapping[str, Urelement]) -> FullnessReport:
    """
    Builds the legacy name {(a_p, p) : p in the antichain}, which forces ∃y (y ∈ x) at the
    top, and searches every legacy name of rank at most one for a witness. Its image
    under j is then handed to find_witness in the urelement-aware calculus.
    """
    antichain = sorted(assignment)
    if not poset.is_maximal_antichain(antichain):
        raise PreconditionError(f"{antichain} is not a maximal antichain", antichain=antichain)
    legacy_name = make_legacy_name((a, p) for p, a in assignment.items())
    exhaustive = exhaustive_legacy_names(poset, assignment.values())
    legacy_pool = close_legacy_pool(poset, list(exhaustive.names) + [legacy_name])
    legacy_phi = Exists('y', Member(Var('y'), Const(legacy_name)))
    legacy_forces = forces_legacy(legacy_pool, poset.top, legacy_phi)
    witnesses = legacy_witnesses(legacy_pool, poset.top, legacy_phi)

    name = embed_j(poset, legacy_name)
    pool = close_pool(poset, [name])
    witness = find_witness(pool, poset.top, Exists('y', Member(Var('y'), Const(name))))
    certified = False
    if witness is not None:
        extended = close_pool(poset, list(pool.names) + [witness])
        certified = forces_semantic(extended, poset.top, Member(Const(witness), Const(name)))
    report = FullnessReport(legacy_name, legacy_forces, len(legacy_pool), witnesses, name, witness, certified)
    logger.info(f"Fullness harness on {antichain}: legacy witnesses {len(witnesses)}, mixed witness {witness!r}")
    return report
