"""
Exhaustive verification suites run by `urforcing check`. Each suite sweeps a family of
built-in instances (plus the session's pool when one is loaded) and collects
counterexample records; an empty list means the checked property held everywhere.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence

import numpy as np
from tqdm import tqdm

from urforcing.axiom_lab import (HIERARCHY_NODES, Ideal, Ultrafilter, hierarchy_edges, ideal_swap, ideals_on,
                                 internal_ultrapower, is_a_ideal, verify_ideal_swap)
from urforcing.catalog import (Instance, catalog_instances, constant_functions, poset_catalog, sample_antichain_map,
                               sample_functions, urelements)
from urforcing.configuration import UrforcingConfiguration
from urforcing.exceptions import NoSpareUrelementError
from urforcing.formulas import AEqual, Const, Formula, Not, generate_formulas
from urforcing.forcing import (ForcingEngine, build_extension, check_forcing_theorem, engine_for, extension_values,
                               fullness_harness, legacy_extension_values)
from urforcing.names import (embed_j, is_valid_name, j_preimage, legacy_companion, legacy_valuate, mix, name_kernel,
                             paired_pools, purify, set_counterpart, valuate)
from urforcing.poset import enumerate_posets
from urforcing.universe import HfuSet, Urelement, kernel, make_set

logger = logging.getLogger('UrforcingSuites')

@dataclass
class SuiteReport:
    suite: str
    checked: int = 0
    counterexamples: List[dict] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def fail(self, kind: str, /, **record):
        self.counterexamples.append({'kind': kind, **record})

    def expect(self, holds: bool, kind: str, /, **record):
        self.checked += 1
        if not holds:
            self.fail(kind, **record)

    def to_json(self):
        return {'suite': self.suite, 'ok': self.ok, 'checked': self.checked,
                'counterexamples': self.counterexamples, 'details': self.details}

def _progress(items, config: UrforcingConfiguration, desc: str):
    return tqdm(items, desc=desc, disable=(not config.progress))

def _instances(config: UrforcingConfiguration, extra: Sequence[Instance]) -> List[Instance]:
    return catalog_instances(config.seed, config.pools_per_poset, config.include_pool_checks, config.budget) + list(extra)

def forcing_properties(engine: ForcingEngine, phi: Formula) -> List[dict]:
    """Monotonicity, density and coherence of negation for the forcing set of phi."""
    poset = engine.poset
    star = engine.forcing_mask(phi)
    negation = engine.forcing_mask(Not(phi))
    records = []
    below_forcing = poset.leq_matrix[:, star].any(axis=1)
    if (below_forcing & ~star).any():
        records.append({'kind': 'monotonicity', 'formula': str(phi),
                        'conditions': sorted(poset.ids(below_forcing & ~star))})
    if (poset.dense_below_mask(star) != star).any():
        records.append({'kind': 'density', 'formula': str(phi),
                        'conditions': sorted(poset.ids(poset.dense_below_mask(star) ^ star))})
    if (star & negation).any():
        records.append({'kind': 'negation-consistency', 'formula': str(phi), 'conditions': sorted(poset.ids(star & negation))})
    if not poset.dense_below_mask(star | negation).all():
        records.append({'kind': 'negation-decides', 'formula': str(phi)})
    return records

def _aequal_postcondition(report: SuiteReport, instance: Instance):
    pool = instance.pool
    engine = engine_for(pool)
    for x, y in itertools.product(instance.constants, repeat=2):
        forced = engine.forcing_set(AEqual(Const(x), Const(y)))
        for g in pool.poset.generic_filters():
            if not forced & g.members:
                continue
            vx, vy = valuate(x, g), valuate(y, g)
            same = vx == vy if isinstance(vx, Urelement) or isinstance(vy, Urelement) else True
            report.expect(same, 'aequal-postcondition', instance=instance.label, lhs=repr(x), rhs=repr(y),
                          generic=g.sorted())

def forcing_theorem_suite(config: UrforcingConfiguration, extra: Sequence[Instance] = ()) -> SuiteReport:
    report = SuiteReport('forcing-theorem')
    rng = np.random.default_rng(config.seed)
    for instance in _progress(_instances(config, extra), config, 'forcing-theorem'):
        formulas = generate_formulas(instance.constants, config.depth, config.max_quantifiers, config.max_formulas, rng)
        result = check_forcing_theorem(instance.pool, formulas, n_jobs=config.n_jobs)
        report.checked += result.instances_checked
        report.counterexamples.extend({'instance': instance.label, **record} for record in result.counterexamples)
        engine = engine_for(instance.pool)
        for phi in formulas:
            for record in forcing_properties(engine, phi):
                report.counterexamples.append({'instance': instance.label, **record})
            report.checked += 1
        _aequal_postcondition(report, instance)
        report.details[instance.label] = {'names': len(instance.pool), 'formulas': result.formulas_checked}
    return report

def mixtures_suite(config: UrforcingConfiguration, extra: Sequence[Instance] = ()) -> SuiteReport:
    """valuate(mix(f), G) == valuate(f(p), G) for every p in the antichain and every generic G through p."""
    report = SuiteReport('mixtures')
    rng = np.random.default_rng(config.seed)
    instances = _instances(config, extra)
    for k in _progress(range(config.samples), config, 'mixtures'):
        instance = instances[k % len(instances)]
        poset = instance.pool.poset
        assignment = sample_antichain_map(poset, instance.pool.sorted_names(), rng)
        mixture = mix(poset, assignment)
        report.expect(is_valid_name(poset, mixture).ok, 'mixture-validity', instance=instance.label, mixture=repr(mixture))
        for p, name in assignment.items():
            for g in poset.generics_containing(p):
                report.expect(valuate(mixture, g) == valuate(name, g), 'mixture-law', instance=instance.label,
                              condition=p, generic=g.sorted(), name=repr(name), mixture=repr(mixture))
    report.details['samples'] = config.samples
    return report

def kernel_suite(config: UrforcingConfiguration, extra: Sequence[Instance] = ()) -> SuiteReport:
    """Kernel bounds of valuations and purifications, validity of the name constructions, extension shape."""
    report = SuiteReport('kernel')
    for instance in _progress(_instances(config, extra), config, 'kernel'):
        pool, poset, label = instance.pool, instance.pool.poset, instance.label
        generics = poset.generic_filters()
        kernels = [frozenset(c) for r in range(len(pool.urelements()) + 1)
                   for c in itertools.combinations(sorted(pool.urelements(), key=lambda u: u.id), r)]
        for name in pool.sorted_names():
            for g in generics:
                report.expect(kernel(valuate(name, g)) <= name_kernel(name), 'valuation-kernel', instance=label,
                              name=repr(name), generic=g.sorted())
            for A in kernels:
                purified = purify(name, A)
                report.expect(name_kernel(purified) <= A, 'purify-kernel', instance=label, name=repr(name),
                              urelements=sorted(u.id for u in A))
                report.expect(is_valid_name(poset, purified).ok, 'purify-validity', instance=label, name=repr(name))
            report.expect(is_valid_name(poset, set_counterpart(poset, name)).ok, 'set-counterpart-validity',
                          instance=label, name=repr(name))
        for sigma in legacy_companion(pool).sorted_names():
            report.expect(is_valid_name(poset, embed_j(poset, sigma)).ok, 'embedding-validity', instance=label,
                          legacy_name=repr(sigma))
        for g in generics:
            _, extension_report = build_extension(pool, g)
            report.expect(extension_report.ok, 'extension-shape', instance=label, generic=g.sorted(),
                          report=extension_report.to_json())
    return report

def embedding_suite(config: UrforcingConfiguration, extra: Sequence[Instance] = ()) -> SuiteReport:
    """j-faithfulness, set-counterparts, the range of j and equality of the two extensions."""
    report = SuiteReport('appendix')
    for instance in _progress(_instances(config, extra), config, 'appendix'):
        pool, poset, label = instance.pool, instance.pool.poset, instance.label
        generics = poset.generic_filters()
        legacy = legacy_companion(pool)
        for sigma in legacy.sorted_names():
            image = embed_j(poset, sigma)
            for g in generics:
                report.expect(valuate(image, g) == legacy_valuate(sigma, g), 'j-faithfulness', instance=label,
                              legacy_name=repr(sigma), generic=g.sorted())
        for name in pool.sorted_names():
            counterpart = set_counterpart(poset, name)
            report.expect(embed_j(poset, j_preimage(poset, counterpart)) == counterpart, 'range-of-j', instance=label,
                          name=repr(name))
            for g in generics:
                value = valuate(name, g)
                if isinstance(value, HfuSet):
                    report.expect(valuate(counterpart, g) == value, 'set-counterpart', instance=label, name=repr(name),
                                  generic=g.sorted())
        paired, paired_legacy = paired_pools(pool)
        for g in generics:
            report.expect(extension_values(paired, g) == legacy_extension_values(paired_legacy, g),
                          'extensions-coincide', instance=label, generic=g.sorted())
    return report

def fullness_suite(config: UrforcingConfiguration, extra: Sequence[Instance] = ()) -> SuiteReport:
    """
    Legacy names over a maximal antichain of two or more conditions carrying distinct
    urelements force an existential without any legacy witness; the mixed name is one.
    """
    report = SuiteReport('remark33')
    atoms = urelements()
    cases = []
    for label, poset in poset_catalog().items():
        for antichain in poset.maximal_antichains(config.budget):
            if 2 <= len(antichain) <= len(atoms):
                cases.append((label, poset, sorted(antichain)))
    for label, poset, antichain in _progress(cases, config, 'remark33'):
        assignment = {p: atoms[i] for i, p in enumerate(antichain)}
        result = fullness_harness(poset, assignment)
        record = {'poset': label, 'antichain': antichain}
        report.expect(result.legacy_forces_existential, 'legacy-existential', **record)
        report.expect(not result.legacy_full, 'legacy-witness-found', witnesses=[repr(w) for w in result.legacy_witnesses],
                      **record)
        report.expect(result.ok, 'mixed-witness', **record, report=result.to_json())
        report.details[f"{label}:{','.join(antichain)}"] = {
            'legacy_names_checked': result.legacy_names_checked,
            'witness': repr(result.witness) if result.witness is not None else None,
        }
    return report

def _ultrapower_formulas(labels, config, rng):
    return generate_formulas(labels, depth=config.depth, max_quantifiers=0, max_formulas=config.max_formulas, rng=rng,
                             kinds=('in', 'eq', 'A'))

def los_suite(config: UrforcingConfiguration, extra: Sequence[Instance] = ()) -> SuiteReport:
    """Both sides of the ultrapower criterion agree for every principal ultrafilter on up to four indices."""
    report = SuiteReport('los')
    rng = np.random.default_rng(config.seed)
    a = urelements(1)[0]
    ground = {'c0': a, 'c1': make_set([a]), 'c2': make_set()}
    for size in _progress(range(1, 5), config, 'los'):
        index = [f"i{k}" for k in range(size)]
        for generator in index:
            ultrafilter = Ultrafilter(frozenset(index), generator)
            functions = sample_functions(index, rng)
            for phi in _ultrapower_formulas(sorted(functions), config, rng):
                result = internal_ultrapower(functions, ultrafilter, phi)
                report.expect(result.agree, 'los', index=index, generator=generator, formula=str(phi),
                              result=result.to_json())
            constants = constant_functions(index, ground)
            for phi in _ultrapower_formulas(sorted(constants), config, rng):
                result = internal_ultrapower(constants, ultrafilter, phi)
                report.expect(result.agree, 'los-constant', index=index, generator=generator, formula=str(phi))
    return report

def _families(pool):
    subsets = [frozenset(c) for r in range(len(pool) + 1)
               for c in itertools.combinations(sorted(pool, key=lambda u: u.id), r)]
    for mask in range(2 ** len(subsets)):
        yield frozenset(s for i, s in enumerate(subsets) if mask >> i & 1)

def ideal_oracle(pool, family, pool_is_set: bool) -> bool:
    """The four ideal conditions written out directly, as an independent check on is_a_ideal."""
    if any(not s <= pool for s in family):
        return False
    excludes_pool = not (pool_is_set and pool in family)
    unions = all(s | t in family for s in family for t in family)
    subsets = all(frozenset(c) in family for s in family for r in range(len(s))
                  for c in itertools.combinations(sorted(s, key=lambda u: u.id), r))
    singletons = all(frozenset([a]) in family for a in pool)
    return excludes_pool and unions and subsets and singletons

def ideals_suite(config: UrforcingConfiguration, extra: Sequence[Instance] = ()) -> SuiteReport:
    report = SuiteReport('ideals')
    swappable = []
    for size in _progress(range(4), config, 'ideals'):
        pool = frozenset(urelements(size))
        for pool_is_set in (True, False):
            accepted = set()
            for family in _families(pool):
                candidate = Ideal(pool, family, pool_is_set)
                verdict = is_a_ideal(candidate).ok
                report.expect(verdict == ideal_oracle(pool, family, pool_is_set), 'ideal-oracle', size=size,
                              pool_is_set=pool_is_set, ideal=candidate.to_json())
                if verdict:
                    accepted.add(candidate)
            report.expect(accepted == set(ideals_on(pool, pool_is_set)), 'ideals-on', size=size, pool_is_set=pool_is_set)
            report.details[f"size={size},pool_is_set={pool_is_set}"] = len(accepted)
            swappable.extend(accepted)
        for bound in range(size + 1):
            swappable.append(Ideal.of(pool, _families_bounded(pool, bound), pool_is_set=False))
    for ideal in swappable:
        for A in sorted(ideal.family, key=lambda s: (len(s), sorted(u.id for u in s))):
            for a in sorted(A, key=lambda u: u.id):
                record = {'ideal': ideal.to_json(), 'A': sorted(u.id for u in A), 'a': a.id}
                if A == ideal.pool:
                    try:
                        ideal_swap(a, A, ideal)
                        report.expect(False, 'swap-without-spare', **record)
                    except NoSpareUrelementError:
                        report.checked += 1
                    continue
                pi = ideal_swap(a, A, ideal)
                report.expect(all(verify_ideal_swap(pi, a, A, ideal).values()), 'ideal-swap', **record)
    return report

def _families_bounded(pool, bound):
    return [frozenset(c) for r in range(bound + 1) for c in itertools.combinations(sorted(pool, key=lambda u: u.id), r)]

def genericity_suite(config: UrforcingConfiguration, extra: Sequence[Instance] = ()) -> SuiteReport:
    """On every poset with at most five elements the filters meeting all dense sets are the atoms' closures."""
    report = SuiteReport('genericity')
    posets = list(enumerate_posets(5))
    for poset in _progress(posets, config, 'genericity'):
        dense = poset.dense_subsets(config.budget)
        meeting = {f.members for f in poset.filters(config.budget) if all(f.members & d for d in dense)}
        principal = {g.members for g in poset.generic_filters()}
        report.expect(meeting == principal, 'genericity', poset=poset.to_json(),
                      meeting=sorted(sorted(m) for m in meeting), principal=sorted(sorted(m) for m in principal))
    report.details['posets'] = len(posets)
    return report

def diagram_suite(config: UrforcingConfiguration, extra: Sequence[Instance] = ()) -> SuiteReport:
    report = SuiteReport('diagram')
    edges = hierarchy_edges()
    pairs = [(e.source, e.target) for e in edges]
    report.expect(len(pairs) == len(set(pairs)), 'duplicate-edge')
    for edge in edges:
        report.expect(edge.source in HIERARCHY_NODES and edge.target in HIERARCHY_NODES, 'unknown-node',
                      edge=edge.to_json())
        report.expect(bool(edge.citation and edge.justification), 'missing-citation', edge=edge.to_json())
    used = {n for pair in pairs for n in pair}
    report.expect(used == set(HIERARCHY_NODES), 'isolated-node', nodes=sorted(set(HIERARCHY_NODES) - used))
    report.expect(('RP⁻', 'Collection') in pairs and ('Collection', 'RP') in pairs and ('RP', 'RP⁻') in pairs,
                  'reflection-cycle')
    report.details['edges'] = len(edges)
    return report

SUITES: Dict[str, Callable[..., SuiteReport]] = {
    'forcing-theorem': forcing_theorem_suite,
    'mixtures': mixtures_suite,
    'kernel': kernel_suite,
    'appendix': embedding_suite,
    'remark33': fullness_suite,
    'los': los_suite,
    'ideals': ideals_suite,
    'genericity': genericity_suite,
    'diagram': diagram_suite,
}

def run_suite(name: str, config: UrforcingConfiguration, extra: Sequence[Instance] = ()) -> SuiteReport:
    if name == 'all':
        report = SuiteReport('all')
        for suite_name in SUITES:
            part = run_suite(suite_name, config, extra)
            report.checked += part.checked
            report.counterexamples.extend({'suite': suite_name, **record} for record in part.counterexamples)
            report.details[suite_name] = {'ok': part.ok, 'checked': part.checked,
                                          'counterexamples': len(part.counterexamples)}
        return report
    logger.info(f"Running suite {name}")
    report = SUITES[name](config, extra)
    if report.counterexamples:
        logger.warning(f"Suite {name} found {len(report.counterexamples)} counterexamples in {report.checked} checks")
    else:
        logger.info(f"Suite {name} passed {report.checked} checks")
    return report

SUITE_NAMES = tuple(SUITES) + ('all',)
