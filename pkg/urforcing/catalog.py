"""
Built-in instance families for the verification suites: a fixed catalog of small
posets, seeded random names of rank at most two, subname-closed pools built from them,
sampled antichain maps and function tables for ultrapowers.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from urforcing.names import EMPTY_NAME, NamePool, PName, close_pool, gamma_name, make_name
from urforcing.poset import Poset, fn_poset
from urforcing.universe import DEFAULT_BUDGET, EMPTY, HfuValue, Urelement, make_set

logger = logging.getLogger('UrforcingCatalog')

CATALOG_URELEMENTS = ('a', 'b', 'c')

@lru_cache(maxsize=None)
def poset_catalog() -> Dict[str, Poset]:
    return {
        'trivial': Poset(['1']),
        'chain2': Poset(['1', 'p'], [('p', '1')]),
        'P2': Poset(['1', 'p', 'q'], [('p', '1'), ('q', '1')]),
        'chain3': Poset(['1', 'p', 'q'], [('q', 'p'), ('p', '1')]),
        'fn_x': fn_poset(['x']),
        'antichain3': Poset(['1', 'p', 'q', 'r'], [('p', '1'), ('q', '1'), ('r', '1')]),
        'diamond': Poset(['1', 'p', 'q', 'r'], [('r', 'p'), ('r', 'q'), ('p', '1'), ('q', '1')]),
        'fork': Poset(['1', 'p', 'q', 'r'], [('p', '1'), ('q', 'p'), ('r', 'p')]),
        'broom': Poset(['1', 'p', 'q', 'r'], [('p', '1'), ('q', '1'), ('r', 'p')]),
        'chain4': Poset(['1', 'p', 'q', 'r'], [('r', 'q'), ('q', 'p'), ('p', '1')]),
    }

def urelements(count: int = len(CATALOG_URELEMENTS)) -> List[Urelement]:
    return [Urelement(i) for i in CATALOG_URELEMENTS[:count]]

def consistent_entries(poset: Poset, candidates: Sequence[Tuple[object, str]]) -> List[Tuple[object, str]]:
    """Keeps candidates in order, dropping any that would put an urelement entry beside a compatible different entry."""
    kept = []
    for entry, condition in candidates:
        clash = any(other != entry and (isinstance(entry, Urelement) or isinstance(other, Urelement))
                    and poset.compatible(condition, q) for other, q in kept)
        if not clash:
            kept.append((entry, condition))
    return kept

def random_name(poset: Poset, blocks: Sequence, rng: np.random.Generator, max_entries: int = 3) -> PName:
    count = int(rng.integers(0, max_entries + 1))
    candidates = [(blocks[int(rng.integers(len(blocks)))], poset.elements[int(rng.integers(len(poset)))])
                  for _ in range(count)]
    return make_name(consistent_entries(poset, candidates))

def seed_names(poset: Poset, rng: np.random.Generator, count: int = 3, urelement_count: int = 3) -> List[PName]:
    """Valid names of rank at most two over the first urelement_count urelements."""
    atoms = urelements(urelement_count)
    level_one = [EMPTY_NAME] + [random_name(poset, atoms + [EMPTY_NAME], rng) for _ in range(3)]
    return [random_name(poset, atoms + level_one, rng) for _ in range(count)]

def antichain_name(poset: Poset) -> PName:
    """Distinct urelements on the atoms of the poset, cycling through the catalog urelements."""
    atoms = urelements()
    return make_name((atoms[i % len(atoms)], p) for i, p in enumerate(poset.atoms()))

@dataclass(frozen=True)
class Instance:
    label: str
    pool: NamePool
    constants: Tuple[PName, ...]

def catalog_instances(seed: int = 1337, pools_per_poset: int = 2, include_checks: bool = True,
                      budget: int = DEFAULT_BUDGET) -> List[Instance]:
    """For every catalog poset: one pool around the atom mixture and the generic's name, then sampled pools."""
    rng = np.random.default_rng(seed)
    instances = []
    for label, poset in poset_catalog().items():
        showcase = (antichain_name(poset), gamma_name(poset))
        instances.append(Instance(f"{label}/showcase", close_pool(poset, showcase, include_checks, budget), showcase))
        for k in range(pools_per_poset):
            seeds = tuple(seed_names(poset, rng, count=int(rng.integers(1, 4)), urelement_count=int(rng.integers(1, 4))))
            instances.append(Instance(f"{label}/sampled-{k}", close_pool(poset, seeds, include_checks, budget), seeds))
    logger.debug(f"Built {len(instances)} catalog instances")
    return instances

@lru_cache(maxsize=64)
def antichains(poset: Poset) -> Tuple[Tuple[str, ...], ...]:
    return tuple(tuple(sorted(s)) for s in poset.subsets() if s and poset.is_antichain(s))

def sample_antichain_map(poset: Poset, names: Sequence[PName], rng: np.random.Generator) -> Dict[str, PName]:
    options = antichains(poset)
    domain = options[int(rng.integers(len(options)))]
    return {p: names[int(rng.integers(len(names)))] for p in domain}

def ultrapower_values() -> List[HfuValue]:
    a, b = urelements(2)
    singleton_a = make_set([a])
    return [a, b, EMPTY, make_set([EMPTY]), singleton_a, make_set([a, b]), make_set([singleton_a])]

def sample_functions(index: Sequence[str], rng: np.random.Generator, count: int = 3,
                     values: Sequence[HfuValue] = ()) -> Dict[str, Dict[str, HfuValue]]:
    values = list(values) or ultrapower_values()
    return {f"f{k}": {i: values[int(rng.integers(len(values)))] for i in index} for k in range(count)}

def constant_functions(index: Sequence[str], values: Mapping[str, HfuValue]) -> Dict[str, Dict[str, HfuValue]]:
    return {label: {i: value for i in index} for label, value in values.items()}
