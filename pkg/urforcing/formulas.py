"""
Formulas of the forcing language {∈, =, ⊆, A, ⩳} with ¬, ∧, ∃ as primitives, and their
truth in finite structures of hereditarily finite values.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Union

import numpy as np

from urforcing.exceptions import UnboundVariableError
from urforcing.universe import HfuSet, HfuValue, Urelement

logger = logging.getLogger('UrforcingFormulas')

VARIABLES = ('x', 'y', 'z', 'w')
ATOM_KINDS = ('in', 'eq', 'sub', 'aeq', 'A')

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name

@dataclass(frozen=True)
class Const:
    value: Any

    def __str__(self):
        return repr(self.value)

Term = Union[Var, Const]

@dataclass(frozen=True)
class Member:
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{self.lhs} ∈ {self.rhs}"

@dataclass(frozen=True)
class Equal:
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"

@dataclass(frozen=True)
class Subset:
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{self.lhs} ⊆ {self.rhs}"

@dataclass(frozen=True)
class AEqual:
    """Same urelement, or neither side a urelement."""
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{self.lhs} ⩳ {self.rhs}"

@dataclass(frozen=True)
class IsUr:
    term: Term

    def __str__(self):
        return f"A({self.term})"

@dataclass(frozen=True)
class Not:
    body: 'Formula'

    def __str__(self):
        return f"¬({self.body})"

@dataclass(frozen=True)
class And:
    left: 'Formula'
    right: 'Formula'

    def __str__(self):
        return f"({self.left} ∧ {self.right})"

@dataclass(frozen=True)
class Exists:
    var: str
    body: 'Formula'

    def __str__(self):
        return f"∃{self.var} ({self.body})"

Formula = Union[Member, Equal, Subset, AEqual, IsUr, Not, And, Exists]
BINARY_ATOMS = {'in': Member, 'eq': Equal, 'sub': Subset, 'aeq': AEqual}
ATOMS = (Member, Equal, Subset, AEqual, IsUr)

def Or(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))

def Implies(left: Formula, right: Formula) -> Formula:
    return Not(And(left, Not(right)))

def Iff(left: Formula, right: Formula) -> Formula:
    return And(Implies(left, right), Implies(right, left))

def Forall(var: str, body: Formula) -> Formula:
    return Not(Exists(var, Not(body)))

def terms_of(phi: Formula) -> tuple:
    if isinstance(phi, IsUr):
        return (phi.term,)
    return (phi.lhs, phi.rhs)

def _map_terms(phi: Formula, fn: Callable[[Term], Term]) -> Formula:
    if isinstance(phi, IsUr):
        return IsUr(fn(phi.term))
    return type(phi)(fn(phi.lhs), fn(phi.rhs))

def substitute(phi: Formula, var: str, value: Any) -> Formula:
    """Replaces the free occurrences of var by the constant value."""
    if isinstance(phi, ATOMS):
        return _map_terms(phi, lambda t: Const(value) if t == Var(var) else t)
    if isinstance(phi, Not):
        return Not(substitute(phi.body, var, value))
    if isinstance(phi, And):
        return And(substitute(phi.left, var, value), substitute(phi.right, var, value))
    if phi.var == var:
        return phi
    return Exists(phi.var, substitute(phi.body, var, value))

def free_vars(phi: Formula) -> FrozenSet[str]:
    if isinstance(phi, ATOMS):
        return frozenset(t.name for t in terms_of(phi) if isinstance(t, Var))
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, And):
        return free_vars(phi.left) | free_vars(phi.right)
    return free_vars(phi.body) - {phi.var}

def constants(phi: Formula) -> frozenset:
    if isinstance(phi, ATOMS):
        return frozenset(t.value for t in terms_of(phi) if isinstance(t, Const))
    if isinstance(phi, Not):
        return constants(phi.body)
    if isinstance(phi, And):
        return constants(phi.left) | constants(phi.right)
    return constants(phi.body)

def size(phi: Formula) -> int:
    if isinstance(phi, ATOMS):
        return 1
    if isinstance(phi, Not):
        return 1 + size(phi.body)
    if isinstance(phi, And):
        return 1 + size(phi.left) + size(phi.right)
    return 1 + size(phi.body)

def quantifier_depth(phi: Formula) -> int:
    if isinstance(phi, ATOMS):
        return 0
    if isinstance(phi, Not):
        return quantifier_depth(phi.body)
    if isinstance(phi, And):
        return max(quantifier_depth(phi.left), quantifier_depth(phi.right))
    return 1 + quantifier_depth(phi.body)

class HfuStructure:
    """
    A finite structure over HfuValues. Quantifiers range over domain; denote maps the
    constants of a formula to values. Subclasses may reinterpret the atomic relations.
    """

    def __init__(self, domain: Iterable, denote: Callable[[Any], Any]):
        self.domain = tuple(domain)
        self.denote = denote

    def member(self, v, w) -> bool:
        return isinstance(w, HfuSet) and v in w

    def equal(self, v, w) -> bool:
        return v == w

    def subset(self, v, w) -> bool:
        members = v.members if isinstance(v, HfuSet) else ()
        return all(self.member(m, w) for m in members)

    def is_ur(self, v) -> bool:
        return isinstance(v, Urelement)

    def aequal(self, v, w) -> bool:
        if self.is_ur(v) or self.is_ur(w):
            return self.is_ur(v) and self.is_ur(w) and self.equal(v, w)
        return True

def _term_value(structure: HfuStructure, term: Term, env: Dict[str, Any]):
    if isinstance(term, Var):
        if term.name not in env:
            raise UnboundVariableError(f"Variable {term.name} is not bound", variable=term.name)
        return env[term.name]
    return structure.denote(term.value)

def holds(structure: HfuStructure, phi: Formula, env: Optional[Dict[str, Any]] = None) -> bool:
    env = env or {}
    if isinstance(phi, IsUr):
        return structure.is_ur(_term_value(structure, phi.term, env))
    if isinstance(phi, (Member, Equal, Subset, AEqual)):
        lhs = _term_value(structure, phi.lhs, env)
        rhs = _term_value(structure, phi.rhs, env)
        if isinstance(phi, Member):
            return structure.member(lhs, rhs)
        if isinstance(phi, Equal):
            return structure.equal(lhs, rhs)
        if isinstance(phi, Subset):
            return structure.subset(lhs, rhs)
        return structure.aequal(lhs, rhs)
    if isinstance(phi, Not):
        return not holds(structure, phi.body, env)
    if isinstance(phi, And):
        return holds(structure, phi.left, env) and holds(structure, phi.right, env)
    return any(holds(structure, phi.body, {**env, phi.var: value}) for value in structure.domain)

def _atoms(terms: Sequence[Term], kinds: Sequence[str]) -> List[Formula]:
    result = []
    for kind in kinds:
        if kind == 'A':
            result.extend(IsUr(t) for t in terms)
        else:
            result.extend(BINARY_ATOMS[kind](lhs, rhs) for lhs in terms for rhs in terms)
    return result

def _layer(consts, bound, depth, quantifiers, kinds) -> List[Formula]:
    terms = [Const(c) for c in consts] + [Var(v) for v in bound]
    atoms = _atoms(terms, kinds)
    if depth == 0:
        return atoms
    lower = _layer(consts, bound, depth - 1, quantifiers, kinds)
    formulas = atoms + lower + [Not(f) for f in lower]
    formulas += [And(f, g) for f, g in itertools.combinations(atoms, 2)]
    if quantifiers > 0 and len(bound) < len(VARIABLES):
        var = VARIABLES[len(bound)]
        inner = _layer(consts, bound + (var,), depth - 1, quantifiers - 1, kinds)
        formulas += [Exists(var, f) for f in inner if var in free_vars(f)]
    return list(dict.fromkeys(formulas))

def generate_formulas(consts: Iterable[Any], depth: int = 2, max_quantifiers: int = 1,
                      max_formulas: Optional[int] = None, rng: Union[None, int, np.random.Generator] = None,
                      kinds: Sequence[str] = ATOM_KINDS) -> List[Formula]:
    """
    Closed formulas over the given constants: atoms at depth 0, then one more layer of
    ¬, ∧ of atoms, and ∃ (whose body mentions the bound variable) per depth step.
    Above max_formulas a seeded subsample is kept, in generation order.
    """
    consts = sorted(set(consts), key=lambda c: getattr(c, 'key', str(c)))
    formulas = [f for f in _layer(consts, (), depth, max_quantifiers, tuple(kinds)) if not free_vars(f)]
    if max_formulas is not None and len(formulas) > max_formulas:
        generator = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        keep = np.sort(generator.choice(len(formulas), size=max_formulas, replace=False))
        logger.debug(f"Subsampled {max_formulas} of {len(formulas)} formulas")
        formulas = [formulas[i] for i in keep]
    return formulas

def hfu_structure(values: Iterable[HfuValue], denote: Callable[[Any], HfuValue]) -> HfuStructure:
    return HfuStructure(sorted(values, key=lambda v: v.key), denote)
