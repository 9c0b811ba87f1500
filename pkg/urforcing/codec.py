"""
JSON grammars for values, posets, names, formulas, ideals and ultrapower inputs, and
the canonical dump used for every report. Decoders raise DecodeError on payloads that
do not follow the grammar; semantic problems (unknown conditions, invalid names) are
left to the core modules.
"""

import json
import logging
import os
import sys
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from urforcing.axiom_lab import Ideal, Ultrafilter
from urforcing.exceptions import DecodeError, PreconditionError
from urforcing.formulas import (AEqual, And, BINARY_ATOMS, Const, Equal, Exists, Formula, IsUr, Member, Not, Subset,
                                Term, Var)
from urforcing.names import LegacyName, PName, make_legacy_name, make_name
from urforcing.poset import Filter, Poset
from urforcing.universe import Automorphism, HfuValue, Urelement, UrelementPool, make_set

logger = logging.getLogger('UrforcingCodec')

_ATOM_KINDS = {Member: 'in', Equal: 'eq', Subset: 'sub', AEqual: 'aeq'}

def dumps(payload, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(payload, sort_keys=True, indent=2)
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))

def parse_json(text: str, source: str = 'input'):
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise DecodeError(f"Malformed JSON in {source}: {err}", source=source)

def load_json_file(path: str):
    """Reads a JSON document from path, or from stdin when path is '-'."""
    if path == '-':
        return parse_json(sys.stdin.read(), 'stdin')
    try:
        with open(path, encoding='utf-8') as f:
            text = f.read()
    except OSError as err:
        raise DecodeError(f"Unable to read {path}: {err}", source=path)
    return parse_json(text, path)

def load_json_argument(argument: str):
    """Inline JSON when the argument looks like JSON, otherwise a path to a JSON file."""
    stripped = argument.strip()
    if stripped[:1] in ('{', '[', '"') or stripped in ('true', 'false', 'null'):
        return parse_json(stripped, 'argument')
    if argument == '-' or os.path.isfile(argument):
        return load_json_file(argument)
    raise DecodeError(f"Argument is neither inline JSON nor an existing file: {argument!r}", source=argument)

def _expect(obj, kind, what):
    if not isinstance(obj, kind):
        raise DecodeError(f"Expected {what}, got {json.dumps(obj)[:80]}")
    return obj

def _single_key(obj, what) -> Tuple[str, Any]:
    _expect(obj, dict, what)
    if len(obj) != 1:
        raise DecodeError(f"Expected {what} with exactly one key, got keys {sorted(obj)}")
    return next(iter(obj.items()))

def _urelement(raw) -> Urelement:
    _expect(raw, str, 'an urelement id')
    try:
        return Urelement(raw)
    except PreconditionError as err:
        raise DecodeError(str(err))

def encode_value(value: HfuValue):
    if isinstance(value, Urelement):
        return {'ur': value.id}
    return {'set': [encode_value(m) for m in value.members]}

def decode_value(obj) -> HfuValue:
    key, body = _single_key(obj, 'a value ({"ur": id} or {"set": [...]})')
    if key == 'ur':
        return _urelement(body)
    if key == 'set':
        return make_set(decode_value(m) for m in _expect(body, list, 'a list of members'))
    raise DecodeError(f"Unknown value tag '{key}'")

def decode_pool(obj) -> UrelementPool:
    if isinstance(obj, dict):
        obj = obj.get('pool', [])
    ids = _expect(obj, list, 'a list of urelement ids')
    return UrelementPool.from_ids(_urelement(i).id for i in ids)

def poset_fields(obj) -> Tuple[List[str], List[Tuple[str, str]], str]:
    _expect(obj, dict, 'a poset object')
    elements = _expect(obj.get('elements'), list, 'a list of condition ids')
    leq = _expect(obj.get('leq', []), list, 'a list of [p, q] pairs')
    top = obj.get('top', '1')
    for element in elements + [top]:
        _expect(element, str, 'a condition id')
    pairs = []
    for pair in leq:
        _expect(pair, list, 'a [p, q] pair')
        pairs.append(tuple(pair))
    return elements, pairs, top

def decode_poset(obj) -> Poset:
    return Poset(*poset_fields(obj))

def encode_filter(generic: Filter) -> List[str]:
    return generic.sorted()

def decode_filter(obj) -> Filter:
    conditions = _expect(obj, list, 'a list of condition ids')
    for condition in conditions:
        _expect(condition, str, 'a condition id')
    return Filter(frozenset(conditions))

def _entries(body, what):
    pairs = []
    for pair in _expect(body, list, f"a list of [entry, condition] pairs in {what}"):
        if not isinstance(pair, list) or len(pair) != 2 or not isinstance(pair[1], str):
            raise DecodeError(f"Malformed entry in {what}: {json.dumps(pair)[:80]}")
        pairs.append(pair)
    return pairs

def encode_name(name: PName):
    return {'pname': [[encode_value(entry) if isinstance(entry, Urelement) else encode_name(entry), condition]
                      for entry, condition in name.entries]}

def decode_name(obj) -> PName:
    key, body = _single_key(obj, 'a name ({"pname": [...]})')
    if key != 'pname':
        raise DecodeError(f"Expected a pname, got '{key}'")
    entries = []
    for entry, condition in _entries(body, 'pname'):
        entry_key, entry_body = _single_key(entry, 'a name entry')
        if entry_key == 'ur':
            entries.append((_urelement(entry_body), condition))
        elif entry_key == 'pname':
            entries.append((decode_name(entry), condition))
        else:
            raise DecodeError(f"Name entries are urelements or names, got '{entry_key}'")
    return make_name(entries)

def encode_legacy_name(name: LegacyName):
    if isinstance(name, Urelement):
        return encode_value(name)
    return {'lname': [[encode_legacy_name(entry), condition] for entry, condition in name.entries]}

def decode_legacy_name(obj) -> LegacyName:
    key, body = _single_key(obj, 'a legacy name ({"ur": id} or {"lname": [...]})')
    if key == 'ur':
        return _urelement(body)
    if key != 'lname':
        raise DecodeError(f"Expected a legacy name, got '{key}'")
    return make_legacy_name((decode_legacy_name(entry), condition) for entry, condition in _entries(body, 'lname'))

def encode_term(term: Term):
    if isinstance(term, Var):
        return {'var': term.name}
    return {'const': encode_name(term.value)}

def encode_formula(phi: Formula):
    if isinstance(phi, IsUr):
        return {'A': encode_term(phi.term)}
    if isinstance(phi, tuple(_ATOM_KINDS)):
        return {'atom': {'kind': _ATOM_KINDS[type(phi)], 'lhs': encode_term(phi.lhs), 'rhs': encode_term(phi.rhs)}}
    if isinstance(phi, Not):
        return {'not': encode_formula(phi.body)}
    if isinstance(phi, And):
        return {'and': [encode_formula(phi.left), encode_formula(phi.right)]}
    return {'exists': {'var': phi.var, 'body': encode_formula(phi.body)}}

def decode_formula(obj, decode_const: Callable[[Any], Any] = decode_name) -> Formula:
    """decode_const turns the payload under "const" into a constant; names by default."""
    key, body = _single_key(obj, 'a formula')

    def term(raw):
        term_key, term_body = _single_key(raw, 'a term ({"var": x} or {"const": ...})')
        if term_key == 'var':
            return Var(_expect(term_body, str, 'a variable name'))
        if term_key == 'const':
            return Const(decode_const(term_body))
        raise DecodeError(f"Unknown term tag '{term_key}'")

    if key == 'atom':
        _expect(body, dict, 'an atom object')
        kind = body.get('kind')
        if kind not in BINARY_ATOMS:
            raise DecodeError(f"Atom kind must be one of {sorted(BINARY_ATOMS)}, got {kind!r}")
        if 'lhs' not in body or 'rhs' not in body:
            raise DecodeError('Atoms need both lhs and rhs')
        return BINARY_ATOMS[kind](term(body['lhs']), term(body['rhs']))
    if key == 'A':
        return IsUr(term(body))
    if key == 'not':
        return Not(decode_formula(body, decode_const))
    if key == 'and':
        parts = _expect(body, list, 'a pair of conjuncts')
        if len(parts) != 2:
            raise DecodeError(f"Conjunctions take exactly two formulas, got {len(parts)}")
        return And(decode_formula(parts[0], decode_const), decode_formula(parts[1], decode_const))
    if key == 'exists':
        _expect(body, dict, 'an exists object')
        var = _expect(body.get('var'), str, 'a variable name')
        if 'body' not in body:
            raise DecodeError('Existential formulas need a body')
        return Exists(var, decode_formula(body['body'], decode_const))
    raise DecodeError(f"Unknown formula tag '{key}'")

def _urelement_set(raw) -> frozenset:
    return frozenset(_urelement(i) for i in _expect(raw, list, 'a list of urelement ids'))

def decode_ideal(obj) -> Ideal:
    _expect(obj, dict, 'an ideal object')
    pool_is_set = obj.get('pool_is_set', True)
    _expect(pool_is_set, bool, 'a boolean pool_is_set')
    family = [_urelement_set(s) for s in _expect(obj.get('family'), list, 'a family of urelement sets')]
    return Ideal(_urelement_set(obj.get('pool')), frozenset(family), pool_is_set)

def decode_ultrapower(obj) -> Tuple[Dict[str, Dict[str, HfuValue]], Ultrafilter]:
    _expect(obj, dict, 'an ultrapower object')
    index = _expect(obj.get('index'), list, 'a list of indices')
    for i in index:
        _expect(i, str, 'an index id')
    generator = _expect(obj.get('generator'), str, 'a generator index')
    functions = {}
    for label, table in _expect(obj.get('functions'), dict, 'a map of functions').items():
        functions[label] = {i: decode_value(v) for i, v in _expect(table, dict, f"the table of {label}").items()}
    return functions, Ultrafilter(frozenset(index), generator)

def encode_automorphism(pi: Automorphism):
    return {'mapping': {src.id: dst.id for src, dst in pi.mapping}}

def decode_urelement_ids(raw) -> frozenset:
    """A JSON list of ids, or a comma-separated string of ids."""
    if isinstance(raw, str) and not raw.strip().startswith('['):
        return frozenset(_urelement(i.strip()) for i in raw.split(',') if i.strip())
    if isinstance(raw, str):
        raw = parse_json(raw, 'urelement list')
    return _urelement_set(raw)

def encode_names(names: Iterable[PName]) -> List[dict]:
    return [encode_name(n) for n in sorted(names, key=lambda n: n.key)]

def encode_map(mapping: Mapping[str, Any], encoder: Callable[[Any], Any]) -> Dict[str, Any]:
    return {k: encoder(v) for k, v in sorted(mapping.items())}

def describe(obj) -> Optional[str]:
    """Which grammar a top-level payload follows, or None."""
    if not isinstance(obj, dict):
        return None
    if 'elements' in obj:
        return 'poset'
    if 'family' in obj:
        return 'ideal'
    if 'pname' in obj:
        return 'name'
    if 'lname' in obj:
        return 'legacy-name'
    if 'name' in obj and 'poset' in obj:
        return 'name-with-poset'
    if 'names' in obj or 'poset' in obj or 'config' in obj:
        return 'session'
    if 'pool' in obj:
        return 'pool'
    if 'index' in obj and 'functions' in obj:
        return 'ultrapower'
    if 'set' in obj or 'ur' in obj:
        return 'value'
    return None
