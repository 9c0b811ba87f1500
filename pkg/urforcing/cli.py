"""
Command-line front end. Every sub-command prints one JSON document on stdout (one
canonical line unless --pretty) and exits with 0 on success, 1 on an invalid object or
counterexamples, 2 on unparsable input and 3 on any other error.
"""

import argparse
import logging
import sys
from typing import Callable, Dict, Tuple

from urforcing.axiom_lab import diagram_to_dot, hierarchy_edges, is_a_ideal
from urforcing.codec import (decode_filter, decode_formula, decode_ideal, decode_legacy_name, decode_name, decode_pool,
                             decode_ultrapower, decode_urelement_ids, decode_value, describe, dumps, encode_filter,
                             encode_legacy_name, encode_name, encode_value, load_json_argument, load_json_file,
                             poset_fields)
from urforcing.configuration import UrforcingConfiguration
from urforcing.exceptions import DecodeError, InvalidNameError, PreconditionError, UrforcingError
from urforcing.forcing import forces_semantic, forces_star
from urforcing.formulas import constants
from urforcing.names import (PName, embed_j, is_valid_legacy_name, is_valid_name, j_preimage, mix, purify,
                             require_valid, set_counterpart, valuate)
from urforcing.poset import Poset, validate_poset
from urforcing.session import UrforcingSession
from urforcing.suites import SUITE_NAMES, run_suite

logger = logging.getLogger('UrforcingCli')

Result = Tuple[int, object]

def configure_logging(level: str):
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )

def resolve_name(argument: str, session: UrforcingSession) -> PName:
    """@label for a session name, otherwise inline JSON or a path to a JSON file."""
    if argument.startswith('@'):
        return session.resolve(argument[1:])
    return decode_name(load_json_argument(argument))

def _name_payload(raw, session: UrforcingSession) -> PName:
    if isinstance(raw, str) and raw.startswith('@'):
        return session.resolve(raw[1:])
    return decode_name(raw)

def _filter(argument: str, poset: Poset):
    if argument.strip().startswith('['):
        generic = decode_filter(load_json_argument(argument))
    else:
        generic = decode_filter([c.strip() for c in argument.split(',') if c.strip()])
    poset.mask(generic)
    if not poset.is_filter(generic):
        raise PreconditionError(f"{generic.sorted()} is not a filter of the poset", conditions=generic.sorted())
    return generic

def cmd_validate(args, session: UrforcingSession, config: UrforcingConfiguration) -> Result:
    payload = load_json_file(args.file)
    kind = describe(payload)
    if kind == 'poset':
        report = validate_poset(*poset_fields(payload)).to_json()
    elif kind == 'name':
        report = is_valid_name(session.poset, decode_name(payload)).to_json()
    elif kind == 'name-with-poset':
        report = validate_poset(*poset_fields(payload['poset'])).to_json()
        if report['ok']:
            poset = Poset(*poset_fields(payload['poset']))
            report = is_valid_name(poset, decode_name(payload['name'])).to_json()
    elif kind == 'legacy-name':
        report = {'ok': is_valid_legacy_name(session.poset, decode_legacy_name(payload))}
    elif kind == 'ideal':
        report = is_a_ideal(decode_ideal(payload)).to_json()
    elif kind == 'session':
        loaded = UrforcingSession.from_json(payload)
        report = {'ok': True, 'names': len(loaded.names), 'conditions': len(loaded.poset)}
    elif kind == 'pool':
        report = {'ok': True, 'urelements': len(decode_pool(payload))}
    elif kind == 'ultrapower':
        functions, _ = decode_ultrapower(payload)
        report = {'ok': True, 'functions': len(functions)}
    elif kind == 'value':
        decode_value(payload)
        report = {'ok': True}
    else:
        raise DecodeError(f"{args.file} does not follow any known payload grammar", source=args.file)
    return (0 if report['ok'] else 1), {'kind': kind, **report}

def cmd_value(args, session, config) -> Result:
    name = require_valid(session.poset, resolve_name(args.name, session))
    return 0, encode_value(valuate(name, _filter(args.filter, session.poset)))

def cmd_forces(args, session, config) -> Result:
    phi = decode_formula(load_json_argument(args.formula), lambda raw: _name_payload(raw, session))
    pool = session.pool(*constants(phi))
    if args.semantic:
        return 0, forces_semantic(pool, args.condition, phi)
    return 0, forces_star(pool, args.condition, phi)

def cmd_generics(args, session, config) -> Result:
    return 0, [encode_filter(g) for g in session.poset.generic_filters()]

def cmd_mix(args, session, config) -> Result:
    raw = load_json_argument(args.map)
    if not isinstance(raw, dict):
        raise DecodeError('A mixing map is a JSON object from condition ids to names')
    assignment = {p: _name_payload(name, session) for p, name in raw.items()}
    return 0, encode_name(mix(session.poset, assignment))

def cmd_purify(args, session, config) -> Result:
    name = require_valid(session.poset, resolve_name(args.name, session))
    return 0, encode_name(purify(name, decode_urelement_ids(args.urelements)))

def cmd_setpart(args, session, config) -> Result:
    name = require_valid(session.poset, resolve_name(args.name, session))
    return 0, encode_name(set_counterpart(session.poset, name))

def cmd_j(args, session, config) -> Result:
    if args.inverse:
        name = require_valid(session.poset, resolve_name(args.name, session))
        return 0, encode_legacy_name(j_preimage(session.poset, name))
    legacy = decode_legacy_name(load_json_argument(args.name))
    if not is_valid_legacy_name(session.poset, legacy):
        raise InvalidNameError(f"{legacy!r} mentions conditions outside the poset")
    return 0, encode_name(embed_j(session.poset, legacy))

def cmd_check(args, session, config) -> Result:
    report = run_suite(args.suite, config, session.instances())
    return (0 if report.ok else 1), report.to_json()

def cmd_diagram(args, session, config) -> Result:
    edges = hierarchy_edges()
    if args.format == 'dot':
        return 0, diagram_to_dot(edges)
    return 0, [edge.to_json() for edge in edges]

COMMANDS: Dict[str, Callable[..., Result]] = {
    'validate': cmd_validate,
    'value': cmd_value,
    'forces': cmd_forces,
    'generics': cmd_generics,
    'mix': cmd_mix,
    'purify': cmd_purify,
    'setpart': cmd_setpart,
    'j': cmd_j,
    'check': cmd_check,
    'diagram': cmd_diagram,
}

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--session', help='Path to a session file with pool, poset, names and config')
    UrforcingConfiguration.add_arguments(common)

    parser = argparse.ArgumentParser(prog='urforcing', description='Urforcing is a desk-scale laboratory for forcing with urelements.')
    commands = parser.add_subparsers(dest='command', required=True)

    validate = commands.add_parser('validate', parents=[common], help='Validate a poset, name, ideal or session file')
    validate.add_argument('file', help='Path to the JSON payload, or - for stdin')

    value = commands.add_parser('value', parents=[common], help='Valuate a name by a filter')
    value.add_argument('--name', required=True, help='Inline JSON, a JSON file or @label')
    value.add_argument('--filter', required=True, help='JSON list or comma-separated condition ids')

    forces = commands.add_parser('forces', parents=[common], help='Decide whether a condition forces a formula')
    forces.add_argument('--condition', required=True, help='Condition id')
    forces.add_argument('--formula', required=True, help='Inline JSON formula or a JSON file; constants may be @label')
    mode = forces.add_mutually_exclusive_group()
    mode.add_argument('--star', action='store_true', help='Use the recursive forcing relation (default)')
    mode.add_argument('--semantic', action='store_true', help='Quantify over the generic filters through the condition')

    commands.add_parser('generics', parents=[common], help='List the generic filters of the session poset')

    mixing = commands.add_parser('mix', parents=[common], help='Mix names over an antichain')
    mixing.add_argument('--map', required=True, help='JSON object from condition ids to names or @labels')

    purifying = commands.add_parser('purify', parents=[common], help='Throw out urelement entries outside a set')
    purifying.add_argument('--name', required=True, help='Inline JSON, a JSON file or @label')
    purifying.add_argument('--urelements', required=True, help='JSON list or comma-separated urelement ids')

    setpart = commands.add_parser('setpart', parents=[common], help='Build the set-counterpart of a name')
    setpart.add_argument('--name', required=True, help='Inline JSON, a JSON file or @label')

    embedding = commands.add_parser('j', parents=[common], help='Embed a legacy name, or invert the embedding with --inverse')
    embedding.add_argument('--name', required=True, help='Legacy name JSON, or with --inverse a name JSON or @label')
    embedding.add_argument('--inverse', action='store_true', help='Map a name in the range of the embedding back to its legacy name')

    check = commands.add_parser('check', parents=[common], help='Run a verification suite')
    check.add_argument('suite', choices=SUITE_NAMES, help='Suite to run')

    diagram = commands.add_parser('diagram', parents=[common], help='Print the implication diagram between the urelement axioms')
    diagram.add_argument('--format', choices=['json', 'dot'], default='json', help='Output format')
    return parser

def emit(payload, pretty: bool):
    if isinstance(payload, str):
        sys.stdout.write(payload)
    else:
        print(dumps(payload, pretty))

def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = UrforcingConfiguration(load_configuration=False)
    configure_logging(args.log_level or config.log_level)
    try:
        session = UrforcingSession.load(args.session)
        config.apply_arguments(args, session.config)
        configure_logging(config.log_level)
        session.configure(config.include_pool_checks, config.budget)
        code, payload = COMMANDS[args.command](args, session, config)
    except UrforcingError as err:
        logger.debug(f"{args.command} failed with {err.code}: {err}")
        code, payload = err.exit_code, err.to_json()
    emit(payload, config.pretty)
    return code

if __name__ == '__main__':
    sys.exit(main())
