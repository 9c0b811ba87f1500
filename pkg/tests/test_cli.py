import io
import json

import pytest

from urforcing.cli import main

MIXED_JSON = {'pname': [[{'ur': 'a'}, 'p'], [{'ur': 'b'}, 'q']]}
EITHER_JSON = {'pname': [[{'pname': [[{'ur': 'a'}, '1']]}, 'p'], [{'pname': [[{'ur': 'b'}, '1']]}, 'q']]}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload), encoding='utf-8')
    return str(path)


def test_validate_poset(capsys, tmp_path):
    path = write(tmp_path, 'poset.json', {'elements': ['1', 'p'], 'leq': [['p', '1']], 'top': '1'})
    assert run_json(capsys, 'validate', path) == (0, {'kind': 'poset', 'ok': True})


def test_validate_invalid_poset(capsys, tmp_path):
    path = write(tmp_path, 'poset.json', {'elements': ['1', 'p'], 'leq': [], 'top': '1'})
    code, report = run_json(capsys, 'validate', path)
    assert code == 1
    assert report['law'] == 'top-not-maximum'


def test_validate_name_against_the_session_poset(capsys, tmp_path, session_file):
    path = write(tmp_path, 'name.json', MIXED_JSON)
    assert run_json(capsys, 'validate', path, '--session', session_file) == (0, {'kind': 'name', 'ok': True})
    code, report = run_json(capsys, 'validate', path)
    assert code == 1
    assert report['law'] == 'unknown-condition'


def test_validate_session_and_ideal(capsys, tmp_path, session_file):
    assert run_json(capsys, 'validate', session_file) == (0, {'kind': 'session', 'ok': True, 'names': 4,
                                                              'conditions': 3})
    ideal = write(tmp_path, 'ideal.json', {'pool': ['a', 'b', 'c'], 'family': [[], ['a'], ['b'], ['c']]})
    code, report = run_json(capsys, 'validate', ideal)
    assert code == 1
    assert report['condition'] == 2


def test_validate_reads_stdin(capsys, monkeypatch):
    monkeypatch.setattr('sys.stdin', io.StringIO('{"elements": ["1"]}'))
    assert run_json(capsys, 'validate', '-') == (0, {'kind': 'poset', 'ok': True})


def test_validate_unparsable_input(capsys, tmp_path):
    broken = write(tmp_path, 'broken.json', '{"elements": [')
    code, report = run_json(capsys, 'validate', broken)
    assert code == 2
    assert report['error'] == 'decode'
    unknown = write(tmp_path, 'unknown.json', {'something': 'else'})
    assert run_json(capsys, 'validate', unknown)[0] == 2


def test_value(capsys, session_file):
    assert run_json(capsys, 'value', '--session', session_file, '--name', '@mixed', '--filter', '1,p') == (0, {'ur': 'a'})
    assert run_json(capsys, 'value', '--session', session_file, '--name', '@either',
                    '--filter', '["1","q"]') == (0, {'set': [{'ur': 'b'}]})


def test_value_needs_a_filter(capsys, session_file):
    code, report = run_json(capsys, 'value', '--session', session_file, '--name', '@mixed', '--filter', 'p')
    assert code == 3
    assert report['error'] == 'precondition'


def test_generics(capsys, session_file):
    assert run_json(capsys, 'generics', '--session', session_file) == (0, [['1', 'p'], ['1', 'q']])
    assert run_json(capsys, 'generics') == (0, [['1']])


def test_forces_star_and_semantic_agree(capsys, session_file):
    formula = json.dumps({'atom': {'kind': 'aeq', 'lhs': {'const': '@mixed'}, 'rhs': {'const': '@a_check'}}})
    for condition, expected in (('p', True), ('q', False), ('1', False)):
        star = run_json(capsys, 'forces', '--session', session_file, '--condition', condition, '--formula', formula)
        semantic = run_json(capsys, 'forces', '--session', session_file, '--condition', condition,
                            '--formula', formula, '--semantic')
        assert star == semantic == (0, expected)


def test_forces_with_an_inline_constant(capsys, session_file):
    formula = json.dumps({'exists': {'var': 'y', 'body': {'atom': {'kind': 'in', 'lhs': {'var': 'y'},
                                                                    'rhs': {'const': EITHER_JSON}}}}})
    assert run_json(capsys, 'forces', '--session', session_file, '--condition', '1', '--formula', formula) == (0, True)


def test_forces_unknown_condition(capsys, session_file):
    formula = json.dumps({'A': {'const': '@mixed'}})
    code, report = run_json(capsys, 'forces', '--session', session_file, '--condition', 'z', '--formula', formula)
    assert code == 3
    assert report['error'] == 'unknown-condition'


def test_mix(capsys, session_file):
    assignment = json.dumps({'p': '@a_check', 'q': '@b_check'})
    assert run_json(capsys, 'mix', '--session', session_file, '--map', assignment) == (0, MIXED_JSON)
    code, report = run_json(capsys, 'mix', '--session', session_file, '--map', json.dumps({'1': '@a_check', 'p': '@a_check'}))
    assert code == 3
    assert report['error'] == 'not-an-antichain'


def test_purify_and_setpart(capsys, session_file):
    assert run_json(capsys, 'purify', '--session', session_file, '--name', '@mixed',
                    '--urelements', 'a') == (0, {'pname': [[{'ur': 'a'}, 'p']]})
    assert run_json(capsys, 'setpart', '--session', session_file, '--name', '@either') == (0, EITHER_JSON)
    assert run_json(capsys, 'setpart', '--session', session_file, '--name', '@mixed') == (0, {'pname': []})


def test_j_and_its_inverse(capsys, session_file):
    legacy = json.dumps({'lname': [[{'ur': 'a'}, 'p']]})
    assert run_json(capsys, 'j', '--session', session_file, '--name', legacy) == \
        (0, {'pname': [[{'pname': [[{'ur': 'a'}, '1']]}, 'p']]})
    assert run_json(capsys, 'j', '--session', session_file, '--name', '@either', '--inverse') == \
        (0, {'lname': [[{'ur': 'a'}, 'p'], [{'ur': 'b'}, 'q']]})
    code, report = run_json(capsys, 'j', '--session', session_file, '--name', '@mixed', '--inverse')
    assert code == 3
    assert report['error'] == 'not-in-range-of-j'


def test_check(capsys, session_file):
    code, report = run_json(capsys, 'check', 'diagram')
    assert code == 0
    assert report['ok'] and report['suite'] == 'diagram'
    code, report = run_json(capsys, 'check', 'forcing-theorem', '--session', session_file, '--pools_per_poset', '1',
                            '--max_formulas', '20')
    assert code == 0
    assert 'session' in report['details']


@pytest.mark.parametrize('suite', ['appendix', 'remark33', 'mixtures'])
def test_check_named_suites(capsys, suite):
    code, report = run_json(capsys, 'check', suite, '--pools_per_poset', '1', '--samples', '20')
    assert code == 0
    assert report['suite'] == suite
    assert report['ok'] and report['checked'] > 0


def test_diagram(capsys):
    code, out = run(capsys, 'diagram', '--format', 'dot')
    assert code == 0
    assert out.startswith('digraph urelement_axioms {')
    code, edges = run_json(capsys, 'diagram')
    assert len(edges) == 14
    assert {'source': 'Tail', 'target': 'Collection', 'citation': 'Thm. 2.13'}.items() <= edges[3].items()


def test_pretty_output(capsys, session_file):
    code, out = run(capsys, 'generics', '--session', session_file, '--pretty')
    assert code == 0
    assert out.startswith('[\n  [\n    "1",')
    assert json.loads(out) == [['1', 'p'], ['1', 'q']]


def test_invalid_configuration_flag(capsys):
    code, report = run_json(capsys, 'generics', '--depth', '-1')
    assert code == 3
    assert report['details'] == {'field': 'depth'}


def test_argument_errors_exit_with_two():
    with pytest.raises(SystemExit) as info:
        main(['nope'])
    assert info.value.code == 2
