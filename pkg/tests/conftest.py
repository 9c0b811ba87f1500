import json

import pytest

from urforcing.catalog import poset_catalog
from urforcing.configuration import UrforcingConfiguration
from urforcing.names import check_name, make_name
from urforcing.poset import fn_poset
from urforcing.universe import Urelement


@pytest.fixture
def a():
    return Urelement('a')


@pytest.fixture
def b():
    return Urelement('b')


@pytest.fixture
def c():
    return Urelement('c')


@pytest.fixture
def P2():
    return poset_catalog()['P2']


@pytest.fixture
def chain3():
    return poset_catalog()['chain3']


@pytest.fixture
def fn_x():
    return fn_poset(['x'])


@pytest.fixture
def mixed(P2, a, b):
    """{(a, p), (b, q)}: a in generics through p, b in generics through q."""
    return make_name([(a, 'p'), (b, 'q')])


@pytest.fixture
def either(P2, a, b):
    """{(ǎ, p), (b̌, q)}: the singleton {a} or {b} depending on the generic."""
    return make_name([(check_name(P2, a), 'p'), (check_name(P2, b), 'q')])


@pytest.fixture
def quick_config():
    return UrforcingConfiguration(load_configuration=False, depth=1, max_formulas=60, samples=40, pools_per_poset=1)


@pytest.fixture
def session_file(tmp_path):
    payload = {
        'pool': ['a', 'b'],
        'poset': {'elements': ['1', 'p', 'q'], 'leq': [['p', '1'], ['q', '1']], 'top': '1'},
        'names': {
            'a_check': {'pname': [[{'ur': 'a'}, '1']]},
            'b_check': {'pname': [[{'ur': 'b'}, '1']]},
            'either': {'pname': [[{'pname': [[{'ur': 'a'}, '1']]}, 'p'], [{'pname': [[{'ur': 'b'}, '1']]}, 'q']]},
            'mixed': {'pname': [[{'ur': 'a'}, 'p'], [{'ur': 'b'}, 'q']]},
        },
        'config': {'depth': 1, 'max_formulas': 40},
    }
    path = tmp_path / 'session.json'
    path.write_text(json.dumps(payload), encoding='utf-8')
    return str(path)
