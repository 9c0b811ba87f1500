import pytest

from urforcing.catalog import Instance, catalog_instances, poset_catalog
from urforcing.formulas import Const, IsUr
from urforcing.forcing import engine_for
from urforcing.session import UrforcingSession
from urforcing.suites import SUITE_NAMES, SUITES, SuiteReport, forcing_properties, ideal_oracle, run_suite
from urforcing.universe import Urelement


@pytest.mark.parametrize('name', sorted(SUITES))
def test_suite_finds_no_counterexamples(name, quick_config):
    report = run_suite(name, quick_config)
    assert report.ok, report.counterexamples[:3]
    assert report.checked > 0
    assert report.to_json()['suite'] == name


def test_suite_names():
    assert SUITE_NAMES[-1] == 'all'
    assert set(SUITE_NAMES) == set(SUITES) | {'all'}


def test_suites_include_session_instances(session_file, quick_config):
    session = UrforcingSession.load(session_file)
    report = run_suite('forcing-theorem', quick_config, session.instances())
    assert report.ok
    assert 'session' in report.details


def test_suite_details(quick_config):
    assert run_suite('diagram', quick_config).details == {'edges': 14}
    assert run_suite('genericity', quick_config).details == {'posets': 243}
    ideals = run_suite('ideals', quick_config).details
    assert ideals['size=3,pool_is_set=True'] == 0
    assert ideals['size=3,pool_is_set=False'] == 1
    assert ideals['size=0,pool_is_set=True'] == 1


def test_suite_report():
    report = SuiteReport('demo')
    report.expect(True, 'fine')
    report.expect(False, 'broken', where='here')
    assert report.checked == 2
    assert not report.ok
    assert report.to_json() == {'suite': 'demo', 'ok': False, 'checked': 2,
                                'counterexamples': [{'kind': 'broken', 'where': 'here'}], 'details': {}}


def test_suite_report_records_may_use_any_key():
    report = SuiteReport('demo')
    report.expect(True, 'fine', condition='p')
    report.expect(False, 'mixture-law', condition='q', holds=False)
    assert report.checked == 2
    assert report.counterexamples == [{'kind': 'mixture-law', 'condition': 'q', 'holds': False}]


def test_mixtures_suite_checks_the_mixture_law(quick_config):
    report = run_suite('mixtures', quick_config)
    assert report.ok
    assert report.checked > quick_config.samples
    assert report.details == {'samples': quick_config.samples}


def test_forcing_properties_on_a_mixture(mixed):
    instance = [i for i in catalog_instances(pools_per_poset=0) if i.label == 'P2/showcase'][0]
    assert isinstance(instance, Instance)
    assert instance.constants[0] == mixed
    engine = engine_for(instance.pool)
    assert forcing_properties(engine, IsUr(Const(mixed))) == []


def test_catalog_instances_are_seeded():
    first = catalog_instances(seed=3, pools_per_poset=1)
    second = catalog_instances(seed=3, pools_per_poset=1)
    assert [i.constants for i in first] == [i.constants for i in second]
    assert len(first) == 2 * len(poset_catalog())


def test_ideal_oracle():
    a, b = Urelement('a'), Urelement('b')
    pool = frozenset([a, b])
    everything = frozenset([frozenset(), frozenset([a]), frozenset([b]), pool])
    assert ideal_oracle(pool, everything, pool_is_set=False)
    assert not ideal_oracle(pool, everything, pool_is_set=True)
    assert not ideal_oracle(pool, everything - {pool}, pool_is_set=False)
