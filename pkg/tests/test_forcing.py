import pickle

import pytest

from urforcing.catalog import poset_catalog
from urforcing.exceptions import (ConstantNotInPoolError, PoolNotClosedError, PreconditionError, UnboundVariableError,
                                  UnknownConditionError)
from urforcing.formulas import (AEqual, Const, Equal, Exists, IsUr, Member, Not, Subset, Var, generate_formulas)
from urforcing.forcing import (ForcingEngine, build_extension, check_forcing_theorem, find_witness, forces_legacy,
                               forces_semantic, forces_star, fullness_harness, satisfies, semantic_set)
from urforcing.names import (EMPTY_NAME, NamePool, check_name, close_legacy_pool, close_pool, gamma_name,
                             generic_value, make_legacy_name, mix)
from urforcing.poset import Filter
from urforcing.universe import make_set

G_P = Filter(frozenset({'1', 'p'}))


@pytest.fixture
def mixed_pool(P2, mixed):
    return close_pool(P2, [mixed])


@pytest.fixture
def either_pool(P2, either):
    return close_pool(P2, [either])


def test_forcing_urelementhood_of_a_mixture(mixed_pool, mixed):
    assert forces_star(mixed_pool, 'p', IsUr(Const(mixed)))
    assert forces_star(mixed_pool, '1', IsUr(Const(mixed)))


def test_reflexivity_is_forced(P2, mixed_pool, a):
    checked = check_name(P2, a)
    assert forces_star(mixed_pool, '1', Equal(Const(checked), Const(checked)))
    assert forces_semantic(mixed_pool, 'q', Equal(Const(checked), Const(checked)))


def test_empty_name_is_never_an_urelement(P2):
    pool = close_pool(P2, [EMPTY_NAME])
    assert not forces_star(pool, '1', IsUr(Const(EMPTY_NAME)))
    assert forces_star(pool, '1', Not(IsUr(Const(EMPTY_NAME))))


def test_mixture_is_forced_to_be_a_at_p(P2, mixed_pool, mixed, a):
    phi = AEqual(Const(mixed), Const(check_name(P2, a)))
    assert forces_semantic(mixed_pool, 'p', phi)
    assert not forces_semantic(mixed_pool, '1', phi)
    assert semantic_set(mixed_pool, phi) == {'p'}
    assert forces_star(mixed_pool, 'p', phi)


def test_semantic_existential(either_pool, either):
    assert forces_semantic(either_pool, '1', Exists('y', Member(Var('y'), Const(either))))


def test_forcing_errors(P2, mixed_pool, either):
    with pytest.raises(ConstantNotInPoolError):
        forces_star(mixed_pool, '1', IsUr(Const(EMPTY_NAME)))
    with pytest.raises(ConstantNotInPoolError):
        forces_semantic(mixed_pool, '1', IsUr(Const(EMPTY_NAME)))
    with pytest.raises(UnboundVariableError):
        forces_star(mixed_pool, '1', IsUr(Var('x')))
    with pytest.raises(UnknownConditionError):
        forces_star(mixed_pool, 'z', IsUr(Var('x')))
    with pytest.raises(PoolNotClosedError):
        ForcingEngine(NamePool(P2, frozenset([either])))


def test_satisfies(P2, a):
    pool = close_pool(P2, [check_name(P2, a), EMPTY_NAME])
    extension, _ = build_extension(pool, G_P)
    checked = check_name(P2, a)
    assert satisfies(extension, IsUr(Const(checked)))
    assert satisfies(extension, Subset(Const(checked), Const(EMPTY_NAME)))
    assert not satisfies(extension, AEqual(Const(checked), Const(EMPTY_NAME)))
    with pytest.raises(UnboundVariableError):
        satisfies(extension, IsUr(Var('x')))


def test_extension_of_check_names_is_the_ground(P2, a):
    value = make_set([a])
    extension, report = build_extension(close_pool(P2, [check_name(P2, value)]), G_P)
    assert extension.values == {value, a}
    assert report.ok
    assert report.generic_present is None


def test_extension_holds_the_mixed_urelement(mixed_pool, a, b):
    extension, report = build_extension(mixed_pool, G_P)
    assert extension.values == {a, b}
    assert report.to_json()['ok']
    assert report.same_urelements and report.kernel_bound and report.urelement_sets_covered


def test_extension_holds_the_generic(P2):
    extension, report = build_extension(close_pool(P2, [gamma_name(P2)]), G_P)
    assert report.generic_present
    assert report.transitive
    assert generic_value(P2, G_P) in extension.values


def test_extension_needs_a_closed_pool(P2, either):
    with pytest.raises(PoolNotClosedError):
        build_extension(NamePool(P2, frozenset([either])), G_P)


def test_forcing_theorem_on_p2(mixed_pool):
    formulas = generate_formulas(mixed_pool.names, depth=1)
    report = check_forcing_theorem(mixed_pool, formulas)
    assert report.ok, report.counterexamples
    assert report.formulas_checked == len(formulas)
    assert report.to_json()['counterexamples'] == []


def test_forcing_theorem_with_quantifiers_over_mixtures(either_pool, either, P2, a, b):
    pool = close_pool(P2, list(either_pool.names) + [mix(P2, {'p': check_name(P2, a), 'q': check_name(P2, b)})])
    formulas = generate_formulas([either], depth=2, max_quantifiers=1, max_formulas=150, rng=5)
    assert check_forcing_theorem(pool, formulas).ok


def test_forcing_theorem_in_parallel(mixed_pool):
    formulas = generate_formulas(mixed_pool.names, depth=1, max_formulas=80, rng=1)
    serial = check_forcing_theorem(mixed_pool, formulas)
    parallel = check_forcing_theorem(mixed_pool, formulas, n_jobs=2, chunk_size=16)
    assert parallel.ok
    assert parallel.to_json() == serial.to_json()


def test_single_point_poset_collapses_to_truth(a):
    trivial = poset_catalog()['trivial']
    pool = close_pool(trivial, [check_name(trivial, make_set([a]))])
    formulas = generate_formulas(pool.names, depth=1)
    assert check_forcing_theorem(pool, formulas).ok
    extension, _ = build_extension(pool, trivial.generic_filters()[0])
    for phi in formulas:
        assert forces_star(pool, '1', phi) == satisfies(extension, phi)


def test_forcing_theorem_rejects_open_formulas(mixed_pool):
    with pytest.raises(UnboundVariableError):
        check_forcing_theorem(mixed_pool, [IsUr(Var('x'))])


def test_poset_survives_pickling(P2):
    assert pickle.loads(pickle.dumps(P2)) == P2


def test_find_witness_mixes_over_an_antichain(either_pool, either, mixed):
    assert find_witness(either_pool, '1', Exists('y', Member(Var('y'), Const(either)))) == mixed


def test_find_witness_prefers_a_pool_name(P2, mixed_pool, a):
    checked = check_name(P2, a)
    assert find_witness(mixed_pool, '1', Exists('y', Equal(Var('y'), Const(checked)))) == checked


def test_find_witness_preconditions(P2, mixed_pool, a):
    checked = check_name(P2, a)
    with pytest.raises(PreconditionError):
        find_witness(mixed_pool, '1', Member(Const(checked), Const(checked)))
    with pytest.raises(PreconditionError):
        find_witness(mixed_pool, '1', Exists('y', Member(Var('y'), Const(checked))))


def test_legacy_forcing(P2, a, b):
    sigma = make_legacy_name([(a, 'p'), (b, 'q')])
    pool = close_legacy_pool(P2, [sigma, a, b])
    assert forces_legacy(pool, '1', Exists('y', Member(Var('y'), Const(sigma))))
    assert not forces_legacy(pool, '1', Member(Const(a), Const(sigma)))
    assert forces_legacy(pool, 'p', Member(Const(a), Const(sigma)))
    with pytest.raises(ConstantNotInPoolError):
        forces_legacy(pool, '1', IsUr(Const(make_legacy_name())))


def test_legacy_calculus_is_not_full(P2, a, b, mixed):
    report = fullness_harness(P2, {'p': a, 'q': b})
    assert report.legacy_forces_existential
    assert report.legacy_witnesses == []
    assert not report.legacy_full
    assert report.witness == mixed
    assert report.witness_certified
    assert report.ok
    assert report.to_json()['legacy_full'] is False


def test_fullness_holds_on_a_singleton_antichain(P2, a):
    report = fullness_harness(P2, {'1': a})
    assert report.legacy_full
    assert report.witness == check_name(P2, a)
    assert report.ok


def test_fullness_needs_a_maximal_antichain(P2, a):
    with pytest.raises(PreconditionError):
        fullness_harness(P2, {'p': a})
