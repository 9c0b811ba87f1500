import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tests.strategies import automorphisms, names
from urforcing import names as names_module
from urforcing import universe as universe_module
from urforcing.catalog import poset_catalog
from urforcing.exceptions import (AmbiguousValuationError, BudgetExceededError, InvalidNameError, NotAnAntichainError,
                                  NotInRangeError, PoolNotClosedError)
from urforcing.names import (EMPTY_NAME, NamePool, act, check_name, close_pool, embed_j, exhaustive_legacy_names,
                             gamma_name, generic_value, is_check_name, is_valid_legacy_name, is_valid_name, j_preimage,
                             legacy_valuate, make_legacy_name, make_name, mix, name_kernel, name_rank, paired_pools,
                             purify, require_valid, set_counterpart, subnames, valuate)
from urforcing.universe import CACHE_SIZE, EMPTY, Automorphism, HfuSet, Urelement, kernel, make_set, ordinal

P2 = poset_catalog()['P2']
CHAIN3 = poset_catalog()['chain3']
G_P = ['1', 'p']
G_Q = ['1', 'q']


def test_valid_names(P2, mixed, either, a):
    assert is_valid_name(P2, mixed).ok
    assert is_valid_name(P2, either).ok
    assert is_valid_name(P2, EMPTY_NAME).ok
    assert is_valid_name(P2, check_name(P2, make_set([a]))).ok


def test_urelement_entry_needs_incompatible_neighbours(P2, a, b):
    report = is_valid_name(P2, make_name([(a, '1'), (b, 'p')]))
    assert not report.ok
    assert report.law == 'incompatibility'
    assert report.path == ()
    assert is_valid_name(P2, make_name([(a, 'p'), (a, '1')])).ok


def test_violation_path_points_into_subnames(P2, a, b):
    inner = make_name([(a, '1'), (b, '1')])
    report = is_valid_name(P2, make_name([(inner, 'p')]))
    assert report.law == 'incompatibility'
    assert len(report.path) == 1
    assert report.to_json()['ok'] is False


def test_unknown_condition_and_malformed(P2, a):
    assert is_valid_name(P2, make_name([(a, 'z')])).law == 'unknown-condition'
    assert is_valid_name(P2, 'not a name').law == 'malformed'
    with pytest.raises(InvalidNameError):
        require_valid(P2, make_name([(a, 'z')]))
    with pytest.raises(InvalidNameError):
        make_name([(1, 'p')])


def test_entries_are_canonical(a):
    assert len(make_name([(a, 'p'), (a, 'p')])) == 1
    assert make_name([(a, 'p'), (a, 'q')]) == make_name([(a, 'q'), (a, 'p')])


def test_valuate(P2, mixed, either, a, b):
    assert valuate(mixed, G_P) == a
    assert valuate(mixed, G_Q) == b
    assert valuate(either, G_P) == make_set([a])
    assert valuate(either, P2.generic_filters()[1]) == make_set([b])
    assert valuate(EMPTY_NAME, G_P) == EMPTY


def test_check_names_denote_their_value(P2, a):
    value = make_set([a, make_set([EMPTY])])
    for generic in P2.generic_filters():
        assert valuate(check_name(P2, value), generic) == value
    assert check_name(P2, a) == make_name([(a, '1')])


def test_invalid_name_can_be_ambiguous(a, b):
    with pytest.raises(AmbiguousValuationError) as info:
        valuate(make_name([(a, '1'), (b, '1')]), ['1'])
    assert info.value.details == {'urelements': ['a', 'b']}


def test_legacy_valuate(P2, a, b):
    sigma = make_legacy_name([(a, 'p'), (b, 'q')])
    assert legacy_valuate(sigma, G_P) == make_set([a])
    assert legacy_valuate(a, G_P) == a
    assert is_valid_legacy_name(P2, sigma)
    assert not is_valid_legacy_name(P2, make_legacy_name([(a, 'z')]))
    assert not is_valid_legacy_name(P2, make_name([(a, 'p')]))


def test_gamma_names_the_generic(P2):
    for generic in P2.generic_filters():
        assert valuate(gamma_name(P2), generic) == generic_value(P2, generic)
    assert generic_value(P2, G_P) == make_set([ordinal(0), ordinal(1)])


def test_mix_over_p2(P2, mixed, a, b):
    assert mix(P2, {'p': check_name(P2, a), 'q': check_name(P2, b)}) == mixed
    assert mix(P2, {}) == EMPTY_NAME


def test_mix_over_chain(a, b):
    broom = poset_catalog()['broom']
    mixed = mix(broom, {'p': check_name(broom, a), 'q': check_name(broom, b)})
    assert mixed == make_name([(a, 'p'), (a, 'r'), (b, 'q')])


def test_mix_needs_an_antichain(P2, a):
    with pytest.raises(NotAnAntichainError) as info:
        mix(P2, {'1': check_name(P2, a), 'p': check_name(P2, a)})
    assert info.value.details == {'domain': ['1', 'p']}


def test_mix_rejects_invalid_names(P2, a, b):
    with pytest.raises(InvalidNameError):
        mix(P2, {'p': make_name([(a, '1'), (b, '1')])})


def test_purify(mixed, either, a, b):
    assert purify(mixed, [a]) == make_name([(a, 'p')])
    assert purify(mixed, []) == EMPTY_NAME
    assert purify(either, [b]) == make_name([(EMPTY_NAME, 'p'), (make_name([(b, '1')]), 'q')])
    assert purify(either, [a, b]) == either


def test_set_counterpart(P2, mixed, either):
    assert set_counterpart(P2, EMPTY_NAME) == EMPTY_NAME
    assert set_counterpart(P2, mixed) == EMPTY_NAME
    assert set_counterpart(P2, either) == either
    nested = make_name([(mixed, '1')])
    for generic in P2.generic_filters():
        assert valuate(set_counterpart(P2, nested), generic) == valuate(nested, generic)


def test_embedding_round_trip(P2, a, b):
    sigma = make_legacy_name([(a, 'p'), (make_legacy_name([(b, '1')]), 'q')])
    image = embed_j(P2, sigma)
    assert image.urelement_entries() == ()
    assert j_preimage(P2, image) == sigma
    assert j_preimage(P2, check_name(P2, a)) == a
    for generic in P2.generic_filters():
        assert valuate(image, generic) == legacy_valuate(sigma, generic)


def test_mixed_name_is_not_in_range_of_j(P2, mixed):
    with pytest.raises(NotInRangeError) as info:
        j_preimage(P2, mixed)
    assert info.value.code == 'not-in-range-of-j'


def test_act(mixed, a, b):
    pi = Automorphism.swap(a, b)
    assert act(pi, mixed) == make_name([(b, 'p'), (a, 'q')])
    assert act(Automorphism.identity(), mixed) is mixed


def test_rank_kernel_and_subnames(P2, either, a, b):
    assert name_rank(either) == 2
    assert name_rank(EMPTY_NAME) == 0
    assert name_kernel(either) == {a, b}
    assert subnames(either) == {check_name(P2, a), check_name(P2, b)}


def test_is_check_name(P2, mixed, either, a):
    value = make_set([a, EMPTY])
    assert is_check_name(P2, check_name(P2, value)) == value
    assert is_check_name(P2, check_name(P2, a)) == a
    assert is_check_name(P2, either) is None
    assert is_check_name(P2, mixed) is None


def test_close_pool(P2, mixed, either, a, b):
    pool = close_pool(P2, [mixed])
    assert pool.names == {mixed, check_name(P2, a), check_name(P2, b)}
    assert pool.is_closed(require_checks=True)
    assert len(close_pool(P2, [mixed], include_checks=False)) == 1
    assert close_pool(P2, [either]).urelements() == {a, b}
    with pytest.raises(BudgetExceededError):
        close_pool(P2, [either], budget=1)


def test_pool_not_closed(P2, either, a, b):
    pool = NamePool(P2, frozenset([either]))
    assert pool.missing_subnames() == {check_name(P2, a), check_name(P2, b)}
    assert not pool.is_closed()
    with pytest.raises(PoolNotClosedError) as info:
        pool.require_closed()
    assert info.value.details == {'missing': 2}


def test_paired_pools_have_the_same_extension(P2, mixed, either):
    name_pool, legacy = paired_pools(close_pool(P2, [mixed, either]))
    assert name_pool.is_closed()
    for generic in P2.generic_filters():
        assert {valuate(x, generic) for x in name_pool} == {legacy_valuate(s, generic) for s in legacy}


def test_exhaustive_legacy_names(P2, a, b):
    assert len(exhaustive_legacy_names(P2, [a])) == 9
    with pytest.raises(BudgetExceededError):
        exhaustive_legacy_names(P2, [a, b], budget=10)


@pytest.mark.parametrize('poset', [P2, CHAIN3])
@settings(max_examples=50, deadline=None)
@given(data=st.data())
def test_constructions_preserve_validity(poset, data):
    name = data.draw(names(poset))
    pi = data.draw(automorphisms)
    A = data.draw(st.sets(st.sampled_from([Urelement('a'), Urelement('b')])))
    counterpart = set_counterpart(poset, name)
    for built in (purify(name, A), counterpart, act(pi, name), embed_j(poset, j_preimage(poset, counterpart))):
        assert is_valid_name(poset, built).ok
    assert name_kernel(purify(name, A)) <= A


@settings(max_examples=50, deadline=None)
@given(names(P2), automorphisms)
def test_valuation_laws(name, pi):
    for generic in P2.generic_filters():
        value = valuate(name, generic)
        assert kernel(value) <= name_kernel(name)
        assert valuate(act(pi, name), generic) == pi.apply(value)
        if isinstance(value, HfuSet):
            assert valuate(set_counterpart(P2, name), generic) == value


@settings(max_examples=50, deadline=None)
@given(names(P2), names(P2))
def test_mixture_agrees_below_each_condition(x, y):
    mixed = mix(P2, {'p': x, 'q': y})
    assert is_valid_name(P2, mixed).ok
    assert valuate(mixed, G_P) == valuate(x, G_P)
    assert valuate(mixed, G_Q) == valuate(y, G_Q)


@pytest.mark.parametrize('module', [names_module, universe_module])
def test_memo_caches_are_bounded(module):
    cached = [f for f in vars(module).values() if hasattr(f, 'cache_info')]
    assert cached
    for function in cached:
        assert function.cache_info().maxsize == CACHE_SIZE, function.__name__
