"""
枚举、独立最小交点数和例子挖掘测试
"""
from itertools import islice

import pytest

from curves import core_curve, crossing_counts, crossings_with, reduce_to_minimal, reduced_representative
from fixture_store import store
from generate_fixtures import expected_mob
from mining import (_cap_choices, _even_flip_vectors, _halves_flips, _interleaved_order, _is_primitive,
                    _length_bounds, _matches, _passes_prefilter, _validated, bounded_move_minimum,
                    enumerate_configurations, enumerate_curves, interleaved_configurations, mine_examples,
                    mobius_family, special_pattern_audit)
from models import Cap, Curve, HalfSide, Step
from surface import is_generic_core, transport

Bp, Bm, Tp, Tm = HalfSide('B', 1), HalfSide('B', -1), HalfSide('T', 1), HalfSide('T', -1)


def test_even_flip_vectors():
    assert _even_flip_vectors(2) == [(0, 0), (1, 1)]
    assert len(_even_flip_vectors(3)) == 4


def test_cap_choices_fewest_first(or2):
    caps = [cfg.caps for cfg in _cap_choices(or2, ('open', 'disk'))]
    assert caps == [
        (),
        ((0, Cap('disk')),),
        ((1, Cap('disk')),),
        ((0, Cap('disk')), (1, Cap('disk'))),
    ]


def test_is_primitive():
    s = Step(0, Bp, Tp)
    t = Step(1, Bp, Tp)
    assert _is_primitive((s, t))
    assert not _is_primitive((s, t, s, t))


def test_oracle_matches_core_intersection(or2, or2_b):
    assert bounded_move_minimum(or2, or2_b, 'a') == 2


def test_oracle_removes_pushed_crossings(or2):
    pushed = Curve((Step(0, Bp, Tm), Step(1, Bm, Tp)))
    assert crossing_counts(or2, pushed) == (2, 2)
    assert bounded_move_minimum(or2, pushed, 'b') == 0


def test_enumerated_curves_are_closed(or2):
    curves = list(enumerate_curves(or2, 2))
    assert curves
    for c in curves:
        assert len(c) == 2
        for p, step in enumerate(c.steps):
            assert not step.turns_back
            nxt = c.step(p + 1)
            assert transport(or2, step.rect, step.h_out) == (nxt.rect, nxt.h_in)
    assert [c.name for c in curves] == [f"c{i}" for i in range(len(curves))]


def test_first_configuration_is_the_torus():
    first = next(enumerate_configurations(2))
    assert first.name == 'n2-b01-a00-f00'
    assert first.caps == ()


def test_configurations_have_two_sided_cores():
    for cfg in islice(enumerate_configurations(3), 10):
        assert sum(cfg.a_flips) % 2 == 0
        assert sum(cfg.b_flips) % 2 == 0


def test_match_rules():
    assert _matches('ex3.1', 2, (8, 4, 8, 4)) == (True, True)
    assert _matches('ex3.1', 2, (4, 2, 4, 2)) == (True, False)
    assert _matches('ex3.1', 3, (8, 4, 8, 4))[0] is False
    assert _matches('ex3.2', 8, (2, 1, 2, 1)) == (True, True)
    assert _matches('ex3.2', 4, (2, 1, 2, 1)) == (True, False)
    assert _matches('ex3.2', 3, (2, 1, 2, 1))[0] is False


def test_mobius_example_is_mined():
    hits, bounds = mine_examples('ex3.3', max_n=2)
    assert hits
    hit = hits[0]
    assert hit.config.to_text() == expected_mob().to_text()
    assert hit.counts == (2,)
    assert bounds['hits'] == len(hits)


def test_unknown_target():
    with pytest.raises(ValueError):
        mine_examples('ex9')


def test_interleaved_layout():
    assert _interleaved_order(2) == (0, 2, 1, 3)
    assert _interleaved_order(4) == (0, 4, 1, 5, 2, 6, 3, 7)
    assert _halves_flips(2) == (0, 1, 0, 1)
    assert sum(_halves_flips(4)) == 2


def test_interleaved_configurations_keep_layout():
    for cfg in interleaved_configurations(2):
        assert cfg.n == 4
        assert cfg.b_order == (0, 2, 1, 3)
        assert cfg.a_flips in ((0, 0, 0, 0), (0, 1, 0, 1))
        assert is_generic_core(cfg, 'a') and is_generic_core(cfg, 'b')


def test_mobius_family():
    assert mobius_family(1).to_text() == expected_mob().to_text()
    cfg = mobius_family(2)
    assert cfg.n == 4
    assert cfg.to_text() == store.load_configuration('cfg-mob4').to_text()
    assert _validated(cfg, require_generic=False) is not None
    assert not is_generic_core(cfg, 'a')
    assert crossings_with(core_curve(cfg, 'b'), 'a') == 4
    with pytest.raises(ValueError):
        mobius_family(0)


def test_mobius_hits_up_to_four_crossings():
    hits, _ = mine_examples('ex3.3', max_n=4, max_hits=2)
    assert [hit.counts for hit in hits] == [(2,), (4,)]
    assert [hit.exact for hit in hits] == [False, True]

    hits, bounds = mine_examples('ex3.3', exact=True)
    assert [hit.counts for hit in hits] == [(4,)]
    assert hits[0].config.n == 4
    assert bounds['exact'] is True


def test_prefilter_before_twist():
    assert _passes_prefilter('ex3.1', (8, 4), exact=True)
    assert not _passes_prefilter('ex3.1', (4, 2), exact=True)
    assert _passes_prefilter('ex3.1', (4, 2), exact=False)
    assert not _passes_prefilter('ex3.1', (2, 0), exact=False)
    assert not _passes_prefilter('ex3.1', (4, 3), exact=False)
    assert _passes_prefilter('ex3.2', (2, 1), exact=False)
    assert not _passes_prefilter('ex3.2', (4, 2), exact=False)


def test_length_bounds():
    assert _length_bounds('ex3.1', True, None) == (8, 12)
    assert _length_bounds('ex3.2', True, None) == (2, 3)
    assert _length_bounds('ex3.1', True, 20) == (8, 20)
    assert _length_bounds('ex3.2', False, 5) == (2, 5)


def test_min_steps_filter(or2):
    curves = list(enumerate_curves(or2, 6, min_steps=3))
    assert curves
    assert all(3 <= len(c) <= 6 for c in curves)


def test_pattern_audit_reports_inconclusive():
    report = special_pattern_audit(3, 2)
    assert report.configs > 0
    assert len(report.hypothesis_configs) <= report.configs
    if not report.hypothesis_configs:
        assert report.patterns == 0
    assert report.to_dict()['inconclusive'] == (report.patterns == 0)


def test_reduction_agrees_with_oracle_on_small_curves():
    for cfg in islice(enumerate_configurations(3), 4):
        for c in islice(enumerate_curves(cfg, 4), 8):
            for core in ('a', 'b'):
                reduced, _ = reduce_to_minimal(cfg, c, core)
                assert crossings_with(reduced, core) == bounded_move_minimum(cfg, c, core), (cfg.name, c.name, core)


def test_orientable_control():
    from twists import twist_minimal
    checked = 0
    for cfg in enumerate_configurations(3):
        if any(cfg.a_flips) or any(cfg.b_flips):
            continue
        for c in enumerate_curves(cfg, 4):
            ca, cb = crossing_counts(cfg, reduced_representative(cfg, c))
            if ca <= cb:
                continue
            for k in (1, -1):
                d3, _ = twist_minimal(cfg, c, 'a', k)
                da, db = crossing_counts(cfg, d3)
                assert da < db, (cfg.name, c.name, k)
                checked += 1
    assert checked > 0
