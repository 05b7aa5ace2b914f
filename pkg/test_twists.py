"""
扭转引擎测试
"""
import pytest

import twists
from curves import core_curve, crossing_counts, crossings_with
from errors import CertificateError, ConfigurationError, GenericityError
from fixture_store import store
from models import Curve, HalfSide, ReductionEvent, Step
from twists import (apply_twist_raw, expected_raw_counts, expected_type_I_drops, other_core, reduce_type_I,
                    reduce_type_II, reduce_type_III, twist_minimal, twist_side_sign)

Lp, Rp, Bp, Tp = HalfSide('L', 1), HalfSide('R', 1), HalfSide('B', 1), HalfSide('T', 1)


def test_other_core():
    assert other_core('a') == 'b'
    assert other_core('b') == 'a'


def test_twist_side_sign(no2):
    assert twist_side_sign(no2, 'a', 0) == 1
    assert twist_side_sign(no2, 'a', 1) == -1
    assert twist_side_sign(no2, 'b', 1) == 1


def test_raw_twist_of_b_about_a(or2, or2_b):
    d = apply_twist_raw(or2, or2_b, 'a', 1)
    assert d.steps == (
        Step(0, Bp, Rp), Step(1, Lp, Rp), Step(0, Lp, Tp),
        Step(1, Bp, Rp), Step(0, Lp, Rp), Step(1, Lp, Tp),
    )
    assert crossing_counts(or2, d) == (2, 4)
    assert expected_raw_counts(or2, or2_b, 'a', 1) == (2, 4)
    assert d.name == 'ta^1(b)'


def test_raw_twist_power_two(or2, or2_b):
    d = apply_twist_raw(or2, or2_b, 'a', 2)
    # 每个穿越步：n|k|-1 = 3 次直行，加出口一次
    assert crossing_counts(or2, d) == (2, 8)
    assert expected_raw_counts(or2, or2_b, 'a', 2) == (2, 8)


def test_raw_twist_rejects_bad_arguments(or2, or2_b, bad_parity):
    with pytest.raises(ValueError):
        apply_twist_raw(or2, or2_b, 'a', 0)
    with pytest.raises(ValueError):
        apply_twist_raw(or2, or2_b, 'a', 1, hand='up')
    with pytest.raises(ConfigurationError):
        apply_twist_raw(bad_parity, core_curve(bad_parity, 'b'), 'a', 1)


def test_type_I_is_noop_without_turn_backs(or2, or2_b):
    d = apply_twist_raw(or2, or2_b, 'a', 1)
    d1, events = reduce_type_I(or2, d, 'a')
    assert d1.steps == d.steps
    assert events == []


def test_twist_minimal_on_torus(or2, or2_b):
    d3, trace = twist_minimal(or2, or2_b, 'a', 1)
    assert crossing_counts(or2, d3) == (2, 4)
    assert trace.certified
    assert trace.anomalies == []


def test_twist_refused_when_core_not_generic(mob):
    with pytest.raises(GenericityError):
        twist_minimal(mob, core_curve(mob, 'b'), 'a', 1)


@pytest.mark.parametrize('k', [1, -1, 2])
def test_stage_checks_pass_on_torus(or2, or2_b, k):
    _, trace = twist_minimal(or2, or2_b, 'a', k)
    assert trace.checks
    assert trace.failed_checks == []
    assert trace.certified


def test_twist_counts_do_not_depend_on_hand(or2, or2_b):
    right, _ = twist_minimal(or2, or2_b, 'a', 1, 'right')
    left, _ = twist_minimal(or2, or2_b, 'a', 1, 'left')
    assert crossing_counts(or2, right) == crossing_counts(or2, left) == (2, 4)


def test_surviving_bigon_raises(or2, or2_b, monkeypatch):
    monkeypatch.setattr(twists, 'find_bigon', lambda cfg, c, other: object())
    with pytest.raises(CertificateError):
        twist_minimal(or2, or2_b, 'a', 1)


def test_type_I_drops_follow_plain_step():
    c = Curve((Step(0, Bp, Tp), Step(1, Lp, HalfSide('T', -1)), Step(0, Bp, Tp), Step(1, Lp, Rp), Step(0, Bp, Tp)))
    classified = [([0, 1], 'C'), ([2, 3], 'C'), ([4], 'A')]
    # 步 1 不穿过 b，步 3 穿过 b
    assert expected_type_I_drops(c, 'a', classified) == [0, 2]


@pytest.mark.parametrize('reducer, kind, sidedness', [(reduce_type_II, 'II', 2), (reduce_type_III, 'III', 1)])
def test_segment_reductions_record_events(or2, monkeypatch, reducer, kind, sidedness):
    before = Curve((Step(0, Lp, Rp), Step(1, Lp, Rp)))
    after = Curve((Step(0, Bp, Tp), Step(1, Bp, Tp)))
    found = [(0, 0, 1, 'bigon')]
    seen = []

    def next_bigon(cfg, d, core, wanted):
        seen.append(wanted)
        return found.pop() if found else None

    monkeypatch.setattr(twists, '_segment_bigon', next_bigon)
    monkeypatch.setattr(twists, 'remove_bigon', lambda cfg, d, other, bigon: after)
    result, events = reducer(or2, before, 'a')
    assert result == after
    assert events == [ReductionEvent(kind, 0, 1, 2, 0)]
    assert events[0].drop == 2
    assert set(seen) == {sidedness}


def test_segment_reductions_noop_on_torus(or2, or2_b):
    d1, _ = reduce_type_I(or2, apply_twist_raw(or2, or2_b, 'a', 1), 'a')
    d2, events_II = reduce_type_II(or2, d1, 'a')
    d3, events_III = reduce_type_III(or2, d2, 'a')
    assert events_II == events_III == []
    assert d3.steps == d1.steps


def test_twist_refused_for_four_crossing_mobius_curve():
    cfg = store.load_configuration('cfg-mob4')
    c = store.load_curve('cfg-mob4-c')
    assert crossings_with(c, 'a') == 4
    with pytest.raises(GenericityError):
        twist_minimal(cfg, c, 'a', 1)
