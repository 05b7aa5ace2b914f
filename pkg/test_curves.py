"""
曲线引擎测试
"""
import pytest

from curves import (arcs_in, boundary_bigons_inside, classify_arcs, core_curve, crossing_counts, crossings_with,
                    curve_sidedness, find_bigon, j_counts, parse_curve, pull_once, pull_tight, reduce_against_both,
                    reduce_to_minimal, reduced_representative, remove_bigon, validate_in_C, winds_around)
from errors import CurveError, CurveSyntaxError, ReductionError
from fixture_store import FixtureStore, store
from mining import bounded_move_minimum
from models import Curve, HalfSide, ReductionEvent, Step

Lp, Lm, Rp, Rm = HalfSide('L', 1), HalfSide('L', -1), HalfSide('R', 1), HalfSide('R', -1)
Bp, Bm, Tp, Tm = HalfSide('B', 1), HalfSide('B', -1), HalfSide('T', 1), HalfSide('T', -1)


def test_core_curves(or2, no2):
    assert core_curve(or2, 'a').steps == (Step(0, Lp, Rp), Step(1, Lp, Rp))
    assert core_curve(no2, 'a').steps == (Step(0, Lp, Rp), Step(1, Lm, Rm))
    assert core_curve(no2, 'b').steps == (Step(0, Bp, Tp), Step(1, Bp, Tp))


def test_fixture_curves_match_cores(or2, no2):
    assert store.load_curve('cfg-or2-b').steps == core_curve(or2, 'b').steps
    assert store.load_curve('cfg-no2-a').steps == core_curve(no2, 'a').steps


def test_parse_curve():
    c = parse_curve("curve-version 1\n# 注释\nstep 0 Bp Tp\nstep 1 Bp Tp\n", 'b')
    assert c.name == 'b'
    assert c.steps == (Step(0, Bp, Tp), Step(1, Bp, Tp))
    assert parse_curve(c.to_text()).steps == c.steps


def test_parse_curve_errors():
    with pytest.raises(CurveSyntaxError) as info:
        parse_curve("step 0 Lp\n")
    assert info.value.line == 1
    with pytest.raises(CurveSyntaxError) as info:
        parse_curve("curve-version 1\nstep 0 Xp Rp\n")
    assert info.value.line == 2
    with pytest.raises(CurveSyntaxError):
        parse_curve("curve-version 2\nstep 0 Lp Rp\n")
    with pytest.raises(CurveSyntaxError):
        parse_curve("# 空\n")


def test_crossing_counts(or2, or2_b, no2_a):
    assert crossing_counts(or2, or2_b) == (2, 0)
    assert crossing_counts(or2, core_curve(or2, 'a')) == (0, 2)
    assert crossings_with(no2_a, 'b') == 2
    assert crossings_with(no2_a, 'a') == 0


def test_membership_in_C(or2, or2_b):
    assert validate_in_C(or2, or2_b).ok

    report = validate_in_C(or2, Curve((Step(0, Lp, Lm), Step(1, Lp, Rp))))
    assert report.get('no turn-back') is False
    assert not report.ok

    report = validate_in_C(or2, Curve((Step(0, Lp, Rp),)))
    assert report.get('bands') is False

    report = validate_in_C(or2, Curve((Step(5, Lp, Rp),)))
    assert report.get('rects') is False


def test_sidedness_and_j(or2, no2, or2_b, no2_a):
    assert curve_sidedness(no2, no2_a) == 2
    assert curve_sidedness(or2, or2_b) == 2
    assert j_counts(or2, or2_b) == (2, 0)
    assert j_counts(no2, no2_a) == (0, 2)


def test_winds_around(or2, or2_b):
    assert winds_around(or2, or2_b, 'b')
    assert not winds_around(or2, or2_b, 'a')


def test_arcs_of_core_crossing(or2, or2_b):
    assert arcs_in(or2, or2_b, 'a') == [[0], [1]]
    classified, counts = classify_arcs(or2, or2_b, 'a')
    assert [kind for _, kind in classified] == ['A', 'A']
    assert counts['A'] == 2 and counts['C'] == 0


def test_pull_once_merges_neighbours():
    steps = [Step(0, Lp, Rp), Step(1, Lp, Lm), Step(0, Rm, Tp), Step(1, Bp, Lp)]
    assert pull_once(steps, 1) == [Step(0, Lp, Tp), Step(1, Bp, Lp)]


def test_pull_once_rejects_mismatched_rects():
    steps = [Step(0, Lp, Rp), Step(1, Lp, Lm), Step(1, Rm, Tp)]
    with pytest.raises(ReductionError):
        pull_once(steps, 1)


def test_pull_tight_counts_removals():
    steps = [Step(0, Lp, Rp), Step(1, Lp, Lm), Step(0, Rm, Tp), Step(1, Bp, Lp)]
    tight, removed = pull_tight(steps)
    assert removed == 1
    assert not any(s.turns_back for s in tight)


def test_pull_once_on_two_step_word():
    # 两步都在同一条 b-带两端折返
    steps = [Step(0, Tm, Tp), Step(1, Bp, Bm)]
    assert pull_once(steps, 1) == [Step(0, Tm, Tp)]
    with pytest.raises(ReductionError):
        pull_tight(steps)


PUSHED = Curve((Step(0, Bp, Tm), Step(1, Bm, Tp)), 'pushed')


def test_find_bigon_on_zigzag(or2, or2_b):
    assert crossing_counts(or2, PUSHED) == (2, 2)
    assert find_bigon(or2, PUSHED, 'b') is not None
    assert find_bigon(or2, or2_b, 'a') is None


def test_reduce_zigzag_matches_oracle(or2):
    result, events = reduce_to_minimal(or2, PUSHED, 'b')
    assert crossings_with(result, 'b') == 0 == bounded_move_minimum(or2, PUSHED, 'b')
    assert crossings_with(result, 'a') == 2
    assert len(result) == 2
    assert [e.drop for e in events] == [2]
    assert validate_in_C(or2, result).get('embedded') is True


def test_reduce_against_both_tags_cores(or2):
    result, tagged = reduce_against_both(or2, PUSHED)
    assert crossing_counts(or2, result) == (2, 0)
    assert [core for core, _ in tagged] == ['b']
    assert reduced_representative(or2, PUSHED).steps == result.steps


def test_boundary_bigons_inside_for_cores(or2, or2_b, no2):
    assert boundary_bigons_inside(or2, or2_b)
    assert boundary_bigons_inside(no2, core_curve(no2, 'b'))


def test_save_trace(tmp_path):
    target = FixtureStore(str(tmp_path))
    path = target.save_trace([ReductionEvent('II', 0, 1, 4, 2), ReductionEvent('bigon', 1, None, 2, 0)],
                             'run', {'curve': 'c', 'against': 'b'})
    assert path.endswith('run.trace')
    with open(path, encoding='utf-8') as f:
        assert f.read() == ("trace-version 1\ncurve c\nagainst b\n"
                            "event II rect=0 band=1 4->2\nevent bigon rect=1 band=- 2->0\n")


def test_remove_bigon_rejects_unembeddable_result(or2, monkeypatch):
    import curves

    bigon = find_bigon(or2, PUSHED, 'b')

    def crossing_chords(*args, **kwargs):
        raise CurveError("弦交错")

    monkeypatch.setattr(curves, 'Arrangement', crossing_chords)
    with pytest.raises(ReductionError):
        remove_bigon(or2, PUSHED, 'b', bigon)


def test_short_pushoff_reduces():
    from surface import parse_configuration
    cfg = parse_configuration("config-version 1\nn 2\nb-order 0 1\na-flips 0 0\nb-flips 1 1\n", 'n2-f11')
    pushed = Curve((Step(0, Tp, Bm), Step(1, Tp, Bm)), 'pushed')
    assert crossing_counts(cfg, pushed) == (2, 2)
    result = reduced_representative(cfg, pushed)
    assert crossing_counts(cfg, result) == (2, 0)


def test_twisted_words_stay_embedded(no2):
    from freeness import act, parse_word
    for text in ("a b", "a b^-1", "b a^2"):
        result = act(no2, parse_word(text), 'b')
        assert validate_in_C(no2, result).get('embedded') is True, text


def test_boundary_bigons_inside_for_winding_curves(no2):
    from mining import enumerate_curves
    checked = 0
    for c in enumerate_curves(no2, 4):
        rep = reduced_representative(no2, c)
        if not winds_around(no2, rep, 'b'):
            continue
        assert boundary_bigons_inside(no2, rep), c.name
        checked += 1
    assert checked > 0
