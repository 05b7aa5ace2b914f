"""
线段模块测试
"""
from segments import (adjacent_pairs, double_segments, joinability_classes, joinable, non_joinable_to,
                      segment_sidedness, segments_of, separating_pair)


def test_segments_of(no2):
    segs = segments_of(no2, 'b')
    assert [s.label for s in segs] == ['b0+', 'b0-', 'b1+', 'b1-']
    forward = segs[0]
    assert (forward.initial, forward.terminal) == (0, 1)
    assert (forward.initial_side, forward.terminal_side) == (0, 0)
    assert segs[1] == forward.reversed()


def test_segment_sidedness(or2, no2):
    assert all(segment_sidedness(no2, s) == 1 for s in segments_of(no2, 'b'))
    assert all(segment_sidedness(or2, s) == 2 for s in segments_of(or2, 'b'))


def test_open_regions_give_no_adjacency(no2, mob):
    assert adjacent_pairs(no2, 'b') == []
    # R0 被封口，但它的两条 b-弧在同一条带上
    assert adjacent_pairs(mob, 'b') == []
    classes = joinability_classes(no2, 'b')
    assert len(classes) == 4
    segs = segments_of(no2, 'b')
    assert not joinable(no2, segs[0], segs[2])


def test_double_segments(no2):
    doubles = double_segments(no2, 'b')
    assert [d.point for d in doubles] == [0, 1]
    assert [s.label for s in doubles[0].pair] == ['b0+', 'b1-']
    assert [s.label for s in doubles[1].pair] == ['b1+', 'b0-']
    assert non_joinable_to(no2, doubles[0]) == [doubles[1]]


def test_separating_pair_needs_three_points(no2):
    assert separating_pair(no2, 'b') is None


def test_non_joinable_bounds_up_to_three():
    from mining import enumerate_configurations
    checked = 0
    for cfg in enumerate_configurations(3, ('open', 'disk')):
        required = 2 if cfg.n >= 3 else 1
        for P in double_segments(cfg, 'b'):
            assert len(non_joinable_to(cfg, P)) >= required, (cfg.name, P.label)
            checked += 1
    assert checked > 0
