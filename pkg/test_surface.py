"""
矩形复形测试
"""
import pytest

from errors import ConfigurationError, ConfigurationSyntaxError
from models import Cap, HalfSide
from surface import (boundary_regions, closed_walk_sidedness, euler_characteristic, fundamental_cycle_parities,
                     global_side, is_generic_core, is_orientable_neighbourhood, orientation_classes,
                     parse_configuration, prefix_parity, region_of_corner, surface_realizations, transport,
                     validate_configuration)
from utils import config_digest

NO2_TEXT = "n 2\nb-order 0 1\na-flips 1 1\nb-flips 0 0\n"


def test_parse_fields():
    cfg = parse_configuration(NO2_TEXT, 'no2')
    assert cfg.n == 2
    assert cfg.b_order == (0, 1)
    assert cfg.a_flips == (1, 1)
    assert cfg.b_flips == (0, 0)
    assert cfg.caps == ()


def test_parse_caps_and_comments():
    cfg = parse_configuration(NO2_TEXT + "cap R1 punctured 2  # 两个孔\ncap R0 open\n")
    assert cfg.cap_of(1) == Cap('punctured', 2)
    assert cfg.cap_of(0) == Cap('open')
    assert cfg.caps == ((1, Cap('punctured', 2)),)


def test_parse_error_position():
    with pytest.raises(ConfigurationSyntaxError) as info:
        parse_configuration("n 2\nb-order 0 1\na-flips 1 x\nb-flips 0 0\n")
    assert info.value.line == 3
    assert info.value.column == 11


def test_parse_rejects_unknown_and_duplicate_keys():
    with pytest.raises(ConfigurationSyntaxError) as info:
        parse_configuration(NO2_TEXT + "colour red\n")
    assert info.value.line == 5
    with pytest.raises(ConfigurationSyntaxError):
        parse_configuration(NO2_TEXT + "n 2\n")
    with pytest.raises(ConfigurationSyntaxError):
        parse_configuration(NO2_TEXT + "cap R0 disk\ncap R0 mobius\n")


def test_parse_rejects_bad_structure():
    with pytest.raises(ConfigurationError):
        parse_configuration("n 2\nb-order 1 1\na-flips 0 0\nb-flips 0 0\n")
    with pytest.raises(ConfigurationError):
        parse_configuration("n 2\nb-order 0 1\na-flips 0 0 0\nb-flips 0 0\n")
    with pytest.raises(ConfigurationSyntaxError):
        parse_configuration("n 2\nb-order 0 1\na-flips 0 2\nb-flips 0 0\n")


def test_to_text_is_canonical(no2):
    again = parse_configuration(no2.to_text())
    assert again.to_text() == no2.to_text()
    assert config_digest(again) == config_digest(no2)
    assert len(config_digest(no2)) == 16


def test_transport(or2, no2):
    assert transport(or2, 0, HalfSide('R', 1)) == (1, HalfSide('L', 1))
    assert transport(or2, 1, HalfSide('T', -1)) == (0, HalfSide('B', -1))
    assert transport(no2, 1, HalfSide('R', -1)) == (0, HalfSide('L', 1))
    assert transport(no2, 0, HalfSide('L', 1)) == (1, HalfSide('R', -1))


def test_global_sides(no2):
    assert prefix_parity(no2, 'a', 0) == 0
    assert prefix_parity(no2, 'a', 1) == 1
    assert global_side(no2, 'a', 0, 1) == 0
    assert global_side(no2, 'a', 1, 1) == 1
    assert global_side(no2, 'a', 1, -1) == 0
    assert prefix_parity(no2, 'b', 1) == 0


def test_boundary_regions(or2, no2):
    for cfg in (or2, no2):
        regions = boundary_regions(cfg)
        assert len(regions) == 2
        assert all(r.a_arcs == 2 and r.b_arcs == 2 for r in regions)
    assert {e.corner for e in boundary_regions(no2)[0].boundary_walk} == {'TL', 'BR', 'TR', 'BL'}
    assert region_of_corner(no2, 0, 'TL') == 0
    assert region_of_corner(no2, 1, 'BR') == 0
    assert region_of_corner(no2, 0, 'TR') == 0
    assert region_of_corner(no2, 1, 'BL') == 0
    assert region_of_corner(no2, 0, 'BL') == 1
    assert region_of_corner(or2, 1, 'TR') == 0


def test_euler_characteristic(or2, no2):
    for cfg in (or2, no2):
        chi = euler_characteristic(cfg)
        assert chi['cells'] == chi['graph'] == -2
        assert chi['boundary_arcs'] == 8
    assert surface_realizations(or2) == {'orientable': True, 'regions': 2, 'chi': 0, 'genus': 1, 'crosscaps': None}
    assert surface_realizations(no2) == {'orientable': False, 'regions': 2, 'chi': 0, 'genus': None, 'crosscaps': 2}


def test_orientability(or2, no2):
    assert is_orientable_neighbourhood(or2)
    assert orientation_classes(or2) == {0: 0, 1: 0}
    assert not is_orientable_neighbourhood(no2)
    assert all(parity == 0 for _, _, parity in fundamental_cycle_parities(or2))
    assert fundamental_cycle_parities(no2) == [('a', 1, 0), ('b', 0, 1), ('b', 1, 1)]


def test_closed_walk_sidedness(or2, no2):
    assert closed_walk_sidedness(no2, [('a', 0, 1), ('b', 1, 1)]) == 1
    assert closed_walk_sidedness(no2, [('a', 0, 1), ('a', 1, 1)]) == 2
    assert closed_walk_sidedness(or2, [('a', 0, 1), ('b', 1, 1)]) == 2
    with pytest.raises(ConfigurationError):
        closed_walk_sidedness(no2, [('a', 0, 1)])


def test_validate_fixtures(or2, no2, bad_parity):
    report = validate_configuration(or2)
    assert report.ok
    assert ('orientable', True, 'true') in report.checks

    report = validate_configuration(no2)
    assert report.ok
    assert ('orientable', True, 'false') in report.checks

    report = validate_configuration(bad_parity)
    assert not report.ok
    assert report.get('a two-sided') is False
    assert report.get('b two-sided') is True


def test_disk_bigon_breaks_minimal_position(no2):
    """只有一条 a-弧的圆盘区域不存在于 n=2 的配置中，检查保持通过"""
    report = validate_configuration(no2.with_caps({0: Cap('disk'), 1: Cap('disk')}))
    assert report.get('minimal position') is True


def test_mobius_side_is_not_generic(mob):
    assert is_generic_core(mob, 'a') is False
    assert is_generic_core(mob, 'b') is True
    report = validate_configuration(mob)
    assert report.get('a generic') is False
    assert not report.ok


def test_punctured_cap_keeps_generic(no2):
    cfg = no2.with_caps({0: Cap('punctured', 2)})
    assert is_generic_core(cfg, 'a') is True


def test_one_sided_core_refused(bad_parity):
    with pytest.raises(ConfigurationError):
        is_generic_core(bad_parity, 'a')
