"""
夹具存取、导出和统计测试
"""
import csv

import pandas as pd

import utils
from analyzers import AuditAnalyzer
from curves import core_curve
from fixture_store import FixtureStore
from freeness import parse_word
from models import PingPongReport, WitnessReport
from utils import export_rows_to_csv, export_rows_to_xlsx, format_check


def test_fixture_store_round_trip(tmp_path, no2):
    target = FixtureStore(str(tmp_path))
    path = target.save_configuration(no2, 'copy')
    assert path.endswith('copy.cfg')
    loaded = target.load_configuration('copy')
    assert loaded.name == 'copy'
    assert loaded.to_text() == no2.to_text()

    target.save_curve(core_curve(no2, 'a'), 'copy-a')
    assert target.load_curve('copy-a').steps == core_curve(no2, 'a').steps
    assert target.list_fixtures() == ['copy.cfg']
    assert target.list_fixtures('.crv') == ['copy-a.crv']


def test_format_helpers():
    assert format_check('euler', True) == 'check euler: pass'
    assert format_check('euler', False, 'chi=-1') == 'check euler: FAIL (chi=-1)'


def test_export_csv(tmp_path, monkeypatch):
    monkeypatch.setattr(utils, 'EXPORTS_DIR', str(tmp_path))
    rows = [{'curve': 'c0', 'k': 1, 'ok': True}, {'curve': 'c1', 'k': -1, 'ok': False, 'note': 'x'}]
    path = export_rows_to_csv(rows, 'pingpong')
    with open(path, encoding='utf-8-sig') as f:
        read = list(csv.DictReader(f))
    assert list(read[0].keys()) == ['curve', 'k', 'ok', 'note']
    assert read[1]['note'] == 'x'
    assert read[0]['note'] == ''


def test_export_xlsx(tmp_path, monkeypatch):
    monkeypatch.setattr(utils, 'EXPORTS_DIR', str(tmp_path))
    path = export_rows_to_xlsx({'rows': [{'k': 1}, {'k': 2}]}, 'pingpong')
    frame = pd.read_excel(path, sheet_name='rows', engine='openpyxl')
    assert list(frame['k']) == [1, 2]


def _report():
    report = PingPongReport(('Xt_a', 'Xt_b'), 1)
    report.rows = [
        {'curve': 'c0', 'core': 'a', 'k': 1, 'min_a': 2, 'min_b': 4, 'ok': True},
        {'curve': 'c0', 'core': 'a', 'k': -1, 'min_a': 2, 'min_b': 4, 'ok': True},
        {'curve': 'c1', 'core': 'a', 'k': 1, 'min_a': 4, 'min_b': 8, 'ok': False},
    ]
    return report


def test_per_k_stats():
    stats = AuditAnalyzer(audit=_report()).get_per_k_stats()
    by_k = {row['k']: row for row in stats}
    assert by_k[1]['count'] == 2
    assert by_k[1]['passed'] == 1
    assert by_k[1]['pass_rate'] == 50.0
    assert by_k[1]['avg_min_a'] == 3.0
    assert by_k[-1]['avg_min_b'] == 4.0


def test_witness_stats():
    first = WitnessReport(parse_word('a'), parse_word('a'), 'b', [('a', 'Xt_a', True)], True)
    second = WitnessReport(parse_word('a b'), parse_word('a^-1 b a^2'), 'b',
                           [('a^2', 'Xt_a', True), ('b a^2', 'Xt_b', True), ('a^-1 b a^2', 'Xt_a', True)], True)
    analyzer = AuditAnalyzer(witnesses=[first, second])
    assert analyzer.get_per_length_stats() == [
        {'length': 1, 'words': 1, 'witnessed': 1, 'avg_chain': 1.0},
        {'length': 2, 'words': 1, 'witnessed': 1, 'avg_chain': 3.0},
    ]
    assert analyzer.get_seed_distribution() == {'b': 2}


def test_empty_analyzer():
    analyzer = AuditAnalyzer()
    assert analyzer.get_per_k_stats() == []
    assert analyzer.get_per_length_stats() == []
    assert analyzer.get_seed_distribution() == {}
