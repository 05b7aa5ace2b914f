"""
命令行主入口：twistlab
"""
import argparse
import os
import sys
from typing import Dict, List, Optional

from loguru import logger

from analyzers import AuditAnalyzer
from config import (DEFAULT_HAND, DEFAULT_MAX_K, DEFAULT_MAX_LEN, DEFAULT_MAX_N, DEFAULT_MAX_STEPS, DEFAULT_RNG,
                    DEFAULT_SAMPLES, HANDS, JOBS, LOG_LEVEL, SIDEDNESS)
from curves import (boundary_bigons_inside, crossing_counts, crossings_with, curve_sidedness, intersection_report,
                    reduce_against_both, reduce_to_minimal, validate_in_C)
from errors import (ConfigurationError, ConfigurationSyntaxError, CurveSyntaxError, GenericityError, TwistlabError,
                    WordSyntaxError)
from fixture_store import store
from freeness import act, freeness_witness, parse_word, ping_pong_audit, reduce_word
from mining import TARGETS, bounded_move_minimum, mine_examples, special_pattern_audit
from models import RunReport
from segments import (double_segments, joinability_classes, non_joinable_to, segment_sidedness,
                      segments_of, separating_pair)
from surface import euler_characteristic, surface_realizations, validate_configuration
from twists import twist_minimal
from utils import config_digest, export_rows_to_csv, export_rows_to_xlsx, format_check

# 解析错误，退出码 2
INPUT_ERRORS = (ConfigurationSyntaxError, CurveSyntaxError, WordSyntaxError, OSError)


def setup_logging(level: str):
    """配置日志：报告写 stdout，日志写 stderr"""
    logger.remove()
    logger.add(sys.stderr, format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <level>{message}</level>", level=level)


def export_rows(args, rows: List[dict], prefix: str, summaries: Optional[Dict[str, List[dict]]] = None):
    """--export 给出时导出审计行；xlsx 另附统计表"""
    if not args.export or not rows:
        return
    if args.export == 'csv':
        path = export_rows_to_csv(rows, prefix)
    else:
        sheets = {prefix: rows}
        sheets.update({name: table for name, table in (summaries or {}).items() if table})
        path = export_rows_to_xlsx(sheets, prefix)
    logger.info(f"已导出 {path}")


# ---------------------------------------------------------------- 子命令

def _load_config(args, report: RunReport):
    """读取配置并写入摘要；结构错误按输入错误处理"""
    try:
        cfg = store.load_configuration(args.config)
    except ConfigurationError as e:
        raise ConfigurationSyntaxError(str(e))
    report.digest = config_digest(cfg)
    return cfg


def cmd_validate(args, report: RunReport):
    cfg = _load_config(args, report)
    validation = validate_configuration(cfg)
    for line in validation.lines():
        report.add(line)
    chi = euler_characteristic(cfg)
    realization = surface_realizations(cfg)
    report.add(f"chi={chi['cells']} regions={realization['regions']} boundary_arcs={chi['boundary_arcs']}")
    if realization['orientable']:
        report.add(f"capped surface: orientable genus={realization['genus']}")
    else:
        report.add(f"capped surface: nonorientable crosscaps={realization['crosscaps']}")
    if not validation.ok:
        report.fail()


def cmd_segments(args, report: RunReport):
    cfg = _load_config(args, report)
    for s in segments_of(cfg, args.host):
        report.add(f"seg {s.band} {s.direction} sided={segment_sidedness(cfg, s)} init_side={s.initial_side}")
    pair = separating_pair(cfg, args.host)
    if pair:
        report.add(f"separating pair {pair[0].label} {pair[1].label}")


def cmd_joinability(args, report: RunReport):
    cfg = _load_config(args, report)
    for index, members in enumerate(joinability_classes(cfg, args.host)):
        report.add(f"class {index}: " + ' '.join(s.label for s in members))
    required = 2 if cfg.n >= 3 else 1
    for P in double_segments(cfg, args.host):
        others = non_joinable_to(cfg, P)
        passed = len(others) >= required
        report.add(format_check(f"{P.label} non-joinable>={required}", passed,
                                ' '.join(Q.label for Q in others)))
        if not passed:
            report.fail()


def _load_pair(args, report: RunReport):
    return _load_config(args, report), store.load_curve(args.curve)


def cmd_curve_info(args, report: RunReport):
    cfg, c = _load_pair(args, report)
    validation = validate_in_C(cfg, c)
    for line in validation.lines():
        report.add(line)
    if not validation.ok:
        report.fail()
        return
    report.add(f"sidedness={SIDEDNESS[curve_sidedness(cfg, c)]}")
    report.add(intersection_report(cfg, c).to_line())
    inside = boundary_bigons_inside(cfg, c)
    report.add(format_check('boundary bigons inside N_a', inside))
    if not inside:
        report.fail()


def _output_stem(args, suffix: str) -> str:
    """--out 给出时用它，否则写在输入曲线旁边"""
    if args.out:
        return os.path.splitext(args.out)[0]
    return f"{os.path.splitext(args.curve)[0]}-{suffix}"


def cmd_reduce(args, report: RunReport):
    cfg, c = _load_pair(args, report)
    if args.against == 'both':
        result, tagged = reduce_against_both(cfg, c)
        events = [e for _, e in tagged]
    else:
        result, events = reduce_to_minimal(cfg, c, args.against)
    for e in events:
        report.add(e.to_line())
    min_a, min_b = crossing_counts(cfg, result)
    report.add(f"min_a={min_a} min_b={min_b} steps={len(result)}")
    if args.oracle:
        for core, value in (('a', min_a), ('b', min_b)):
            if args.against not in (core, 'both'):
                continue
            oracle = bounded_move_minimum(cfg, c, core)
            passed = oracle == value
            report.add(format_check(f"oracle {core}", passed, f"oracle={oracle} reduced={value}"))
            if not passed:
                report.fail()
    stem = _output_stem(args, f"min-{args.against}")
    name = os.path.basename(stem)
    curve_path = store.save_curve(result.renamed(name), stem + '.crv')
    trace_path = store.save_trace(events, stem + '.trace',
                                  {'curve': c.name, 'against': args.against, 'result': name})
    report.add(f"wrote {curve_path} {trace_path}")


def _emit_stages(trace, c, directory: str) -> List[str]:
    """把 d、d1、d2、d3 和事件轨迹写到目录里"""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for label, stage in (('d', trace.d), ('d1', trace.d1), ('d2', trace.d2), ('d3', trace.d3)):
        name = f"{c.name}-{label}"
        paths.append(store.save_curve(stage.renamed(name), os.path.join(directory, name + '.crv')))
    header = {'curve': c.name, 'core': trace.core, 'k': str(trace.k), 'hand': trace.hand}
    paths.append(store.save_trace(trace.events, os.path.join(directory, f"{c.name}.trace"), header))
    return paths


def cmd_twist(args, report: RunReport):
    cfg, c = _load_pair(args, report)
    try:
        d3, trace = twist_minimal(cfg, c, args.core, args.k, args.hand)
    except GenericityError as e:
        report.fail(f"refused: {e}")
        return
    report.add(intersection_report(cfg, d3).to_line())
    for label, stage in (('d', trace.d), ('d1', trace.d1), ('d2', trace.d2), ('d3', trace.d3)):
        stage_a, stage_b = crossing_counts(cfg, stage)
        report.add(f"stage {label}: |.∩a|={stage_a} |.∩b|={stage_b} steps={len(stage)}")
    for kind in ('I', 'II', 'III'):
        report.add(f"events {kind}={len(trace.events_of(kind))}")
    for note in trace.anomalies:
        report.add(f"anomaly {note}")
    for name, passed in list(trace.checks.items()) + list(trace.certificate.items()):
        report.add(format_check(name, passed))
    if trace.failed_checks:
        report.fail()
    if args.emit_stages:
        for path in _emit_stages(trace, c, args.emit_stages):
            report.add(f"wrote {path}")
    if args.out:
        store.save_curve(d3.renamed(args.out), args.out)


def cmd_act(args, report: RunReport):
    cfg = _load_config(args, report)
    w = reduce_word(parse_word(args.word))
    try:
        result = act(cfg, w, args.seed, args.hand)
    except GenericityError as e:
        report.fail(f"refused: {e}")
        return
    min_a, min_b = crossing_counts(cfg, result)
    report.add(f"word {w} seed={args.seed}")
    report.add(f"I(w({args.seed}),a)={min_a} I(w({args.seed}),b)={min_b} steps={len(result)}")
    if args.out:
        store.save_curve(result.renamed(args.out), args.out)


def cmd_pingpong(args, report: RunReport):
    cfg = _load_config(args, report)
    try:
        audit = ping_pong_audit(cfg, args.max_k, args.samples, args.rng, args.hand, args.max_steps)
    except GenericityError as e:
        report.fail(f"refused: {e}")
        return
    set_a, set_b = audit.sets
    report.add(format_check(f"{set_a},{set_b} disjoint and nonempty", audit.disjoint_nonempty))
    report.add(f"members {set_a}={audit.members.get(set_a, 0)} {set_b}={audit.members.get(set_b, 0)}")
    report.add(f"rows={len(audit.rows)} outside_formula={audit.outside_formula} violations={len(audit.violations)}")
    per_k = AuditAnalyzer(audit=audit).get_per_k_stats()
    for row in per_k:
        report.add(f"per-k core={row['core']} k={row['k']} count={row['count']} passed={row['passed']} "
                   f"avg_min_a={row['avg_min_a']} avg_min_b={row['avg_min_b']}")
    for violation in audit.violations:
        report.add(f"violation {violation}")
    export_rows(args, audit.rows, 'pingpong', {'per_k': per_k})
    if audit.violations or not audit.disjoint_nonempty:
        report.fail()
    elif audit.inconclusive:
        report.inconclusive("no sampled members")


def cmd_freeness(args, report: RunReport):
    cfg = _load_config(args, report)
    try:
        witnesses = freeness_witness(cfg, args.max_len, args.hand, args.jobs)
    except GenericityError as e:
        report.fail(f"refused: {e}")
        return
    for w in witnesses:
        row = w.to_dict()
        report.add(f"witness {row['word']} seed={row['seed']} chain={row['chain']} {row['inequality']}")
    report.add(f"words={len(witnesses)} witnessed={sum(1 for w in witnesses if w.conclusion)}")
    analyzer = AuditAnalyzer(witnesses=witnesses)
    per_length = analyzer.get_per_length_stats()
    for row in per_length:
        report.add(f"per-length length={row['length']} words={row['words']} witnessed={row['witnessed']} "
                   f"avg_chain={row['avg_chain']}")
    seeds = analyzer.get_seed_distribution()
    report.add("seeds " + ' '.join(f"{seed}={count}" for seed, count in seeds.items()))
    export_rows(args, [w.to_dict() for w in witnesses], 'freeness',
                {'per_length': per_length, 'seeds': [{'seed': s, 'count': n} for s, n in seeds.items()]})


def cmd_mine(args, report: RunReport):
    hits, bounds = mine_examples(args.target, args.max_n, args.max_steps, hand=args.hand, exact=args.exact)
    report.add(' '.join(f"{key}={value}" for key, value in bounds.items()))
    for hit in hits:
        report.add(f"hit {hit.config.name} counts={','.join(map(str, hit.counts))} exact={int(hit.exact)}")
        if args.save:
            store.save_configuration(hit.config, f"{args.save}")
            if hit.curve is not None:
                store.save_curve(hit.curve, f"{args.save}-c")
    if bounds['orientable_hits']:
        report.fail(f"orientable hits={bounds['orientable_hits']}")
    elif not hits:
        report.inconclusive("no hit within bounds")


def cmd_pattern_audit(args, report: RunReport):
    audit = special_pattern_audit(args.max_n, args.max_steps)
    report.add(f"configs={audit.configs} hypothesis={len(audit.hypothesis_configs)} members={audit.members} "
               f"patterns={audit.patterns} violations={len(audit.violations)}")
    for name in audit.hypothesis_configs:
        report.add(f"hypothesis {name}")
    for violation in audit.violations:
        report.add(f"violation {violation}")
    if audit.violations:
        report.fail()
    elif not audit.hypothesis_configs:
        report.inconclusive(f"no configuration with a separating pair for n<={args.max_n}")
    elif audit.inconclusive:
        report.inconclusive("no type C arc meets the hypothesis")


def cmd_examples(args, report: RunReport):
    """重新生成挖掘夹具并端到端复核"""
    from generate_fixtures import expected_mob, write_hand_fixtures, write_mined_fixtures
    write_hand_fixtures()
    found = write_mined_fixtures(max_n=args.max_n, max_steps=args.max_steps)
    for name, hit in found.items():
        if hit is None:
            report.inconclusive(f"{name}: no hit within bounds")
            continue
        cfg = store.load_configuration(name)
        report.add(f"{name} digest={config_digest(cfg)} counts={','.join(map(str, hit.counts))}")
        if hit.target == 'ex3.3':
            if name == 'cfg-mob':
                report.add(format_check('cfg-mob is cfg-no2 with R0 disk', cfg.to_text() == expected_mob().to_text()))
            c = store.load_curve(f"{name}-c")
            report.add(format_check(f"{name} I(a,c)={crossings_with(c, 'a')}",
                                    (crossings_with(c, 'a'),) == tuple(hit.counts)))
            try:
                twist_minimal(cfg, c, 'a', 1, args.hand)
                report.fail(f"{name} twist was not refused")
            except GenericityError:
                report.add(format_check(f"{name} twist refused", True))
            continue
        c = store.load_curve(f"{name}-c")
        d3, _ = twist_minimal(cfg, c, 'a', 1, args.hand)
        counts = crossing_counts(cfg, c) + crossing_counts(cfg, d3)
        passed = counts == tuple(hit.counts)
        report.add(format_check(f"{name} reproduced", passed, ','.join(map(str, counts))))
        if not passed:
            report.fail()


# ---------------------------------------------------------------- 参数

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='twistlab', description='非可定向曲面上的扭转、约化与自由性检查')
    parser.add_argument('--jobs', type=int, default=JOBS, help='并行进程数（环境变量 TWISTLAB_JOBS）')
    parser.add_argument('--log-level', default=LOG_LEVEL, help='日志级别')
    parser.add_argument('--export', choices=('csv', 'xlsx'), help='导出审计行')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('validate', help='校验配置')
    p.add_argument('config')
    p.set_defaults(handler=cmd_validate)

    for name, handler in (('segments', cmd_segments), ('joinability', cmd_joinability)):
        p = sub.add_parser(name)
        p.add_argument('config')
        p.add_argument('--host', choices=('a', 'b'), default='b')
        p.set_defaults(handler=handler)

    p = sub.add_parser('curve-info', help='曲线交点报告')
    p.add_argument('config')
    p.add_argument('curve')
    p.set_defaults(handler=cmd_curve_info)

    p = sub.add_parser('reduce', help='消去二角形')
    p.add_argument('config')
    p.add_argument('curve')
    p.add_argument('--against', choices=('a', 'b', 'both'), default='both')
    p.add_argument('--oracle', action='store_true', help='与有界移动搜索比较')
    p.add_argument('--out', help='输出曲线与轨迹的路径前缀')
    p.set_defaults(handler=cmd_reduce)

    p = sub.add_parser('twist', help='t_core^k 并约化')
    p.add_argument('config')
    p.add_argument('curve')
    p.add_argument('--core', choices=('a', 'b'), default='a')
    p.add_argument('-k', '--k', type=int, default=1)
    p.add_argument('--hand', choices=tuple(HANDS), default=DEFAULT_HAND)
    p.add_argument('--emit-stages', metavar='DIR', help='把各阶段曲线和轨迹写到目录')
    p.add_argument('--out')
    p.set_defaults(handler=cmd_twist)

    p = sub.add_parser('act', help='扭转词作用在核心上')
    p.add_argument('config')
    p.add_argument('--word', required=True)
    p.add_argument('--seed', choices=('a', 'b'), default='b')
    p.add_argument('--hand', choices=tuple(HANDS), default=DEFAULT_HAND)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_act)

    p = sub.add_parser('pingpong', help='乒乓审计')
    p.add_argument('config')
    p.add_argument('--max-k', type=int, default=DEFAULT_MAX_K)
    p.add_argument('--samples', type=int, default=DEFAULT_SAMPLES)
    p.add_argument('--rng', type=int, default=DEFAULT_RNG)
    p.add_argument('--max-steps', type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument('--hand', choices=tuple(HANDS), default=DEFAULT_HAND)
    p.set_defaults(handler=cmd_pingpong)

    p = sub.add_parser('freeness', help='自由性见证')
    p.add_argument('config')
    p.add_argument('--max-len', type=int, default=DEFAULT_MAX_LEN)
    p.add_argument('--hand', choices=tuple(HANDS), default=DEFAULT_HAND)
    p.set_defaults(handler=cmd_freeness)

    p = sub.add_parser('mine-examples', help='挖掘例子')
    p.add_argument('--target', choices=TARGETS, required=True)
    p.add_argument('--max-n', type=int, default=DEFAULT_MAX_N)
    p.add_argument('--max-steps', type=int, help='步数上限；默认按目标决定')
    p.add_argument('--hand', choices=tuple(HANDS), default=DEFAULT_HAND)
    p.add_argument('--exact', action='store_true', help='只搜索已发表的数值')
    p.add_argument('--save', help='把第一个命中保存为夹具')
    p.set_defaults(handler=cmd_mine)

    p = sub.add_parser('pattern-audit', help='分离线段对前提下 C 型弧之后的弧型')
    p.add_argument('--max-n', type=int, default=DEFAULT_MAX_N)
    p.add_argument('--max-steps', type=int, default=DEFAULT_MAX_STEPS)
    p.set_defaults(handler=cmd_pattern_audit)

    p = sub.add_parser('examples', help='重新生成并复核例子夹具')
    p.add_argument('--max-n', type=int, default=DEFAULT_MAX_N)
    p.add_argument('--max-steps', type=int, help='步数上限；默认按目标决定')
    p.add_argument('--hand', choices=tuple(HANDS), default=DEFAULT_HAND)
    p.set_defaults(handler=cmd_examples)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """运行一个子命令，返回退出码：0 通过，1 违例或无结论，2 输入错误"""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    setup_logging(args.log_level)

    report = RunReport(' '.join(argv))
    try:
        args.handler(args, report)
    except INPUT_ERRORS as e:
        logger.error(f"输入错误: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TwistlabError as e:
        logger.error(f"{args.command} 失败: {e}")
        report.fail(f"error {type(e).__name__}: {e}")
    sys.stdout.write(report.render())
    return report.exit_code


if __name__ == '__main__':
    sys.exit(main())
