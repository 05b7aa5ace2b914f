"""
扭转引擎：t_a^k、t_b^k 的构造与 I、II、III 型约化
"""
from typing import Dict, List, Tuple

from loguru import logger

from curves import (bigon_core_span, classify_arcs, crossings_with, find_bigon, find_bigons, pull_once,
                    reduced_representative, remove_bigon, require_in_C, twist_direction)
from errors import CertificateError, ConfigurationError, GenericityError
from models import Configuration, Curve, HalfSide, ReductionEvent, Step, TwistTrace
from segments import segment_sidedness, segments_of
from surface import core_flip_parity, is_generic_core, prefix_parity, transport


def other_core(core: str) -> str:
    return 'b' if core == 'a' else 'a'


def twist_side_sign(cfg: Configuration, core: str, rect: int) -> int:
    """扭转侧（核心的全局第 0 侧）在矩形中的局部符号"""
    return 1 if prefix_parity(cfg, core, rect) == 0 else -1


def _parity(core: str, half: HalfSide) -> int:
    return half.a_parity if core == 'a' else half.b_parity


def _twisted_step(cfg: Configuration, core: str, step: Step, k: int, hand: str) -> List[Step]:
    """穿过核心的一步换成：穿越 + 在扭转侧沿核心绕 |k| 圈（或先绕圈再穿越）"""
    direction = twist_direction(cfg, core, step, k, hand)
    tau = twist_side_sign(cfg, core, step.rect)
    if core == 'a':
        exit_side, entry_side = ('R', 'L') if direction > 0 else ('L', 'R')
    else:
        exit_side, entry_side = ('T', 'B') if direction > 0 else ('B', 'T')
    out = HalfSide(exit_side, tau)
    steps = [Step(step.rect, step.h_in, out)]
    rect, half = transport(cfg, step.rect, out)
    for _ in range(abs(k) * cfg.n - 1):
        out = HalfSide(exit_side, half.sign)
        steps.append(Step(rect, half, out))
        rect, half = transport(cfg, rect, out)
    if rect != step.rect or half != HalfSide(entry_side, tau):
        raise ConfigurationError(f"沿核心 {core} 绕行未回到起点，核心不是双侧的")
    steps.append(Step(rect, half, step.h_out))
    return steps


def apply_twist_raw(cfg: Configuration, c: Curve, core: str, k: int, hand: str = 'right') -> Curve:
    """未约化的 t_core^k(c)：每个穿过核心的步插入 |k| 圈沿核心的环绕

    Raises:
        ValueError: k 为 0 或方向未知
        ConfigurationError: 核心是单侧的
    """
    from config import HANDS
    if k == 0:
        raise ValueError("k 不能为 0")
    if hand not in HANDS:
        raise ValueError(f"未知扭转方向: {hand}")
    if core_flip_parity(cfg, core):
        raise ConfigurationError(f"核心 {core} 是单侧的")
    steps = []
    for step in c.steps:
        if step.crosses(core):
            steps.extend(_twisted_step(cfg, core, step, k, hand))
        else:
            steps.append(step)
    return Curve(tuple(steps), f"t{core}^{k}({c.name})" if c.name else '')


def expected_raw_counts(cfg: Configuration, c: Curve, core: str, k: int, hand: str = 'right') -> Tuple[int, int]:
    """原始扭转后与核心及另一核心的交点数 (|d∩core|, |d∩other|)

    每个穿越步贡献 n|k| - 1 次直行穿越，另加入口侧与绕行方向相反、出口侧与之相同各一次。
    """
    other = other_core(core)
    core_count = crossings_with(c, core)
    other_count = 0
    for step in c.steps:
        if not step.crosses(core):
            other_count += int(step.crosses(other))
            continue
        direction = twist_direction(cfg, core, step, k, hand)
        other_count += cfg.n * abs(k) - 1
        other_count += int(_parity(other, step.h_in) == -direction)
        other_count += int(_parity(other, step.h_out) == direction)
    return core_count, other_count


def expected_j_after_type_I(cfg: Configuration, c: Curve, core: str, k: int, hand: str = 'right') -> Tuple[int, int]:
    """I 型约化后的 (J(d1, core), J(d1, other))

    按弧类型：A 贡献 n|k|，B 贡献 1+n|k|，C 贡献 n|k|-1，D 贡献自身经过的核心带数。
    """
    from curves import j_counts
    classified, counts = classify_arcs(cfg, c, core, k, hand)
    loops = cfg.n * abs(k)
    j_other = 0
    for arc, kind in classified:
        if kind == 'A':
            j_other += loops
        elif kind == 'B':
            j_other += 1 + loops
        elif kind == 'C':
            j_other += loops - 1
        else:
            j_other += len(arc) - 1
    j_a, j_b = j_counts(cfg, c)
    j_core = j_a if core == 'a' else j_b
    return j_core, j_other


def reduce_type_I(cfg: Configuration, d: Curve, core: str = 'a') -> Tuple[Curve, List[ReductionEvent]]:
    """按矩形编号顺序拉直折返步"""
    from config import MAX_REDUCTION_ROUNDS
    other = other_core(core)
    steps = list(d.steps)
    events = []
    for _ in range(MAX_REDUCTION_ROUNDS):
        candidates = [(s.rect, i) for i, s in enumerate(steps) if s.turns_back]
        if not candidates:
            return Curve(tuple(steps), d.name), events
        rect, idx = min(candidates)
        before = sum(1 for s in steps if s.crosses(other))
        steps = pull_once(steps, idx)
        after = sum(1 for s in steps if s.crosses(other))
        events.append(ReductionEvent('I', rect, None, before, after))
    from errors import ReductionError
    raise ReductionError(f"I 型约化超过 {MAX_REDUCTION_ROUNDS} 轮")


def _segment_bigon(cfg: Configuration, d: Curve, core: str, sidedness: int):
    """另一核心弧恰好经过一条带、且该线段侧性符合要求的第一个二角形"""
    other = other_core(core)
    candidates = []
    for bigon in find_bigons(cfg, d, other):
        direction, length = bigon_core_span(cfg, other, bigon)
        if length != 1:
            continue
        x = bigon.visits[0]
        position = x.rect if other == 'a' else cfg.b_position[x.rect]
        band = position if direction > 0 else (position - 1) % cfg.n
        segment = next(s for s in segments_of(cfg, other) if s.band == band and s.forward)
        if segment_sidedness(cfg, segment) == sidedness:
            candidates.append((min(v.rect for v in bigon.visits), bigon.face, band, bigon))
    if not candidates:
        return None
    candidates.sort(key=lambda item: item[:2])
    return candidates[0]


def _reduce_segment_bigons(cfg: Configuration, d: Curve, core: str, kind: str,
                           sidedness: int) -> Tuple[Curve, List[ReductionEvent]]:
    from config import MAX_REDUCTION_ROUNDS
    other = other_core(core)
    events = []
    current = d
    for _ in range(MAX_REDUCTION_ROUNDS):
        found = _segment_bigon(cfg, current, core, sidedness)
        if found is None:
            return current, events
        rect, _, band, bigon = found
        before = crossings_with(current, other)
        current = remove_bigon(cfg, current, other, bigon)
        after = crossings_with(current, other)
        events.append(ReductionEvent(kind, rect, band, before, after))
        logger.debug(f"{kind} 型约化 @带{band}: {before} -> {after}")
    from errors import ReductionError
    raise ReductionError(f"{kind} 型约化超过 {MAX_REDUCTION_ROUNDS} 轮")


def reduce_type_II(cfg: Configuration, d1: Curve, core: str = 'a') -> Tuple[Curve, List[ReductionEvent]]:
    """消去另一核心弧为双侧线段的二角形"""
    return _reduce_segment_bigons(cfg, d1, core, 'II', 2)


def reduce_type_III(cfg: Configuration, d2: Curve, core: str = 'a') -> Tuple[Curve, List[ReductionEvent]]:
    """消去另一核心弧为单侧线段的二角形"""
    return _reduce_segment_bigons(cfg, d2, core, 'III', 1)


def expected_type_I_drops(c: Curve, core: str, classified) -> List[int]:
    """每条 C 型弧的 I 型约化使另一核心的交点减少的数目

    拉直折返时，C 型弧中不穿过核心的那一步与绕行的第一段合并：
    该步穿过另一核心时减少 2，否则不变。
    """
    other = other_core(core)
    drops = []
    for arc, kind in classified:
        if kind != 'C':
            continue
        plain = next(c.step(p) for p in arc if not c.step(p).crosses(core))
        drops.append(2 if plain.crosses(other) else 0)
    return sorted(drops)


def stage_checks(trace: TwistTrace, classified, counts) -> Dict[str, bool]:
    """各阶段的计数不变量：核心交点不变、I 型约化与 C 型弧对应、II/III 型每次减少 2"""
    core, other = trace.core, other_core(trace.core)
    checks = {
        f'|.∩{core}| preserved': all(crossings_with(stage, core) == crossings_with(trace.source, core)
                                     for stage in (trace.d, trace.d1, trace.d2, trace.d3)),
        'II/III drops = 2': all(e.drop == 2 for e in trace.events if e.kind in ('II', 'III')),
    }
    type_I = trace.events_of('I')
    if counts['?']:
        trace.anomalies.append(f"{counts['?']} arcs outside types A-D, type I prediction skipped")
        return checks
    predicted = expected_type_I_drops(trace.source, core, classified)
    if abs(trace.k) == 1:
        checks['type I events = n_C'] = len(type_I) == counts['C']
    elif len(type_I) != counts['C']:
        trace.anomalies.append(f"typeI events={len(type_I)} n_C={counts['C']} |k|={abs(trace.k)}")
    checks['type I drops'] = sorted(e.drop for e in type_I) == predicted
    segment_events = len(trace.events) - len(type_I)
    checks[f'|d3∩{other}| stage count'] = (
        crossings_with(trace.d3, other) == crossings_with(trace.d, other) - sum(predicted) - 2 * segment_events)
    return checks


def twist_minimal(cfg: Configuration, c: Curve, core: str, k: int,
                  hand: str = 'right') -> Tuple[Curve, TwistTrace]:
    """完整流程：原始扭转 -> I -> II -> III，最后证明 d3 与 a、b 都没有二角形

    阶段计数不变量记在 trace.checks 中，由调用方报告。

    Raises:
        GenericityError: a 或 b 不是 generic 的
        CertificateError: III 型约化后仍有二角形
    """
    for name in ('a', 'b'):
        if not is_generic_core(cfg, name):
            raise GenericityError(f"核心 {name} 不是 generic 的，拒绝扭转")
    require_in_C(cfg, c)
    source = reduced_representative(cfg, c)
    if source.steps != c.steps:
        logger.info(f"扭转前先约化 {c.name}: {len(c)} -> {len(source)} 步")

    d = apply_twist_raw(cfg, source, core, k, hand)
    trace = TwistTrace(core, k, hand, source, d)

    d1, events = reduce_type_I(cfg, d, core)
    trace.d1 = d1
    trace.events += events
    d2, events = reduce_type_II(cfg, d1, core)
    trace.d2 = d2
    trace.events += events
    d3, events = reduce_type_III(cfg, d2, core)
    trace.d3 = d3
    trace.events += events

    classified, counts = classify_arcs(cfg, source, core, k, hand)
    trace.checks = stage_checks(trace, classified, counts)
    for note in trace.anomalies:
        logger.warning(f"t_{core}^{k}({c.name}): {note}")
    if trace.failed_checks:
        logger.error(f"t_{core}^{k}({c.name}) 阶段计数不变量失败: {trace.failed_checks}")

    trace.certificate = {
        'no bigon with a': find_bigon(cfg, d3, 'a') is None,
        'no bigon with b': find_bigon(cfg, d3, 'b') is None,
    }
    if not trace.certified:
        logger.error(f"扭转证书失败: {trace.certificate}")
        raise CertificateError(f"t_{core}^{k}({c.name}) 经 III 型约化后仍有二角形: {trace.certificate}")
    logger.info(f"t_{core}^{k}: |d|={len(d)} |d3|={len(d3)} 约化 {len(trace.events)} 次")
    return d3, trace
