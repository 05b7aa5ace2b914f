"""
挖掘模块：族 C 曲线枚举、有界移动最小值搜索、配置枚举和例子挖掘
"""
from collections import deque
from itertools import combinations, permutations, product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from loguru import logger

from curves import (classify_arcs, core_curve, crossing_counts, crossings_with, membership, pull_tight,
                    reduced_representative, validate_in_C)
from errors import ReductionError, TwistlabError
from models import Cap, Configuration, Curve, HalfSide, MiningHit, PatternAuditReport, Step
from segments import joinability_classes, separating_pair
from surface import (boundary_regions, global_side, is_generic_core, is_orientable_neighbourhood, transport,
                     validate_configuration)
from twists import twist_minimal

TARGETS = ('ex3.1', 'ex3.2', 'ex3.3')

# 已发表的数值与所在的 n：ex3.1、ex3.2 为 (I(c,a), I(c,b), I(t_a c, a), I(t_a c, b))，ex3.3 为 (I(a,c),)
PUBLISHED = {
    'ex3.1': ((8, 4, 8, 4), 2),
    'ex3.2': ((2, 1, 2, 1), 8),
    'ex3.3': ((4,), 4),
}

# 结构检查，不含一般性
STRUCTURAL_CHECKS = ('n>=2', 'a two-sided', 'b two-sided', 'caps reference regions', 'euler', 'minimal position')


# ---------------------------------------------------------------- 曲线枚举

def _half_sides() -> List[HalfSide]:
    return [HalfSide(side, sign) for side in ('L', 'R', 'B', 'T') for sign in (1, -1)]


def _exits(h_in: HalfSide) -> List[HalfSide]:
    return sorted((h for h in _half_sides() if h.side != h_in.side), key=lambda h: h.ccw_index)


def _step_key(step: Step) -> Tuple[int, int, int]:
    return (step.rect, step.h_in.ccw_index, step.h_out.ccw_index)


def _return_distances(cfg: Configuration, target: Tuple[int, HalfSide]) -> Dict[Tuple[int, HalfSide], int]:
    """每个状态 (矩形, 入口半边) 回到 target 所需的最少步数"""
    reverse: Dict[Tuple[int, HalfSide], List[Tuple[int, HalfSide]]] = {}
    for rect in range(cfg.n):
        for h_in in _half_sides():
            for h_out in _exits(h_in):
                reverse.setdefault(transport(cfg, rect, h_out), []).append((rect, h_in))
    distances = {target: 0}
    queue = deque([target])
    while queue:
        state = queue.popleft()
        for previous in reverse.get(state, []):
            if previous not in distances:
                distances[previous] = distances[state] + 1
                queue.append(previous)
    return distances


def _closed_words(cfg: Configuration, length: int) -> List[Tuple[Step, ...]]:
    """长度恰为 length、首步是循环旋转中最小键的闭合步序列"""
    words = []
    for rect in range(cfg.n):
        for h_in in sorted(_half_sides(), key=lambda h: h.ccw_index):
            start = (rect, h_in)
            distances = _return_distances(cfg, start)

            def extend(path: List[Step], state: Tuple[int, HalfSide]):
                if len(path) == length:
                    if state == start:
                        words.append(tuple(path))
                    return
                remaining = length - len(path)
                if distances.get(state, remaining + 1) > remaining:
                    return
                here_rect, here_in = state
                for h_out in _exits(here_in):
                    step = Step(here_rect, here_in, h_out)
                    if path and _step_key(step) < _step_key(path[0]):
                        continue
                    path.append(step)
                    extend(path, transport(cfg, here_rect, h_out))
                    path.pop()

            for h_out in _exits(h_in):
                first = Step(rect, h_in, h_out)
                extend([first], transport(cfg, rect, h_out))
    return words


def _is_canonical(steps: Tuple[Step, ...]) -> bool:
    """步序列是旋转和反向下的最小代表"""
    curve = Curve(steps)
    key = tuple(_step_key(s) for s in steps)
    best_forward = tuple(_step_key(s) for s in curve.canonical().steps)
    best_backward = tuple(_step_key(s) for s in curve.reversed().canonical().steps)
    return key == min(best_forward, best_backward)


def _is_primitive(steps: Tuple[Step, ...]) -> bool:
    size = len(steps)
    return all(steps != steps[d:] + steps[:d] for d in range(1, size) if size % d == 0)


def enumerate_curves(cfg: Configuration, max_steps: int, generic_only: bool = True,
                     min_steps: int = 1) -> Iterator[Curve]:
    """按长度-字典序生成族 C 中的曲线：可嵌入、本原、循环规范

    Args:
        cfg: 配置
        max_steps: 步数上限
        generic_only: 只保留 generic 曲线
        min_steps: 步数下限，更短的长度直接跳过
    """
    produced = 0
    for length in range(max(1, min_steps), max_steps + 1):
        words = sorted(set(_closed_words(cfg, length)), key=lambda w: tuple(_step_key(s) for s in w))
        for steps in words:
            if not _is_primitive(steps) or not _is_canonical(steps):
                continue
            curve = Curve(steps, f"c{produced}")
            report = validate_in_C(cfg, curve)
            if report.get('embedded') is not True:
                continue
            if generic_only and report.get('generic') is not True:
                continue
            produced += 1
            yield curve
        logger.debug(f"长度 {length} 枚举完毕，累计 {produced} 条曲线")


# ---------------------------------------------------------------- 有界移动搜索

def _toggle(steps: Sequence[Step], p: int) -> List[Step]:
    """把第 p 步离开的股推到带中核心的另一侧"""
    steps = list(steps)
    size = len(steps)
    here = steps[p]
    if size == 1:
        return [Step(here.rect, here.h_in.flipped(), here.h_out.flipped())]
    steps[p] = Step(here.rect, here.h_in, here.h_out.flipped())
    nxt = steps[(p + 1) % size]
    steps[(p + 1) % size] = Step(nxt.rect, nxt.h_in.flipped(), nxt.h_out)
    return steps


def _state_key(steps: Sequence[Step]) -> Tuple:
    return tuple(_step_key(s) for s in Curve(tuple(steps)).canonical().steps)


def bounded_move_minimum(cfg: Configuration, c: Curve, core: str, max_states: Optional[int] = None) -> int:
    """不经过面结构的独立最小交点数：在拉直折返与带内推移之间做广度优先搜索

    只在所有区域开放时是精确的；状态数超过上限时返回已见到的最小值。
    """
    from config import ORACLE_MAX_STATES
    limit = max_states or ORACLE_MAX_STATES
    start, _ = pull_tight(c.steps)
    best = crossings_with(Curve(tuple(start)), core)
    seen = {_state_key(start)}
    queue = deque([start])
    while queue:
        steps = queue.popleft()
        for p in range(len(steps)):
            moved = _toggle(steps, p)
            try:
                moved, _ = pull_tight(moved)
            except ReductionError:
                continue
            key = _state_key(moved)
            if key in seen:
                continue
            seen.add(key)
            best = min(best, crossings_with(Curve(tuple(moved)), core))
            queue.append(moved)
            if len(seen) >= limit:
                logger.warning(f"有界移动搜索达到 {limit} 个状态，结果可能不是最小值")
                return best
    logger.debug(f"有界移动搜索 {len(seen)} 个状态，最小交点数 {best}")
    return best


# ---------------------------------------------------------------- 配置枚举

def _even_flip_vectors(n: int) -> List[Tuple[int, ...]]:
    return [flips for flips in product((0, 1), repeat=n) if sum(flips) % 2 == 0]


def _cap_choices(cfg: Configuration, kinds: Sequence[str]) -> Iterator[Configuration]:
    """封口组合：先按封住的区域数，再按区域号和封口类型"""
    region_ids = [r.id for r in boundary_regions(cfg)]
    closed_kinds = [k for k in kinds if k != 'open']
    yield cfg.with_caps({})
    for count in range(1, len(region_ids) + 1):
        for chosen in combinations(region_ids, count):
            for chosen_kinds in product(closed_kinds, repeat=count):
                yield cfg.with_caps({rid: Cap(kind) for rid, kind in zip(chosen, chosen_kinds)})


def enumerate_configurations(max_n: int, kinds: Sequence[str] = ('open',), min_n: int = 2,
                             require_generic: bool = True) -> Iterator[Configuration]:
    """按 n、b 序、翻转位、封口的确定顺序生成配置

    b 序固定从矩形 0 出发；翻转向量只取偶数和（两个核心都双侧）。
    """
    for n in range(min_n, max_n + 1):
        for tail in permutations(range(1, n)):
            b_order = (0,) + tail
            for a_flips in _even_flip_vectors(n):
                for b_flips in _even_flip_vectors(n):
                    base = Configuration(n, b_order, a_flips, b_flips)
                    for cfg in _cap_choices(base, kinds):
                        named = _validated(cfg, require_generic)
                        if named is not None:
                            yield named


def _validated(cfg: Configuration, require_generic: bool) -> Optional[Configuration]:
    """通过结构检查（及一般性）时返回带规范名的配置"""
    report = validate_configuration(cfg)
    if not all(report.get(name) for name in STRUCTURAL_CHECKS):
        return None
    if require_generic and not report.ok:
        return None
    caps = ','.join(f"R{rid}{cap.kind[0]}" for rid, cap in cfg.caps)
    name = f"n{cfg.n}-b{''.join(map(str, cfg.b_order))}-a{''.join(map(str, cfg.a_flips))}" \
           f"-f{''.join(map(str, cfg.b_flips))}" + (f"-{caps}" if caps else '')
    return Configuration(cfg.n, cfg.b_order, cfg.a_flips, cfg.b_flips, cfg.caps, name)


def _interleaved_order(m: int) -> Tuple[int, ...]:
    """b 交替访问 a 的前半和后半：0, m, 1, m+1, ..., m-1, 2m-1"""
    return tuple(r for i in range(m) for r in (i, i + m))


def _halves_flips(m: int) -> Tuple[int, ...]:
    """a 在第 m-1 和第 2m-1 条带翻转：前半矩形的上侧与后半矩形的下侧同属第 0 侧"""
    return tuple(int(i in (m - 1, 2 * m - 1)) for i in range(2 * m))


def mobius_family(m: int) -> Configuration:
    """n = 2m 的配置，a 的第 0 侧封口后是默比乌斯带

    第 0 侧有 m 条平行的扭转 b-带（矩形 i 的 T 到矩形 i+m 的 B），
    这一侧的区域全部封成圆盘；第 1 侧的区域保持开放。b 本身与 a 交 2m 次。
    """
    if m < 1:
        raise ValueError("m 至少为 1")
    n = 2 * m
    base = Configuration(n, _interleaved_order(m), _halves_flips(m), (0,) * n)
    caps = {}
    for region in boundary_regions(base):
        edge = region.boundary_walk[0]
        local_sign = 1 if edge.corner.startswith('T') else -1
        if global_side(base, 'a', edge.rect, local_sign) == 0:
            caps[region.id] = Cap('disk')
    return Configuration(n, base.b_order, base.a_flips, base.b_flips, base.with_caps(caps).caps, f"mob{n}")


def interleaved_configurations(m: int, kinds: Sequence[str] = ('open',),
                               require_generic: bool = True) -> Iterator[Configuration]:
    """n = 2m 的交替族：b 序交替访问 a 的两半，a 不翻转或按两半翻转，b 的翻转位取全部偶向量"""
    n = 2 * m
    for a_flips in ((0,) * n, _halves_flips(m)):
        for b_flips in _even_flip_vectors(n):
            base = Configuration(n, _interleaved_order(m), a_flips, b_flips)
            for cfg in _cap_choices(base, kinds):
                named = _validated(cfg, require_generic)
                if named is not None:
                    yield named


# ---------------------------------------------------------------- 例子挖掘

def _source_counts(cfg: Configuration, c: Curve) -> Optional[Tuple[Curve, Tuple[int, int]]]:
    """约化代表及其 (I(c,a), I(c,b))；约化失败时为 None"""
    try:
        rep = reduced_representative(cfg, c)
    except TwistlabError as e:
        logger.debug(f"{cfg.name} {c.name} 约化失败: {e}")
        return None
    return rep, crossing_counts(cfg, rep)


def _passes_prefilter(target: str, counts: Tuple[int, int], exact: bool) -> bool:
    """扭转前剪枝：t_a 保持 I(c,a)，命中要求扭转前已满足目标比例"""
    ca, cb = counts
    if exact:
        return counts == PUBLISHED[target][0][:2]
    if target == 'ex3.1':
        return cb > 0 and ca == 2 * cb
    return counts == (2, 1)


def _length_bounds(target: str, exact: bool, max_steps: Optional[int]) -> Tuple[int, int]:
    """(最短, 最长) 步数；每步至多穿过 a 一次，I(c,a) 是长度下界

    精确搜索时默认上限取 I(c,a)+I(c,b)。
    """
    from config import DEFAULT_MAX_STEPS
    if exact:
        ca, cb = PUBLISHED[target][0][:2]
        return ca, max_steps or ca + cb
    return 2, max_steps or DEFAULT_MAX_STEPS


def _twist_counts(cfg: Configuration, rep: Curve, hand: str) -> Optional[Tuple[int, int]]:
    """(I(t_a c, a), I(t_a c, b))；扭转失败时为 None"""
    try:
        d3, _ = twist_minimal(cfg, rep, 'a', 1, hand)
    except TwistlabError as e:
        logger.debug(f"{cfg.name} {rep.name} 跳过: {e}")
        return None
    return crossing_counts(cfg, d3)


def _matches(target: str, n: int, counts: Tuple[int, int, int, int]) -> Tuple[bool, bool]:
    """(是否命中, 是否与已发表数字完全一致)"""
    ca, cb, da, db = counts
    published, published_n = PUBLISHED[target]
    if target == 'ex3.1':
        hit = n == 2 and cb > 0 and ca == 2 * cb and da == 2 * db and db > 0
        return hit, counts == published
    hit = n % 2 == 0 and counts == (2, 1, 2, 1)
    return hit, hit and n == published_n


def _search_space(target: str, max_n: int, kinds: Sequence[str], exact: bool) -> Iterator[Configuration]:
    if target == 'ex3.1':
        return enumerate_configurations(2, kinds, min_n=2)
    if exact:
        return interleaved_configurations(PUBLISHED[target][1] // 2, kinds)
    return (cfg for cfg in enumerate_configurations(max_n, kinds) if cfg.n % 2 == 0)


def _mobius_hits(max_n: int, max_hits: int, exact: bool, bounds: Dict) -> List[MiningHit]:
    """ex3.3 直接构造：mobius_family(m) 中 b 与 a 交 2m 次，t_a 因 a 不 generic 被拒绝"""
    published, published_n = PUBLISHED['ex3.3']
    sizes = [published_n // 2] if exact else range(1, max_n // 2 + 1)
    hits = []
    for m in sizes:
        cfg = mobius_family(m)
        bounds['configs'] += 1
        if _validated(cfg, require_generic=False) is None or is_generic_core(cfg, 'a'):
            logger.warning(f"{cfg.name} 不满足 ex3.3 的前提")
            continue
        c = core_curve(cfg, 'b').renamed('ex3.3-c')
        counts = (crossings_with(c, 'a'),)
        hits.append(MiningHit('ex3.3', cfg, c, counts, counts == published))
        logger.info(f"ex3.3 命中: {cfg.name} I(a,c)={counts[0]}")
        if len(hits) >= max_hits:
            break
    return hits


def mine_examples(target: str, max_n: int = None, max_steps: int = None, max_hits: int = 1,
                  hand: str = 'right', kinds: Sequence[str] = None,
                  exact: bool = False) -> Tuple[List[MiningHit], Dict]:
    """在给定界内搜索符合例子数值的命中

    ex3.1、ex3.2 先按扭转前的约化计数剪枝，同一约化代表只扭转一次；
    exact 时只找已发表的数值（ex3.2 在 n=8 的交替族中搜索）。ex3.3 由 mobius_family 直接构造。

    Returns:
        (命中列表, 界报告)；找不到时命中列表为空
    """
    from config import DEFAULT_MAX_N
    if target not in TARGETS:
        raise ValueError(f"未知目标: {target}")
    max_n = max_n or DEFAULT_MAX_N
    min_steps, max_steps = _length_bounds(target, exact, max_steps)
    hits: List[MiningHit] = []
    bounds = {'target': target, 'exact': exact, 'max_n': max_n, 'min_steps': min_steps, 'max_steps': max_steps,
              'configs': 0, 'curves': 0, 'candidates': 0, 'orientable_hits': 0}

    if target == 'ex3.3':
        hits = _mobius_hits(max_n, max_hits, exact, bounds)
    else:
        for cfg in _search_space(target, max_n, kinds or ('open',), exact):
            bounds['configs'] += 1
            orientable = is_orientable_neighbourhood(cfg)
            seen = set()
            for c in enumerate_curves(cfg, max_steps, min_steps=min_steps):
                bounds['curves'] += 1
                source = _source_counts(cfg, c)
                if source is None or not _passes_prefilter(target, source[1], exact):
                    continue
                rep, source_counts = source
                key = _state_key(rep.steps)
                if key in seen:
                    continue
                seen.add(key)
                bounds['candidates'] += 1
                twisted = _twist_counts(cfg, rep, hand)
                if twisted is None:
                    continue
                counts = source_counts + twisted
                hit, matched = _matches(target, cfg.n, counts)
                if not hit or (exact and not matched):
                    continue
                if orientable:
                    bounds['orientable_hits'] += 1
                    logger.warning(f"可定向配置 {cfg.name} 出现 {target} 型命中: {counts}")
                hits.append(MiningHit(target, cfg, c.renamed(f"{target}-c"), counts, matched))
                logger.info(f"{target} 命中: {cfg.name} {c.name} {counts}")
                break
            if len(hits) >= max_hits:
                break

    if not hits:
        logger.warning(f"{target} 在界内没有命中: {bounds}")
    bounds['hits'] = len(hits)
    return hits, bounds


# ---------------------------------------------------------------- 分离线段对

def _b_segment_of(cfg: Configuration, step: Step, reverse: bool = False) -> Tuple[int, bool]:
    """c 离开矩形时经过的 b-带及方向 (带号, 是否沿 b 正向)；reverse 为反向看"""
    position = cfg.b_position[step.rect]
    if step.h_out.side == 'T':
        band, forward = position, True
    else:
        band, forward = (position - 1) % cfg.n, False
    return band, forward != reverse


def _parallel(first: Tuple[List[int], str], second: Tuple[List[int], str], c: Curve) -> bool:
    """两条 C 型弧连接同一对矩形"""
    if first[1] != 'C' or second[1] != 'C':
        return False
    return {c.step(p).rect for p in first[0]} == {c.step(p).rect for p in second[0]}


def special_pattern_violations(cfg: Configuration, c: Curve, pair) -> Tuple[int, List[str]]:
    """c 的每条连接 p′、q′ 起点的 C 型弧 s：其后或其前的弧 r 是 A/B 型，且 r 之后的弧不平行于 s

    Returns:
        (满足前提的 C 型弧数, 违例)
    """
    p, q = pair
    classes = joinability_classes(cfg, 'b')
    lookup = {(s.band, s.forward): idx for idx, members in enumerate(classes) for s in members}
    target = {lookup[(p.band, p.forward)]: 'p', lookup[(q.band, q.forward)]: 'q'}
    classified, _ = classify_arcs(cfg, c, 'a')
    size = len(classified)
    patterns, violations = 0, []
    if size < 2:
        return 0, []
    for i, (arc, kind) in enumerate(classified):
        if kind != 'C':
            continue
        outgoing = _b_segment_of(cfg, c.step(arc[-1]))
        incoming = _b_segment_of(cfg, c.step((arc[0] - 1) % len(c)), reverse=True)
        labels = {target.get(lookup[outgoing]), target.get(lookup[incoming])}
        if labels != {'p', 'q'}:
            continue
        patterns += 1
        candidates = ((classified[(i + 1) % size], classified[(i + 2) % size]),
                      (classified[(i - 1) % size], classified[(i - 2) % size]))
        if not any(r[1] in ('A', 'B') and not _parallel(follower, (arc, kind), c) for r, follower in candidates):
            violations.append(f"{cfg.name} {c.name} 弧 {arc}: 前后弧 "
                              f"{[(r[1], f[1]) for r, f in candidates]}")
    return patterns, violations


def special_pattern_audit(max_n: int, max_steps: int, min_n: int = 3,
                          kinds: Sequence[str] = ('open', 'disk')) -> PatternAuditReport:
    """在界内寻找有分离线段对的配置，并对 X_b 中的曲线检查 C 型弧后的弧型

    没有配置满足前提时报告为无结论。
    """
    report = PatternAuditReport(max_n, max_steps)
    for cfg in enumerate_configurations(max_n, kinds, min_n=max(min_n, 3)):
        report.configs += 1
        pair = separating_pair(cfg, 'b')
        if pair is None:
            continue
        report.hypothesis_configs.append(cfg.name)
        for c in enumerate_curves(cfg, max_steps):
            try:
                rep = reduced_representative(cfg, c)
                if not membership(cfg, rep, reduced=rep)['X_b']:
                    continue
                report.members += 1
                patterns, violations = special_pattern_violations(cfg, rep.renamed(c.name), pair)
            except TwistlabError as e:
                report.violations.append(f"{cfg.name} {c.name}: {type(e).__name__}: {e}")
                continue
            report.patterns += patterns
            report.violations += violations
    if not report.hypothesis_configs:
        logger.warning(f"n≤{max_n} 内没有配置满足分离线段对前提")
    elif report.inconclusive:
        logger.warning(f"{len(report.hypothesis_configs)} 个配置满足前提，但没有 C 型弧样本")
    logger.info(f"分离线段对审计: 配置 {report.configs}, 前提 {len(report.hypothesis_configs)}, "
                f"成员 {report.members}, 样本 {report.patterns}, 违例 {len(report.violations)}")
    return report
