"""
曲线引擎：族 C 中的曲线、交点计数、二角形消去、弧类型、J 计数和集合成员
"""
from typing import Dict, List, Optional, Sequence, Tuple, Union

from loguru import logger

from arrangement import Arrangement
from errors import CurveError, CurveSyntaxError, EmbeddingError, ParallelCurvesError, ReductionError
from models import (Bigon, BigonVisit, Configuration, Curve, HalfSide, IntersectionReport,
                    ReductionEvent, Step, ValidationReport)
from surface import (band_of, closed_walk_sidedness, corner_regions, global_side,
                     is_orientable_neighbourhood, transport)

CURVE_OWNER = ('curve', 0)


# ---------------------------------------------------------------- 解析与构造

def parse_curve(text: str, name: str = '') -> Curve:
    """解析曲线文件：可选的 curve-version 行，之后每行 step <rect> <half> <half>"""
    steps = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        tokens = raw_line.split('#', 1)[0].split()
        if not tokens:
            continue
        if tokens[0] == 'curve-version':
            if steps or tokens[1:] != ['1']:
                raise CurveSyntaxError(f"不支持的版本行: {' '.join(tokens)}", line_no)
            continue
        if tokens[0] != 'step' or len(tokens) != 4:
            raise CurveSyntaxError(f"应为 'step <rect> <half> <half>'，得到 '{raw_line.strip()}'", line_no)
        try:
            rect = int(tokens[1])
            steps.append(Step(rect, HalfSide.parse(tokens[2]), HalfSide.parse(tokens[3])))
        except ValueError as e:
            raise CurveSyntaxError(str(e), line_no)
    if not steps:
        raise CurveSyntaxError("曲线没有任何步")
    return Curve(tuple(steps), name)


def core_curve(cfg: Configuration, core: str) -> Curve:
    """核心 a 或 b 作为族 C 中的曲线（在核心 + 侧的第 0 车道）"""
    steps = []
    sign = 1
    if core == 'a':
        for i in range(cfg.n):
            steps.append(Step(i, HalfSide('L', sign), HalfSide('R', sign)))
            sign *= (-1) ** cfg.a_flips[i]
    else:
        for j, rect in enumerate(cfg.b_order):
            steps.append(Step(rect, HalfSide('B', sign), HalfSide('T', sign)))
            sign *= (-1) ** cfg.b_flips[j]
    return Curve(tuple(steps), core)


def validate_in_C(cfg: Configuration, c: Curve) -> ValidationReport:
    """族 C 成员检查：矩形编号、无折返、带匹配、可嵌入、一般性"""
    report = ValidationReport()
    bad_rects = [s.rect for s in c.steps if not 0 <= s.rect < cfg.n]
    report.add('rects', not bad_rects, f"越界矩形 {bad_rects}" if bad_rects else f"{len(c)} steps")
    if bad_rects:
        return report
    turn_backs = [p for p, s in enumerate(c.steps) if s.turns_back]
    report.add('no turn-back', not turn_backs, f"steps {turn_backs}" if turn_backs else '')
    mismatched = [p for p, s in enumerate(c.steps)
                  if transport(cfg, s.rect, s.h_out) != (c.step(p + 1).rect, c.step(p + 1).h_in)]
    report.add('bands', not mismatched, f"steps {mismatched}" if mismatched else '')
    if turn_backs or mismatched:
        return report
    try:
        Arrangement(cfg, curves=[c])
        report.add('embedded', True)
    except EmbeddingError as e:
        report.add('embedded', False, str(e))
        return report
    report.add('generic', is_generic_curve(cfg, c))
    return report


def require_in_C(cfg: Configuration, c: Curve) -> Curve:
    """与 validate_in_C 相同的检查，失败时抛出异常"""
    report = validate_in_C(cfg, c)
    for name, passed, detail in report.checks:
        if passed:
            continue
        if name == 'embedded':
            raise EmbeddingError(detail)
        if name == 'generic':
            from errors import GenericityError
            raise GenericityError(f"曲线 {c.name} 不是 generic 的")
        raise CurveError(f"曲线 {c.name} 检查 {name} 失败: {detail}")
    return c


# ---------------------------------------------------------------- 计数与侧性

def crossing_counts(cfg: Configuration, c: Curve) -> Tuple[int, int]:
    return (sum(1 for s in c.steps if s.crosses_a), sum(1 for s in c.steps if s.crosses_b))


def crossings_with(c: Curve, core: str) -> int:
    return sum(1 for s in c.steps if s.crosses(core))


def band_walk(cfg: Configuration, c: Curve) -> List[Tuple[str, int, int]]:
    """曲线依次经过的带 (核心, 带号, 方向)"""
    walk = []
    for step in c.steps:
        kind, band, _ = band_of(cfg, step.rect, step.h_out)
        walk.append((kind, band, 1 if step.h_out.side in 'RT' else -1))
    return walk


def curve_sidedness(cfg: Configuration, c: Curve) -> int:
    return closed_walk_sidedness(cfg, band_walk(cfg, c))


def is_generic_curve(cfg: Configuration, c: Curve) -> bool:
    """单侧曲线总是 generic；双侧曲线的两侧都不能被圆盘或默比乌斯带封住"""
    if curve_sidedness(cfg, c) == 1:
        return True
    bounded = Arrangement(cfg, curves=[c]).bounded_sides(CURVE_OWNER)
    if bounded:
        logger.info(f"曲线 {c.name} 非 generic: {bounded}")
    return not bounded


# ---------------------------------------------------------------- 二角形

def _other_label(other: Union[str, Curve]) -> str:
    return other if isinstance(other, str) else (other.name or 'curve')


def _edge_direction(visit, owner: Tuple) -> int:
    """二角形沿 owner 的那条边离开该角时的方向：+1 为 owner 的正向"""
    if visit.leaving.owner == owner:
        return 1 if visit.leaving_forward else -1
    return -1 if visit.arriving_forward else 1


def _bigon_from_face(face, other_label: str, arrangement: Arrangement) -> Bigon:
    corners = []
    for v in face.visits:
        c_ref, other_ref = (v.leaving, v.arriving) if v.leaving.owner == CURVE_OWNER else (v.arriving, v.leaving)
        position = arrangement.chord_position.get((v.node, other_ref.owner), 0)
        corners.append(BigonVisit(v.rect, c_ref.step, _edge_direction(v, CURVE_OWNER),
                                  _edge_direction(v, other_ref.owner), position, other_ref.step))
    x, y = corners
    if x.c_direction == y.c_direction:
        raise ReductionError(f"面 {face.id} 的两个角沿 c 同向离开，不是二角形")
    # x 是 c 弧的起点
    if x.c_direction < 0:
        x, y = y, x
    return Bigon(other_label, (x, y), face.id, face.regions)


def find_bigons(cfg: Configuration, c: Curve, other: Union[str, Curve]) -> List[Bigon]:
    """c 与核心或另一条曲线之间的全部最内二角形，按面序号排列"""
    try:
        if isinstance(other, str):
            arrangement = Arrangement(cfg, cores=(other,), curves=[c])
        else:
            arrangement = Arrangement(cfg, curves=[c, other])
    except ParallelCurvesError:
        return []
    label = _other_label(other)
    return [_bigon_from_face(face, label, arrangement) for face in arrangement.bigon_faces()]


def find_bigon(cfg: Configuration, c: Curve, other: Union[str, Curve]) -> Optional[Bigon]:
    bigons = find_bigons(cfg, c, other)
    return bigons[0] if bigons else None


def pull_once(steps: Sequence[Step], idx: int) -> List[Step]:
    """拉直第 idx 步的折返：去掉该步，把前后两步合并为一步

    两步的词中前后邻步是同一步，合并后只剩它自己；一步的折返词是零伦的小圈。
    """
    steps = list(steps)
    if len(steps) == 1:
        raise ReductionError(f"曲线只剩折返步 {steps[0].token}，是零伦的")
    if len(steps) == 2:
        return [steps[1 - idx % 2]]
    steps = steps[idx - 1:] + steps[:idx - 1] if idx else steps[-1:] + steps[:-1]
    before, after = steps[0], steps[2]
    if before.rect != after.rect:
        raise ReductionError(f"折返步两侧不在同一矩形: {before.token} / {after.token}")
    return [Step(before.rect, before.h_in, after.h_out)] + steps[3:]


def pull_tight(steps: Sequence[Step]) -> Tuple[List[Step], int]:
    """拉直全部折返步，直到没有折返"""
    steps = list(steps)
    removed = 0
    while True:
        idx = next((i for i, s in enumerate(steps) if s.turns_back), None)
        if idx is None:
            return steps, removed
        steps = pull_once(steps, idx)
        removed += 1


def bigon_core_span(cfg: Configuration, core: str, bigon: Bigon) -> Tuple[int, int]:
    """二角形的核心弧从 x 到 y 的方向和经过的带数"""
    x, y = bigon.visits
    direction = x.other_direction
    if x.rect == y.rect:
        within = (y.position - x.position) * direction > 0
        return direction, 0 if within else cfg.n
    delta = core_position(cfg, core, y.rect) - core_position(cfg, core, x.rect)
    return direction, (delta * direction) % cfg.n


def core_path(cfg: Configuration, core: str, rect_x: int, h_start: HalfSide, rect_y: int,
              h_end: HalfSide, direction: int, length: int) -> List[Step]:
    """沿核心一侧从 rect_x 走到 rect_y 的步序列，经过 length 条带"""
    if length == 0:
        return [Step(rect_x, h_start, h_end)]
    if core == 'a':
        exit_side = 'R' if direction > 0 else 'L'
        sign = h_start.a_parity
    else:
        exit_side = 'T' if direction > 0 else 'B'
        sign = h_start.b_parity
    out = HalfSide(exit_side, sign)
    path = [Step(rect_x, h_start, out)]
    rect, half = transport(cfg, rect_x, out)
    for _ in range(length - 1):
        out = HalfSide(exit_side, half.sign)
        path.append(Step(rect, half, out))
        rect, half = transport(cfg, rect, out)
    if rect != rect_y:
        raise ReductionError(f"沿 {core} 的路径终点 {rect} 不是 {rect_y}")
    path.append(Step(rect, half, h_end))
    return path


def core_position(cfg: Configuration, core: str, rect: int) -> int:
    return rect if core == 'a' else cfg.b_position[rect]


def remove_bigon(cfg: Configuration, c: Curve, core: str, bigon: Bigon) -> Curve:
    """把 c 上的二角形弧推过核心弧，消去两个交点

    Raises:
        ReductionError: 结果无法嵌入，或交点数没有恰好减少 2
    """
    x, y = bigon.visits
    direction, length = bigon_core_span(cfg, core, bigon)
    size = len(c)
    rotated = c.rotated(x.step)
    offset = (y.step - x.step) % size
    path = core_path(cfg, core, x.rect, rotated.steps[0].h_in, y.rect, rotated.steps[offset].h_out,
                     direction, length)
    steps, _ = pull_tight(path + list(rotated.steps[offset + 1:]))
    result = Curve(tuple(steps), c.name)
    try:
        Arrangement(cfg, curves=[result])
    except CurveError as e:
        raise ReductionError(f"消去面 {bigon.face} 的二角形后曲线无法嵌入: {e}")
    before, after = crossings_with(c, core), crossings_with(result, core)
    if before - after != 2:
        raise ReductionError(f"消去面 {bigon.face} 的二角形后与 {core} 的交点 {before} -> {after}")
    return result


def reduce_to_minimal(cfg: Configuration, c: Curve, other: str) -> Tuple[Curve, List[ReductionEvent]]:
    """反复消去 c 与核心之间的最内二角形，直到没有二角形

    Returns:
        (约化后的曲线, 约化事件列表)
    """
    from config import MAX_REDUCTION_ROUNDS
    trace = []
    current = c
    for _ in range(MAX_REDUCTION_ROUNDS):
        bigon = find_bigon(cfg, current, other)
        if bigon is None:
            return current, trace
        before = crossings_with(current, other)
        current = remove_bigon(cfg, current, other, bigon)
        after = crossings_with(current, other)
        logger.debug(f"消去与 {other} 的二角形 @矩形{bigon.visits[0].rect}: {before} -> {after}")
        trace.append(ReductionEvent('bigon', bigon.visits[0].rect, None, before, after))
    raise ReductionError(f"约化超过 {MAX_REDUCTION_ROUNDS} 轮")


def reduce_against_both(cfg: Configuration, c: Curve) -> Tuple[Curve, List[Tuple[str, ReductionEvent]]]:
    """交替对 a、b 约化，直到与两者都没有二角形；事件带上所针对的核心"""
    current = c
    trace = []
    while True:
        current, trace_a = reduce_to_minimal(cfg, current, 'a')
        current, trace_b = reduce_to_minimal(cfg, current, 'b')
        trace += [('a', e) for e in trace_a] + [('b', e) for e in trace_b]
        if not trace_b or find_bigon(cfg, current, 'a') is None:
            return current, trace


def reduced_representative(cfg: Configuration, c: Curve) -> Curve:
    return reduce_against_both(cfg, c)[0]


# ---------------------------------------------------------------- 缠绕、弧类型、J

def winds_around(cfg: Configuration, c: Curve, core: str) -> bool:
    """每个交叉矩形都有一段平行于核心的弧"""
    sides = {'b': {'B', 'T'}, 'a': {'L', 'R'}}[core]
    covered = {s.rect for s in c.steps if {s.h_in.side, s.h_out.side} == sides}
    return len(covered) == cfg.n


def arcs_in(cfg: Configuration, c: Curve, core: str = 'a') -> List[List[int]]:
    """c∩N_core 的弧：经 core-带相连的极大步段（步号列表）"""
    through = 'LR' if core == 'a' else 'BT'
    size = len(c)
    breaks = [p for p, s in enumerate(c.steps) if s.h_out.side not in through]
    if not breaks:
        return [list(range(size))]
    arcs = []
    for i, end in enumerate(breaks):
        start = breaks[i - 1] + 1
        run = []
        p = start % size
        while True:
            run.append(p)
            if p == end:
                break
            p = (p + 1) % size
        arcs.append(run)
    return arcs


def twist_direction(cfg: Configuration, core: str, step: Step, k: int, hand: str) -> int:
    """扭转给穿过核心的步加上的绕行方向：+1 沿核心正向"""
    if core == 'a':
        exit_local = step.h_out.a_parity
    else:
        exit_local = step.h_out.b_parity
    into_twist_side = global_side(cfg, core, step.rect, exit_local) == 0
    direction = (1 if k > 0 else -1) * (1 if hand == 'right' else -1) * (1 if into_twist_side else -1)
    if core == 'b':
        direction = -direction
        if is_orientable_neighbourhood(cfg):
            from surface import orientation_classes
            direction *= (-1) ** orientation_classes(cfg)[cfg.b_order[0]]
    return direction


def classify_arcs(cfg: Configuration, c: Curve, core: str = 'a', twist_sign: int = 1,
                  hand: str = 'right') -> Tuple[List[Tuple[List[int], str]], Dict[str, int]]:
    """c∩N_core 的弧分类为 A、B、C、D，无法分类的记为 '?'

    B、C 都只经过一条核心带后穿过核心：扭转的绕行方向与弧的前进方向一致为 B，相反为 C。

    Returns:
        ([(弧的步号, 类型)], 各类型计数)
    """
    through = 'LR' if core == 'a' else 'BT'
    forward_side = 'R' if core == 'a' else 'T'
    arcs = arcs_in(cfg, c, core)
    classified = []
    counts = {'A': 0, 'B': 0, 'C': 0, 'D': 0, '?': 0}
    if len(arcs) == 1 and all(s.h_out.side in through for s in c.steps):
        logger.info(f"曲线 {c.name} 整体位于 N_{core} 内，视为一条 D 型弧")
    for arc in arcs:
        steps = [c.step(p) for p in arc]
        crossing = [s for s in steps if s.crosses(core)]
        if not crossing:
            kind = 'D'
        elif len(steps) == 1:
            kind = 'A'
        elif len(steps) == 2 and len(crossing) == 1:
            travel = 1 if steps[0].h_out.side == forward_side else -1
            loop = twist_direction(cfg, core, crossing[0], twist_sign, hand)
            kind = 'B' if loop == travel else 'C'
        else:
            kind = '?'
        if kind == '?':
            logger.warning(f"弧 {arc} 不符合任何类型")
        counts[kind] += 1
        classified.append((arc, kind))
    return classified, counts


def j_counts(cfg: Configuration, c: Curve) -> Tuple[int, int]:
    """J(c,a) 为经过 b-带的次数，J(c,b) 为经过 a-带的次数；0 表示退化"""
    walk = band_walk(cfg, c)
    j_a = sum(1 for kind, _, _ in walk if kind == 'b')
    j_b = sum(1 for kind, _, _ in walk if kind == 'a')
    if j_a == 0 or j_b == 0:
        logger.debug(f"曲线 {c.name} 的 J 计数退化: J_a={j_a} J_b={j_b}")
    return j_a, j_b


def membership(cfg: Configuration, c: Curve, reduced: Optional[Curve] = None) -> Dict[str, bool]:
    """X_a, X_b, X̃_a, X̃_b 成员，在约化代表上判断"""
    rep = reduced or reduced_representative(cfg, c)
    min_a, min_b = crossing_counts(cfg, rep)
    j_a, j_b = j_counts(cfg, rep)
    winds_a = winds_around(cfg, rep, 'a')
    winds_b = winds_around(cfg, rep, 'b')
    return {
        'X_a': min_a < min_b and winds_a,
        'X_b': min_b < min_a and winds_b,
        'Xt_a': j_a < j_b and winds_a,
        'Xt_b': j_b < j_a and winds_b,
    }


def intersection_report(cfg: Configuration, c: Curve) -> IntersectionReport:
    raw_a, raw_b = crossing_counts(cfg, c)
    rep = reduced_representative(cfg, c)
    min_a, min_b = crossing_counts(cfg, rep)
    j_a, j_b = j_counts(cfg, rep)
    _, counts = classify_arcs(cfg, rep)
    flags = membership(cfg, c, reduced=rep)
    return IntersectionReport(
        raw_a, raw_b, min_a, min_b, j_a, j_b,
        (counts['A'], counts['B'], counts['C'], counts['D']),
        winds_around(cfg, rep, 'a'), winds_around(cfg, rep, 'b'),
        flags['X_a'], flags['X_b'], flags['Xt_a'], flags['Xt_b'],
    )


# ---------------------------------------------------------------- N_a 外的边界二角形

def outside_boundary_bigons(cfg: Configuration, c: Curve) -> List[Dict]:
    """N_a 外 c 与 ∂N_a 之间的二角形

    b-带被 c 的股切成条带，最外侧条带粘到长边所在的区域上；
    分量是圆盘且恰有两个角时即为 N_a 外的二角形。
    """
    corners = corner_regions(cfg)
    traversals = [0] * cfg.n
    for kind, band, _ in band_walk(cfg, c):
        if kind == 'b':
            traversals[band] += 1

    parent: Dict[Tuple, Tuple] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    gluings = []
    c_sides = {}
    for band, count in enumerate(traversals):
        rect = cfg.b_order[band]
        for strip in range(count + 1):
            node = ('strip', band, strip)
            find(node)
            c_sides[node] = (strip > 0) + (strip < count)
        left_region = ('region', corners[(rect, 'TL')])
        right_region = ('region', corners[(rect, 'TR')])
        union(('strip', band, 0), left_region)
        union(('strip', band, count), right_region)
        gluings += [('strip', band, 0), ('strip', band, count)]

    components: Dict[Tuple, List[Tuple]] = {}
    for node in list(parent):
        components.setdefault(find(node), []).append(node)

    bigons = []
    for members in components.values():
        strips = [m for m in members if m[0] == 'strip']
        regions = sorted(m[1] for m in members if m[0] == 'region')
        chi = len(strips) - sum(1 for g in gluings if find(g) == find(members[0]))
        is_open = False
        for region in regions:
            cap = cfg.cap_of(region)
            if cap.kind in ('open', 'other'):
                is_open = True
            elif cap.kind == 'punctured':
                chi += 1 - cap.punctures
            elif cap.kind == 'disk':
                chi += 1
        corner_count = 2 * sum(c_sides[m] for m in strips)
        if not is_open and chi == 1 and corner_count == 2:
            bigons.append({'strips': sorted(strips), 'regions': regions})
    return bigons


def boundary_bigons_inside(cfg: Configuration, c: Curve) -> bool:
    """c 与 ∂N_a 之间的二角形是否都在 N_a 内部"""
    outside = outside_boundary_bigons(cfg, c)
    if outside:
        logger.warning(f"曲线 {c.name} 在 N_a 外有 {len(outside)} 个边界二角形: {outside}")
    return not outside
