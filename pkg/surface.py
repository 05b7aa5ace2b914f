"""
矩形复形模块：解析、校验和查询 N_{a∪b}
"""
from collections import deque
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from errors import ConfigurationError, ConfigurationSyntaxError
from models import Cap, Configuration, HalfSide, Region, ValidationReport, WalkEdge

# 角的命名与它所终止的 L/R 半边一致：TL=Lp, BL=Lm, TR=Rp, BR=Rm
CORNER_ORDER = ('TL', 'BL', 'TR', 'BR')

CONFIG_KEYS = ('config-version', 'n', 'b-order', 'a-flips', 'b-flips', 'cap')


# ---------------------------------------------------------------- 解析

def _int_token(token: str, line: int, column: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ConfigurationSyntaxError(f"{what} 需要整数，得到 '{token}'", line, column)


def _tokens_with_columns(raw: str) -> List[Tuple[str, int]]:
    tokens = []
    column = 0
    for part in raw.split():
        column = raw.index(part, column)
        tokens.append((part, column + 1))
        column += len(part)
    return tokens


def parse_configuration(text: str, name: str = '') -> Configuration:
    """解析配置文件文本，不做语义校验

    Args:
        text: 配置文件内容（'#' 起注释，空白分隔）
        name: 配置名称，写入报告

    Returns:
        Configuration，未列出的区域默认 open
    """
    seen: Dict[str, int] = {}
    caps: Dict[int, Cap] = {}
    values: Dict[str, List[int]] = {}

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        raw = raw_line.split('#', 1)[0]
        tokens = _tokens_with_columns(raw)
        if not tokens:
            continue
        key, key_column = tokens[0]
        args = tokens[1:]
        if key not in CONFIG_KEYS:
            raise ConfigurationSyntaxError(f"未知键 '{key}'", line_no, key_column)

        if key == 'cap':
            if len(args) < 2:
                raise ConfigurationSyntaxError("cap 需要区域和类型", line_no, key_column)
            region_token, region_column = args[0]
            if not (region_token.startswith('R') and region_token[1:].isdigit()):
                raise ConfigurationSyntaxError(f"区域应形如 R<int>，得到 '{region_token}'", line_no, region_column)
            region_id = int(region_token[1:])
            if region_id in caps:
                raise ConfigurationSyntaxError(f"区域 R{region_id} 重复封口", line_no, region_column)
            kind, kind_column = args[1]
            if kind == 'punctured':
                if len(args) != 3:
                    raise ConfigurationSyntaxError("punctured 需要孔数", line_no, kind_column)
                count = _int_token(args[2][0], line_no, args[2][1], '孔数')
                if count < 1:
                    raise ConfigurationSyntaxError("孔数至少为 1", line_no, args[2][1])
                caps[region_id] = Cap('punctured', count)
            elif kind in ('open', 'disk', 'mobius', 'other'):
                if len(args) != 2:
                    raise ConfigurationSyntaxError(f"{kind} 后不应有多余记号", line_no, args[2][1])
                caps[region_id] = Cap(kind)
            else:
                raise ConfigurationSyntaxError(f"未知封口类型 '{kind}'", line_no, kind_column)
            continue

        if key in seen:
            raise ConfigurationSyntaxError(f"键 '{key}' 重复（首次在第{seen[key]}行）", line_no, key_column)
        seen[key] = line_no
        numbers = [_int_token(tok, line_no, col, key) for tok, col in args]

        if key in ('config-version', 'n') and len(numbers) != 1:
            raise ConfigurationSyntaxError(f"{key} 需要一个整数", line_no, key_column)
        if key == 'config-version' and numbers[0] != 1:
            raise ConfigurationSyntaxError(f"不支持的版本 {numbers[0]}", line_no, args[0][1])
        if key in ('a-flips', 'b-flips'):
            for (tok, col), value in zip(args, numbers):
                if value not in (0, 1):
                    raise ConfigurationSyntaxError(f"翻转位只能是 0 或 1，得到 {tok}", line_no, col)
        values[key] = numbers

    for required in ('n', 'b-order', 'a-flips', 'b-flips'):
        if required not in values:
            raise ConfigurationSyntaxError(f"缺少键 '{required}'")

    n = values['n'][0]
    if n < 1:
        raise ConfigurationError(f"n 必须为正整数，得到 {n}")
    b_order = values['b-order']
    if len(b_order) != n or sorted(b_order) != list(range(n)):
        raise ConfigurationError(f"b-order 不是 0..{n - 1} 的排列: {b_order}")
    for key in ('a-flips', 'b-flips'):
        if len(values[key]) != n:
            raise ConfigurationError(f"{key} 长度 {len(values[key])} 与 n={n} 不符")

    cfg = Configuration(n, tuple(b_order), tuple(values['a-flips']), tuple(values['b-flips']), name=name)
    return cfg.with_caps(caps)


# ---------------------------------------------------------------- 带与传输

def band_of(cfg: Configuration, rect: int, half: HalfSide) -> Tuple[str, int, int]:
    """经半边离开矩形时所走的带，返回 (核心, 带号, 带坐标系下的符号)

    a-带以矩形 i 的 R 边为坐标系，b-带以 b_order[j] 的 T 边为坐标系。
    """
    n = cfg.n
    if half.side == 'R':
        return ('a', rect, half.sign)
    if half.side == 'L':
        band = (rect - 1) % n
        return ('a', band, half.sign * (-1) ** cfg.a_flips[band])
    position = cfg.b_position[rect]
    if half.side == 'T':
        return ('b', position, half.sign)
    band = (position - 1) % n
    return ('b', band, half.sign * (-1) ** cfg.b_flips[band])


def transport(cfg: Configuration, rect: int, half: HalfSide) -> Tuple[int, HalfSide]:
    """从半边离开后到达的矩形和进入半边，车道号不变，符号乘 (-1)^flip"""
    n = cfg.n
    if half.side == 'R':
        return (rect + 1) % n, HalfSide('L', half.sign * (-1) ** cfg.a_flips[rect])
    if half.side == 'L':
        band = (rect - 1) % n
        return band, HalfSide('R', half.sign * (-1) ** cfg.a_flips[band])
    position = cfg.b_position[rect]
    if half.side == 'T':
        return cfg.b_order[(position + 1) % n], HalfSide('B', half.sign * (-1) ** cfg.b_flips[position])
    band = (position - 1) % n
    return cfg.b_order[band], HalfSide('T', half.sign * (-1) ** cfg.b_flips[band])


def band_flip(cfg: Configuration, kind: str, band: int) -> int:
    return cfg.a_flips[band] if kind == 'a' else cfg.b_flips[band]


def prefix_parity(cfg: Configuration, core: str, rect: int) -> int:
    """核心在矩形处局部 + 侧对应的全局侧（0/1）"""
    if core == 'a':
        return sum(cfg.a_flips[:rect]) % 2
    return sum(cfg.b_flips[:cfg.b_position[rect]]) % 2


def global_side(cfg: Configuration, core: str, rect: int, local_sign: int) -> int:
    return (0 if local_sign > 0 else 1) ^ prefix_parity(cfg, core, rect)


def band_edges(cfg: Configuration) -> List[Tuple[str, int, int, int, int]]:
    """带图的边 (核心, 带号, 起点矩形, 终点矩形, 翻转位)"""
    n = cfg.n
    edges = [('a', i, i, (i + 1) % n, cfg.a_flips[i]) for i in range(n)]
    edges += [('b', j, cfg.b_order[j], cfg.b_order[(j + 1) % n], cfg.b_flips[j]) for j in range(n)]
    return edges


# ---------------------------------------------------------------- 边界区域

def _a_partner(cfg: Configuration, rect: int, corner: str) -> Tuple[int, str, int]:
    n = cfg.n
    if corner in ('TR', 'BR'):
        band = rect
        flip = cfg.a_flips[band]
        top = (corner == 'TR') != bool(flip)
        return (rect + 1) % n, 'TL' if top else 'BL', band
    band = (rect - 1) % n
    flip = cfg.a_flips[band]
    top = (corner == 'TL') != bool(flip)
    return band, 'TR' if top else 'BR', band


def _b_partner(cfg: Configuration, rect: int, corner: str) -> Tuple[int, str, int]:
    n = cfg.n
    position = cfg.b_position[rect]
    if corner in ('TR', 'TL'):
        band = position
        flip = cfg.b_flips[band]
        right = (corner == 'TR') != bool(flip)
        return cfg.b_order[(band + 1) % n], 'BR' if right else 'BL', band
    band = (position - 1) % n
    flip = cfg.b_flips[band]
    right = (corner == 'BR') != bool(flip)
    return cfg.b_order[band], 'TR' if right else 'TL', band


@lru_cache(maxsize=256)
def boundary_regions(cfg: Configuration) -> Tuple[Region, ...]:
    """枚举 N_{a∪b} 的边界圆周

    从未使用的最小 (矩形, 角) 出发（角按 TL, BL, TR, BR 排序），先沿 a-带长边，
    再沿 b-带长边，交替前进直到回到起点。
    """
    used = set()
    regions = []
    for rect in range(cfg.n):
        for corner in CORNER_ORDER:
            if (rect, corner) in used:
                continue
            walk = []
            current = (rect, corner)
            while True:
                used.add(current)
                next_rect, next_corner, band = _a_partner(cfg, *current)
                walk.append(WalkEdge(current[0], current[1], 'a', band))
                current = (next_rect, next_corner)
                used.add(current)
                next_rect, next_corner, band = _b_partner(cfg, *current)
                walk.append(WalkEdge(current[0], current[1], 'b', band))
                current = (next_rect, next_corner)
                if current == (rect, corner):
                    break
            region_id = len(regions)
            a_arcs = sum(1 for edge in walk if edge.kind == 'a')
            b_arcs = len(walk) - a_arcs
            regions.append(Region(region_id, tuple(walk), a_arcs, b_arcs, cfg.cap_of(region_id)))
    return tuple(regions)


@lru_cache(maxsize=256)
def corner_regions(cfg: Configuration) -> Dict[Tuple[int, str], int]:
    """(矩形, 角) -> 区域号"""
    table = {}
    for region in boundary_regions(cfg):
        for edge in region.boundary_walk:
            table[(edge.rect, edge.corner)] = region.id
            partner = _a_partner(cfg, edge.rect, edge.corner) if edge.kind == 'a' else \
                _b_partner(cfg, edge.rect, edge.corner)
            table[(partner[0], partner[1])] = region.id
    return table


def region_of_corner(cfg: Configuration, rect: int, corner: str) -> int:
    return corner_regions(cfg)[(rect, corner)]


def euler_characteristic(cfg: Configuration) -> Dict[str, int]:
    """两种独立方式计算 χ(N_{a∪b})：胞腔计数和 a∪b 图"""
    n = cfg.n
    vertices = 4 * n
    edges = 4 * n + 4 * n
    faces = n + 2 * n
    return {
        'cells': vertices - edges + faces,
        'graph': n - 2 * n,
        'boundary_arcs': sum(r.a_arcs + r.b_arcs for r in boundary_regions(cfg)),
    }


def surface_realizations(cfg: Configuration) -> Dict[str, Optional[int]]:
    """所有区域封上圆盘后闭曲面的亏格或交叉帽数"""
    region_count = len(boundary_regions(cfg))
    closed_chi = euler_characteristic(cfg)['cells'] + region_count
    if is_orientable_neighbourhood(cfg):
        twice_genus = 2 - closed_chi
        genus = twice_genus // 2 if twice_genus % 2 == 0 and twice_genus >= 0 else None
        return {'orientable': True, 'regions': region_count, 'chi': closed_chi, 'genus': genus, 'crosscaps': None}
    crosscaps = 2 - closed_chi
    return {'orientable': False, 'regions': region_count, 'chi': closed_chi, 'genus': None,
            'crosscaps': crosscaps if crosscaps >= 1 else None}


# ---------------------------------------------------------------- 可定向性与侧性

def orientation_classes(cfg: Configuration) -> Optional[Dict[int, int]]:
    """带图的二染色：o(v) = o(u) xor flip；不存在时返回 None"""
    adjacency: Dict[int, List[Tuple[int, int]]] = {r: [] for r in range(cfg.n)}
    for _, _, u, v, flip in band_edges(cfg):
        adjacency[u].append((v, flip))
        adjacency[v].append((u, flip))
    colour = {0: 0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v, flip in adjacency[u]:
            expected = colour[u] ^ flip
            if v not in colour:
                colour[v] = expected
                queue.append(v)
            elif colour[v] != expected:
                return None
    return colour


def is_orientable_neighbourhood(cfg: Configuration) -> bool:
    return orientation_classes(cfg) is not None


def fundamental_cycle_parities(cfg: Configuration) -> List[Tuple[str, int, int]]:
    """生成树的基本圈及其翻转奇偶性，返回 (核心, 带号, 奇偶)"""
    parent: Dict[int, Tuple[Optional[int], int]] = {0: (None, 0)}
    tree = set()
    order = [0]
    edges = band_edges(cfg)
    changed = True
    while changed:
        changed = False
        for kind, band, u, v, flip in edges:
            if (kind, band) in tree:
                continue
            if u in parent and v not in parent:
                parent[v] = (u, flip)
                tree.add((kind, band))
                order.append(v)
                changed = True
            elif v in parent and u not in parent:
                parent[u] = (v, flip)
                tree.add((kind, band))
                order.append(u)
                changed = True

    def root_parity(vertex: int) -> int:
        parity = 0
        while parent[vertex][0] is not None:
            parity ^= parent[vertex][1]
            vertex = parent[vertex][0]
        return parity

    cycles = []
    for kind, band, u, v, flip in edges:
        if (kind, band) in tree:
            continue
        cycles.append((kind, band, flip ^ root_parity(u) ^ root_parity(v)))
    return cycles


def closed_walk_sidedness(cfg: Configuration, walk: Sequence[Tuple[str, int, int]]) -> int:
    """闭合带行走的侧性：1 为单侧，2 为双侧

    Args:
        walk: [(核心, 带号, 方向±1)]，方向 +1 沿带的正向
    """
    if not walk:
        raise ConfigurationError("空行走")
    n = cfg.n
    ends = []
    parity = 0
    for kind, band, direction in walk:
        if not 0 <= band < n:
            raise ConfigurationError(f"带号越界: {kind}{band}")
        if kind == 'a':
            start, end = band, (band + 1) % n
        else:
            start, end = cfg.b_order[band], cfg.b_order[(band + 1) % n]
        if direction < 0:
            start, end = end, start
        ends.append((start, end))
        parity ^= band_flip(cfg, kind, band)
    for (_, end), (start, _) in zip(ends, ends[1:] + ends[:1]):
        if end != start:
            raise ConfigurationError("行走不闭合")
    return 1 if parity else 2


def core_flip_parity(cfg: Configuration, core: str) -> int:
    return sum(cfg.flips(core)) % 2


# ---------------------------------------------------------------- 一般性与极小位置

def is_generic_core(cfg: Configuration, core: str) -> bool:
    """核心是否 generic：任一侧不是孔数 <2 的圆盘，也不是无孔默比乌斯带"""
    if core_flip_parity(cfg, core):
        raise ConfigurationError(f"核心 {core} 是单侧的，不属于本模型")
    from arrangement import Arrangement
    arrangement = Arrangement(cfg, cores=(core,))
    bounded = arrangement.bounded_sides(('core', core))
    if bounded:
        logger.info(f"核心 {core} 非 generic: {bounded}")
    return not bounded


def minimal_position_violations(cfg: Configuration) -> List[int]:
    """封为圆盘且只有一条 a-弧和一条 b-弧的区域即 a、b 的二角形"""
    return [r.id for r in boundary_regions(cfg) if r.cap.kind == 'disk' and r.a_arcs == 1]


def validate_configuration(cfg: Configuration) -> ValidationReport:
    """语义校验：两侧性、可定向性、极小位置、一般性"""
    report = ValidationReport()
    report.add('n>=2', cfg.n >= 2, f"n={cfg.n}")
    a_two_sided = core_flip_parity(cfg, 'a') == 0
    b_two_sided = core_flip_parity(cfg, 'b') == 0
    report.add('a two-sided', a_two_sided, f"sum(a_flips)={sum(cfg.a_flips)}")
    report.add('b two-sided', b_two_sided, f"sum(b_flips)={sum(cfg.b_flips)}")

    orientable = is_orientable_neighbourhood(cfg)
    # 可定向性只是信息项，不影响总标志
    report.checks.append(('orientable', True, 'true' if orientable else 'false'))

    regions = boundary_regions(cfg)
    known = {r.id for r in regions}
    unknown = [rid for rid, _ in cfg.caps if rid not in known]
    report.add('caps reference regions', not unknown, f"未知区域 {unknown}" if unknown else f"{len(regions)} regions")

    chi = euler_characteristic(cfg)
    report.add('euler', chi['cells'] == chi['graph'] == -cfg.n and chi['boundary_arcs'] == 4 * cfg.n,
               f"chi={chi['cells']}")

    bigons = minimal_position_violations(cfg)
    report.add('minimal position', not bigons, f"disk bigon regions {bigons}" if bigons else '')

    for core, two_sided in (('a', a_two_sided), ('b', b_two_sided)):
        if not two_sided:
            report.add(f"{core} generic", False, 'one-sided')
            continue
        try:
            generic = is_generic_core(cfg, core)
        except Exception as e:
            logger.error(f"一般性检查失败: {e}")
            raise
        report.add(f"{core} generic", generic)
    return report
