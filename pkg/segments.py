"""
线段模块：有向线段、侧性、相邻、可连接类和双线段
"""
from itertools import combinations
from typing import Dict, List, Optional, Set, Tuple

from loguru import logger

from models import Configuration, DoubleSegment, Segment
from surface import boundary_regions, prefix_parity


def _other(host: str) -> str:
    return 'a' if host == 'b' else 'b'


def _band_ends(cfg: Configuration, host: str, band: int) -> Tuple[int, int]:
    if host == 'a':
        return band, (band + 1) % cfg.n
    return cfg.b_order[band], cfg.b_order[(band + 1) % cfg.n]


def segments_of(cfg: Configuration, host: str) -> List[Segment]:
    """宿主圆周上全部 2n 条有向线段，每条带先正向后反向

    线段离开矩形 r 时位于另一核心的局部 + 侧，到达时位于局部 - 侧；
    侧标号是另一核心邻域的全局边界分量 0/1。
    """
    other = _other(host)
    result = []
    for band in range(cfg.n):
        start, end = _band_ends(cfg, host, band)
        forward = Segment(host, band, True, start, end,
                          prefix_parity(cfg, other, start), 1 ^ prefix_parity(cfg, other, end))
        result += [forward, forward.reversed()]
    return result


def segment_sidedness(cfg: Configuration, s: Segment) -> int:
    """线段加上连接两端的另一核心弧：单侧为 1，双侧为 2"""
    other = _other(s.host)
    flip = cfg.flips(s.host)[s.band]
    start, end = _band_ends(cfg, s.host, s.band)
    parity = flip ^ prefix_parity(cfg, other, start) ^ prefix_parity(cfg, other, end)
    return 1 if parity else 2


def adjacent_pairs(cfg: Configuration, host: str) -> List[Tuple[Segment, Segment]]:
    """由封口圆盘区域给出的相邻有向线段对（含对称）

    区域边界依次是 PP′、P′Q′、Q′Q、QP：p 沿行走方向，q 逆行走方向，
    两条另一核心的弧分别连接起点与起点、终点与终点。
    """
    pairs = []
    seen = set()
    for region in boundary_regions(cfg):
        if region.cap.kind != 'disk' or region.a_arcs != 2 or region.b_arcs != 2:
            continue
        edges = [e for e in region.boundary_walk if e.kind == host]
        first, second = edges
        if first.band == second.band:
            continue
        along = _walk_is_forward(host, first.corner)
        against = not _walk_is_forward(host, second.corner)
        p = _segment(cfg, host, first.band, along)
        q = _segment(cfg, host, second.band, against)
        if segment_sidedness(cfg, p) != 1 or segment_sidedness(cfg, q) != 1:
            continue
        for pair in ((p, q), (q, p), (p.reversed(), q.reversed()), (q.reversed(), p.reversed())):
            key = (pair[0].label, pair[1].label)
            if key not in seen:
                seen.add(key)
                pairs.append(pair)
    logger.debug(f"宿主 {host} 的相邻对 {len(pairs)} 个")
    return pairs


def _walk_is_forward(host: str, corner: str) -> bool:
    """边界行走沿宿主带的长边是否与宿主方向一致"""
    if host == 'b':
        return corner in ('TL', 'TR')
    return corner in ('TR', 'BR')


def _segment(cfg: Configuration, host: str, band: int, forward: bool) -> Segment:
    for s in segments_of(cfg, host):
        if s.band == band and s.forward == forward:
            return s
    raise KeyError((host, band, forward))


def adjacent(cfg: Configuration, p: Segment, q: Segment) -> bool:
    if p.host != q.host or p == q:
        return False
    return any(x == p and y == q for x, y in adjacent_pairs(cfg, p.host))


def joinability_classes(cfg: Configuration, host: str) -> List[List[Segment]]:
    """相邻关系的传递闭包给出的等价类，单元素类也列出"""
    segs = segments_of(cfg, host)
    parent = {s.label: s.label for s in segs}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p, q in adjacent_pairs(cfg, host):
        rp, rq = find(p.label), find(q.label)
        if rp != rq:
            parent[rq] = rp

    classes: Dict[str, List[Segment]] = {}
    for s in segs:
        classes.setdefault(find(s.label), []).append(s)
    return list(classes.values())


def joinable(cfg: Configuration, p: Segment, q: Segment) -> bool:
    if p == q or p.host != q.host:
        return False
    for members in joinability_classes(cfg, p.host):
        if p in members:
            return q in members
    return False


def double_segments(cfg: Configuration, host: str = 'b') -> List[DoubleSegment]:
    """每个交点处起点相同的两条有向线段"""
    segs = segments_of(cfg, host)
    result = []
    for rect in range(cfg.n):
        position = rect if host == 'a' else cfg.b_position[rect]
        forward = next(s for s in segs if s.band == position and s.forward)
        backward = next(s for s in segs if s.band == (position - 1) % cfg.n and not s.forward)
        result.append(DoubleSegment(rect, (forward, backward)))
    return result


def double_joinable(cfg: Configuration, first: DoubleSegment, second: DoubleSegment) -> bool:
    classes = joinability_classes(cfg, first.pair[0].host)
    lookup = {s.label: idx for idx, members in enumerate(classes) for s in members}
    return any(lookup[p.label] == lookup[q.label] and p != q for p in first.pair for q in second.pair)


def non_joinable_to(cfg: Configuration, P: DoubleSegment) -> List[DoubleSegment]:
    host = P.pair[0].host
    return [Q for Q in double_segments(cfg, host) if Q.point != P.point and not double_joinable(cfg, P, Q)]


def separating_pair(cfg: Configuration, host: str = 'b') -> Optional[Tuple[Segment, Segment]]:
    """起点在另一核心不同侧的一对有向线段，使每个双线段都可连接到其中之一"""
    if cfg.n < 3:
        return None
    segs = segments_of(cfg, host)
    doubles = double_segments(cfg, host)
    classes = joinability_classes(cfg, host)
    lookup = {s.label: idx for idx, members in enumerate(classes) for s in members}
    for p, q in combinations(segs, 2):
        if p.initial_side == q.initial_side:
            continue
        covered: Set[int] = set()
        for D in doubles:
            if any(lookup[m.label] in (lookup[p.label], lookup[q.label]) for m in D.pair):
                covered.add(D.point)
        if len(covered) == cfg.n:
            return p, q
    return None
