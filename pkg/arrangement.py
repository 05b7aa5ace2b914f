"""
曲线排布：车道分配与面枚举

把核心（中线）和若干曲线画进 N_{a∪b}：先给每条带里的股分配车道，
再在每个交叉矩形里做弦图，用旋转系统追踪面片，经带和封口拼成整体的面。
所有二角形、一般性、外侧二角形的判断都由这里的面给出。
"""
import math
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from loguru import logger

from errors import CurveError, EmbeddingError, ParallelCurvesError
from models import Configuration, Curve, HalfSide, Step
from surface import band_flip, band_of, corner_regions, global_side, transport

INF = math.inf

SIDE_INDEX = {'R': 0, 'T': 1, 'L': 2, 'B': 3}
CORNER_SIDE = {'BR': 'R', 'TR': 'T', 'TL': 'L', 'BL': 'B'}
# 边在自身坐标系中的起点和终点坐标（逆时针）
SIDE_START = {'R': -INF, 'T': INF, 'L': INF, 'B': -INF}
SIDE_END = {'R': INF, 'T': -INF, 'L': -INF, 'B': INF}

CAP_CHI = {'disk': 1, 'mobius': 0}


class ChordRef(NamedTuple):
    """弦的所有者：('core', 'a') 或 ('curve', 曲线序号)，曲线弦带步号"""
    owner: Tuple
    step: Optional[int]


class CrossingVisit(NamedTuple):
    """面边界经过交叉点：从 arriving 到 leaving 转向"""
    rect: int
    node: Tuple[int, int]
    arriving: ChordRef
    leaving: ChordRef
    arriving_forward: bool
    leaving_forward: bool


@dataclass
class Face:
    """排布的一个面（已经过带粘合和封口）"""
    id: int
    pieces: List[int]
    regions: Tuple[int, ...]
    strips: int
    chi: int
    chi_filled: int
    punctures: int
    open: bool
    sides: Dict[Tuple, set] = field(default_factory=dict)
    visits: List[CrossingVisit] = field(default_factory=list)

    @property
    def is_disk(self) -> bool:
        return not self.open and self.chi == 1

    @property
    def crossing_nodes(self) -> List[Tuple[int, int]]:
        return [v.node for v in self.visits]

    @property
    def is_bigon(self) -> bool:
        nodes = self.crossing_nodes
        return self.is_disk and len(nodes) == 2 and nodes[0] != nodes[1]

    def touches(self, owner: Tuple, side: int) -> bool:
        return side in self.sides.get(owner, ())


@dataclass
class _Piece:
    rect: int
    keys: List[Tuple] = field(default_factory=list)
    regions: List[int] = field(default_factory=list)
    sides: Dict[Tuple, set] = field(default_factory=dict)
    visits: List[CrossingVisit] = field(default_factory=list)


def point_key(half: HalfSide, coord: int) -> Tuple[int, int]:
    """边界点的逆时针排序键：R 向上、T 向左、L 向下、B 向右"""
    if half.side in 'RB':
        return (SIDE_INDEX[half.side], coord)
    return (SIDE_INDEX[half.side], -coord)


def lane_coord(half: HalfSide, lane: int) -> int:
    return half.sign * (lane + 1)


def _between(start: int, end: int, x: int, size: int) -> bool:
    """x 是否在从 start 逆时针到 end 的开弧上"""
    return x != start and (x - start) % size < (end - start) % size


def _interleave(s1: int, e1: int, s2: int, e2: int, size: int) -> bool:
    return _between(s1, e1, s2, size) != _between(s1, e1, e2, size)


class Arrangement:
    """核心和曲线在 N_{a∪b} 中的排布

    Args:
        cfg: 配置
        cores: 画出的核心，如 ('a',) 或 ('a', 'b')
        curves: 画出的曲线
    """

    def __init__(self, cfg: Configuration, cores: Sequence[str] = (), curves: Sequence[Curve] = ()):
        if len(cores) == 2 and curves:
            raise ValueError("同时画两个核心时不能再画曲线")
        self.cfg = cfg
        self.cores = tuple(cores)
        self.curves = list(curves)
        self.lanes: Dict[Tuple[int, int], int] = {}
        self.chord_position: Dict[Tuple, int] = {}
        self._check_bands()
        self._assign_lanes()
        self._pieces: List[_Piece] = []
        for rect in range(cfg.n):
            self._trace_rect(rect)
        self.faces = self._merge_faces()
        logger.debug(f"排布 cores={self.cores} curves={len(self.curves)}: {len(self._pieces)} 面片, {len(self.faces)} 面")

    # ------------------------------------------------------------ 车道

    def _check_bands(self):
        for ci, curve in enumerate(self.curves):
            if not len(curve):
                raise CurveError("空曲线")
            for p, step in enumerate(curve.steps):
                if step.turns_back:
                    raise CurveError(f"第{p}步在矩形 {step.rect} 内折返")
                nxt = curve.step(p + 1)
                if transport(self.cfg, step.rect, step.h_out) != (nxt.rect, nxt.h_in):
                    raise CurveError(f"第{p}步与第{p + 1}步之间的带不匹配")

    def _canonical_walk(self, ci: int, p: int):
        """从带的坐标系一端出发，沿股依次访问的矩形步"""
        curve = self.curves[ci]
        if curve.step(p).h_out.side in 'RT':
            return lambda t: curve.step(p + 1 + t)
        return lambda t: curve.step(p - t).reversed()

    def _smaller(self, x: Tuple[int, int], y: Tuple[int, int]) -> Optional[bool]:
        """股 x 的车道是否比 y 更靠近核心；永远平行时返回 None"""
        walk_x = self._canonical_walk(*x)
        walk_y = self._canonical_walk(*y)
        limit = len(self.curves[x[0]]) + len(self.curves[y[0]]) + 2
        shared: List[Step] = []
        for t in range(limit):
            sx, sy = walk_x(t), walk_y(t)
            if sx.rect != sy.rect or sx.h_in != sy.h_in:
                raise CurveError(f"股 {x} 与 {y} 在同一带中却进入不同半边")
            if sx.h_out != sy.h_out:
                h = sx.h_in
                dx = (sx.h_out.ccw_index - h.ccw_index) % 8
                dy = (sy.h_out.ccw_index - h.ccw_index) % 8
                relation = (dx < dy) != h.lane_increases_ccw
                for step in reversed(shared):
                    relation = (not (relation != step.h_out.lane_increases_ccw)) != step.h_in.lane_increases_ccw
                return relation
            shared.append(sx)
        return None

    def _assign_lanes(self):
        groups: Dict[Tuple, List[Tuple[int, int]]] = {}
        for ci, curve in enumerate(self.curves):
            for p, step in enumerate(curve.steps):
                groups.setdefault(band_of(self.cfg, step.rect, step.h_out), []).append((ci, p))

        def compare(x, y):
            if x == y:
                return 0
            relation = self._smaller(x, y)
            if relation is None:
                if x[0] == y[0]:
                    raise EmbeddingError(f"曲线 {x[0]} 是真幂，无法嵌入")
                raise ParallelCurvesError(f"曲线 {x[0]} 与 {y[0]} 平行")
            return -1 if relation else 1

        for key in sorted(groups):
            ordered = sorted(groups[key], key=cmp_to_key(compare))
            for lane, strand in enumerate(ordered):
                self.lanes[strand] = lane

    def lane_in(self, ci: int, p: int) -> int:
        return self.lanes[(ci, (p - 1) % len(self.curves[ci]))]

    def lane_out(self, ci: int, p: int) -> int:
        return self.lanes[(ci, p)]

    # ------------------------------------------------------------ 面片

    def _trace_rect(self, rect: int):
        # 边界点: (排序键, 所在边, 边坐标, 角名)
        points = []
        for corner, side in CORNER_SIDE.items():
            points.append(((SIDE_INDEX[side], -INF), side, SIDE_START[side], corner))
        chords = []  # (ChordRef, 起点键, 终点键)
        for core in self.cores:
            start, end = (HalfSide('L', 1), HalfSide('R', 1)) if core == 'a' else (HalfSide('B', 1), HalfSide('T', 1))
            start_key = (SIDE_INDEX[start.side], 0)
            end_key = (SIDE_INDEX[end.side], 0)
            points.append((start_key, start.side, 0, None))
            points.append((end_key, end.side, 0, None))
            chords.append((ChordRef(('core', core), None), start_key, end_key))
        for ci, curve in enumerate(self.curves):
            for p, step in enumerate(curve.steps):
                if step.rect != rect:
                    continue
                c_in = lane_coord(step.h_in, self.lane_in(ci, p))
                c_out = lane_coord(step.h_out, self.lane_out(ci, p))
                k_in, k_out = point_key(step.h_in, c_in), point_key(step.h_out, c_out)
                points.append((k_in, step.h_in.side, c_in, None))
                points.append((k_out, step.h_out.side, c_out, None))
                chords.append((ChordRef(('curve', ci), p), k_in, k_out))

        points.sort(key=lambda item: item[0])
        size = len(points)
        index = {item[0]: i for i, item in enumerate(points)}
        if len(index) != size:
            raise EmbeddingError(f"矩形 {rect} 中端点重合")
        spans = [(ref, index[s], index[e]) for ref, s, e in chords]

        # 同一曲线的弦不得交错
        crossings = []
        for i in range(len(spans)):
            for j in range(i + 1, len(spans)):
                ref_i, s_i, e_i = spans[i]
                ref_j, s_j, e_j = spans[j]
                if not _interleave(s_i, e_i, s_j, e_j, size):
                    continue
                if ref_i.owner == ref_j.owner:
                    raise EmbeddingError(f"矩形 {rect} 中第{ref_i.step}步与第{ref_j.step}步的弦交错")
                crossings.append((i, j))

        # 边: (u, v, 类型, 弦号)
        edges: List[Tuple[int, int, str, Optional[int]]] = [(i, (i + 1) % size, 'arc', None) for i in range(size)]
        vertex_count = size
        crossing_vertex: Dict[Tuple[int, int], int] = {}
        for pair in crossings:
            crossing_vertex[pair] = vertex_count
            vertex_count += 1

        rotation: Dict[int, List[int]] = {}
        chord_darts: Dict[Tuple[int, int], Tuple[int, int]] = {}  # (弦, 顶点) -> (前向出弧, 后向出弧)
        inward: Dict[int, int] = {}
        for ci_index, (ref, s, e) in enumerate(spans):
            along = []
            for pair, vertex in crossing_vertex.items():
                if ci_index not in pair:
                    continue
                other = spans[pair[1] if pair[0] == ci_index else pair[0]]
                right_end = other[1] if _between(s, e, other[1], size) else other[2]
                along.append(((right_end - s) % size, vertex))
            along.sort()
            path = [s] + [vertex for _, vertex in along] + [e]
            segment_ids = []
            for u, v in zip(path, path[1:]):
                edges.append((u, v, 'chord', ci_index))
                segment_ids.append(len(edges) - 1)
            inward[s] = 2 * segment_ids[0]
            inward[e] = 2 * segment_ids[-1] + 1
            for t, vertex in enumerate(path[1:-1], start=1):
                chord_darts[(ci_index, vertex)] = (2 * segment_ids[t], 2 * segment_ids[t - 1] + 1)
                self.chord_position[((rect, vertex), ref.owner)] = t

        for i in range(size):
            prev_dart = 2 * ((i - 1) % size) + 1
            if points[i][3] is not None:
                rotation[i] = [2 * i, prev_dart]
            else:
                rotation[i] = [2 * i, inward[i], prev_dart]
        for (x, y), vertex in crossing_vertex.items():
            _, s_x, e_x = spans[x]
            _, s_y, e_y = spans[y]
            y_left = s_y if _between(e_x, s_x, s_y, size) else e_y
            x_fwd, x_back = chord_darts[(x, vertex)]
            y_fwd, y_back = chord_darts[(y, vertex)]
            if y_left == e_y:
                rotation[vertex] = [x_fwd, y_fwd, x_back, y_back]
            else:
                rotation[vertex] = [x_fwd, y_back, x_back, y_fwd]

        position = {}
        for vertex, darts in rotation.items():
            for idx, dart in enumerate(darts):
                position[dart] = (vertex, idx)

        def origin(dart):
            u, v, _, _ = edges[dart // 2]
            return u if dart % 2 == 0 else v

        def target(dart):
            u, v, _, _ = edges[dart // 2]
            return v if dart % 2 == 0 else u

        def phi(dart):
            vertex, idx = position[dart ^ 1]
            darts = rotation[vertex]
            return darts[(idx - 1) % len(darts)]

        seen = set()
        outer = 1
        for start in range(2 * len(edges)):
            if start in seen:
                continue
            cycle = []
            dart = start
            while dart not in seen:
                seen.add(dart)
                cycle.append(dart)
                dart = phi(dart)
            if outer in cycle:
                continue
            self._pieces.append(self._piece_from_cycle(rect, cycle, edges, points, spans, crossing_vertex, target))

    def _piece_from_cycle(self, rect, cycle, edges, points, spans, crossing_vertex, target) -> _Piece:
        cfg = self.cfg
        size = len(points)
        piece = _Piece(rect)
        corners = corner_regions(cfg)
        for idx, dart in enumerate(cycle):
            u, v, kind, chord = edges[dart // 2]
            forward = dart % 2 == 0
            if kind == 'arc':
                if not forward:
                    raise EmbeddingError(f"矩形 {rect} 的内部面含有外侧边界弧")
                piece.keys.append(self._glue_key(rect, points[u], points[v]))
                corner = points[v][3]
                if corner is not None:
                    piece.regions.append(corners[(rect, corner)])
            else:
                ref = spans[chord][0]
                piece.sides.setdefault(ref.owner, set()).add(self._side_of(rect, ref, forward))
            head = target(dart)
            if head >= size:
                nxt = cycle[(idx + 1) % len(cycle)]
                arriving = spans[edges[dart // 2][3]][0]
                leaving = spans[edges[nxt // 2][3]][0]
                piece.visits.append(CrossingVisit(rect, (rect, head), arriving, leaving, forward,
                                                  nxt % 2 == 0))
        return piece

    def _glue_key(self, rect: int, start, end) -> Tuple:
        """边界弧在所属带坐标系中的区间，粘合两端的面片共用同一键"""
        cfg = self.cfg
        side = start[1]
        lo = start[2]
        hi = SIDE_END[side] if end[3] is not None else end[2]
        lo, hi = min(lo, hi), max(lo, hi)
        if side == 'R':
            kind, band, flip = 'a', rect, 0
        elif side == 'L':
            band = (rect - 1) % cfg.n
            kind, flip = 'a', cfg.a_flips[band]
        elif side == 'T':
            kind, band, flip = 'b', cfg.b_position[rect], 0
        else:
            band = (cfg.b_position[rect] - 1) % cfg.n
            kind, flip = 'b', cfg.b_flips[band]
        if flip:
            lo, hi = -hi, -lo
        return (kind, band, lo, hi)

    def _side_of(self, rect: int, ref: ChordRef, forward: bool) -> int:
        """弧左侧的面对应所有者的哪一个全局侧"""
        kind = ref.owner[0]
        if kind == 'core':
            core = ref.owner[1]
            if core == 'a':
                local = 1 if forward else -1
            else:
                local = -1 if forward else 1
            return global_side(self.cfg, core, rect, local)
        return (0 if forward else 1) ^ self.flip_prefix(ref.owner[1], ref.step)

    def flip_prefix(self, ci: int, p: int) -> int:
        """曲线在第 p 步之前经过的带翻转位之和的奇偶"""
        curve = self.curves[ci]
        parity = 0
        for step in curve.steps[:p]:
            kind, band, _ = band_of(self.cfg, step.rect, step.h_out)
            parity ^= band_flip(self.cfg, kind, band)
        return parity

    # ------------------------------------------------------------ 拼面

    def _merge_faces(self) -> List[Face]:
        count = len(self._pieces)
        parent = list(range(count))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)

        by_key: Dict[Tuple, List[int]] = {}
        by_region: Dict[int, List[int]] = {}
        for idx, piece in enumerate(self._pieces):
            for key in piece.keys:
                by_key.setdefault(key, []).append(idx)
            for region in piece.regions:
                by_region.setdefault(region, []).append(idx)
        for key, members in by_key.items():
            if len(members) != 2:
                logger.warning(f"带条 {key} 的粘合端数为 {len(members)}")
            for other in members[1:]:
                union(members[0], other)
        for members in by_region.values():
            for other in members[1:]:
                union(members[0], other)

        groups: Dict[int, List[int]] = {}
        for idx in range(count):
            groups.setdefault(find(idx), []).append(idx)

        faces = []
        for root in sorted(groups):
            members = groups[root]
            keys = {key for idx in members for key in self._pieces[idx].keys}
            regions = tuple(sorted({r for idx in members for r in self._pieces[idx].regions}))
            base = len(members) - len(keys)
            chi = chi_filled = base
            punctures = 0
            is_open = False
            for region in regions:
                cap = self.cfg.cap_of(region)
                if cap.kind in ('open', 'other'):
                    is_open = True
                elif cap.kind == 'punctured':
                    chi += 1 - cap.punctures
                    chi_filled += 1
                    punctures += cap.punctures
                else:
                    chi += CAP_CHI[cap.kind]
                    chi_filled += CAP_CHI[cap.kind]
            sides: Dict[Tuple, set] = {}
            visits = []
            for idx in members:
                for owner, owner_sides in self._pieces[idx].sides.items():
                    sides.setdefault(owner, set()).update(owner_sides)
                visits.extend(self._pieces[idx].visits)
            faces.append(Face(len(faces), members, regions, len(keys), chi, chi_filled, punctures,
                              is_open, sides, visits))
        return faces

    # ------------------------------------------------------------ 查询

    def faces_touching(self, owner: Tuple, side: int) -> List[Face]:
        return [face for face in self.faces if face.touches(owner, side)]

    def bounded_sides(self, owner: Tuple) -> List[str]:
        """所有者一侧若是孔数 <2 的圆盘或无孔默比乌斯带，返回描述"""
        for face in self.faces:
            if face.touches(owner, 0) and face.touches(owner, 1):
                return []
        bounded = []
        for side in (0, 1):
            for face in self.faces_touching(owner, side):
                if face.open:
                    continue
                if face.chi_filled == 1 and face.punctures < 2:
                    bounded.append(f"side {side}: disk punctures={face.punctures}")
                elif face.chi_filled == 0 and face.punctures == 0:
                    bounded.append(f"side {side}: mobius")
        return bounded

    def bigon_faces(self) -> List[Face]:
        return [face for face in self.faces if face.is_bigon]

    def crossing_count(self) -> int:
        return len({v.node for face in self.faces for v in face.visits})
