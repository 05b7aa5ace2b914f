"""
数据模型定义
"""
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional, Tuple

SIDES = ('L', 'R', 'B', 'T')

# 方格边界逆时针顺序（从右下角出发）
CCW_HALF_SIDES = ('Rm', 'Rp', 'Tp', 'Tm', 'Lp', 'Lm', 'Bm', 'Bp')


@dataclass(frozen=True, order=True)
class HalfSide:
    """交叉矩形的半边：L/R 的 + 在 a 上方，B/T 的 + 在 b 右侧"""
    side: str
    sign: int

    def __post_init__(self):
        if self.side not in SIDES or self.sign not in (1, -1):
            raise ValueError(f"非法半边: {self.side}{self.sign}")

    @classmethod
    def parse(cls, token: str) -> 'HalfSide':
        if len(token) != 2 or token[0] not in SIDES or token[1] not in 'pm':
            raise ValueError(f"非法半边记号: {token}")
        return cls(token[0], 1 if token[1] == 'p' else -1)

    @property
    def token(self) -> str:
        return f"{self.side}{'p' if self.sign > 0 else 'm'}"

    @property
    def a_parity(self) -> int:
        """相对 a 的侧：L/R 取符号，T 为 +，B 为 -"""
        if self.side in 'LR':
            return self.sign
        return 1 if self.side == 'T' else -1

    @property
    def b_parity(self) -> int:
        """相对 b 的侧：B/T 取符号，R 为 +，L 为 -"""
        if self.side in 'BT':
            return self.sign
        return 1 if self.side == 'R' else -1

    @property
    def ccw_index(self) -> int:
        return CCW_HALF_SIDES.index(self.token)

    @property
    def lane_increases_ccw(self) -> bool:
        """沿逆时针方向，车道号是否递增"""
        return self.token in ('Rp', 'Tm', 'Lm', 'Bp')

    def flipped(self) -> 'HalfSide':
        return HalfSide(self.side, -self.sign)

    def __str__(self):
        return self.token


@dataclass(frozen=True)
class Cap:
    """边界区域的封口"""
    kind: str = 'open'
    punctures: int = 0

    def __post_init__(self):
        from config import CAP_KINDS
        if self.kind not in CAP_KINDS:
            raise ValueError(f"未知封口类型: {self.kind}")
        if self.kind == 'punctured' and self.punctures < 1:
            raise ValueError("punctured 封口至少需要一个孔")

    @property
    def kind_name(self):
        """获取封口中文名称"""
        from config import CAP_KINDS
        return CAP_KINDS.get(self.kind, self.kind)

    @property
    def token(self) -> str:
        if self.kind == 'punctured':
            return f"punctured {self.punctures}"
        return self.kind


@dataclass(frozen=True)
class Configuration:
    """N_{a∪b} 的矩形复形：交叉矩形、带翻转位和区域封口"""
    n: int
    b_order: Tuple[int, ...]
    a_flips: Tuple[int, ...]
    b_flips: Tuple[int, ...]
    caps: Tuple[Tuple[int, Cap], ...] = ()
    name: str = ''

    def cap_of(self, region_id: int) -> Cap:
        for rid, cap in self.caps:
            if rid == region_id:
                return cap
        return Cap()

    def with_caps(self, caps: Dict[int, Cap]) -> 'Configuration':
        ordered = tuple(sorted((rid, cap) for rid, cap in caps.items() if cap.kind != 'open'))
        return Configuration(self.n, self.b_order, self.a_flips, self.b_flips, ordered, self.name)

    @property
    def b_position(self) -> Tuple[int, ...]:
        """矩形 r 在 b 上的访问序号"""
        position = [0] * self.n
        for j, r in enumerate(self.b_order):
            position[r] = j
        return tuple(position)

    def flips(self, core: str) -> Tuple[int, ...]:
        return self.a_flips if core == 'a' else self.b_flips

    def to_text(self) -> str:
        """规范文本，用于写文件和计算摘要"""
        from config import CONFIG_VERSION
        lines = [
            f"config-version {CONFIG_VERSION}",
            f"n {self.n}",
            "b-order " + ' '.join(map(str, self.b_order)),
            "a-flips " + ' '.join(map(str, self.a_flips)),
            "b-flips " + ' '.join(map(str, self.b_flips)),
        ]
        for rid, cap in self.caps:
            lines.append(f"cap R{rid} {cap.token}")
        return '\n'.join(lines) + '\n'

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'n': self.n,
            'b_order': list(self.b_order),
            'a_flips': list(self.a_flips),
            'b_flips': list(self.b_flips),
            'caps': {f"R{rid}": cap.token for rid, cap in self.caps},
        }


@dataclass(frozen=True)
class WalkEdge:
    """边界行走的一段：从矩形角出发沿某条带的长边"""
    rect: int
    corner: str
    kind: str
    band: int


@dataclass(frozen=True)
class Region:
    """N_{a∪b} 的边界圆周（补集分量）"""
    id: int
    boundary_walk: Tuple[WalkEdge, ...]
    a_arcs: int
    b_arcs: int
    cap: Cap = field(default_factory=Cap)

    @property
    def corners(self) -> Tuple[Tuple[int, str], ...]:
        return tuple((edge.rect, edge.corner) for edge in self.boundary_walk)

    def to_dict(self) -> Dict:
        return {
            'id': self.id,
            'walk': [f"{e.rect}{e.corner}-{e.kind}{e.band}" for e in self.boundary_walk],
            'a_arcs': self.a_arcs,
            'b_arcs': self.b_arcs,
            'cap': self.cap.token,
        }


@dataclass
class ValidationReport:
    """校验报告，每项检查一行"""
    checks: List[Tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = ''):
        self.checks.append((name, bool(passed), detail))

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    def get(self, name: str) -> Optional[bool]:
        for check_name, passed, _ in self.checks:
            if check_name == name:
                return passed
        return None

    def lines(self) -> List[str]:
        return [
            f"check {name}: {'pass' if passed else 'FAIL'}" + (f" ({detail})" if detail else '')
            for name, passed, detail in self.checks
        ]

    def to_dict(self) -> Dict:
        return {'ok': self.ok, 'checks': [list(c) for c in self.checks]}


@dataclass(frozen=True)
class Step:
    """曲线穿过一个交叉矩形：从 h_in 进入，从 h_out 离开"""
    rect: int
    h_in: HalfSide
    h_out: HalfSide

    @property
    def token(self) -> str:
        return f"step {self.rect} {self.h_in.token} {self.h_out.token}"

    @property
    def crosses_a(self) -> bool:
        return self.h_in.a_parity != self.h_out.a_parity

    @property
    def crosses_b(self) -> bool:
        return self.h_in.b_parity != self.h_out.b_parity

    @property
    def turns_back(self) -> bool:
        return self.h_in.side == self.h_out.side

    def reversed(self) -> 'Step':
        return Step(self.rect, self.h_out, self.h_in)

    def crosses(self, core: str) -> bool:
        return self.crosses_a if core == 'a' else self.crosses_b


@dataclass(frozen=True)
class Curve:
    """族 C 中的曲线：交叉矩形步的循环序列"""
    steps: Tuple[Step, ...]
    name: str = ''

    def __len__(self):
        return len(self.steps)

    def step(self, index: int) -> Step:
        return self.steps[index % len(self.steps)]

    def rotated(self, start: int) -> 'Curve':
        start %= len(self.steps)
        return Curve(self.steps[start:] + self.steps[:start], self.name)

    def reversed(self) -> 'Curve':
        return Curve(tuple(s.reversed() for s in reversed(self.steps)), self.name)

    def renamed(self, name: str) -> 'Curve':
        return Curve(self.steps, name)

    def canonical(self) -> 'Curve':
        """循环旋转中字典序最小者"""
        keys = [tuple(self._key(s) for s in self.rotated(i).steps) for i in range(len(self.steps))]
        best = min(range(len(keys)), key=lambda i: keys[i])
        return self.rotated(best)

    @staticmethod
    def _key(step: Step):
        return (step.rect, step.h_in.ccw_index, step.h_out.ccw_index)

    def to_text(self) -> str:
        from config import CURVE_VERSION
        return f"curve-version {CURVE_VERSION}\n" + ''.join(s.token + '\n' for s in self.steps)

    def to_dict(self) -> Dict:
        return {'name': self.name, 'steps': [s.token[5:] for s in self.steps]}


@dataclass(frozen=True)
class Segment:
    """宿主圆周上的有向线段，一一对应一条带"""
    host: str
    band: int
    forward: bool
    initial: int
    terminal: int
    initial_side: int
    terminal_side: int

    @property
    def label(self) -> str:
        return f"{self.host}{self.band}{'+' if self.forward else '-'}"

    @property
    def direction(self) -> str:
        return 'fwd' if self.forward else 'bwd'

    def reversed(self) -> 'Segment':
        return Segment(self.host, self.band, not self.forward, self.terminal, self.initial,
                       self.terminal_side, self.initial_side)


@dataclass(frozen=True)
class DoubleSegment:
    """起点相同的两条有向线段"""
    point: int
    pair: Tuple[Segment, Segment]

    @property
    def label(self) -> str:
        return f"P{self.point}"


@dataclass(frozen=True)
class BigonVisit:
    """二角形在一个交叉点处的角

    c_direction、other_direction 是二角形两条边离开该角时沿 c 和另一曲线的方向（+1 为正向），
    position 是交叉点在另一曲线弦上的序号。
    """
    rect: int
    step: int
    c_direction: int
    other_direction: int
    position: int = 0
    other_step: Optional[int] = None


@dataclass(frozen=True)
class Bigon:
    """曲线与另一曲线之间的最内二角形"""
    other: str
    visits: Tuple[BigonVisit, BigonVisit]
    face: int
    regions: Tuple[int, ...] = ()

    @property
    def steps(self) -> Tuple[int, int]:
        return (self.visits[0].step, self.visits[1].step)


@dataclass(frozen=True)
class IntersectionReport:
    """曲线相对两个核心的交点统计"""
    raw_a: int
    raw_b: int
    min_a: int
    min_b: int
    j_a: int
    j_b: int
    arc_counts: Tuple[int, int, int, int]
    winds_a: bool = False
    winds_b: bool = False
    x_a: bool = False
    x_b: bool = False
    xt_a: bool = False
    xt_b: bool = False

    def to_line(self) -> str:
        n_a, n_b, n_c, n_d = self.arc_counts
        flag = lambda v: 1 if v else 0
        return (f"raw_a={self.raw_a} raw_b={self.raw_b} min_a={self.min_a} min_b={self.min_b} "
                f"J_a={self.j_a} J_b={self.j_b} nA={n_a} nB={n_b} nC={n_c} nD={n_d} "
                f"winds_a={flag(self.winds_a)} winds_b={flag(self.winds_b)} "
                f"X_a={flag(self.x_a)} X_b={flag(self.x_b)} Xt_a={flag(self.xt_a)} Xt_b={flag(self.xt_b)}")

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class ReductionEvent:
    """一次约化：类型、位置、约化前后与 b 的交点数"""
    kind: str
    rect: int
    band: Optional[int]
    before: int
    after: int

    @property
    def kind_name(self):
        """获取约化类型中文名称"""
        from config import REDUCTION_KINDS
        return REDUCTION_KINDS.get(self.kind, self.kind)

    @property
    def drop(self) -> int:
        return self.before - self.after

    def to_line(self) -> str:
        band = '-' if self.band is None else self.band
        return f"event {self.kind} rect={self.rect} band={band} {self.before}->{self.after}"


@dataclass
class TwistTrace:
    """t^k(c) 的各阶段：d、d1、d2、d3 以及约化事件"""
    core: str
    k: int
    hand: str
    source: Curve
    d: Curve
    d1: Curve = None
    d2: Curve = None
    d3: Curve = None
    events: List[ReductionEvent] = field(default_factory=list)
    anomalies: List[str] = field(default_factory=list)
    certificate: Dict[str, bool] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)

    def events_of(self, kind: str) -> List[ReductionEvent]:
        return [e for e in self.events if e.kind == kind]

    @property
    def certified(self) -> bool:
        return bool(self.certificate) and all(self.certificate.values())

    @property
    def failed_checks(self) -> List[str]:
        return [name for name, passed in self.checks.items() if not passed]


@dataclass(frozen=True)
class TwistWord:
    """t_a^{±1}, t_b^{±1} 上的词，字母为 (核心, ±1)"""
    letters: Tuple[Tuple[str, int], ...] = ()

    @property
    def reduced(self) -> bool:
        return all(not (x[0] == y[0] and x[1] == -y[1]) for x, y in zip(self.letters, self.letters[1:]))

    @property
    def blocks(self) -> Tuple[Tuple[str, int], ...]:
        """相邻同字母合并为幂"""
        merged: List[List] = []
        for core, power in self.letters:
            if merged and merged[-1][0] == core:
                merged[-1][1] += power
            else:
                merged.append([core, power])
        return tuple((core, power) for core, power in merged if power != 0)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        if not self.letters:
            return '1'
        return ' '.join(core if power == 1 else f"{core}^{power}" for core, power in self.blocks)


@dataclass
class WitnessReport:
    """一个词的自由性见证：成员链和结论"""
    word: TwistWord
    acted_word: TwistWord
    seed: str
    chain: List[Tuple[str, str, bool]] = field(default_factory=list)
    conclusion: bool = False
    inequality: str = ''

    def to_dict(self) -> Dict:
        return {
            'word': str(self.word),
            'acted_word': str(self.acted_word),
            'length': len(self.word),
            'seed': self.seed,
            'chain': ' > '.join(f"{prefix}:{target}{'' if ok else '!'}" for prefix, target, ok in self.chain),
            'conclusion': self.conclusion,
            'inequality': self.inequality,
        }


@dataclass
class RunReport:
    """命令行报告：命令回显、配置摘要、检查行和结果尾行"""
    command: str
    digest: str = ''
    lines: List[str] = field(default_factory=list)
    result: str = 'pass'

    def add(self, line: str):
        self.lines.append(line)

    def fail(self, line: Optional[str] = None):
        if line:
            self.lines.append(line)
        self.result = 'fail'

    def inconclusive(self, line: Optional[str] = None):
        if line:
            self.lines.append(line)
        if self.result != 'fail':
            self.result = 'inconclusive'

    def render(self) -> str:
        head = [f"command {self.command}"]
        if self.digest:
            head.append(f"digest={self.digest}")
        return '\n'.join(head + self.lines + [f"RESULT {self.result}"]) + '\n'

    @property
    def exit_code(self) -> int:
        return 0 if self.result == 'pass' else 1


@dataclass
class PingPongReport:
    """乒乓审计：集合对、非空/不交检查、采样行和违例"""
    sets: Tuple[str, str]
    k_max: int
    disjoint_nonempty: bool = False
    members: Dict[str, int] = field(default_factory=dict)
    rows: List[Dict] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)

    @property
    def outside_formula(self) -> int:
        """原始交点公式假设之外（c 与另一核心相交）的行数"""
        return sum(1 for row in self.rows if row.get('formula') == 'outside')

    @property
    def inconclusive(self) -> bool:
        return not any(self.members.values())

    @property
    def ok(self) -> bool:
        return self.disjoint_nonempty and not self.violations and not self.inconclusive

    def to_dict(self) -> Dict:
        return {
            'sets': list(self.sets),
            'k_max': self.k_max,
            'disjoint_nonempty': self.disjoint_nonempty,
            'members': dict(self.members),
            'violations': list(self.violations),
            'inconclusive': self.inconclusive,
            'outside_formula': self.outside_formula,
        }


@dataclass(frozen=True)
class MiningHit:
    """挖掘命中：配置、曲线及扭转前后的交点数"""
    target: str
    config: Configuration
    curve: Optional[Curve]
    counts: Tuple[int, ...] = ()
    exact: bool = False

    def to_dict(self) -> Dict:
        return {
            'target': self.target,
            'config': self.config.to_text(),
            'curve': self.curve.to_text() if self.curve else '',
            'counts': list(self.counts),
            'exact': self.exact,
        }


@dataclass
class PatternAuditReport:
    """分离线段对的审计：满足前提的配置、C 型弧样本和违例"""
    max_n: int
    max_steps: int
    configs: int = 0
    hypothesis_configs: List[str] = field(default_factory=list)
    members: int = 0
    patterns: int = 0
    violations: List[str] = field(default_factory=list)

    @property
    def inconclusive(self) -> bool:
        return self.patterns == 0

    @property
    def ok(self) -> bool:
        return not self.violations and not self.inconclusive

    def to_dict(self) -> Dict:
        return {
            'max_n': self.max_n,
            'max_steps': self.max_steps,
            'configs': self.configs,
            'hypothesis_configs': list(self.hypothesis_configs),
            'members': self.members,
            'patterns': self.patterns,
            'violations': list(self.violations),
            'inconclusive': self.inconclusive,
        }
