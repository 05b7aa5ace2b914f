"""
自由性模块：扭转词、词在曲线上的作用、乒乓审计和自由性见证
"""
import random
import re
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from itertools import islice, product
from typing import Dict, List, Optional, Tuple

from loguru import logger

from curves import core_curve, crossing_counts, crossings_with, j_counts, membership
from errors import GenericityError, TwistlabError, WitnessError, WordSyntaxError
from mining import enumerate_curves
from models import Configuration, Curve, PingPongReport, TwistWord, WitnessReport
from surface import is_generic_core
from twists import expected_j_after_type_I, expected_raw_counts, twist_minimal

TOKEN_PATTERN = re.compile(r'^([aAbB])(?:\^(-?\d+))?$')

# 短字典序中的字母顺序
ALPHABET = (('a', 1), ('a', -1), ('b', 1), ('b', -1))


# ---------------------------------------------------------------- 词

def parse_word(text: str) -> TwistWord:
    """解析 'a b^-1 a^2' 形式的词；A、B 与 a、b 相同，'1' 或空串为单位元"""
    letters: List[Tuple[str, int]] = []
    for token in text.replace('*', ' ').split():
        if token == '1':
            continue
        match = TOKEN_PATTERN.match(token)
        if not match:
            raise WordSyntaxError(f"无法解析的字母: {token}")
        core = match.group(1).lower()
        power = int(match.group(2)) if match.group(2) is not None else 1
        if power == 0:
            raise WordSyntaxError(f"指数不能为 0: {token}")
        letters += [(core, 1 if power > 0 else -1)] * abs(power)
    return TwistWord(tuple(letters))


def reduce_word(w: TwistWord) -> TwistWord:
    """自由约化"""
    stack: List[Tuple[str, int]] = []
    for letter in w.letters:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return TwistWord(tuple(stack))


def cyclic_reduce(w: TwistWord) -> TwistWord:
    letters = list(reduce_word(w).letters)
    while len(letters) >= 2 and letters[0][0] == letters[-1][0] and letters[0][1] == -letters[-1][1]:
        letters = letters[1:-1]
    return TwistWord(tuple(letters))


def _from_blocks(blocks: List[Tuple[str, int]]) -> TwistWord:
    letters = []
    for core, power in blocks:
        letters += [(core, 1 if power > 0 else -1)] * abs(power)
    return TwistWord(tuple(letters))


def enumerate_reduced_words(max_len: int) -> List[TwistWord]:
    """长度 1..max_len 的全部约化词，按短字典序（a, a^-1, b, b^-1）"""
    words = []
    for length in range(1, max_len + 1):
        for letters in product(ALPHABET, repeat=length):
            w = TwistWord(letters)
            if w.reduced:
                words.append(w)
    return words


# ---------------------------------------------------------------- 作用

@lru_cache(maxsize=4096)
def _twist_block(cfg: Configuration, curve: Curve, core: str, k: int, hand: str) -> Curve:
    d3, _ = twist_minimal(cfg, curve, core, k, hand)
    return d3.renamed('')


def act(cfg: Configuration, w: TwistWord, seed: str, hand: str = 'right') -> Curve:
    """从右到左逐块作用 twist_minimal，输出与两个核心都处于极小位置"""
    c = core_curve(cfg, seed).renamed('')
    for core, k in reversed(reduce_word(w).blocks):
        c = _twist_block(cfg, c, core, k, hand)
    return c.renamed(f"{w}({seed})")


def membership_sets(cfg: Configuration) -> Tuple[str, str]:
    """I(a,b) ≥ 3 用 X_a、X_b；I(a,b) = 2 用 X̃_a、X̃_b"""
    return ('X_a', 'X_b') if cfg.n >= 3 else ('Xt_a', 'Xt_b')


def _target_set(cfg: Configuration, core: str) -> str:
    set_a, set_b = membership_sets(cfg)
    return set_a if core == 'a' else set_b


def _inequality(cfg: Configuration, c: Curve, label: str) -> str:
    if cfg.n >= 3:
        min_a, min_b = crossing_counts(cfg, c)
        return f"I({label},a)={min_a} I({label},b)={min_b}"
    j_a, j_b = j_counts(cfg, c)
    return f"J({label},a)={j_a} J({label},b)={j_b}"


# ---------------------------------------------------------------- 见证

def witness_word(w: TwistWord) -> Tuple[TwistWord, str]:
    """共轭后用于见证的词和起点核心

    与某个幂共轭时用另一个核心；否则旋转使最右块是 a-块，再用 a^{±1} 共轭使最左块也是 a-块，起点为 b。
    """
    u = cyclic_reduce(w)
    blocks = list(u.blocks)
    if not blocks:
        raise WitnessError("单位元没有见证")
    if len(blocks) == 1:
        core = blocks[0][0]
        return u, 'b' if core == 'a' else 'a'
    if blocks[0][0] == blocks[-1][0]:
        core = blocks[0][0]
        blocks = [(core, blocks[-1][1] + blocks[0][1])] + blocks[1:-1]
    if blocks[-1][0] != 'a':
        blocks = blocks[-1:] + blocks[:-1]
    last_power = blocks[-1][1]
    j = -1 if last_power == 1 else 1
    blocks = [('a', j)] + blocks[:-1] + [('a', last_power - j)]
    return _from_blocks(blocks), 'b'


def witness_for_word(cfg: Configuration, w: TwistWord, hand: str = 'right') -> WitnessReport:
    """沿成员链验证 w(seed) 落在不含 seed 的集合中

    Raises:
        WitnessError: 链中某一步不在预期集合里
    """
    word = reduce_word(w)
    acted, seed = witness_word(word)
    report = WitnessReport(word, acted, seed)
    c = core_curve(cfg, seed).renamed('')
    prefix: List[Tuple[str, int]] = []
    previous_min = None
    for core, k in reversed(acted.blocks):
        c = _twist_block(cfg, c, core, k, hand)
        prefix.insert(0, (core, k))
        target = _target_set(cfg, core)
        flags = membership(cfg, c, reduced=c)
        label = str(_from_blocks(prefix))
        report.chain.append((label, target, flags[target]))
        if not flags[target]:
            logger.error(f"见证失败: {word} 前缀 {label} 不在 {target}")
            raise WitnessError(f"词 {word} 的前缀 {label}({seed}) 不在 {target}: {report.to_dict()['chain']}")
        if cfg.n >= 3:
            current = min(crossing_counts(cfg, c))
            if previous_min and current < previous_min:
                logger.warning(f"词 {word} 的链上 min(I(c,a),I(c,b)) 下降: {previous_min} -> {current}")
            previous_min = current

    seed_flags = membership(cfg, core_curve(cfg, seed))
    final_target = report.chain[-1][1]
    if seed_flags[final_target]:
        raise WitnessError(f"起点 {seed} 已经在 {final_target} 中")
    report.conclusion = True
    report.inequality = _inequality(cfg, c, f"w({seed})")
    return report


def _witness_job(args) -> WitnessReport:
    cfg, w, hand = args
    return witness_for_word(cfg, w, hand)


def _require_generic(cfg: Configuration):
    for core in ('a', 'b'):
        if not is_generic_core(cfg, core):
            raise GenericityError(f"核心 {core} 不是 generic 的")


def freeness_witness(cfg: Configuration, max_len: int, hand: str = 'right',
                     jobs: Optional[int] = None) -> List[WitnessReport]:
    """长度不超过 max_len 的每个非空约化词都给出见证，结果按词序排列"""
    from config import JOBS
    _require_generic(cfg)
    words = enumerate_reduced_words(max_len)
    jobs = jobs or JOBS
    logger.info(f"自由性见证: {len(words)} 个词, jobs={jobs}")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_witness_job, [(cfg, w, hand) for w in words]))
    return [witness_for_word(cfg, w, hand) for w in words]


# ---------------------------------------------------------------- 乒乓审计

def sample_curves(cfg: Configuration, sample_budget: int, rng_seed: int, max_steps: Optional[int] = None) -> List[Curve]:
    """从按长度-字典序枚举的曲线池中确定性地抽样"""
    from config import DEFAULT_MAX_STEPS
    pool = list(islice(enumerate_curves(cfg, max_steps or DEFAULT_MAX_STEPS), 4 * sample_budget))
    rng = random.Random(rng_seed)
    return rng.sample(pool, min(sample_budget, len(pool)))


def _formula_check(cfg: Configuration, trace, core: str, k: int, hand: str,
                   raw_pair: Tuple[int, int]) -> Tuple[str, bool, str]:
    """|d∩other| = I(c,core)·I(a,b)·|k| 只在 c 与另一核心不相交时成立

    其余成员记为 'outside'，改用逐步计数 expected_raw_counts 核对。
    """
    other = 'b' if core == 'a' else 'a'
    source = trace.source
    if crossings_with(source, other) == 0:
        predicted = (crossings_with(source, core), crossings_with(source, core) * cfg.n * abs(k))
        return 'exact', raw_pair == predicted, f"{raw_pair} != I·n·|k| {predicted}"
    predicted = expected_raw_counts(cfg, source, core, k, hand)
    return 'outside', raw_pair == predicted, f"{raw_pair} != 逐步计数 {predicted}"


def _audit_twist(cfg: Configuration, c: Curve, core: str, k: int, hand: str) -> Tuple[Dict, List[str]]:
    d3, trace = twist_minimal(cfg, c, core, k, hand)
    target = _target_set(cfg, core)
    flags = membership(cfg, d3, reduced=d3)
    raw = crossing_counts(cfg, trace.d)
    raw_pair = raw if core == 'a' else (raw[1], raw[0])
    problems = []
    if not flags[target]:
        problems.append(f"t_{core}^{k}({c.name}) 不在 {target}")
    formula, formula_ok, detail = _formula_check(cfg, trace, core, k, hand, raw_pair)
    if not formula_ok:
        problems.append(f"t_{core}^{k}({c.name}) 原始交点数 {detail}")
    for name in trace.failed_checks:
        problems.append(f"t_{core}^{k}({c.name}) 阶段检查失败: {name}")
    j_stages = [j_counts(cfg, stage) for stage in (trace.d1, trace.d2, trace.d3)]
    if cfg.n == 2:
        j_expected = expected_j_after_type_I(cfg, trace.source, core, k, hand)
        j_core, j_other = j_stages[0] if core == 'a' else j_stages[0][::-1]
        if (j_core, j_other) != j_expected:
            problems.append(f"t_{core}^{k}({c.name}) J(d1)=({j_core},{j_other}) != {j_expected}")
        if len(set(j_stages)) != 1:
            problems.append(f"t_{core}^{k}({c.name}) J 在各阶段变化: {j_stages}")
    min_a, min_b = crossing_counts(cfg, d3)
    row = {
        'curve': c.name, 'core': core, 'k': k, 'length': len(c),
        'min_a': min_a, 'min_b': min_b, 'j_a': j_stages[-1][0], 'j_b': j_stages[-1][1],
        'raw_core': raw_pair[0], 'raw_other': raw_pair[1],
        'formula': formula, 'formula_ok': formula_ok,
        'events': len(trace.events), 'anomalies': len(trace.anomalies),
        'member': flags[target], 'ok': not problems,
    }
    return row, problems


def _failed_row(c: Curve, core: str, k: int) -> Dict:
    return {'curve': c.name, 'core': core, 'k': k, 'length': len(c), 'ok': False}


def _audit_sample(cfg: Configuration, c: Curve, powers: List[int], hand: str,
                  report: PingPongReport):
    set_a, set_b = report.sets
    flags = membership(cfg, c)
    if flags[set_a] and flags[set_b]:
        report.violations.append(f"{c.name} 同时属于 {set_a} 和 {set_b}")
        return
    if flags[set_b]:
        core = 'a'
    elif flags[set_a]:
        core = 'b'
    else:
        return
    report.members[set_b if core == 'a' else set_a] += 1
    for k in powers:
        try:
            row, problems = _audit_twist(cfg, c, core, k, hand)
        except TwistlabError as e:
            logger.error(f"{c.name} t_{core}^{k}: {type(e).__name__}: {e}")
            row, problems = _failed_row(c, core, k), [f"{c.name} t_{core}^{k}: {type(e).__name__}: {e}"]
        report.rows.append(row)
        report.violations += problems


def ping_pong_audit(cfg: Configuration, k_max: int, sample_budget: int, rng_seed: int,
                    hand: str = 'right', max_steps: Optional[int] = None) -> PingPongReport:
    """检查集合对非空且不交，并检查每个采样成员在 0<|k|≤k_max 的扭转下落入另一集合

    单个样本的失败记为违例，不中断审计。
    """
    _require_generic(cfg)
    set_a, set_b = membership_sets(cfg)
    report = PingPongReport((set_a, set_b), k_max)
    a_flags = membership(cfg, core_curve(cfg, 'a'))
    b_flags = membership(cfg, core_curve(cfg, 'b'))
    report.disjoint_nonempty = a_flags[set_a] and b_flags[set_b] and not a_flags[set_b] and not b_flags[set_a]
    if not report.disjoint_nonempty:
        report.violations.append(f"a: {a_flags} b: {b_flags}")
    report.members = {set_a: 0, set_b: 0}

    powers = [k for m in range(1, k_max + 1) for k in (m, -m)]
    for c in sample_curves(cfg, sample_budget, rng_seed, max_steps):
        try:
            _audit_sample(cfg, c, powers, hand, report)
        except TwistlabError as e:
            logger.error(f"样本 {c.name}: {type(e).__name__}: {e}")
            report.rows.append(_failed_row(c, '', 0))
            report.violations.append(f"{c.name}: {type(e).__name__}: {e}")
    if report.inconclusive:
        logger.warning(f"采样 {sample_budget} 条曲线没有得到任何集合成员")
    logger.info(f"乒乓审计: 成员 {report.members}, {len(report.rows)} 行, "
                f"公式外 {report.outside_formula}, 违例 {len(report.violations)}")
    return report
