"""
生成夹具脚本
写入手工配置，并用挖掘结果生成例子配置 cfg-ex1、cfg-ex2、cfg-mob、cfg-mob4
"""
from typing import Dict, List, Optional

from curves import core_curve
from fixture_store import FixtureStore, store
from mining import mine_examples
from models import Cap, Configuration, MiningHit

# 手工配置
HAND_FIXTURES = {
    'cfg-or2': Configuration(2, (0, 1), (0, 0), (0, 0), name='cfg-or2'),
    'cfg-no2': Configuration(2, (0, 1), (1, 1), (0, 0), name='cfg-no2'),
    'bad-parity': Configuration(2, (0, 1), (1, 0), (0, 0), name='bad-parity'),
}

# 例子名 -> (挖掘目标, 是否只要已发表的数值)
MINED_FIXTURES = {
    'cfg-ex1': ('ex3.1', True),
    'cfg-ex2': ('ex3.2', True),
    'cfg-mob': ('ex3.3', False),
    'cfg-mob4': ('ex3.3', True),
}


def expected_mob() -> Configuration:
    """cfg-no2 中 a 的第 0 侧只接触区域 R0；把 R0 封成圆盘，这一侧就成为默比乌斯带"""
    base = HAND_FIXTURES['cfg-no2']
    return Configuration(base.n, base.b_order, base.a_flips, base.b_flips, ((0, Cap('disk')),), 'cfg-mob')


def write_hand_fixtures(target: FixtureStore = store) -> List[str]:
    """写入手工配置和核心曲线"""
    paths = []
    for name, cfg in HAND_FIXTURES.items():
        paths.append(target.save_configuration(cfg, name))
    for name in ('cfg-or2', 'cfg-no2'):
        for core in ('a', 'b'):
            paths.append(target.save_curve(core_curve(HAND_FIXTURES[name], core), f"{name}-{core}"))
    return paths


def write_mined_fixtures(target: FixtureStore = store, max_n: Optional[int] = None,
                         max_steps: Optional[int] = None) -> Dict[str, Optional[MiningHit]]:
    """每个目标取第一个命中写入；没有命中时对应值为 None"""
    found = {}
    for name, (example, exact) in MINED_FIXTURES.items():
        hits, bounds = mine_examples(example, max_n=max_n, max_steps=max_steps, exact=exact)
        hit = hits[0] if hits else None
        found[name] = hit
        if hit is None:
            print(f"{example} 在界内没有命中: {bounds}")
            continue
        cfg = Configuration(hit.config.n, hit.config.b_order, hit.config.a_flips, hit.config.b_flips,
                            hit.config.caps, name)
        target.save_configuration(cfg, name)
        if hit.curve is not None:
            target.save_curve(hit.curve.renamed(f"{name}-c"), f"{name}-c")
        print(f"{name}: {hit.config.name} counts={list(hit.counts)} exact={hit.exact}")
    return found


def generate_fixtures(max_n: Optional[int] = None, max_steps: Optional[int] = None, mine: bool = True):
    """生成全部夹具"""
    print("开始生成夹具...")
    paths = write_hand_fixtures()
    print(f"手工夹具 {len(paths)} 个")
    if mine:
        write_mined_fixtures(max_n=max_n, max_steps=max_steps)
    print("\n完成！")


if __name__ == '__main__':
    generate_fixtures()
