#!/usr/bin/env python3
"""
测试脚本 - 验证 twistlab 命令行的报告与退出码
"""
import io
import os
import tempfile
from contextlib import redirect_stdout

from app import main as run_cli
from config import FIXTURES_DIR


def fixture(name: str) -> str:
    return os.path.join(FIXTURES_DIR, name)


def run(*argv) -> tuple:
    """运行命令行，返回 (退出码, 报告文本)"""
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = run_cli(['--log-level', 'ERROR', *argv])
    return code, buffer.getvalue()


def test_validate_pass():
    """测试合法配置校验"""
    print("🔍 测试配置校验...")
    for name in ('cfg-or2.cfg', 'cfg-no2.cfg'):
        code, out = run('validate', fixture(name))
        assert code == 0, out
        assert out.endswith("RESULT pass\n")
        assert "digest=" in out
    code, out = run('validate', fixture('cfg-no2.cfg'))
    assert "capped surface: nonorientable crosscaps=2" in out
    print("✅ 配置校验通过")


def test_validate_fail():
    """测试校验失败的配置"""
    print("\n🔍 测试校验失败...")
    code, out = run('validate', fixture('bad-parity.cfg'))
    assert code == 1
    assert "check a two-sided: FAIL" in out
    assert out.endswith("RESULT fail\n")

    code, out = run('validate', fixture('cfg-mob.cfg'))
    assert code == 1
    assert "check a generic: FAIL" in out
    print("✅ 校验失败检测正常")


def test_input_errors():
    """测试输入错误返回 2"""
    print("\n🔍 测试输入错误...")
    assert run('frobnicate')[0] == 2
    assert run('validate', fixture('missing.cfg'))[0] == 2
    assert run('act', fixture('cfg-or2.cfg'), '--word', 'a^0')[0] == 2
    with tempfile.TemporaryDirectory() as tmp:
        for text in ("n two\n", "n 2\nb-order 1 1\na-flips 0 0\nb-flips 0 0\n"):
            path = os.path.join(tmp, 'broken.cfg')
            with open(path, 'w', encoding='utf-8') as f:
                f.write(text)
            code, out = run('validate', path)
            assert code == 2
            assert out == ''
    print("✅ 输入错误处理正常")


def test_segments_and_joinability():
    """测试线段报告"""
    print("\n🔍 测试线段与可连接性...")
    code, out = run('segments', fixture('cfg-no2.cfg'))
    assert code == 0
    assert "seg 0 fwd sided=" in out
    assert "init_side=" in out

    code, out = run('joinability', fixture('cfg-no2.cfg'))
    assert code == 0
    assert "class 0:" in out
    assert "check P0 non-joinable>=1: pass" in out
    print("✅ 线段报告正常")


def test_act_identity():
    """测试单位词作用"""
    print("\n🔍 测试扭转词作用...")
    code, out = run('act', fixture('cfg-or2.cfg'), '--word', '1', '--seed', 'b')
    assert code == 0
    assert "I(w(b),a)=2 I(w(b),b)=0" in out
    print("✅ 扭转词作用正常")


def test_twist_refused_on_mobius():
    """测试默比乌斯配置拒绝扭转"""
    print("\n🔍 测试非 generic 配置...")
    code, out = run('twist', fixture('cfg-mob.cfg'), fixture('cfg-mob-c.crv'))
    assert code == 1
    assert "refused" in out
    code, out = run('twist', fixture('cfg-mob4.cfg'), fixture('cfg-mob4-c.crv'))
    assert code == 1
    assert "refused" in out
    print("✅ 非 generic 配置被拒绝")


def test_twist_on_torus():
    """测试环面上的扭转报告"""
    print("\n🔍 测试扭转...")
    code, out = run('twist', fixture('cfg-or2.cfg'), fixture('cfg-or2-b.crv'), '--core', 'a', '--k', '1')
    assert code == 0, out
    assert "stage d: |.∩a|=2 |.∩b|=4 steps=6" in out
    assert "check no bigon with a: pass" in out
    print("✅ 扭转报告正常")


def test_twist_negative_power_and_stages():
    """测试负幂扭转与阶段输出"""
    print("\n🔍 测试负幂扭转与阶段文件...")
    code, out = run('twist', fixture('cfg-or2.cfg'), fixture('cfg-or2-b.crv'), '-k', '-1')
    assert code == 0, out
    assert "stage d: |.∩a|=2 |.∩b|=4 steps=6" in out
    assert "raw_a=2 raw_b=4 min_a=2 min_b=4" in out

    with tempfile.TemporaryDirectory() as tmp:
        code, out = run('twist', fixture('cfg-or2.cfg'), fixture('cfg-or2-b.crv'), '--emit-stages', tmp)
        assert code == 0, out
        for label in ('d', 'd1', 'd2', 'd3'):
            assert os.path.exists(os.path.join(tmp, f"cfg-or2-b-{label}.crv"))
        with open(os.path.join(tmp, 'cfg-or2-b.trace'), encoding='utf-8') as f:
            assert f.read().startswith("trace-version 1\ncurve cfg-or2-b\ncore a\nk 1\n")
    print("✅ 阶段输出正常")


def test_reduce_with_oracle():
    """测试约化、有界搜索比较和输出文件"""
    print("\n🔍 测试约化...")
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, 'pushed.crv')
        with open(path, 'w', encoding='utf-8') as f:
            f.write("curve-version 1\nstep 0 Bp Tm\nstep 1 Bm Tp\n")
        code, out = run('reduce', fixture('cfg-or2.cfg'), path, '--against', 'b', '--oracle')
        assert code == 0, out
        assert "min_b=0" in out
        assert "check oracle b: pass" in out
        assert os.path.exists(os.path.join(tmp, 'pushed-min-b.crv'))
        assert os.path.exists(os.path.join(tmp, 'pushed-min-b.trace'))
    print("✅ 约化正常")


def _result_matches_code(code: int, out: str) -> bool:
    return (code == 0) == out.endswith("RESULT pass\n")


def test_audit_commands():
    """测试审计类命令的报告行"""
    print("\n🔍 测试审计命令...")
    code, out = run('pattern-audit', '--max-n', '3', '--max-steps', '2')
    assert "configs=" in out
    assert _result_matches_code(code, out)

    code, out = run('pingpong', fixture('cfg-or2.cfg'), '--max-k', '1', '--samples', '2', '--max-steps', '2')
    assert "rows=" in out
    assert "outside_formula=" in out
    assert _result_matches_code(code, out)

    code, out = run('--jobs', '1', 'freeness', fixture('cfg-no2.cfg'), '--max-len', '1')
    assert _result_matches_code(code, out)
    if code == 0:
        assert "per-length length=1 words=4" in out
        assert "seeds " in out
    print("✅ 审计命令正常")


def main():
    """运行所有测试"""
    print("=" * 60)
    print("twistlab - 命令行测试")
    print("=" * 60)

    tests = [
        ("配置校验", test_validate_pass),
        ("校验失败", test_validate_fail),
        ("输入错误", test_input_errors),
        ("线段与可连接性", test_segments_and_joinability),
        ("扭转词作用", test_act_identity),
        ("拒绝扭转", test_twist_refused_on_mobius),
        ("扭转", test_twist_on_torus),
        ("负幂与阶段", test_twist_negative_power_and_stages),
        ("约化", test_reduce_with_oracle),
        ("审计命令", test_audit_commands),
    ]
    results = []
    for name, test in tests:
        try:
            test()
            results.append((name, True))
        except AssertionError as e:
            print(f"❌ {name}: {e}")
            results.append((name, False))

    # 测试结果汇总
    print("\n" + "=" * 60)
    print("测试结果汇总")
    print("=" * 60)

    passed = sum(1 for _, result in results if result)
    total = len(results)

    for name, result in results:
        status = "✅ 通过" if result else "❌ 失败"
        print(f"{name}: {status}")

    print(f"\n总计: {passed}/{total} 通过")

    if passed == total:
        print("\n🎉 所有测试通过！")
    else:
        print(f"\n⚠️  {total - passed} 个测试失败")

    print("=" * 60)


if __name__ == "__main__":
    main()
