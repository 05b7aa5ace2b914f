"""
测试夹具存取模块：fixtures/*.cfg 与 fixtures/*.crv
"""
import os
from contextlib import contextmanager
from typing import Dict, List

from loguru import logger

from config import FIXTURES_DIR
from curves import parse_curve
from models import Configuration, Curve, ReductionEvent
from surface import parse_configuration


class FixtureStore:
    """夹具文件管理类"""

    def __init__(self, root: str = FIXTURES_DIR):
        self.root = root
        os.makedirs(self.root, exist_ok=True)

    def path_of(self, name: str, suffix: str) -> str:
        if os.path.isabs(name) or os.path.dirname(name):
            return name
        if not name.endswith(suffix):
            name += suffix
        return os.path.join(self.root, name)

    @contextmanager
    def open_file(self, path: str, mode: str = 'r'):
        """打开夹具文件的上下文管理器"""
        try:
            with open(path, mode, encoding='utf-8') as f:
                yield f
        except Exception as e:
            logger.error(f"夹具文件操作失败 {path}: {e}")
            raise

    def load_configuration(self, name: str) -> Configuration:
        path = self.path_of(name, '.cfg')
        with self.open_file(path) as f:
            text = f.read()
        stem = os.path.splitext(os.path.basename(path))[0]
        return parse_configuration(text, stem)

    def load_curve(self, name: str) -> Curve:
        path = self.path_of(name, '.crv')
        with self.open_file(path) as f:
            text = f.read()
        return parse_curve(text, os.path.splitext(os.path.basename(path))[0])

    def save_configuration(self, cfg: Configuration, name: str = None) -> str:
        path = self.path_of(name or cfg.name, '.cfg')
        with self.open_file(path, 'w') as f:
            f.write(cfg.to_text())
        logger.info(f"写入配置 {path}")
        return path

    def save_curve(self, curve: Curve, name: str = None) -> str:
        path = self.path_of(name or curve.name, '.crv')
        with self.open_file(path, 'w') as f:
            f.write(curve.to_text())
        logger.info(f"写入曲线 {path}")
        return path

    def save_trace(self, events: List[ReductionEvent], name: str, header: Dict[str, str]) -> str:
        """约化轨迹：版本行、头部键值行，然后每个事件一行"""
        path = self.path_of(name, '.trace')
        with self.open_file(path, 'w') as f:
            f.write("trace-version 1\n")
            for key, value in header.items():
                f.write(f"{key} {value}\n")
            for event in events:
                f.write(event.to_line() + "\n")
        logger.info(f"写入约化轨迹 {path}: {len(events)} 个事件")
        return path

    def list_fixtures(self, suffix: str = '.cfg') -> List[str]:
        """按文件名排序的夹具列表"""
        return sorted(name for name in os.listdir(self.root) if name.endswith(suffix))


# 全局夹具存取实例
store = FixtureStore()
