"""
工具函数模块
"""
import csv
import hashlib
import os
from datetime import datetime
from typing import Dict, List, Optional

import pandas as pd

from config import EXPORTS_DIR
from models import Configuration


def config_digest(cfg: Configuration) -> str:
    """规范配置文本的 sha256 前 16 位"""
    return hashlib.sha256(cfg.to_text().encode('utf-8')).hexdigest()[:16]


def _export_path(filename_prefix: str, suffix: str) -> str:
    filename = f"{filename_prefix}_{datetime.now().strftime('%Y%m%d_%H%M%S')}.{suffix}"
    return os.path.join(EXPORTS_DIR, filename)


def export_rows_to_csv(rows: List[Dict], filename_prefix: str = "audit_export",
                       columns: Optional[List[str]] = None) -> str:
    """导出审计行到CSV文件

    Args:
        rows: 字典行
        filename_prefix: 文件名前缀
        columns: 列顺序，None 表示按首次出现的顺序

    Returns:
        导出文件的完整路径
    """
    if columns is None:
        columns = []
        for row in rows:
            columns += [key for key in row if key not in columns]
    filepath = _export_path(filename_prefix, 'csv')

    # utf-8-sig 带 BOM
    with open(filepath, 'w', newline='', encoding='utf-8-sig') as f:
        writer = csv.DictWriter(f, fieldnames=columns, extrasaction='ignore')
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return filepath


def export_rows_to_xlsx(sheets: Dict[str, List[Dict]], filename_prefix: str = "audit_export") -> str:
    """每个表一张工作表，导出到 xlsx"""
    filepath = _export_path(filename_prefix, 'xlsx')
    with pd.ExcelWriter(filepath, engine='openpyxl') as writer:
        for sheet_name, rows in sheets.items():
            pd.DataFrame(rows).to_excel(writer, index=False, sheet_name=sheet_name[:31])
    return filepath


def format_check(name: str, passed: bool, detail: str = '') -> str:
    """报告中的一行检查结果"""
    line = f"check {name}: {'pass' if passed else 'FAIL'}"
    return f"{line} ({detail})" if detail else line
