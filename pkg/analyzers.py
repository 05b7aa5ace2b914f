"""
统计分析模块
"""
import pandas as pd
from typing import Dict, List, Any

from models import PingPongReport, WitnessReport


class AuditAnalyzer:
    """审计与见证结果分析器"""

    def __init__(self, audit: PingPongReport = None, witnesses: List[WitnessReport] = None):
        self.rows = self._load_rows(audit)
        self.witnesses = self._load_witnesses(witnesses or [])

    def _load_rows(self, audit: PingPongReport) -> pd.DataFrame:
        """加载审计行到DataFrame"""
        if audit is None:
            return pd.DataFrame()
        return pd.DataFrame(audit.rows)

    def _load_witnesses(self, witnesses: List[WitnessReport]) -> pd.DataFrame:
        data = [w.to_dict() for w in witnesses]
        df = pd.DataFrame(data)
        if not df.empty:
            df['chain_length'] = df['chain'].str.count('>') + 1
        return df

    def get_per_k_stats(self) -> List[Dict[str, Any]]:
        """按扭转核心和幂次统计"""
        if self.rows.empty:
            return []

        per_k = self.rows.groupby(['core', 'k']).agg(
            count=('curve', 'count'),
            passed=('ok', 'sum'),
        ).reset_index()
        per_k['pass_rate'] = per_k['passed'] / per_k['count'] * 100

        averages = {}
        if 'min_a' in self.rows.columns:
            means = self.rows.groupby(['core', 'k'])[['min_a', 'min_b']].mean()
            averages = {key: row for key, row in means.iterrows()}

        result = []
        for _, row in per_k.iterrows():
            key = (row['core'], row['k'])
            means = averages.get(key)
            result.append({
                'core': row['core'],
                'k': int(row['k']),
                'count': int(row['count']),
                'passed': int(row['passed']),
                'pass_rate': round(row['pass_rate'], 2),
                'avg_min_a': round(means['min_a'], 2) if means is not None else 0,
                'avg_min_b': round(means['min_b'], 2) if means is not None else 0,
            })
        return result

    def get_per_length_stats(self) -> List[Dict[str, Any]]:
        """按词长统计见证"""
        if self.witnesses.empty:
            return []

        per_length = self.witnesses.groupby('length').agg(
            words=('word', 'count'),
            witnessed=('conclusion', 'sum'),
            avg_chain=('chain_length', 'mean'),
        ).reset_index()

        return [
            {
                'length': int(row['length']),
                'words': int(row['words']),
                'witnessed': int(row['witnessed']),
                'avg_chain': round(row['avg_chain'], 2),
            }
            for _, row in per_length.iterrows()
        ]

    def get_seed_distribution(self) -> Dict[str, int]:
        """见证起点 a/b 的分布"""
        if self.witnesses.empty:
            return {}
        return {seed: int(count) for seed, count in self.witnesses['seed'].value_counts().sort_index().items()}
