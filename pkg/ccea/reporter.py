"""
运行结果输出模块 - 事件驱动应用漏洞利用自动生成系统
适应度曲线、利用脚本、运行摘要与SMT-LIB导出
"""

import os
import logging
from datetime import datetime
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from config import STORAGE_CONFIG
from aut.actions import format_script
from aut.model import AutModel, VulnSpec
from sampler.smtlib import export_smtlib
from ccea.engine import WorkerStats
from utils import ensure_directories, format_duration, format_fitness, save_data


class RunReporter:
    """把工作进程的统计结果写入输出目录"""

    def __init__(self, output_dir: str = None):
        self.output_dir = output_dir or STORAGE_CONFIG['output_dir']
        self.logger = logging.getLogger(__name__)

    def digest_frame(self, stats: WorkerStats) -> pd.DataFrame:
        """
        每代最优适应度曲线
        :param stats: 工作进程统计
        :return: 列为 X（代数）、Y（最优适应度）的表
        """
        if stats.logbook is not None and len(stats.logbook):
            generations, best = stats.logbook.select('gen', 'best')
        else:
            generations = [n for n, _ in stats.history]
            best = [float(phi) for _, phi in stats.history]
        return pd.DataFrame({'X': generations, 'Y': best})

    def write_digest(self, stats: WorkerStats) -> Optional[str]:
        path = os.path.join(self.output_dir, f"digest_test{stats.worker_id}.csv")
        return save_data(self.digest_frame(stats), path, 'csv')

    def write_exploit(self, stats: WorkerStats) -> Optional[str]:
        """成功的工作进程写出利用脚本"""
        if not stats.succeeded:
            return None
        ensure_directories(self.output_dir)
        path = os.path.join(self.output_dir, f"exploit_{stats.worker_id}.txt")
        try:
            with open(path, 'w', encoding='utf-8') as f:
                f.write(format_script(stats.best))
        except OSError as e:
            self.logger.error(f"写入利用脚本时出错: {e}")
            return None
        self.logger.info(f"利用脚本已保存到: {path}")
        return path

    def summary_frame(self, results: Sequence[WorkerStats]) -> pd.DataFrame:
        rows = []
        for stats in results:
            speed = stats.generations / stats.wall_time if stats.wall_time > 0 else np.nan
            rows.append({
                '工作进程': stats.worker_id,
                '种子': stats.seed,
                '终止原因': stats.reason,
                '代数': stats.generations,
                '耗时(秒)': round(stats.wall_time, 3),
                '代/秒': round(speed, 2) if not np.isnan(speed) else speed,
                '最优适应度': float(stats.best_fitness) if stats.best_fitness is not None else np.nan,
            })
        return pd.DataFrame(rows)

    def generate_summary_report(self, results: Sequence[WorkerStats]) -> str:
        """
        生成运行摘要报告
        :param results: 全部工作进程统计
        :return: 摘要报告文本
        """
        generations = np.array([s.generations for s in results], dtype=float)
        succeeded = [s for s in results if s.succeeded]

        report_lines = []
        report_lines.append("=" * 50)
        report_lines.append("漏洞利用搜索运行报告")
        report_lines.append("=" * 50)

        report_lines.append(f"\n工作进程数：{len(results)}")
        report_lines.append(f"成功数：{len(succeeded)}")
        if len(generations):
            report_lines.append(f"平均代数：{generations.mean():.1f}")
            report_lines.append(f"代数中位数：{np.median(generations):.1f}")
        if succeeded:
            first = min(succeeded, key=lambda s: s.generations)
            report_lines.append(f"最快成功：工作进程 {first.worker_id}，第{first.generations - 1}代")

        report_lines.append("\n【各工作进程】")
        for stats in results:
            reason = '找到利用' if stats.succeeded else '达到代数上限'
            speed = stats.generations / stats.wall_time if stats.wall_time > 0 else 0.0
            report_lines.append(
                f"#{stats.worker_id} {reason}，{stats.generations}代，"
                f"耗时 {format_duration(stats.wall_time)}，{speed:.1f}代/秒，"
                f"最优适应度 {format_fitness(stats.best_fitness)}"
            )

        if succeeded:
            report_lines.append("\n【触发的汇点】")
            for stats in succeeded:
                hit = stats.trace.triggered if stats.trace is not None else None
                if hit is not None:
                    report_lines.append(f"#{stats.worker_id} {hit.procedure} / {hit.label}: {hit.value}")

        report_lines.append("\n" + "=" * 50)
        report_lines.append("报告生成时间：" + datetime.now().strftime('%Y-%m-%d %H:%M:%S'))

        return "\n".join(report_lines)

    def write_summary(self, results: Sequence[WorkerStats], format_type: str = 'csv') -> Optional[str]:
        """写出 summary.<格式> 与 summary.txt"""
        path = save_data(self.summary_frame(results), os.path.join(self.output_dir, 'summary'), format_type)
        text_path = os.path.join(self.output_dir, 'summary.txt')
        try:
            with open(text_path, 'w', encoding='utf-8') as f:
                f.write(self.generate_summary_report(results) + "\n")
        except OSError as e:
            self.logger.error(f"写入摘要报告时出错: {e}")
        return path

    def write_all(self, results: Sequence[WorkerStats], format_type: str = 'csv') -> List[str]:
        """写出全部产物，返回成功写入的路径"""
        written = []
        for stats in results:
            written.append(self.write_digest(stats))
            written.append(self.write_exploit(stats))
        written.append(self.write_summary(results, format_type))
        return [path for path in written if path]


def dump_smt(model: AutModel, vuln: VulnSpec, directory: str) -> List[str]:
    """
    每个调用契约写出 <过程>.smt2，漏洞契约写出 vulnerability.smt2
    """
    ensure_directories(directory)
    documents = [(name, proc.call_contract) for name, proc in model.procedures.items()]
    documents.append(('vulnerability', vuln.contract))

    paths = []
    for name, contract in documents:
        path = os.path.join(directory, f"{name}.smt2")
        with open(path, 'w', encoding='utf-8') as f:
            f.write(export_smtlib(contract))
        paths.append(path)
    logging.getLogger(__name__).info(f"已导出{len(paths)}个SMT-LIB文件到: {directory}")
    return paths


def create_reporter(output_dir: str = None) -> RunReporter:
    """创建结果输出器实例"""
    return RunReporter(output_dir)
