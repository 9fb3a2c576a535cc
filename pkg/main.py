"""
主程序入口 - 事件驱动应用漏洞利用自动生成系统
提供命令行界面和程序入口
"""

import argparse
import logging
import os
import sys
from dataclasses import asdict, dataclass
from typing import List, Optional

# 添加当前目录到Python路径
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config import ENGINE_CONFIG, STORAGE_CONFIG, SUMMARY_FORMATS
from exceptions import ConfigError, ExploitSearchError
from utils import setup_logging, ensure_directories
from aut.model import load_model, load_vuln_spec
from aut.actions import format_action, parse_script
from aut.simulator import create_simulator
from ccea.engine import run_workers, create_engine_config
from ccea.reporter import create_reporter, dump_smt

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'fixtures')
DEFAULT_MODEL = os.path.join(FIXTURE_DIR, 'scw_model.json')
DEFAULT_VULN = os.path.join(FIXTURE_DIR, 'scw_xss.json')

EXIT_SUCCESS = 0
EXIT_NOT_FOUND = 1
EXIT_ERROR = 2


@dataclass
class RunConfig:
    """一次搜索运行的配置，命令行参数覆盖 ENGINE_CONFIG 的默认值"""
    model_path: str = DEFAULT_MODEL
    vuln_path: str = DEFAULT_VULN
    workers: int = ENGINE_CONFIG['workers']
    max_generations: int = ENGINE_CONFIG['max_generations']
    population_size: int = ENGINE_CONFIG['population_size']
    contract_population_size: int = ENGINE_CONFIG['contract_population_size']
    crossover_prob: float = ENGINE_CONFIG['crossover_prob']
    mutation_prob: float = ENGINE_CONFIG['mutation_prob']
    k_click: int = ENGINE_CONFIG['k_click']
    k_type: int = ENGINE_CONFIG['k_type']
    seed: int = ENGINE_CONFIG['seed']
    output_dir: str = STORAGE_CONFIG['output_dir']
    smt_dir: Optional[str] = None
    summary_format: str = 'csv'

    def validate(self) -> 'RunConfig':
        """
        :raises ConfigError: 参数超出允许范围
        """
        if self.workers < 1:
            raise ConfigError(f"工作进程数必须至少为1: {self.workers}")
        if self.max_generations < 0:
            raise ConfigError(f"代数上限不能为负: {self.max_generations}")
        if self.population_size < 1 or self.contract_population_size < 1:
            raise ConfigError("种群大小必须至少为1")
        for name in ('crossover_prob', 'mutation_prob'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} 必须在[0, 1]之间: {value}")
        if self.k_click < 0 or self.k_type < 0:
            raise ConfigError("动作计数不能为负")
        if self.k_click + self.k_type < 1:
            raise ConfigError("测试至少需要一个动作")
        if self.summary_format not in SUMMARY_FORMATS:
            raise ConfigError(f"不支持的摘要格式: {self.summary_format}")
        return self

    def engine_config(self) -> dict:
        """转换为引擎配置，交叉位置数不超过动作总数"""
        overrides = {key: value for key, value in asdict(self).items() if key in ENGINE_CONFIG}
        overrides['crossover_positions'] = min(ENGINE_CONFIG['crossover_positions'], self.k_click + self.k_type)
        return create_engine_config(**overrides)


class ExploitSearchApp:
    """漏洞利用搜索应用程序"""

    def __init__(self, log_level: Optional[str] = None):
        self.logger = setup_logging(log_level)
        self.logger.info("漏洞利用自动生成系统初始化完成")

    def run(self, cfg: RunConfig) -> int:
        """
        运行协同进化搜索并写出产物
        :param cfg: 运行配置
        :return: 退出码，0 至少一个工作进程成功，1 全部达到代数上限，2 配置或模型错误
        """
        try:
            cfg.validate()
            model = load_model(cfg.model_path)
            vuln = load_vuln_spec(cfg.vuln_path)
            ensure_directories(cfg.output_dir)

            if cfg.smt_dir:
                dump_smt(model, vuln, cfg.smt_dir)
                print(f"✅ SMT-LIB文件已导出到 {cfg.smt_dir}")

            print(f"正在运行 {cfg.workers} 个工作进程，代数上限 {cfg.max_generations}...")
            results = run_workers(model, vuln, cfg.engine_config())

        except (ExploitSearchError, OSError) as e:
            self.logger.error(f"运行失败: {e}")
            print(f"❌ 运行失败: {e}")
            return EXIT_ERROR

        reporter = create_reporter(cfg.output_dir)
        reporter.write_all(results, cfg.summary_format)

        print("\n" + "=" * 60)
        print(reporter.generate_summary_report(results))
        print("=" * 60)

        succeeded = [s for s in results if s.succeeded]
        if succeeded:
            print(f"\n✅ {len(succeeded)}/{len(results)} 个工作进程找到利用，结果保存在 {cfg.output_dir}")
            return EXIT_SUCCESS
        print(f"\n❌ 所有工作进程都达到代数上限，结果保存在 {cfg.output_dir}")
        return EXIT_NOT_FOUND

    def replay(self, model_path: str, vuln_path: str, script_path: str) -> int:
        """
        重放利用脚本并判断漏洞是否被触发
        :return: 退出码，0 触发，1 未触发，2 文件或脚本错误
        """
        try:
            model = load_model(model_path)
            vuln = load_vuln_spec(vuln_path)
            with open(script_path, 'r', encoding='utf-8') as f:
                actions = parse_script(f.read())
        except (ExploitSearchError, OSError) as e:
            self.logger.error(f"重放失败: {e}")
            print(f"❌ 重放失败: {e}")
            return EXIT_ERROR

        trace = create_simulator(model).execute(actions, vuln)
        for line in describe_trace(actions, trace):
            print(line)

        if trace.triggered is not None:
            print(f"TRIGGERED: {trace.triggered.procedure} / {trace.triggered.label}")
            print(f"payload: {trace.triggered.value}")
            return EXIT_SUCCESS
        print("NOT TRIGGERED")
        return EXIT_NOT_FOUND


def describe_trace(actions, trace) -> List[str]:
    lines = [f"action: {format_action(a)}" for a in actions]
    for invocation in trace.invocations:
        args = ', '.join(f"{name}={value!r}" for name, value in invocation.params)
        lines.append(f"call: {invocation.procedure}({args})")
    for hit in trace.sink_hits:
        lines.append(f"sink: {hit.procedure} / {hit.label} <- {hit.value!r}")
    return lines


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='事件驱动应用漏洞利用自动生成系统')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='日志级别')
    subparsers = parser.add_subparsers(dest='command', required=True)

    run = subparsers.add_parser('run', help='运行协同进化搜索')
    run.add_argument('--aut', default=DEFAULT_MODEL, help='AUT模型文件')
    run.add_argument('--vuln', default=DEFAULT_VULN, help='漏洞规格文件')
    run.add_argument('--workers', type=int, default=ENGINE_CONFIG['workers'], help='工作进程数')
    run.add_argument('--max-gens', type=int, default=ENGINE_CONFIG['max_generations'], help='代数上限')
    run.add_argument('--pop', type=int, default=ENGINE_CONFIG['population_size'], help='测试种群大小')
    run.add_argument('--contract-pop', type=int, default=ENGINE_CONFIG['contract_population_size'],
                     help='契约种群大小')
    run.add_argument('--cx-prob', type=float, default=ENGINE_CONFIG['crossover_prob'], help='交叉概率')
    run.add_argument('--mut-prob', type=float, default=ENGINE_CONFIG['mutation_prob'], help='变异概率')
    run.add_argument('--clicks', type=int, default=ENGINE_CONFIG['k_click'], help='每个测试的click数')
    run.add_argument('--types', type=int, default=ENGINE_CONFIG['k_type'], help='每个测试的type数')
    run.add_argument('--seed', type=int, default=ENGINE_CONFIG['seed'], help='主随机种子')
    run.add_argument('--out', default=STORAGE_CONFIG['output_dir'], help='输出目录')
    run.add_argument('--dump-smt', metavar='DIR', help='导出SMT-LIB文件的目录')
    run.add_argument('--summary-format', choices=SUMMARY_FORMATS, default='csv', help='摘要表格式')

    replay = subparsers.add_parser('replay', help='重放利用脚本')
    replay.add_argument('script', help='利用脚本文件')
    replay.add_argument('--aut', default=DEFAULT_MODEL, help='AUT模型文件')
    replay.add_argument('--vuln', default=DEFAULT_VULN, help='漏洞规格文件')
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        model_path=args.aut,
        vuln_path=args.vuln,
        workers=args.workers,
        max_generations=args.max_gens,
        population_size=args.pop,
        contract_population_size=args.contract_pop,
        crossover_prob=args.cx_prob,
        mutation_prob=args.mut_prob,
        k_click=args.clicks,
        k_type=args.types,
        seed=args.seed,
        output_dir=args.out,
        smt_dir=args.dump_smt,
        summary_format=args.summary_format,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """主函数"""
    args = build_parser().parse_args(argv)
    app = ExploitSearchApp(args.log_level)

    if args.command == 'replay':
        return app.replay(args.aut, args.vuln, args.script)
    return app.run(config_from_args(args))


if __name__ == '__main__':
    sys.exit(main())
