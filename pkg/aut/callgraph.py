"""
调用图模块 - 事件驱动应用漏洞利用自动生成系统
目标过程识别与到目标的调用图距离
"""

import logging
from typing import Dict, Iterable, Optional, Set

import networkx as nx

from aut.model import AutModel, VulnSpec

logger = logging.getLogger(__name__)


def build_call_graph(model: AutModel) -> nx.DiGraph:
    """过程为节点，页面控件目标与失败重定向为边"""
    graph = nx.DiGraph()
    graph.add_nodes_from(model.procedures)
    for name, proc in model.procedures.items():
        for target in proc.targets():
            graph.add_edge(name, target)
    return graph


def target_procedures(model: AutModel, vuln: VulnSpec) -> Set[str]:
    """声明了与漏洞签名同名汇点的过程"""
    return {name for name, proc in model.procedures.items()
            if any(sink.label == vuln.signature for sink in proc.sinks)}


def call_graph_distances(model: AutModel, targets: Iterable[str]) -> Dict[str, Optional[int]]:
    """
    各过程到最近目标过程的最短路径长度
    :param model: AUT模型
    :param targets: 目标过程集合
    :return: {过程: 距离}，不可达为None
    """
    targets = set(targets)
    distances: Dict[str, Optional[int]] = {name: None for name in model.procedures}
    if not targets:
        return distances

    reverse = build_call_graph(model).reverse(copy=False)
    lengths = nx.multi_source_dijkstra_path_length(reverse, targets)
    distances.update({name: int(length) for name, length in lengths.items()})

    unreachable = [name for name, d in distances.items() if d is None]
    if unreachable:
        logger.info(f"无法到达目标的过程: {', '.join(sorted(unreachable))}")
    return distances


def distance_ceiling(distances: Dict[str, Optional[int]]) -> int:
    """所有调用都不可达时的调用距离：最大有限距离 + 2"""
    finite = [d for d in distances.values() if d is not None]
    return (max(finite) if finite else 0) + 2
