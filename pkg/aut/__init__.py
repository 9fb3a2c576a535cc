"""
AUT模拟模块
被测应用模型加载、GUI事件执行与调用图距离
"""

from .model import load_model, load_vuln_spec, AutModel, VulnSpec
from .actions import Click, Type, format_script, parse_script
from .simulator import execute_test, is_successful, create_simulator, ExecutionTrace, Invocation, SinkHit
from .callgraph import target_procedures, call_graph_distances, distance_ceiling

__all__ = [
    'load_model',
    'load_vuln_spec',
    'AutModel',
    'VulnSpec',
    'Click',
    'Type',
    'format_script',
    'parse_script',
    'execute_test',
    'is_successful',
    'create_simulator',
    'ExecutionTrace',
    'Invocation',
    'SinkHit',
    'target_procedures',
    'call_graph_distances',
    'distance_ceiling'
]
