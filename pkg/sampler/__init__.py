"""
契约采样模块
满足向量的生成（带模型失效）与SMT-LIB导出
"""

from .stream import ModelStream, SampleOutcome, next_model, seed_population
from .smtlib import export_smtlib

__all__ = [
    'ModelStream',
    'SampleOutcome',
    'next_model',
    'seed_population',
    'export_smtlib'
]
