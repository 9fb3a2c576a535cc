"""
距离模块
类型距离、曼哈顿距离与精确契约距离
"""

from .metrics import dist_bool, dist_int, dist_str, manhattan, ValueDomain
from .oracle import gamma_exact, nearest_model, oracle_domain, regex_edit_distance

__all__ = [
    'dist_bool',
    'dist_int',
    'dist_str',
    'manhattan',
    'ValueDomain',
    'gamma_exact',
    'nearest_model',
    'oracle_domain',
    'regex_edit_distance'
]
