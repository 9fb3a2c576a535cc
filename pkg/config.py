"""
配置文件 - 事件驱动应用漏洞利用自动生成系统
"""

import os

# 可打印ASCII字符集（94个），契约语言中的Σ即为该集合
ALPHABET = ''.join(chr(c) for c in range(33, 127))

# 模型文件与漏洞规格文件的版本号
SCHEMA_VERSION = 1

# 模拟器配置
SIMULATOR_CONFIG = {
    'canvas_width': 128,
    'canvas_height': 128,
    'control_width': 64,
    'control_height': 32,
    'max_text_length': 30,
    'max_redirects': 16
}

# 协同进化引擎配置
ENGINE_CONFIG = {
    'population_size': 100,
    'contract_population_size': 32,
    'tournament_size': 3,
    'crossover_positions': 2,
    'crossover_prob': 0.95,
    'mutation_prob': 0.06,
    'max_generations': 50000,
    'workers': 10,
    'k_click': 4,
    'k_type': 1,
    'contract_crossover_prob': 0.5,
    'contract_mutation_prob': 0.5,
    'query_char_bias': 0.5,
    'trace_cache_size': 50000,
    'log_every': 1000,
    'seed': 0
}

# 契约模型采样配置
SAMPLER_CONFIG = {
    'budget': 10000,
    'max_distinct_models': 32,
    'expected_length': 8,
    'max_length': 30,
    'int_min': -32,
    'int_max': 32,
    'max_dnf_clauses': 256
}

# 精确契约距离（枚举）配置
ORACLE_CONFIG = {
    'max_string_length': 8,
    'int_min': -32,
    'int_max': 32,
    'budget': 2000000
}

# 数据存储配置
STORAGE_CONFIG = {
    'output_dir': os.getenv('EXPLOIT_SEARCH_OUTPUT', 'output'),
    'log_dir': os.getenv('EXPLOIT_SEARCH_LOGS', 'logs')
}

# 日志配置
LOGGING_CONFIG = {
    'level': 'INFO',
    'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    'file_enabled': True,
    'console_enabled': True
}

# 运行摘要导出格式
SUMMARY_FORMATS = ['csv', 'excel', 'json']
