"""
工具函数模块 - 事件驱动应用漏洞利用自动生成系统
"""

import os
import logging
from datetime import datetime
from fractions import Fraction
from typing import Optional

import pandas as pd

from config import STORAGE_CONFIG, LOGGING_CONFIG


def setup_logging(level: Optional[str] = None):
    """
    设置日志配置
    :param level: 日志级别，默认取 LOGGING_CONFIG['level']
    :return: 根日志记录器
    """
    level_name = (level or LOGGING_CONFIG['level']).upper()
    handlers = []

    if LOGGING_CONFIG['file_enabled']:
        log_dir = STORAGE_CONFIG['log_dir']
        if not os.path.exists(log_dir):
            os.makedirs(log_dir)
        log_file = os.path.join(log_dir, f"exploit_search_{datetime.now().strftime('%Y%m%d')}.log")
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))

    if LOGGING_CONFIG['console_enabled']:
        handlers.append(logging.StreamHandler())

    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format=LOGGING_CONFIG['format'],
        handlers=handlers,
        force=True
    )

    return logging.getLogger(__name__)


def ensure_directories(*directories: str):
    """
    确保目录存在
    :param directories: 需要创建的目录，默认创建输出和日志目录
    """
    if not directories:
        directories = (STORAGE_CONFIG['output_dir'], STORAGE_CONFIG['log_dir'])

    for directory in directories:
        if directory and not os.path.exists(directory):
            os.makedirs(directory)
            logging.getLogger(__name__).info(f"创建目录: {directory}")


def save_data(data: pd.DataFrame, file_path: str, format_type: str = 'csv') -> Optional[str]:
    """
    保存数据到文件
    :param data: 要保存的DataFrame
    :param file_path: 文件路径（不含扩展名时按格式补全）
    :param format_type: 文件格式 ('csv', 'excel', 'json')
    :return: 实际写入的文件路径，失败时返回None
    """
    ensure_directories(os.path.dirname(file_path))

    try:
        format_type = format_type.lower()
        if format_type == 'csv':
            if not file_path.endswith('.csv'):
                file_path += '.csv'
            data.to_csv(file_path, index=False, encoding='utf-8')
        elif format_type == 'excel':
            if not file_path.endswith('.xlsx'):
                file_path += '.xlsx'
            data.to_excel(file_path, index=False, engine='openpyxl')
        elif format_type == 'json':
            if not file_path.endswith('.json'):
                file_path += '.json'
            data.to_json(file_path, orient='records', force_ascii=False, indent=2)
        else:
            raise ValueError(f"不支持的导出格式: {format_type}")

        logging.getLogger(__name__).info(f"数据已保存到: {file_path}")
        return file_path

    except Exception as e:
        logging.getLogger(__name__).error(f"保存数据时出错: {e}")
        return None


def format_fitness(value) -> str:
    """
    格式化适应度显示
    :param value: Fraction、整数或无穷大
    :return: 格式化后的字符串
    """
    if value is None:
        return "N/A"
    if isinstance(value, float) and value == float('inf'):
        return "∞"
    if isinstance(value, Fraction) and value.denominator != 1:
        return f"{value} (≈{float(value):.4f})"
    return str(value)


def format_duration(seconds: float) -> str:
    """
    格式化耗时显示
    :param seconds: 秒数
    :return: 格式化后的字符串
    """
    if seconds >= 3600:
        return f"{seconds / 3600:.2f}小时"
    elif seconds >= 60:
        return f"{seconds / 60:.2f}分钟"
    return f"{seconds:.2f}秒"
