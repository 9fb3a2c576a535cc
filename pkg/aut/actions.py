"""
事件动作模块 - 事件驱动应用漏洞利用自动生成系统
GUI动作（click/type）与利用脚本的读写
"""

import re
from dataclasses import dataclass
from typing import List, Sequence, Union

from exceptions import ScriptSyntaxError, UnknownAction

CLICK = 'click'
TYPE = 'type'
EVENT_LABELS = (CLICK, TYPE)


@dataclass(frozen=True)
class Click:
    x: int
    y: int

    @property
    def label(self) -> str:
        return CLICK


@dataclass(frozen=True)
class Type:
    text: str

    @property
    def label(self) -> str:
        return TYPE


Action = Union[Click, Type]


def check_action(action) -> Action:
    if isinstance(action, Click) and isinstance(action.x, int) and isinstance(action.y, int):
        return action
    if isinstance(action, Type) and isinstance(action.text, str):
        return action
    raise UnknownAction(f"未定义的事件: {action!r}")


def escape_text(text: str) -> str:
    return '"' + text.replace('\\', '\\\\').replace('"', '\\"') + '"'


def format_action(action: Action) -> str:
    if isinstance(action, Click):
        return f"click {action.x} {action.y}"
    if isinstance(action, Type):
        return f"type {escape_text(action.text)}"
    raise UnknownAction(f"未定义的事件: {action!r}")


def format_script(actions: Sequence[Action]) -> str:
    """每行一个动作: click <x> <y> 或 type "<转义字符串>" """
    return ''.join(format_action(a) + '\n' for a in actions)


_CLICK_LINE = re.compile(r'^click\s+(-?\d+)\s+(-?\d+)$')
_TYPE_LINE = re.compile(r'^type\s+"((?:\\.|[^"\\])*)"$')


def parse_script(text: str) -> List[Action]:
    """
    解析利用脚本，空行与 # 注释行被忽略
    :raises ScriptSyntaxError: 行格式错误
    """
    actions: List[Action] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        match = _CLICK_LINE.match(line)
        if match:
            actions.append(Click(int(match.group(1)), int(match.group(2))))
            continue
        match = _TYPE_LINE.match(line)
        if match:
            actions.append(Type(re.sub(r'\\(.)', r'\1', match.group(1))))
            continue
        raise ScriptSyntaxError(f"无法解析的动作: {line!r}", number)
    return actions
