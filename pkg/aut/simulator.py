"""
AUT模拟器模块 - 事件驱动应用漏洞利用自动生成系统
确定性地执行GUI事件序列，产生过程调用轨迹并记录汇点执行
"""

import re
import logging
from dataclasses import dataclass
from string import Template
from typing import Any, Dict, List, Optional, Sequence, Tuple

from config import SIMULATOR_CONFIG
from exceptions import UnknownAction, ContractDivisionByZero
from contract.nodes import Contract, VarType
from contract.evaluator import evaluate
from distance.metrics import default_value
from aut.actions import Action, Click, Type, check_action
from aut.model import AutModel, Page, Procedure, VulnSpec

_INTEGER = re.compile(r'^[+-]?\d+$')
_TRUE_TEXT = {'1', 'true', 'on', 'yes'}


@dataclass(frozen=True)
class Invocation:
    """一次过程调用：实参（变换前）与调用时的完整环境（会话 ∪ 实参）"""
    procedure: str
    params: Tuple[Tuple[str, Any], ...]
    env: Tuple[Tuple[str, Any], ...]

    def vector_for(self, contract: Contract) -> tuple:
        """按契约自由变量顺序取出参数向量"""
        env = dict(self.env)
        return tuple(env.get(name, default_value(var_type)) for name, var_type in contract.variables)


@dataclass(frozen=True)
class SinkHit:
    procedure: str
    label: str
    value: str


@dataclass(frozen=True)
class ExecutionTrace:
    invocations: Tuple[Invocation, ...]
    sink_hits: Tuple[SinkHit, ...] = ()
    triggered: Optional[SinkHit] = None

    def procedures(self) -> List[str]:
        return [inv.procedure for inv in self.invocations]

    def triggered_by(self, vuln: VulnSpec) -> Optional[SinkHit]:
        """第一个使漏洞契约成立的签名汇点执行"""
        for hit in self.sink_hits:
            if hit.label == vuln.signature and sink_satisfies(vuln, hit.value):
                return hit
        return None


def sink_satisfies(vuln: VulnSpec, value: str) -> bool:
    env = {name: value for name in vuln.contract.names}
    return evaluate(vuln.contract, env)


class SimState:
    """单个测试执行期间的可变状态"""

    def __init__(self):
        self.page: Optional[Page] = None
        self.focus: Optional[str] = None
        self.fields: Dict[str, str] = {}
        self.session: Dict[str, Any] = {}

    def render(self, page: Optional[Page]):
        self.page = page
        self.focus = None
        self.fields = {name: '' for name in page.fields()} if page is not None else {}


class AutSimulator:
    """被测应用模拟器"""

    def __init__(self, model: AutModel, config: dict = None):
        self.model = model
        self.config = config or SIMULATOR_CONFIG
        self.logger = logging.getLogger(__name__)

    def execute(self, actions: Sequence[Action], vuln: Optional[VulnSpec] = None) -> ExecutionTrace:
        """
        从入口过程开始执行动作序列
        :param actions: click/type 动作
        :param vuln: 给定时填充 triggered
        :return: 执行轨迹
        """
        state = SimState()
        invocations: List[Invocation] = []
        hits: List[SinkHit] = []

        self._invoke(state, self.model.entry, {}, invocations, hits, 0)
        for action in actions:
            check_action(action)
            if isinstance(action, Click):
                self._click(state, action, invocations, hits)
            elif isinstance(action, Type):
                if state.focus is not None:
                    state.fields[state.focus] = action.text[:self.config['max_text_length']]
            else:
                raise UnknownAction(f"未定义的事件: {action!r}")

        trace = ExecutionTrace(tuple(invocations), tuple(hits))
        if vuln is not None:
            trace = ExecutionTrace(trace.invocations, trace.sink_hits, trace.triggered_by(vuln))
        return trace

    def _click(self, state: SimState, action: Click, invocations, hits):
        if state.page is None:
            return
        control = state.page.control_at(action.x, action.y)
        if control is None:
            return
        if control.kind == 'text_field':
            state.focus = control.name
        elif control.kind == 'button':
            self._invoke(state, control.target, dict(state.fields), invocations, hits, 0)
        else:
            self._invoke(state, control.target, dict(control.params), invocations, hits, 0)

    def _invoke(self, state: SimState, name: str, request: Dict[str, Any],
                invocations: List[Invocation], hits: List[SinkHit], depth: int):
        proc = self.model.procedures[name]

        params: Dict[str, Any] = {}
        for param in proc.params:
            if param.source == 'session':
                params[param.name] = state.session.get(param.name, default_value(param.type))
            else:
                params[param.name] = coerce(request.get(param.name), param.type)

        env = {var: default_value(var_type) for var, var_type in self.model.session_types.items()}
        env.update(state.session)
        env.update(params)
        invocations.append(Invocation(name, tuple(params.items()), tuple(sorted(env.items()))))

        if self._guard_holds(proc, env):
            self._pass(state, proc, params, hits)
            return

        if proc.on_fail is None:
            state.render(None)
        elif depth >= self.config['max_redirects']:
            self.logger.warning(f"重定向次数超过{self.config['max_redirects']}次，停在过程 {name}")
            state.render(None)
        else:
            self._invoke(state, proc.on_fail, {}, invocations, hits, depth + 1)

    def _guard_holds(self, proc: Procedure, env: Dict[str, Any]) -> bool:
        try:
            return evaluate(proc.guard, env)
        except ContractDivisionByZero:
            self.logger.debug(f"过程 {proc.name} 的守卫除以零，按不成立处理")
            return False

    def _pass(self, state: SimState, proc: Procedure, params: Dict[str, Any], hits: List[SinkHit]):
        values = dict(params)
        for transform in proc.transforms:
            values[transform.var] = transform.apply(values[transform.var])
        for assign in proc.assigns:
            state.session[assign.var] = values[assign.source]

        scope = {k: _as_text(v) for k, v in state.session.items()}
        scope.update({k: _as_text(v) for k, v in values.items()})
        for sink in proc.sinks:
            hits.append(SinkHit(proc.name, sink.label, Template(sink.expr).safe_substitute(scope)))

        state.render(proc.page)


def _as_text(value: Any) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    return str(value)


def coerce(raw: Any, var_type: VarType) -> Any:
    """把请求中的原始值转换为参数类型，缺失时取类型默认值"""
    if raw is None:
        return default_value(var_type)
    if var_type == VarType.STR:
        return raw if isinstance(raw, str) else _as_text(raw)
    if var_type == VarType.INT:
        if isinstance(raw, bool):
            return int(raw)
        if isinstance(raw, int):
            return raw
        return int(raw) if _INTEGER.match(raw.strip()) else 0
    if isinstance(raw, bool):
        return raw
    if isinstance(raw, int):
        return raw != 0
    return raw.strip().lower() in _TRUE_TEXT


def execute_test(model: AutModel, actions: Sequence[Action], vuln: Optional[VulnSpec] = None) -> ExecutionTrace:
    """执行测试并返回轨迹"""
    return AutSimulator(model).execute(actions, vuln)


def is_successful(trace: ExecutionTrace, vuln: VulnSpec) -> bool:
    """轨迹中是否有签名汇点以满足漏洞契约的值执行"""
    return trace.triggered_by(vuln) is not None


def create_simulator(model: AutModel, config: dict = None) -> AutSimulator:
    """创建AUT模拟器实例"""
    return AutSimulator(model, config)
