"""
AUT模型模块 - 事件驱动应用漏洞利用自动生成系统
加载并校验被测应用模型文件与漏洞规格文件
"""

import re
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config import SCHEMA_VERSION, SIMULATOR_CONFIG
from exceptions import SchemaError, DanglingTarget, ContractTypeError, AlphabetError
from contract.nodes import Contract, VarType
from contract.parser import parse_contract

logger = logging.getLogger(__name__)

_IDENTIFIER = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')

_TYPE_NAMES = {'bool': VarType.BOOL, 'int': VarType.INT, 'str': VarType.STR}


# ---------- 文件模式 ----------

class _Schema(BaseModel):
    model_config = ConfigDict(extra='forbid')


class CanvasSchema(_Schema):
    width: int = Field(default=SIMULATOR_CONFIG['canvas_width'], gt=0)
    height: int = Field(default=SIMULATOR_CONFIG['canvas_height'], gt=0)


class ControlSchema(_Schema):
    name: str
    kind: Literal['text_field', 'button', 'link']
    x: int = Field(ge=0)
    y: int = Field(ge=0)
    w: int = Field(default=SIMULATOR_CONFIG['control_width'], gt=0)
    h: int = Field(default=SIMULATOR_CONFIG['control_height'], gt=0)
    target: Optional[str] = None
    params: Dict[str, Union[bool, int, str]] = Field(default_factory=dict)

    @model_validator(mode='after')
    def _check_kind(self):
        if self.kind in ('button', 'link') and not self.target:
            raise ValueError(f"控件 {self.name} 类型为 {self.kind}，必须指定 target")
        if self.kind == 'text_field' and (self.target or self.params):
            raise ValueError(f"文本框 {self.name} 不能指定 target 或 params")
        if self.kind == 'button' and self.params:
            raise ValueError(f"按钮 {self.name} 提交表单字段，不能指定 params")
        return self


class PageSchema(_Schema):
    controls: List[ControlSchema] = Field(default_factory=list)


class ParamSchema(_Schema):
    name: str
    type: Literal['bool', 'int', 'str'] = 'str'
    source: Literal['request', 'session'] = 'request'


class EffectSchema(_Schema):
    kind: Literal['transform', 'assign']
    var: str
    op: Optional[Literal['regex_replace', 'constant']] = None
    pattern: Optional[str] = None
    replacement: str = ''
    value: Optional[Union[bool, int, str]] = None
    source: Optional[str] = None

    @model_validator(mode='after')
    def _check_effect(self):
        if self.kind == 'transform':
            if self.op is None:
                raise ValueError(f"变换 {self.var} 缺少 op")
            if self.op == 'regex_replace':
                if self.pattern is None:
                    raise ValueError(f"变换 {self.var} 缺少 pattern")
                try:
                    re.compile(self.pattern)
                except re.error as e:
                    raise ValueError(f"变换 {self.var} 的 pattern 无法编译: {e}")
            elif self.value is None:
                raise ValueError(f"常量变换 {self.var} 缺少 value")
        elif self.source is None:
            raise ValueError(f"会话赋值 {self.var} 缺少 source")
        return self


class SinkSchema(_Schema):
    label: str
    expr: str

    @field_validator('label')
    @classmethod
    def _plain_label(cls, value: str) -> str:
        if not _IDENTIFIER.match(value):
            raise ValueError(f"签名标签必须是标识符: {value!r}")
        return value


class ProcedureSchema(_Schema):
    name: str
    params: List[ParamSchema] = Field(default_factory=list)
    guard: str = 'true'
    call_contract: str = 'true'
    effects: List[EffectSchema] = Field(default_factory=list)
    sinks: List[SinkSchema] = Field(default_factory=list)
    page: Optional[PageSchema] = None
    on_fail: Optional[str] = None


class ModelSchema(_Schema):
    schema_version: int
    description: str = ''
    canvas: CanvasSchema = Field(default_factory=CanvasSchema)
    entry: str
    procedures: List[ProcedureSchema]


class VulnSchema(_Schema):
    schema_version: int
    signature: str
    contract: str
    description: str = ''


# ---------- 校验后的不可变模型 ----------

@dataclass(frozen=True)
class Control:
    name: str
    kind: str
    x: int
    y: int
    w: int
    h: int
    target: Optional[str] = None
    params: Tuple[Tuple[str, Any], ...] = ()

    def contains(self, px: int, py: int) -> bool:
        return self.x <= px < self.x + self.w and self.y <= py < self.y + self.h


@dataclass(frozen=True)
class Page:
    owner: str
    controls: Tuple[Control, ...] = ()

    def control_at(self, px: int, py: int) -> Optional[Control]:
        """包含该点的第一个控件"""
        for control in self.controls:
            if control.contains(px, py):
                return control
        return None

    def fields(self) -> Tuple[str, ...]:
        return tuple(c.name for c in self.controls if c.kind == 'text_field')


@dataclass(frozen=True)
class Param:
    name: str
    type: VarType
    source: str = 'request'


@dataclass(frozen=True)
class Transform:
    var: str
    op: str
    pattern: Optional[str] = None
    replacement: str = ''
    value: Any = None

    def apply(self, current: Any) -> Any:
        if self.op == 'constant':
            return self.value
        return re.sub(self.pattern, self.replacement, current)


@dataclass(frozen=True)
class Assign:
    var: str
    source: str


@dataclass(frozen=True)
class Sink:
    label: str
    expr: str


@dataclass(frozen=True)
class Procedure:
    name: str
    params: Tuple[Param, ...]
    guard: Contract
    call_contract: Contract
    transforms: Tuple[Transform, ...] = ()
    assigns: Tuple[Assign, ...] = ()
    sinks: Tuple[Sink, ...] = ()
    page: Optional[Page] = None
    on_fail: Optional[str] = None

    def targets(self) -> List[str]:
        """渲染页面控件与失败重定向指向的过程"""
        found = []
        if self.page is not None:
            found.extend(c.target for c in self.page.controls if c.target)
        if self.on_fail:
            found.append(self.on_fail)
        return found


@dataclass(frozen=True)
class AutModel:
    entry: str
    procedures: Dict[str, Procedure] = field(hash=False)
    canvas_width: int = SIMULATOR_CONFIG['canvas_width']
    canvas_height: int = SIMULATOR_CONFIG['canvas_height']
    session_types: Dict[str, VarType] = field(default_factory=dict, hash=False)
    description: str = ''

    def procedure(self, name: str) -> Procedure:
        return self.procedures[name]


@dataclass(frozen=True)
class VulnSpec:
    """漏洞规格: 签名标签与汇点值上的契约（自由变量至多一个字符串变量）"""
    signature: str
    contract: Contract


# ---------- 加载 ----------

def _read_document(path: str) -> dict:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path} 不是合法的JSON: {e}") from None


def _validate(schema_cls, document: dict, path: str):
    try:
        parsed = schema_cls.model_validate(document)
    except ValidationError as e:
        raise SchemaError(f"{path} 不符合模式: {e}") from None
    if parsed.schema_version != SCHEMA_VERSION:
        raise SchemaError(f"{path} 的 schema_version={parsed.schema_version}，仅支持 {SCHEMA_VERSION}")
    return parsed


def _session_types(schema: ModelSchema) -> Dict[str, VarType]:
    """会话变量的类型取自赋值来源参数的类型"""
    types: Dict[str, VarType] = {}
    for proc in schema.procedures:
        param_types = {p.name: _TYPE_NAMES[p.type] for p in proc.params}
        for effect in proc.effects:
            if effect.kind != 'assign':
                continue
            if effect.source not in param_types:
                raise SchemaError(f"过程 {proc.name} 的会话赋值来源 {effect.source} 不是参数")
            var_type = param_types[effect.source]
            if types.setdefault(effect.var, var_type) != var_type:
                raise SchemaError(f"会话变量 {effect.var} 被赋予不同类型")
    return types


def _check_contract_scope(proc: ProcedureSchema, contract: Contract, what: str,
                          session: Dict[str, VarType]):
    scope = dict(session)
    scope.update({p.name: _TYPE_NAMES[p.type] for p in proc.params})
    for name, var_type in contract.variables:
        if name not in scope:
            raise SchemaError(f"过程 {proc.name} 的{what}引用了未声明的变量 {name}")
        if scope[name] != var_type:
            raise ContractTypeError(
                f"过程 {proc.name} 的{what}把 {name} 用作 {var_type.value}，声明类型为 {scope[name].value}")


def _build_page(owner: str, page: PageSchema, canvas: CanvasSchema) -> Page:
    names = set()
    controls = []
    for c in page.controls:
        if c.name in names:
            raise SchemaError(f"页面 {owner} 上的控件名重复: {c.name}")
        names.add(c.name)
        if c.x + c.w > canvas.width or c.y + c.h > canvas.height:
            raise SchemaError(f"页面 {owner} 的控件 {c.name} 超出画布")
        controls.append(Control(c.name, c.kind, c.x, c.y, c.w, c.h, c.target, tuple(sorted(c.params.items()))))
    return Page(owner, tuple(controls))


def build_model(schema: ModelSchema) -> AutModel:
    """从已通过模式校验的文档构造模型"""
    names = [p.name for p in schema.procedures]
    if len(set(names)) != len(names):
        raise SchemaError("过程名不唯一")
    if schema.entry not in names:
        raise SchemaError(f"入口过程 {schema.entry} 不存在")

    session = _session_types(schema)
    procedures: Dict[str, Procedure] = {}

    for proc in schema.procedures:
        params = tuple(Param(p.name, _TYPE_NAMES[p.type], p.source) for p in proc.params)
        param_names = {p.name for p in params}
        for p in params:
            if p.source == 'session' and p.name not in session:
                raise SchemaError(f"过程 {proc.name} 的参数 {p.name} 取自会话，但没有过程赋值该会话变量")

        try:
            guard = parse_contract(proc.guard)
            call_contract = parse_contract(proc.call_contract)
        except AlphabetError as e:
            raise SchemaError(f"过程 {proc.name} 的契约无法加载: {e}") from None
        _check_contract_scope(proc, guard, '守卫', session)
        _check_contract_scope(proc, call_contract, '调用契约', session)

        transforms, assigns = [], []
        for effect in proc.effects:
            if effect.kind == 'transform':
                if effect.var not in param_names:
                    raise SchemaError(f"过程 {proc.name} 的变换目标 {effect.var} 不是参数")
                var_type = next(p.type for p in params if p.name == effect.var)
                if effect.op == 'regex_replace' and var_type != VarType.STR:
                    raise SchemaError(f"正则替换只能作用于字符串参数: {effect.var}")
                transforms.append(Transform(effect.var, effect.op, effect.pattern,
                                            effect.replacement, effect.value))
            else:
                assigns.append(Assign(effect.var, effect.source))

        sinks = tuple(Sink(s.label, s.expr) for s in proc.sinks)
        page = _build_page(proc.name, proc.page, schema.canvas) if proc.page is not None else None
        procedures[proc.name] = Procedure(proc.name, params, guard, call_contract, tuple(transforms),
                                          tuple(assigns), sinks, page, proc.on_fail)

    for proc in procedures.values():
        for target in proc.targets():
            if target not in procedures:
                raise DanglingTarget(f"过程 {proc.name} 指向不存在的过程 {target}")

    return AutModel(schema.entry, procedures, schema.canvas.width, schema.canvas.height,
                    session, schema.description)


def load_model(path: str) -> AutModel:
    """
    加载AUT模型文件
    :param path: 模型文件路径（JSON）
    :return: 校验后的模型，所有契约均已解析并通过类型检查
    :raises SchemaError: 文件不符合模式或入口不存在
    :raises DanglingTarget: 控件或重定向指向不存在的过程
    """
    schema = _validate(ModelSchema, _read_document(path), path)
    model = build_model(schema)
    logger.info(f"AUT模型加载完成: {path}，共{len(model.procedures)}个过程，入口 {model.entry}")
    return model


def load_vuln_spec(path: str) -> VulnSpec:
    """
    加载漏洞规格文件
    :param path: 规格文件路径（JSON）
    :return: 漏洞规格
    """
    schema = _validate(VulnSchema, _read_document(path), path)
    if not _IDENTIFIER.match(schema.signature):
        raise SchemaError(f"签名标签必须是标识符: {schema.signature!r}")
    try:
        contract = parse_contract(schema.contract)
    except AlphabetError as e:
        raise SchemaError(f"漏洞契约无法加载: {e}") from None
    if len(contract.variables) > 1 or any(t != VarType.STR for t in contract.types):
        raise SchemaError("漏洞契约只能有一个字符串自由变量（绑定汇点值）")
    logger.info(f"漏洞规格加载完成: 签名 {schema.signature}")
    return VulnSpec(schema.signature, contract)
