"""
Expression Service - parse, type-check, print and evaluate channel expressions.

    expr := "id(" INT ")" | "twopauli(" FLOAT ")" | "erase(" INT ")"
          | "mix(" FLOAT "," expr "," expr ")" | "compose(" expr "," expr ")"
          | "kraus(" PATH ")"

``compose(e2, e1)`` applies e1 first. ``mix(c, e1, e2)`` is c e1 + (1 - c) e2.
"""

from dataclasses import dataclass
from typing import Any, Tuple, Union

import numpy as np
import pyparsing as pp
import structlog
from pydantic import BaseModel, ConfigDict

from app.errors import ChannelExprError
from app.schemas.quantum import KrausChannel
from app.services import channel_service
from app.utils import formats

logger = structlog.get_logger()

CONSTRUCTORS = ("id(", "twopauli(", "erase(", "mix(", "compose(", "kraus(")
_TOKEN_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.(),\"-+/\\~:")
_BARE_PATH = r"[^\s(),\"]+"


class _Node(BaseModel):
    model_config = ConfigDict(frozen=True)


class IdExpr(_Node):
    dim: int

    @property
    def dims(self) -> Tuple[int, int]:
        return self.dim, self.dim


class TwoPauliExpr(_Node):
    x: float

    @property
    def dims(self) -> Tuple[int, int]:
        return 2, 2


class EraseExpr(_Node):
    dim: int

    @property
    def dims(self) -> Tuple[int, int]:
        return self.dim, self.dim


class KrausExpr(_Node):
    path: str
    dim_in: int
    dim_out: int

    @property
    def dims(self) -> Tuple[int, int]:
        return self.dim_in, self.dim_out


class MixExpr(_Node):
    c: float
    first: "ChannelExpr"
    second: "ChannelExpr"

    @property
    def dims(self) -> Tuple[int, int]:
        return self.first.dims


class ComposeExpr(_Node):
    outer: "ChannelExpr"
    inner: "ChannelExpr"

    @property
    def dims(self) -> Tuple[int, int]:
        return self.inner.dims[0], self.outer.dims[1]


ChannelExpr = Union[IdExpr, TwoPauliExpr, EraseExpr, KrausExpr, MixExpr, ComposeExpr]
MixExpr.model_rebuild()
ComposeExpr.model_rebuild()


@dataclass(frozen=True)
class _Raw:
    """Untyped parse node with its source offset."""

    name: str
    loc: int
    args: Tuple[Any, ...]


def _raw_action(name: str):
    def action(s, loc, toks):
        return _Raw(name, loc, tuple(toks))

    return action


def make_grammar() -> pp.ParserElement:
    lpar = pp.Suppress("(").set_name("'('")
    rpar = pp.Suppress(")").set_name("')'")
    comma = pp.Suppress(",").set_name("','")

    integer = pp.Regex(r"[+-]?\d+").set_name("INT").set_parse_action(lambda t: int(t[0]))
    number = pp.Regex(r"[+-]?(\d+\.\d*|\.\d+|\d+)").set_name("FLOAT").set_parse_action(lambda t: float(t[0]))
    path = (pp.QuotedString('"').set_name("PATH") | pp.Regex(_BARE_PATH).set_name("PATH")).set_name("PATH")

    expr = pp.Forward().set_name("channel expression")

    identity = pp.Keyword("id").suppress() + lpar + integer + rpar
    two_pauli = pp.Keyword("twopauli").suppress() + lpar + number + rpar
    erase = pp.Keyword("erase").suppress() + lpar + integer + rpar
    mix = pp.Keyword("mix").suppress() + lpar + number + comma + expr + comma + expr + rpar
    compose = pp.Keyword("compose").suppress() + lpar + expr + comma + expr + rpar
    kraus = pp.Keyword("kraus").suppress() + lpar + path + rpar

    for element, name in (
        (identity, "id"),
        (two_pauli, "twopauli"),
        (erase, "erase"),
        (mix, "mix"),
        (compose, "compose"),
        (kraus, "kraus"),
    ):
        element.set_parse_action(_raw_action(name))

    expr <<= identity | two_pauli | erase | mix | compose | kraus
    return expr


GRAMMAR = make_grammar()


def _position(text: str, loc: int) -> Tuple[int, int]:
    return pp.lineno(loc, text), pp.col(loc, text)


def _expected(exc: pp.ParseBaseException) -> Tuple[str, ...]:
    element = getattr(exc, "parser_element", None) or getattr(exc, "parserElement", None)
    name = (getattr(element, "name", None) or "").strip("\x27\"")
    if name in ("(", ")", ",", "INT", "FLOAT", "PATH"):
        return (name,)
    return CONSTRUCTORS


def _error(text: str, loc: int, kind: str, message: str, expected=()) -> ChannelExprError:
    line, column = _position(text, loc)
    return ChannelExprError(message, kind=kind, line=line, column=column, expected=expected)


def _check_unit(text: str, node: _Raw, label: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise _error(text, node.loc, "range", f"{label} = {value} outside [0, 1] in {node.name}(...)")


def _check_dim(text: str, node: _Raw, value: int) -> None:
    if value < 1:
        raise _error(text, node.loc, "range", f"dimension {value} must be a positive integer in {node.name}(...)")


def _build(text: str, node: _Raw) -> ChannelExpr:
    """Turn a raw node into a typed AST, unifying dimensions bottom-up."""
    if node.name == "id":
        _check_dim(text, node, node.args[0])
        return IdExpr(dim=node.args[0])
    if node.name == "erase":
        _check_dim(text, node, node.args[0])
        return EraseExpr(dim=node.args[0])
    if node.name == "twopauli":
        _check_unit(text, node, "x", node.args[0])
        return TwoPauliExpr(x=node.args[0])
    if node.name == "kraus":
        path = str(node.args[0])
        dim_in, dim_out = formats.read_kraus_dims(path)
        return KrausExpr(path=path, dim_in=dim_in, dim_out=dim_out)
    if node.name == "mix":
        c, first, second = node.args
        _check_unit(text, node, "c", c)
        first_expr, second_expr = _build(text, first), _build(text, second)
        if first_expr.dims != second_expr.dims:
            raise _error(
                text,
                node.loc,
                "type",
                f"mix operands differ: {first_expr.dims[0]}->{first_expr.dims[1]} vs "
                f"{second_expr.dims[0]}->{second_expr.dims[1]}",
            )
        return MixExpr(c=c, first=first_expr, second=second_expr)
    if node.name == "compose":
        outer, inner = _build(text, node.args[0]), _build(text, node.args[1])
        if inner.dims[1] != outer.dims[0]:
            raise _error(
                text,
                node.loc,
                "type",
                f"compose: inner channel outputs dimension {inner.dims[1]} "
                f"but outer channel expects {outer.dims[0]}",
            )
        return ComposeExpr(outer=outer, inner=inner)
    raise _error(text, node.loc, "syntax", f"unknown constructor '{node.name}'", CONSTRUCTORS)


def parse_channel(text: str) -> ChannelExpr:
    """
    Parse and type-check a channel expression.

    Raises:
        ChannelExprError: lexical, syntax, range or type error with line/column
        FileFormatError / OSError: a kraus(PATH) file cannot be read
    """
    try:
        raw = GRAMMAR.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as e:
        loc = min(e.loc, len(text))
        char = text[loc] if loc < len(text) else ""
        if char and not char.isspace() and char not in _TOKEN_CHARS:
            raise _error(text, loc, "lexical", f"unexpected character {char!r}") from None
        found = f"found {char!r}" if char else "found end of input"
        raise _error(text, loc, "syntax", found, _expected(e)) from None
    expr = _build(text, raw)
    logger.debug("Channel expression parsed", expression=text, dims=expr.dims)
    return expr


def _format_float(value: float) -> str:
    return np.format_float_positional(value, trim="0")


def _format_path(path: str) -> str:
    if path and all(not (ch.isspace() or ch in '(),"') for ch in path):
        return path
    return f'"{path}"'


def format_channel(expr: ChannelExpr) -> str:
    """Canonical text form; parse_channel(format_channel(e)) == e."""
    if isinstance(expr, IdExpr):
        return f"id({expr.dim})"
    if isinstance(expr, EraseExpr):
        return f"erase({expr.dim})"
    if isinstance(expr, TwoPauliExpr):
        return f"twopauli({_format_float(expr.x)})"
    if isinstance(expr, KrausExpr):
        return f"kraus({_format_path(expr.path)})"
    if isinstance(expr, MixExpr):
        return f"mix({_format_float(expr.c)}, {format_channel(expr.first)}, {format_channel(expr.second)})"
    return f"compose({format_channel(expr.outer)}, {format_channel(expr.inner)})"


def eval_channel(expr: ChannelExpr) -> KrausChannel:
    """Build the Kraus channel denoted by a typed expression."""
    if isinstance(expr, IdExpr):
        return channel_service.identity_channel(expr.dim)
    if isinstance(expr, EraseExpr):
        return channel_service.erasure_channel(expr.dim)
    if isinstance(expr, TwoPauliExpr):
        return channel_service.two_pauli(expr.x)
    if isinstance(expr, KrausExpr):
        return formats.load_kraus(expr.path)
    if isinstance(expr, MixExpr):
        return channel_service.mix(expr.c, eval_channel(expr.first), eval_channel(expr.second))
    return channel_service.compose(eval_channel(expr.outer), eval_channel(expr.inner))


def channel_from_text(text: str) -> KrausChannel:
    """parse_channel followed by eval_channel."""
    return eval_channel(parse_channel(text))
