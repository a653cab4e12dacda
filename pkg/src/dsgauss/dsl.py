"""Expression language for parametrized surfaces (u, v) -> E^m_s.

Grammar (whitespace insignificant, '^' right-associative and binding
tighter than unary minus):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-'? power
    power  := atom ('^' factor)?
    atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

Identifiers are case-sensitive; 'u', 'v' and 'pi' are reserved, function
names (sin cos tan sinh cosh tanh exp ln sqrt) cannot be used as
variables, and any other identifier is a named parameter to be bound at
evaluation time.  All functions take exactly one argument.  There is no
'abs' and no conditional: surfaces must be smooth so that third-order
jets exist.

A surface document is JSON:

    {"ambient": {"dim": m, "index": s},
     "params": {...},                      # optional, defaults to {}
     "components": [expr-string x m],
     "domain": {"u": [a, b], "v": [a, b]},
     "grid": [n_u, n_v]}

Unknown keys are rejected.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .jets import JET_FUNCS, Jet2, Singularity
from .minkowski import Signature

FUNCTIONS = frozenset(JET_FUNCS)
RESERVED = frozenset({"u", "v", "pi"}) | FUNCTIONS


class ParseError(Exception):
    """Syntax or identifier error, with the byte offset of the problem."""

    def __init__(self, message: str, pos: int):
        self.pos = pos
        super().__init__(f"{message} (at offset {pos})")


class SchemaError(Exception):
    """A surface document violates the JSON schema."""


class UnboundParameter(Exception):
    def __init__(self, name: str, pos: int):
        self.name = name
        self.pos = pos
        super().__init__(f"unbound parameter {name!r} (at offset {pos})")


# --- abstract syntax ----------------------------------------------------


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class Num(Expr):
    value: float
    pos: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Var(Expr):
    name: str  # 'u' or 'v'
    pos: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Param(Expr):
    name: str
    pos: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Pi(Expr):
    pos: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr
    pos: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # + - * / ^
    left: Expr
    right: Expr
    pos: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr
    pos: int = field(default=-1, compare=False)


# --- lexer / parser -----------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            # skip over whitespace-only tail
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        if m.group("number") is not None:
            start = m.start("number")
            # reject forms like '2..3' or '1.' by requiring the next char
            # not to extend the number illegally
            tokens.append(("number", m.group("number"), start))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}", pos)
        return self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected trailing input {text!r}", pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                e = BinOp(text, e, self.term(), pos)
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                e = BinOp(text, e, self.factor(), pos)
            else:
                return e

    def factor(self) -> Expr:
        kind, text, pos = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.power(), pos)
        return self.power()

    def power(self) -> Expr:
        e = self.atom()
        kind, text, pos = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return BinOp("^", e, self.factor(), pos)
        return e

    def atom(self) -> Expr:
        kind, text, pos = self.advance()
        if kind == "number":
            return Num(float(text), pos)
        if kind == "ident":
            nkind, ntext, _ = self.peek()
            if nkind == "op" and ntext == "(":
                if text not in FUNCTIONS:
                    raise ParseError(f"unknown function {text!r}", pos)
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg, pos)
            if text in FUNCTIONS:
                raise ParseError(f"function name {text!r} used as a variable", pos)
            if text == "pi":
                return Pi(pos)
            if text in ("u", "v"):
                return Var(text, pos)
            return Param(text, pos)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(f"unexpected token {text!r}" if text else "unexpected end of input", pos)


def parse(text: str) -> Expr:
    """Parse an expression string into an AST."""
    return _Parser(text).parse()


# --- printing -----------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def unparse(e: Expr) -> str:
    """Canonical printer; parse(unparse(e)) reproduces the AST."""
    if isinstance(e, Num):
        return format(e.value, ".17g")
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Call):
        return f"{e.fn}({unparse(e.arg)})"
    if isinstance(e, Neg):
        inner = unparse(e.arg)
        if _prec(e.arg) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, BinOp):
        lp, rp = _prec(e.left), _prec(e.right)
        left, right = unparse(e.left), unparse(e.right)
        if e.op == "^":
            # left operand must be a bare atom
            if lp < _PREC["atom"]:
                left = f"({left})"
            # right operand is a factor; anything below unary minus needs parens
            if rp < _PREC["neg"]:
                right = f"({right})"
            return f"{left}^{right}"
        if lp < _PREC[e.op]:
            left = f"({left})"
        if rp < _PREC[e.op] or (rp == _PREC[e.op] and e.op in "-/"):
            right = f"({right})"
        return f"{left}{e.op}{right}"
    raise TypeError(f"not an Expr: {e!r}")


# --- evaluation ---------------------------------------------------------


def _is_constant_jet(j: Jet2) -> bool:
    return bool(np.all(j.d[..., 1:] == 0.0))


def eval_jet(e: Expr, u0, v0, params: dict[str, float] | None = None) -> Jet2:
    """Order-3 jet of the expression at (u0, v0); u0/v0 may be arrays."""
    params = params or {}
    pts_shape = np.broadcast_shapes(np.shape(u0), np.shape(v0))

    def ev(node: Expr) -> Jet2:
        try:
            if isinstance(node, Num):
                return Jet2.constant(node.value)
            if isinstance(node, Pi):
                return Jet2.constant(np.pi)
            if isinstance(node, Var):
                return Jet2.variable(u0 if node.name == "u" else v0, node.name)
            if isinstance(node, Param):
                if node.name not in params:
                    raise UnboundParameter(node.name, node.pos)
                return Jet2.constant(float(params[node.name]))
            if isinstance(node, Neg):
                return -ev(node.arg)
            if isinstance(node, Call):
                return JET_FUNCS[node.fn](ev(node.arg))
            if isinstance(node, BinOp):
                if node.op == "^":
                    base = ev(node.left)
                    expo = ev(node.right)
                    if _is_constant_jet(expo):
                        p = float(np.ravel(expo.value)[0]) if expo.value.ndim else float(expo.value)
                        return base**p
                    from .jets import jet_exp, jet_ln

                    return jet_exp(expo * jet_ln(base))
                a, b = ev(node.left), ev(node.right)
                if node.op == "+":
                    return a + b
                if node.op == "-":
                    return a - b
                if node.op == "*":
                    return a * b
                return a / b
            raise TypeError(f"not an Expr: {node!r}")
        except Singularity as exc:
            if exc.location is None:
                raise Singularity(str(exc), location=f"offset {node.pos}") from None
            raise

    result = ev(e)
    if result.shape != pts_shape:
        result = Jet2(np.broadcast_to(result.d, pts_shape + result.d.shape[-1:]).copy())
    return result


def eval_value(e: Expr, u, v, params: dict[str, float] | None = None):
    """Plain numeric evaluation (no derivatives); u/v may be arrays."""
    params = params or {}
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)

    _FN = {
        "sin": np.sin, "cos": np.cos, "tan": np.tan,
        "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh,
        "exp": np.exp, "ln": np.log, "sqrt": np.sqrt,
    }

    def ev(node: Expr):
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Pi):
            return np.pi
        if isinstance(node, Var):
            return u if node.name == "u" else v
        if isinstance(node, Param):
            if node.name not in params:
                raise UnboundParameter(node.name, node.pos)
            return float(params[node.name])
        if isinstance(node, Neg):
            return -ev(node.arg)
        if isinstance(node, Call):
            with np.errstate(divide="ignore", invalid="ignore"):
                return _FN[node.fn](ev(node.arg))
        if isinstance(node, BinOp):
            a = ev(node.left)
            if node.op == "^":
                b = ev(node.right)
                with np.errstate(divide="ignore", invalid="ignore"):
                    return np.power(a, b)
            b = ev(node.right)
            with np.errstate(divide="ignore", invalid="ignore"):
                if node.op == "+":
                    return a + b
                if node.op == "-":
                    return a - b
                if node.op == "*":
                    return a * b
                return a / b
        raise TypeError(f"not an Expr: {node!r}")

    return ev(e)


def free_params(e: Expr) -> set[str]:
    if isinstance(e, Param):
        return {e.name}
    if isinstance(e, Neg):
        return free_params(e.arg)
    if isinstance(e, Call):
        return free_params(e.arg)
    if isinstance(e, BinOp):
        return free_params(e.left) | free_params(e.right)
    return set()


def substitute(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace variables/parameters by expressions (used for u<->v swaps)."""
    if isinstance(e, (Var, Param)) and e.name in mapping:
        return mapping[e.name]
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, mapping), e.pos)
    if isinstance(e, Call):
        return Call(e.fn, substitute(e.arg, mapping), e.pos)
    if isinstance(e, BinOp):
        return BinOp(e.op, substitute(e.left, mapping), substitute(e.right, mapping), e.pos)
    return e


# --- surface documents ---------------------------------------------------

MIN_GRID = 4


@dataclass(frozen=True)
class SurfaceSpec:
    """A validated parametrized surface: ambient signature, component
    expressions, bound parameters, sampling domain and grid."""

    signature: Signature
    components: tuple[Expr, ...]
    sources: tuple[str, ...]
    params: dict[str, float]
    domain: tuple[tuple[float, float], tuple[float, float]]
    grid: tuple[int, int]

    def component_jets(self, u0, v0) -> list[Jet2]:
        return [eval_jet(c, u0, v0, self.params) for c in self.components]

    def component_values(self, u, v) -> np.ndarray:
        vals = [np.broadcast_to(np.asarray(eval_value(c, u, v, self.params), dtype=float),
                                np.shape(u)) for c in self.components]
        return np.stack(vals, axis=0)

    def to_document(self) -> dict:
        (ua, ub), (va, vb) = self.domain
        return {
            "ambient": {"dim": self.signature.dim, "index": self.signature.index},
            "params": dict(sorted(self.params.items())),
            "components": list(self.sources),
            "domain": {"u": [ua, ub], "v": [va, vb]},
            "grid": [self.grid[0], self.grid[1]],
        }


def make_surface(
    dim: int,
    index: int,
    components: list[str],
    params: dict[str, float] | None = None,
    domain=((0.0, 1.0), (0.0, 1.0)),
    grid=(16, 16),
) -> SurfaceSpec:
    """Build and validate a SurfaceSpec from component strings."""
    doc = {
        "ambient": {"dim": dim, "index": index},
        "params": params or {},
        "components": list(components),
        "domain": {"u": list(domain[0]), "v": list(domain[1])},
        "grid": list(grid),
    }
    return load_surface(json.dumps(doc))


_TOP_KEYS = {"ambient", "params", "components", "domain", "grid"}


def load_surface(document: bytes | str) -> SurfaceSpec:
    """Parse and validate a JSON surface document."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("document root must be an object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise SchemaError(f"unknown keys: {sorted(unknown)}")
    for key in ("ambient", "components", "domain", "grid"):
        if key not in doc:
            raise SchemaError(f"missing key {key!r}")

    amb = doc["ambient"]
    if not isinstance(amb, dict) or set(amb) != {"dim", "index"}:
        raise SchemaError("'ambient' must be an object with exactly 'dim' and 'index'")
    if not isinstance(amb["dim"], int) or not isinstance(amb["index"], int):
        raise SchemaError("'ambient' dim and index must be integers")
    try:
        sig = Signature(amb["dim"], amb["index"])
    except ValueError as exc:
        raise SchemaError(str(exc)) from None

    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError("'params' must be an object")
    for name, value in params.items():
        if name in RESERVED:
            raise SchemaError(f"parameter name {name!r} is reserved")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"parameter {name!r} must be a number")
    params = {k: float(v) for k, v in params.items()}

    comps = doc["components"]
    if not isinstance(comps, list) or not all(isinstance(c, str) for c in comps):
        raise SchemaError("'components' must be a list of strings")
    if len(comps) != sig.dim:
        raise SchemaError(f"expected {sig.dim} components, got {len(comps)}")
    exprs = []
    for i, src in enumerate(comps):
        try:
            e = parse(src)
        except ParseError as exc:
            raise SchemaError(f"component {i}: {exc}") from None
        undeclared = free_params(e) - set(params)
        if undeclared:
            raise SchemaError(f"component {i}: undeclared parameter(s) {sorted(undeclared)}")
        exprs.append(e)

    dom = doc["domain"]
    if not isinstance(dom, dict) or set(dom) != {"u", "v"}:
        raise SchemaError("'domain' must be an object with exactly 'u' and 'v'")
    ranges = []
    for axis in ("u", "v"):
        r = dom[axis]
        if (
            not isinstance(r, list)
            or len(r) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in r)
        ):
            raise SchemaError(f"domain {axis!r} must be [min, max]")
        a, b = float(r[0]), float(r[1])
        if not a < b:
            raise SchemaError(f"domain {axis!r} is degenerate: [{a}, {b}]")
        ranges.append((a, b))

    grid = doc["grid"]
    if (
        not isinstance(grid, list)
        or len(grid) != 2
        or not all(isinstance(n, int) and not isinstance(n, bool) for n in grid)
    ):
        raise SchemaError("'grid' must be [n_u, n_v] with integers")
    if min(grid) < MIN_GRID:
        raise SchemaError(f"grid counts must be >= {MIN_GRID}, got {grid}")

    return SurfaceSpec(
        signature=sig,
        components=tuple(exprs),
        sources=tuple(comps),
        params=params,
        domain=(ranges[0], ranges[1]),
        grid=(grid[0], grid[1]),
    )


def sample_grid(spec: SurfaceSpec) -> tuple[np.ndarray, np.ndarray]:
    """Canonical flattened sample grid: u varies slowest, v fastest."""
    (ua, ub), (va, vb) = spec.domain
    nu, nv = spec.grid
    uu = np.linspace(ua, ub, nu)
    vv = np.linspace(va, vb, nv)
    U, V = np.meshgrid(uu, vv, indexing="ij")
    return U.ravel(), V.ravel()
