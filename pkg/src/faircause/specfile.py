"""Line-oriented text format describing a causal graph and, optionally, a
full model over it.

Grammar ('#' starts a comment, whitespace is free, identifiers match
[A-Za-z_][A-Za-z0-9_]*):

    model discrete|linear
    meta key = "text"
    node N { domain: [v1, v2, ...] [, observed: true|false] }
    edge A -> B
    exo U_N { support: [u1, ...], probs: [p1, ...] }
    func N(P1, ..., Pk, U_N) { (v, ..., v) -> v; ...; default -> v }
    assign N = c0 + c1*P1 + ... + noise(var)
    assign N = bernoulli(p)
    role N = explaining|proxy

func statements build a discrete model, assign statements a linear-Gaussian
one; a file may mix the two forms only under an explicit model header.  An
empty domain list marks a numeric (unbounded) node, as used by the linear
family.  Values are integers, decimals, or bare identifiers.  The exporter
emits a canonical rendering: export(parse(text)) is a fixed point.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .errors import FaircauseError, SpecSemanticError, SpecSyntaxError
from .graph import CausalGraph
from .scm import DiscreteScm, Exogenous, LinearGaussianScm

MODEL_DISCRETE = "discrete"
MODEL_LINEAR = "linear"

_ROLES = ("explaining", "proxy")
_KEYWORDS = ("assign", "edge", "exo", "func", "meta", "model", "node", "role")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->)
  | (?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>[{}()\[\],:;=+\-*])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise SpecSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = match.lastgroup
        piece = match.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, piece, line, pos - line_start + 1))
        if "\n" in piece:
            line += piece.count("\n")
            line_start = pos + piece.rindex("\n") + 1
        pos = match.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


@dataclass
class ParsedSpec:
    """Everything a spec file declares: always a graph, optionally a model.

    domains maps every node to its declared domain tuple; an empty tuple
    marks a numeric node.
    """

    graph: CausalGraph
    scm: object | None = None
    roles: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    domains: dict = field(default_factory=dict)


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.model_family = None
        self.meta = {}
        self.nodes = {}  # name -> (domain tuple, observed flag)
        self.node_order = []
        self.edges = []
        self.exo = {}  # node -> (support, probs)
        self.funcs = {}  # node -> (header tuple, rows list)
        self.assigns = {}  # node -> ("bernoulli", p) | ("linear", c0, terms, var)
        self.roles = {}

    # --- token helpers ---

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def fail(self, message, token=None):
        token = token or self.peek()
        raise SpecSyntaxError(message, token.line, token.column)

    def expect_punct(self, char) -> Token:
        token = self.peek()
        if token.kind != "punct" or token.text != char:
            self.fail(f"expected {char!r}, found {token.text or 'end of file'!r}")
        return self.advance()

    def expect_arrow(self):
        token = self.peek()
        if token.kind != "arrow":
            self.fail(f"expected ->, found {token.text or 'end of file'!r}")
        self.advance()

    def expect_ident(self, what="identifier") -> Token:
        token = self.peek()
        if token.kind != "ident":
            self.fail(f"expected {what}, found {token.text or 'end of file'!r}")
        return self.advance()

    def at_punct(self, char) -> bool:
        token = self.peek()
        return token.kind == "punct" and token.text == char

    # --- value parsing ---

    def parse_number(self):
        negative = False
        if self.at_punct("-"):
            self.advance()
            negative = True
        token = self.peek()
        if token.kind != "number":
            self.fail(f"expected a number, found {token.text or 'end of file'!r}")
        self.advance()
        if re.fullmatch(r"\d+", token.text):
            value = int(token.text)
        else:
            value = float(token.text)
        return -value if negative else value

    def parse_value(self):
        token = self.peek()
        if token.kind == "ident":
            return self.advance().text
        return self.parse_number()

    def parse_value_list(self) -> tuple:
        self.expect_punct("[")
        values = []
        if not self.at_punct("]"):
            values.append(self.parse_value())
            while self.at_punct(","):
                self.advance()
                values.append(self.parse_value())
        self.expect_punct("]")
        return tuple(values)

    # --- statements ---

    def parse(self) -> ParsedSpec:
        while self.peek().kind != "eof":
            token = self.peek()
            if token.kind != "ident" or token.text not in _KEYWORDS:
                self.fail(
                    f"expected a statement keyword "
                    f"({', '.join(_KEYWORDS)}), found {token.text or 'end of file'!r}"
                )
            getattr(self, f"parse_{token.text}")()
        return self.build()

    def parse_model(self):
        self.advance()
        family = self.expect_ident("model family")
        if family.text not in (MODEL_DISCRETE, MODEL_LINEAR):
            self.fail("model family must be discrete or linear", family)
        if self.model_family is not None:
            raise SpecSemanticError("duplicate model header")
        self.model_family = family.text

    def parse_meta(self):
        self.advance()
        key = self.expect_ident("meta key")
        self.expect_punct("=")
        token = self.peek()
        if token.kind == "string":
            self.advance()
            value = re.sub(r'\\(["\\])', r"\1", token.text[1:-1])
        elif token.kind == "ident":
            value = self.advance().text
        else:
            value = str(self.parse_number())
        if key.text in self.meta:
            raise SpecSemanticError(f"duplicate meta key {key.text}")
        self.meta[key.text] = value

    def parse_node(self):
        self.advance()
        name = self.expect_ident("node name")
        if name.text in self.nodes:
            raise SpecSemanticError(f"node {name.text} declared twice")
        self.expect_punct("{")
        domain = None
        observed = True
        while not self.at_punct("}"):
            key = self.expect_ident("node property")
            self.expect_punct(":")
            if key.text == "domain":
                domain = self.parse_value_list()
            elif key.text == "observed":
                flag = self.expect_ident("true or false")
                if flag.text not in ("true", "false"):
                    self.fail("observed takes true or false", flag)
                observed = flag.text == "true"
            else:
                self.fail(f"unknown node property {key.text!r}", key)
            if self.at_punct(","):
                self.advance()
        self.expect_punct("}")
        if domain is None:
            raise SpecSemanticError(f"node {name.text} declares no domain")
        if len(set(domain)) != len(domain):
            raise SpecSemanticError(f"node {name.text}: domain values must be distinct")
        self.nodes[name.text] = (domain, observed)
        self.node_order.append(name.text)

    def parse_edge(self):
        self.advance()
        cause = self.expect_ident("cause node")
        self.expect_arrow()
        effect = self.expect_ident("effect node")
        self.edges.append((cause.text, effect.text))

    def parse_exo(self):
        self.advance()
        name = self.expect_ident("exogenous name")
        self.expect_punct("{")
        support = None
        probs = None
        while not self.at_punct("}"):
            key = self.expect_ident("exo property")
            self.expect_punct(":")
            if key.text == "support":
                support = self.parse_value_list()
            elif key.text == "probs":
                probs = self.parse_value_list()
            else:
                self.fail(f"unknown exo property {key.text!r}", key)
            if self.at_punct(","):
                self.advance()
        self.expect_punct("}")
        if not name.text.startswith("U_") or len(name.text) < 3:
            raise SpecSemanticError(f"exo {name.text}: name must be U_<node>")
        if support is None or probs is None:
            raise SpecSemanticError(f"exo {name.text} needs support and probs")
        node = name.text[2:]
        if node in self.exo:
            raise SpecSemanticError(f"exo {name.text} declared twice")
        self.exo[node] = (support, probs)

    def parse_func(self):
        self.advance()
        name = self.expect_ident("node name")
        if name.text in self.funcs or name.text in self.assigns:
            raise SpecSemanticError(f"node {name.text} has two mechanisms")
        self.expect_punct("(")
        header = []
        if not self.at_punct(")"):
            header.append(self.expect_ident("parent name").text)
            while self.at_punct(","):
                self.advance()
                header.append(self.expect_ident("parent name").text)
        self.expect_punct(")")
        self.expect_punct("{")
        rows = []
        while not self.at_punct("}"):
            token = self.peek()
            if token.kind == "ident" and token.text == "default":
                self.advance()
                key = "default"
            else:
                self.expect_punct("(")
                values = [self.parse_value()]
                while self.at_punct(","):
                    self.advance()
                    values.append(self.parse_value())
                self.expect_punct(")")
                key = tuple(values)
            self.expect_arrow()
            rows.append((key, self.parse_value()))
            if self.at_punct(";"):
                self.advance()
        self.expect_punct("}")
        self.funcs[name.text] = (tuple(header), rows)

    def parse_assign(self):
        self.advance()
        name = self.expect_ident("node name")
        if name.text in self.funcs or name.text in self.assigns:
            raise SpecSemanticError(f"node {name.text} has two mechanisms")
        self.expect_punct("=")
        token = self.peek()
        if token.kind == "ident" and token.text == "bernoulli":
            self.advance()
            self.expect_punct("(")
            p = float(self.parse_number())
            self.expect_punct(")")
            if not 0.0 <= p <= 1.0:
                raise SpecSemanticError(f"{name.text}: bernoulli p outside [0, 1]")
            self.assigns[name.text] = ("bernoulli", p)
            return
        intercept = 0.0
        terms = []
        variance = None
        first = True
        sign = 1.0
        while True:
            if not first:
                if self.at_punct("+"):
                    self.advance()
                    sign = 1.0
                elif self.at_punct("-"):
                    self.advance()
                    sign = -1.0
                else:
                    break
            token = self.peek()
            if token.kind == "ident" and token.text == "noise":
                self.advance()
                self.expect_punct("(")
                variance = float(self.parse_number())
                self.expect_punct(")")
                if variance < 0:
                    raise SpecSemanticError(f"{name.text}: negative noise variance")
                if sign < 0:
                    raise SpecSemanticError(f"{name.text}: noise cannot be subtracted")
            elif token.kind == "ident":
                terms.append((sign, self.advance().text))
            else:
                coefficient = sign * self.parse_number()
                if self.at_punct("*"):
                    self.advance()
                    parent = self.expect_ident("parent name").text
                    terms.append((float(coefficient), parent))
                else:
                    intercept += float(coefficient)
            first = False
        if variance is None:
            raise SpecSemanticError(
                f"{name.text}: linear assignment needs a noise(variance) term"
            )
        self.assigns[name.text] = ("linear", intercept, terms, variance)

    def parse_role(self):
        self.advance()
        name = self.expect_ident("node name")
        self.expect_punct("=")
        role = self.expect_ident("role")
        if role.text not in _ROLES:
            self.fail(f"role must be one of {', '.join(_ROLES)}", role)
        if name.text in self.roles:
            raise SpecSemanticError(f"role for {name.text} declared twice")
        self.roles[name.text] = role.text

    # --- semantic assembly ---

    def build(self) -> ParsedSpec:
        for cause, effect in self.edges:
            for end in (cause, effect):
                if end not in self.nodes:
                    raise SpecSemanticError(
                        f"edge {cause} -> {effect}: undeclared node {end}"
                    )
        unobserved = tuple(n for n, (_, obs) in self.nodes.items() if not obs)
        try:
            graph = CausalGraph(
                tuple(self.node_order), tuple(self.edges), frozenset(unobserved)
            )
        except FaircauseError as err:
            raise SpecSemanticError(str(err)) from err
        for node in itertools.chain(self.funcs, self.assigns, self.exo, self.roles):
            if node not in self.nodes:
                raise SpecSemanticError(f"statement references undeclared node {node}")

        declared = {name: domain for name, (domain, _) in self.nodes.items()}
        has_func = bool(self.funcs) or bool(self.exo)
        has_assign = bool(self.assigns)
        if not has_func and not has_assign:
            return ParsedSpec(graph, None, dict(self.roles), dict(self.meta), declared)
        if has_func and has_assign and self.model_family is None:
            raise SpecSemanticError(
                "spec mixes func and assign forms: add a 'model discrete' "
                "or 'model linear' header"
            )
        family = self.model_family or (MODEL_DISCRETE if has_func else MODEL_LINEAR)
        scm = self._build_discrete(graph) if family == MODEL_DISCRETE else self._build_linear(graph)
        return ParsedSpec(graph, scm, dict(self.roles), dict(self.meta), declared)

    def _build_discrete(self, graph: CausalGraph) -> DiscreteScm:
        domains = {}
        for node in graph.nodes:
            domain = self.nodes[node][0]
            if not domain:
                raise SpecSemanticError(
                    f"discrete model: node {node} needs a finite domain"
                )
            domains[node] = domain
        mechanisms = {}
        exogenous = {}
        for node in graph.nodes:
            if node in self.assigns:
                self._assign_to_func(graph, node)
            if node not in self.funcs:
                raise SpecSemanticError(f"discrete model: node {node} has no func")
            if node not in self.exo:
                raise SpecSemanticError(f"discrete model: node {node} has no exo block")
            support, probs = self.exo[node]
            try:
                exogenous[node] = Exogenous(f"U_{node}", support, probs)
            except FaircauseError as err:
                raise SpecSemanticError(f"exo U_{node}: {err}") from err
            mechanisms[node] = self._table_for(graph, node, domains, support)
        try:
            return DiscreteScm(graph, domains, exogenous, mechanisms)
        except FaircauseError as err:
            raise SpecSemanticError(str(err)) from err

    def _assign_to_func(self, graph: CausalGraph, node):
        """Fold one linear assignment into the discrete family: the affine map
        must be noise-free and land inside the declared domain."""
        if node in self.exo:
            raise SpecSemanticError(
                f"{node}: an assign statement cannot also declare an exo block"
            )
        form = self.assigns.pop(node)
        domain = self.nodes[node][0]
        parents = graph.parents(node)
        if form[0] == "bernoulli":
            if tuple(domain) != (0, 1):
                raise SpecSemanticError(
                    f"{node}: bernoulli assignment needs domain [0, 1]"
                )
            if parents:
                raise SpecSemanticError(f"{node}: bernoulli nodes must be roots")
            p = form[1]
            self.exo[node] = ((0, 1), (1.0 - p, p))
            self.funcs[node] = ((f"U_{node}",), [((0,), 0), ((1,), 1)])
            return
        _, intercept, terms, variance = form
        if variance != 0.0:
            raise SpecSemanticError(
                f"{node}: the discrete family cannot absorb noise({variance!r})"
            )
        coefficient = {parent: 0.0 for parent in parents}
        for value, parent in terms:
            if parent not in coefficient:
                raise SpecSemanticError(f"{node}: term references non-parent {parent}")
            coefficient[parent] += value
        rows = []
        for combo in itertools.product(*(self.nodes[p][0] for p in parents)):
            value = intercept + sum(coefficient[p] * v for p, v in zip(parents, combo))
            nearest = int(round(value))
            if abs(value - nearest) > 1e-9 or nearest not in domain:
                raise SpecSemanticError(
                    f"{node}: assignment output {value!r} at parents {combo} "
                    f"falls outside the domain"
                )
            rows.append((combo + (0,), nearest))
        self.exo[node] = ((0,), (1.0,))
        self.funcs[node] = (tuple(parents) + (f"U_{node}",), rows)

    def _table_for(self, graph, node, domains, support) -> dict:
        header, rows = self.funcs[node]
        parents = graph.parents(node)
        expected = tuple(parents) + (f"U_{node}",)
        if tuple(header) != expected:
            raise SpecSemanticError(
                f"func {node}: header must be ({', '.join(expected)})"
            )
        axes = [domains[p] for p in parents] + [tuple(support)]
        valid = set(itertools.product(*axes))
        table = {}
        default = None
        for key, value in rows:
            if key == "default":
                if default is not None:
                    raise SpecSemanticError(f"func {node}: two default rows")
                default = value
                continue
            if len(key) != len(axes):
                raise SpecSemanticError(
                    f"func {node}: row {key!r} has {len(key)} values, "
                    f"expected {len(axes)}"
                )
            if key not in valid:
                raise SpecSemanticError(
                    f"func {node}: row {key!r} uses values outside the domains"
                )
            if key in table:
                raise SpecSemanticError(f"func {node}: duplicate row {key!r}")
            table[key] = value
        for combo in valid:
            if combo not in table:
                if default is None:
                    raise SpecSemanticError(
                        f"func {node}: no row for {combo!r} and no default"
                    )
                table[combo] = default
        return table

    def _build_linear(self, graph: CausalGraph) -> LinearGaussianScm:
        if self.funcs or self.exo:
            raise SpecSemanticError("linear model cannot include func or exo blocks")
        intercepts = {}
        coefficients = {}
        noise_var = {}
        bernoulli = {}
        for node in graph.nodes:
            if node not in self.assigns:
                raise SpecSemanticError(f"linear model: node {node} has no assignment")
            form = self.assigns[node]
            if form[0] == "bernoulli":
                bernoulli[node] = form[1]
                continue
            _, intercept, terms, variance = form
            coefficient = {parent: 0.0 for parent in graph.parents(node)}
            for value, parent in terms:
                if parent not in coefficient:
                    raise SpecSemanticError(
                        f"{node}: term references non-parent {parent}"
                    )
                coefficient[parent] += value
            intercepts[node] = intercept
            coefficients[node] = coefficient
            noise_var[node] = variance
        try:
            return LinearGaussianScm(graph, intercepts, coefficients, noise_var, bernoulli)
        except FaircauseError as err:
            raise SpecSemanticError(str(err)) from err


def parse_graph_spec(text: str) -> ParsedSpec:
    """Parse spec text into a graph, an optional model, role tags, and meta."""
    return _Parser(text).parse()


# --- canonical export ---

def _render_value(value) -> str:
    if isinstance(value, bool):
        raise SpecSemanticError(f"cannot render boolean value {value!r}")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    text = str(value)
    if not _IDENT_RE.fullmatch(text):
        raise SpecSemanticError(
            f"value {value!r} is not expressible in the spec format"
        )
    return text


def _render_list(values) -> str:
    return "[" + ", ".join(_render_value(v) for v in values) + "]"


def _render_meta(value: str) -> str:
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _func_lines(scm: DiscreteScm, node) -> list:
    parents = scm.graph.parents(node)
    exo = scm.exogenous[node]
    axes = [scm.domains[p] for p in parents] + [tuple(exo.support)]
    compiled = scm._tables[node]
    outputs = {}
    for combo, idx in zip(
        itertools.product(*axes),
        itertools.product(*(range(len(axis)) for axis in axes)),
    ):
        outputs[combo] = scm.domains[node][int(compiled[idx])]
    counts = {}
    for value in outputs.values():
        counts[value] = counts.get(value, 0) + 1
    rank = {v: i for i, v in enumerate(scm.domains[node])}
    default = max(counts, key=lambda v: (counts[v], -rank[v]))
    header = ", ".join(parents + (f"U_{node}",))
    lines = [f"func {node}({header}) {{"]
    for combo, value in outputs.items():
        if value != default:
            rendered = ", ".join(_render_value(v) for v in combo)
            lines.append(f"  ({rendered}) -> {_render_value(value)};")
    lines.append(f"  default -> {_render_value(default)}")
    lines.append("}")
    return lines


def _assign_line(scm: LinearGaussianScm, node) -> str:
    if node in scm.bernoulli:
        return f"assign {node} = bernoulli({scm.bernoulli[node]!r})"
    pieces = [repr(scm.intercepts[node])]
    for parent in scm.graph.parents(node):
        coefficient = scm.coefficients[node][parent]
        sign = "-" if coefficient < 0 else "+"
        pieces.append(f"{sign} {abs(coefficient)!r}*{parent}")
    pieces.append(f"+ noise({scm.noise_var[node]!r})")
    return f"assign {node} = " + " ".join(pieces)


def export_graph_spec(graph: CausalGraph, scm=None, roles=None, meta=None, domains=None) -> str:
    """Render canonical spec text for a graph and optional model.

    For a graph-only export, ``domains`` may map node names to value tuples;
    nodes without one are written as numeric (empty domain).
    """
    lines = []
    if isinstance(scm, DiscreteScm):
        lines.append(f"model {MODEL_DISCRETE}")
    elif isinstance(scm, LinearGaussianScm):
        lines.append(f"model {MODEL_LINEAR}")
    elif scm is not None:
        raise SpecSemanticError(f"cannot export model of type {type(scm).__name__}")
    for key in sorted(meta or {}):
        lines.append(f"meta {key} = {_render_meta(str(meta[key]))}")
    for node in graph.nodes:
        if isinstance(scm, DiscreteScm):
            domain_text = _render_list(scm.domains[node])
        elif isinstance(scm, LinearGaussianScm):
            domain_text = "[0, 1]" if node in scm.bernoulli else "[]"
        else:
            domain_text = _render_list((domains or {}).get(node, ()))
        suffix = "" if graph.is_observed(node) else ", observed: false"
        lines.append(f"node {node} {{ domain: {domain_text}{suffix} }}")
    for cause, effect in graph.edges:
        lines.append(f"edge {cause} -> {effect}")
    if isinstance(scm, DiscreteScm):
        for node in graph.nodes:
            exo = scm.exogenous[node]
            lines.append(
                f"exo U_{node} {{ support: {_render_list(exo.support)}, "
                f"probs: {_render_list(exo.probs)} }}"
            )
        for node in graph.nodes:
            lines.extend(_func_lines(scm, node))
    elif isinstance(scm, LinearGaussianScm):
        for node in graph.nodes:
            lines.append(_assign_line(scm, node))
    for node in sorted(roles or {}):
        lines.append(f"role {node} = {(roles or {})[node]}")
    return "\n".join(lines) + "\n"
