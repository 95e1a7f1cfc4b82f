"""Mapping documents: term templates, rules and the text format compiler.

A mapping document is line oriented::

    PREFIX ex: <http://example.org/plant#>
    BASE <http://example.org/data/>

    RULE machine
    SOURCE machines
    SUBJECT ex:machine/{id}
    WHERE status != "scrapped" AND {built year} >= 1990
      a                ex:Machine
      ex:name          {name}@en
      ex:builtIn       {built year}^^xsd:gYear
      ex:locatedAt     <site/{site}>
      ex:serialLabel   "SN-{serial}"
      ex:hasAddress    _:addr
    END

Object templates:

    <...{col}...>           IRI template; values are percent-encoded
    <...{+col}...>          IRI template; value inserted verbatim
    prefix:local{col}       IRI template via a prefix
    <iri>, prefix:local     constant IRI
    {col}                   literal from a column (xsd:string)
    {col}^^xsd:integer      typed literal; the cell is cast to the datatype
    {col}@de                language-tagged literal
    "text {col}"            literal template; "text" alone is a constant
    _:label                 blank node, one per source row and label

Lines starting with '#' are comments. Keywords are case-insensitive.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..rdf import RDF, RDF_TYPE, XSD, IRI, is_absolute_iri
from ..rdf.iri import resolve

TEMPLATE_KINDS = ("iri_template", "constant_iri", "column_literal", "constant_literal", "row_blank_node")
LITERAL_KINDS = ("column_literal", "constant_literal")

DEFAULT_PREFIXES = {
    "rdf": RDF,
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "owl": "http://www.w3.org/2002/07/owl#",
    "xsd": XSD,
}


class MappingError(Exception):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Placeholder:
    column: str
    raw: bool = False  # {+col}: no percent-encoding


@dataclass(frozen=True)
class TermTemplate:
    kind: str
    segments: tuple = ()  # str | Placeholder, for iri_template and column_literal
    value: str | None = None  # constant IRI, constant lexical form or blank node label
    datatype: str | None = None
    language: str | None = None

    @property
    def columns(self) -> list[str]:
        return [s.column for s in self.segments if isinstance(s, Placeholder)]

    @property
    def is_literal(self) -> bool:
        return self.kind in LITERAL_KINDS


@dataclass(frozen=True)
class Statement:
    predicate: IRI
    object: TermTemplate
    line: int | None = None


@dataclass
class MappingRule:
    name: str
    source: str
    subject_template: TermTemplate
    statements: list[Statement] = field(default_factory=list)
    row_filter: tuple | None = None
    line: int | None = None

    @property
    def columns(self) -> list[str]:
        """Every column referenced by the rule, first-use order."""
        seen: dict[str, None] = {}
        for c in self.subject_template.columns:
            seen[c] = None
        for c in filter_columns(self.row_filter):
            seen[c] = None
        for st in self.statements:
            for c in st.object.columns:
                seen[c] = None
        return list(seen)


@dataclass
class MappingPlan:
    rules: list[MappingRule]
    prefixes: dict[str, str]
    base: str | None = None

    def predicates(self) -> set[IRI]:
        return {st.predicate for r in self.rules for st in r.statements if st.predicate != RDF_TYPE}

    def classes(self) -> set[IRI]:
        out = set()
        for r in self.rules:
            for st in r.statements:
                if st.predicate == RDF_TYPE and st.object.kind == "constant_iri":
                    out.add(IRI(st.object.value))
        return out


# ---------------------------------------------------------------- templates

_PLACEHOLDER = re.compile(r"\{(\+?)([^{}]*)\}")
_PNAME = re.compile(r"([A-Za-z][\w.-]*)?:(.*)", re.S)
_LANG = re.compile(r"[A-Za-z]+(?:-[A-Za-z0-9]+)*")
_LITERAL_SUFFIX = re.compile(r"(?:\^\^(\S+)|@(\S+))?")
_STRING_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\", "{": "\x00", "}": "\x01"}


def split_segments(text: str, line: int | None) -> tuple:
    """Split template text into literal strings and Placeholders."""
    out: list = []
    pos = 0
    for m in _PLACEHOLDER.finditer(text):
        chunk = text[pos : m.start()]
        if "{" in chunk or "}" in chunk:
            raise MappingError(f"unbalanced brace in template {text!r}", line)
        if chunk:
            out.append(chunk)
        column = m.group(2).strip()
        if not column:
            raise MappingError(f"empty placeholder in template {text!r}", line)
        out.append(Placeholder(column, bool(m.group(1))))
        pos = m.end()
    tail = text[pos:]
    if "{" in tail or "}" in tail:
        raise MappingError(f"unbalanced brace in template {text!r}", line)
    if tail:
        out.append(tail)
    return tuple(out)


class _Context:
    def __init__(self, prefixes: dict[str, str], base: str | None):
        self.prefixes = prefixes
        self.base = base

    def expand(self, pname: str, line: int | None) -> str:
        m = _PNAME.fullmatch(pname)
        if not m:
            raise MappingError(f"malformed term {pname!r}", line)
        prefix = m.group(1) or ""
        if prefix not in self.prefixes:
            raise MappingError(f"unknown prefix '{prefix}:'", line)
        return self.prefixes[prefix] + m.group(2)

    def constant_iri(self, text: str, line: int | None) -> str:
        if is_absolute_iri(text):
            return text
        if self.base is None:
            raise MappingError(f"relative IRI <{text}> needs a BASE declaration", line)
        return resolve(self.base, text)

    def datatype(self, text: str, line: int | None) -> str:
        if text.startswith("<") and text.endswith(">"):
            return self.constant_iri(text[1:-1], line)
        return self.expand(text, line)


def _unescape(body: str, line: int | None) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            if i + 1 >= len(body) or body[i + 1] not in _STRING_ESCAPES:
                raise MappingError(f"bad escape in string {body!r}", line)
            out.append(_STRING_ESCAPES[body[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _restore_braces(segments: tuple) -> tuple:
    return tuple(s.replace("\x00", "{").replace("\x01", "}") if isinstance(s, str) else s for s in segments)


def _literal_suffix(text: str, ctx: _Context, line: int | None) -> tuple[str | None, str | None]:
    m = _LITERAL_SUFFIX.fullmatch(text)
    if not m:
        raise MappingError(f"malformed literal suffix {text!r}", line)
    if m.group(1):
        return ctx.datatype(m.group(1), line), None
    if m.group(2):
        if not _LANG.fullmatch(m.group(2)):
            raise MappingError(f"malformed language tag {m.group(2)!r}", line)
        return None, m.group(2).lower()
    return None, None


def parse_template(text: str, ctx: _Context, line: int | None = None, subject: bool = False) -> TermTemplate:
    """Parse one template token."""
    if text.startswith("_:"):
        label = text[2:]
        if not re.fullmatch(r"[\w.-]+", label):
            raise MappingError(f"malformed blank node label {text!r}", line)
        return TermTemplate("row_blank_node", value=label)
    if text.startswith("<"):
        end = text.find(">")
        if end != len(text) - 1:
            raise MappingError(f"malformed IRI template {text!r}", line)
        segments = split_segments(text[1:-1], line)
        if not any(isinstance(s, Placeholder) for s in segments):
            return TermTemplate("constant_iri", value=ctx.constant_iri(text[1:-1], line))
        return TermTemplate("iri_template", segments)
    if text.startswith('"'):
        m = re.match(r'"((?:[^"\\]|\\.)*)"', text)
        if not m:
            raise MappingError(f"unterminated string {text!r}", line)
        if subject:
            raise MappingError("a subject must be an IRI or blank node template", line)
        datatype, language = _literal_suffix(text[m.end() :], ctx, line)
        body = _unescape(m.group(1), line)
        segments = _restore_braces(split_segments(body, line))
        if any(isinstance(s, Placeholder) for s in segments):
            return TermTemplate("column_literal", segments, datatype=datatype, language=language)
        return TermTemplate("constant_literal", value="".join(segments), datatype=datatype, language=language)
    if text.startswith("{"):
        end = text.find("}")
        if end < 0:
            raise MappingError(f"unbalanced brace in template {text!r}", line)
        if subject:
            raise MappingError("a subject must be an IRI or blank node template", line)
        segments = split_segments(text[: end + 1], line)
        datatype, language = _literal_suffix(text[end + 1 :], ctx, line)
        return TermTemplate("column_literal", segments, datatype=datatype, language=language)
    m = _PNAME.fullmatch(text)
    if m and "{" not in (m.group(1) or ""):
        # expand on the raw text so braces in the local part survive
        expanded = ctx.expand(text, line)
        segments = split_segments(expanded, line)
        if any(isinstance(s, Placeholder) for s in segments):
            return TermTemplate("iri_template", segments)
        return TermTemplate("constant_iri", value=expanded)
    raise MappingError(f"cannot parse template {text!r}", line)


# ---------------------------------------------------------------- row filters
#
# expr   := and ("OR" and)*
# and    := unary ("AND" unary)*
# unary  := "NOT" unary | "(" expr ")" | cmp
# cmp    := operand ("=" | "!=" | "<" | "<=" | ">" | ">=") operand | operand "IS" ["NOT"] "NULL"
# operand:= column | {column with spaces} | "string" | number

_FILTER_TOKEN = re.compile(
    r'\s*(?:(?P<str>"(?:[^"\\]|\\.)*")|(?P<num>[+-]?\d+(?:\.\d+)?)(?![\w])|(?P<col>\{[^{}]+\})'
    r"|(?P<op>!=|<=|>=|=|<|>|\(|\))|(?P<word>[^\s()=!<>\"{}]+))"
)


def _filter_tokens(text: str, line: int | None) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _FILTER_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise MappingError(f"cannot parse filter near {text[pos:]!r}", line)
        pos = m.end()
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
    return out


class _FilterParser:
    def __init__(self, text: str, line: int | None):
        self.tokens = _filter_tokens(text, line)
        self.i = 0
        self.line = line

    def peek_word(self) -> str | None:
        if self.i < len(self.tokens) and self.tokens[self.i][0] == "word":
            return self.tokens[self.i][1].upper()
        return None

    def take(self):
        if self.i >= len(self.tokens):
            raise MappingError("filter ends unexpectedly", self.line)
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise MappingError("empty WHERE filter", self.line)
        expr = self.expr()
        if self.i != len(self.tokens):
            raise MappingError(f"unexpected {self.tokens[self.i][1]!r} in filter", self.line)
        return expr

    def expr(self):
        args = [self.conj()]
        while self.peek_word() == "OR":
            self.i += 1
            args.append(self.conj())
        return args[0] if len(args) == 1 else ("or", *args)

    def conj(self):
        args = [self.unary()]
        while self.peek_word() == "AND":
            self.i += 1
            args.append(self.unary())
        return args[0] if len(args) == 1 else ("and", *args)

    def unary(self):
        if self.peek_word() == "NOT":
            self.i += 1
            return ("not", self.unary())
        if self.i < len(self.tokens) and self.tokens[self.i] == ("op", "("):
            self.i += 1
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise MappingError("expected ')' in filter", self.line)
            return inner
        left = self.operand()
        if self.peek_word() == "IS":
            self.i += 1
            negate = self.peek_word() == "NOT"
            if negate:
                self.i += 1
            if self.peek_word() != "NULL":
                raise MappingError("expected NULL after IS", self.line)
            self.i += 1
            if left[0] != "col":
                raise MappingError("IS NULL needs a column", self.line)
            return ("notnull" if negate else "null", left)
        kind, op = self.take()
        if kind != "op" or op in "()":
            raise MappingError(f"expected a comparison operator, got {op!r}", self.line)
        return ("cmp", op, left, self.operand())

    def operand(self):
        kind, text = self.take()
        if kind == "str":
            return ("const", _unescape(text[1:-1], self.line))
        if kind == "num":
            return ("const", text)
        if kind == "col":
            return ("col", text[1:-1].strip())
        if kind == "word" and text.upper() not in ("AND", "OR", "NOT", "IS", "NULL"):
            return ("col", text)
        raise MappingError(f"unexpected {text!r} in filter", self.line)


def parse_filter(text: str, line: int | None = None) -> tuple:
    return _FilterParser(text, line).parse()


def filter_columns(expr) -> list[str]:
    if expr is None:
        return []
    if expr[0] == "col":
        return [expr[1]]
    if expr[0] == "const":
        return []
    out = []
    for arg in expr[1:]:
        if isinstance(arg, tuple):
            out += filter_columns(arg)
    return out


def _number(text: str):
    try:
        return float(text)
    except ValueError:
        return None


def eval_filter(expr, row: dict) -> bool:
    """Evaluate a filter; comparisons with a null operand are false."""
    tag = expr[0]
    if tag == "and":
        return all(eval_filter(a, row) for a in expr[1:])
    if tag == "or":
        return any(eval_filter(a, row) for a in expr[1:])
    if tag == "not":
        return not eval_filter(expr[1], row)
    if tag == "null":
        return row[expr[1][1]] is None
    if tag == "notnull":
        return row[expr[1][1]] is not None
    _, op, left, right = expr
    a = row[left[1]] if left[0] == "col" else left[1]
    b = row[right[1]] if right[0] == "col" else right[1]
    if a is None or b is None:
        return False
    na, nb = _number(a), _number(b)
    if na is not None and nb is not None:
        a, b = na, nb
    return {
        "=": a == b,
        "!=": a != b,
        "<": a < b,
        "<=": a <= b,
        ">": a > b,
        ">=": a >= b,
    }[op]


# ---------------------------------------------------------------- document

_TOKEN = re.compile(r'<[^>]*>\S*|"(?:[^"\\]|\\.)*"\S*|(?:[^\s{"<]|\{[^{}]*\})+')
_PREFIX_LINE = re.compile(r"PREFIX\s+([A-Za-z][\w.-]*)?:\s*<([^>]*)>\s*\.?\s*$", re.I)
_BASE_LINE = re.compile(r"BASE\s+<([^>]*)>\s*\.?\s*$", re.I)
_KEYWORD = re.compile(r"(RULE|SOURCE|SUBJECT|WHERE|END)\b\s*(.*)$", re.I)


def _tokens(text: str, line: int) -> list[str]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise MappingError(f"cannot read {text[pos:]!r}", line)
        out.append(m.group(0))
        pos = m.end()
    return out


def compile_mapping(document: str) -> MappingPlan:
    """Compile a mapping document into a validated MappingPlan."""
    prefixes = dict(DEFAULT_PREFIXES)
    ctx = _Context(prefixes, None)
    rules: list[MappingRule] = []
    current: dict | None = None
    names: set[str] = set()

    def finish(line: int) -> None:
        nonlocal current
        if current["source"] is None:
            raise MappingError(f"rule {current['name']!r} has no SOURCE", current["line"])
        if current["subject"] is None:
            raise MappingError(f"rule {current['name']!r} has no SUBJECT", current["line"])
        if not current["statements"]:
            raise MappingError(f"rule {current['name']!r} has no statements", current["line"])
        rules.append(
            MappingRule(
                current["name"],
                current["source"],
                current["subject"],
                current["statements"],
                current["filter"],
                current["line"],
            )
        )
        current = None

    for lineno, raw in enumerate(document.splitlines(), 1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        m = _KEYWORD.match(text)
        if current is None:
            pm = _PREFIX_LINE.match(text)
            if pm:
                namespace = pm.group(2)
                if not is_absolute_iri(namespace):
                    namespace = ctx.constant_iri(namespace, lineno)
                prefixes[pm.group(1) or ""] = namespace
                continue
            bm = _BASE_LINE.match(text)
            if bm:
                base = bm.group(1)
                ctx.base = base if is_absolute_iri(base) else ctx.constant_iri(base, lineno)
                continue
            if not m or m.group(1).upper() != "RULE":
                raise MappingError(f"expected PREFIX, BASE or RULE, got {text!r}", lineno)
            name = m.group(2).strip() or f"rule{len(rules) + 1}"
            if name in names:
                raise MappingError(f"duplicate rule name {name!r}", lineno)
            names.add(name)
            current = {"name": name, "source": None, "subject": None, "filter": None, "statements": [], "line": lineno}
            continue
        if m:
            keyword, rest = m.group(1).upper(), m.group(2).strip()
            if keyword == "END":
                finish(lineno)
                continue
            if keyword == "RULE":
                raise MappingError(f"rule {current['name']!r} is missing END", lineno)
            if current["statements"]:
                raise MappingError(f"{keyword} must come before the statements", lineno)
            if current[keyword.lower() if keyword != "WHERE" else "filter"] is not None:
                raise MappingError(f"duplicate {keyword}", lineno)
            if not rest:
                raise MappingError(f"{keyword} needs a value", lineno)
            if keyword == "SOURCE":
                current["source"] = rest
            elif keyword == "SUBJECT":
                toks = _tokens(rest, lineno)
                if len(toks) != 1:
                    raise MappingError("SUBJECT takes exactly one template", lineno)
                current["subject"] = parse_template(toks[0], ctx, lineno, subject=True)
            else:
                current["filter"] = parse_filter(rest, lineno)
            continue
        if text.endswith((" ;", " .")):
            text = text[:-2]
        toks = _tokens(text, lineno)
        if len(toks) != 2:
            raise MappingError(f"statement needs a predicate and one object, got {text!r}", lineno)
        pred_text, obj_text = toks
        if pred_text == "a":
            predicate = RDF_TYPE
        else:
            pt = parse_template(pred_text, ctx, lineno)
            if pt.kind != "constant_iri":
                raise MappingError(f"predicate must be a constant IRI, got {pred_text!r}", lineno)
            predicate = IRI(pt.value)
        current["statements"].append(Statement(predicate, parse_template(obj_text, ctx, lineno), lineno))
    if current is not None:
        raise MappingError(f"rule {current['name']!r} is missing END", current["line"])
    if not rules:
        raise MappingError("mapping document defines no rules")
    return MappingPlan(rules, prefixes, ctx.base)
