"""Recursive-descent parser for the supported SPARQL fragment.

Anything outside the fragment that is recognisably SPARQL (updates, SERVICE,
property paths, subqueries, other aggregates, ...) is rejected with an
UnsupportedFeatureError naming the construct, rather than a generic syntax
error.
"""

from __future__ import annotations

import re

from ..rdf.errors import position
from ..rdf.iri import resolve
from ..rdf.terms import (
    IRI,
    RDF,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    Literal,
    is_absolute_iri,
)
from ..rdf.turtle import BLANK_LABEL, IRIREF, PN_LOCAL, PN_PREFIX, _U_CHARS, _unescape_string, unescape_iri
from .ast import (
    BGP,
    Call,
    Const,
    CountAggregate,
    GroupPattern,
    Op,
    OptionalPattern,
    Query,
    QuerySyntaxError,
    SubGroup,
    TriplePattern,
    UnionPattern,
    UnsupportedFeatureError,
    Var,
)

_VARNAME = rf"[{_U_CHARS}0-9][{_U_CHARS}0-9\u00B7\u0300-\u036F\u203F-\u2040]*"

_TOKEN = re.compile(
    "|".join(
        [
            r"(?P<WS>[ \t\r\n]+|#[^\r\n]*)",
            rf"(?P<IRI>{IRIREF})",
            rf"(?P<VAR>[?$]{_VARNAME})",
            r'(?P<LSTR2>"""(?:(?:"|"")?(?:[^"\\]|\\[\s\S]))*""")',
            r"(?P<LSTR1>'''(?:(?:'|'')?(?:[^'\\]|\\[\s\S]))*''')",
            r'(?P<STR2>"(?:[^"\\\r\n]|\\[^\r\n])*")',
            r"(?P<STR1>'(?:[^'\\\r\n]|\\[^\r\n])*')",
            r"(?P<LANG>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)",
            r"(?P<DOUBLE>[+-]?(?:[0-9]+\.[0-9]*[eE][+-]?[0-9]+|\.[0-9]+[eE][+-]?[0-9]+|[0-9]+[eE][+-]?[0-9]+))",
            r"(?P<DECIMAL>[+-]?[0-9]*\.[0-9]+)",
            r"(?P<INTEGER>[+-]?[0-9]+)",
            rf"(?P<BNODE>{BLANK_LABEL})",
            rf"(?P<PNAME>(?:{PN_PREFIX})?:(?:{PN_LOCAL})?)",
            r"(?P<WORD>[A-Za-z_][A-Za-z_0-9]*)",
            r"(?P<PUNCT>\^\^|&&|\|\||!=|<=|>=|[{}()\[\].,;*=<>!+\-/|^?])",
            r"(?P<ERR>[\s\S])",
        ]
    )
)

_EOF = ("EOF", "", -1)
_COMPARISONS = ("=", "!=", "<", ">", "<=", ">=")
_UPDATE = ("INSERT", "DELETE", "LOAD", "CLEAR", "DROP", "CREATE", "ADD", "MOVE", "COPY", "WITH")
_GROUP_KEYWORDS = {
    "SERVICE": "federated query (SERVICE)",
    "GRAPH": "named graph patterns (GRAPH)",
    "MINUS": "MINUS",
    "BIND": "BIND",
    "VALUES": "VALUES",
}
_OTHER_AGGREGATES = ("SUM", "AVG", "MIN", "MAX", "SAMPLE", "GROUP_CONCAT")
# name -> (min args, max args)
BUILTINS = {
    "BOUND": (1, 1),
    "REGEX": (2, 3),
    "STR": (1, 1),
    "LANG": (1, 1),
    "DATATYPE": (1, 1),
    "ISIRI": (1, 1),
    "ISURI": (1, 1),
    "ISBLANK": (1, 1),
    "ISLITERAL": (1, 1),
    "ISNUMERIC": (1, 1),
    "CONTAINS": (2, 2),
    "STRSTARTS": (2, 2),
    "STRENDS": (2, 2),
    "LCASE": (1, 1),
    "UCASE": (1, 1),
    "STRLEN": (1, 1),
    "SAMETERM": (2, 2),
    "LANGMATCHES": (2, 2),
}


def _tokenize(text: str):
    tokens = []
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        if kind == "WS":
            continue
        if kind == "ERR":
            line, col = position(text, m.start())
            ch = m.group()
            if ch in "\"'":
                raise QuerySyntaxError("unterminated string literal", line, col)
            raise QuerySyntaxError(f"unexpected character {ch!r}", line, col)
        tokens.append((kind, m.group(), m.start()))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.prefixes: dict[str, str] = {}
        self.base: str | None = None
        self.anon = 0

    # -- token helpers ---------------------------------------------------------

    def peek(self, ahead: int = 0):
        j = self.i + ahead
        return self.tokens[j] if j < len(self.tokens) else _EOF

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def where(self, tok=None):
        tok = tok or self.peek()
        offset = tok[2] if tok[2] >= 0 else len(self.text)
        return position(self.text, offset)

    def error(self, message: str, tok=None) -> QuerySyntaxError:
        return QuerySyntaxError(message, *self.where(tok))

    def unsupported(self, feature: str, tok=None) -> UnsupportedFeatureError:
        return UnsupportedFeatureError(feature, *self.where(tok))

    def is_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok[0] == "PUNCT" and tok[1] == value

    def accept_punct(self, value: str) -> bool:
        if self.is_punct(value):
            self.i += 1
            return True
        return False

    def expect_punct(self, value: str, what: str | None = None):
        if not self.accept_punct(value):
            tok = self.peek()
            found = "end of query" if tok is _EOF else repr(tok[1])
            raise self.error(f"expected {what or repr(value)}, found {found}")

    def keyword(self, ahead: int = 0) -> str | None:
        tok = self.peek(ahead)
        return tok[1].upper() if tok[0] == "WORD" else None

    def accept_keyword(self, word: str) -> bool:
        if self.keyword() == word:
            self.i += 1
            return True
        return False

    def expect_keyword(self, word: str):
        if not self.accept_keyword(word):
            raise self.error(f"expected {word}")

    # -- query structure -------------------------------------------------------

    def parse(self) -> Query:
        self.prologue()
        kw = self.keyword()
        if kw == "SELECT":
            query = self.select()
        elif kw == "ASK":
            self.i += 1
            self.dataset_clause()
            query = Query("ASK", self.where_clause())
            self.modifiers(query)
        elif kw == "CONSTRUCT":
            query = self.construct()
        elif kw in _UPDATE:
            raise self.unsupported(f"SPARQL update ({kw})")
        elif kw == "DESCRIBE":
            raise self.unsupported("DESCRIBE queries")
        else:
            raise self.error("expected SELECT, ASK or CONSTRUCT")
        if self.keyword() == "VALUES":
            raise self.unsupported("VALUES")
        if self.peek() is not _EOF:
            raise self.error(f"unexpected {self.peek()[1]!r} after end of query")
        query.prefixes = dict(self.prefixes)
        return query

    def prologue(self):
        while True:
            kw = self.keyword()
            if kw == "PREFIX":
                self.i += 1
                kind, value, _ = tok = self.next()
                if kind != "PNAME" or not value.endswith(":") or value.count(":") != 1:
                    raise self.error("expected a prefix name such as 'ex:'", tok)
                self.prefixes[value[:-1]] = self.iriref(self.expect_iri_token())
            elif kw == "BASE":
                self.i += 1
                self.base = self.iriref(self.expect_iri_token())
            else:
                return

    def expect_iri_token(self):
        tok = self.next()
        if tok[0] != "IRI":
            raise self.error("expected an IRI in angle brackets", tok)
        return tok

    def iriref(self, tok) -> str:
        try:
            value = unescape_iri(tok[1][1:-1])
        except ValueError as exc:
            raise self.error(str(exc), tok) from None
        if not is_absolute_iri(value):
            if self.base is None:
                raise self.error(f"relative IRI <{value}> used without a BASE", tok)
            value = resolve(self.base, value)
        return value

    def dataset_clause(self):
        if self.keyword() in ("FROM",):
            raise self.unsupported("dataset clauses (FROM)")

    def select(self) -> Query:
        self.i += 1
        query = Query("SELECT", GroupPattern())
        if self.accept_keyword("DISTINCT"):
            query.distinct = True
        else:
            self.accept_keyword("REDUCED")  # permission to drop duplicates; a no-op here
        positions = {}
        if self.accept_punct("*"):
            query.projection = None
        else:
            items = []
            while True:
                tok = self.peek()
                if tok[0] == "VAR":
                    self.i += 1
                    name = tok[1][1:]
                    if name in positions:
                        raise self.error(f"variable ?{name} projected twice", tok)
                    positions[name] = tok
                    items.append(name)
                elif self.is_punct("("):
                    agg = self.projection_aggregate()
                    if agg.alias in positions:
                        raise self.error(f"variable ?{agg.alias} projected twice", tok)
                    positions[agg.alias] = tok
                    items.append(agg)
                else:
                    break
            if not items:
                raise self.error("expected '*' or at least one projected variable")
            query.projection = items
        self.dataset_clause()
        query.pattern = self.where_clause()
        self.modifiers(query)
        self.check_select(query, positions)
        return query

    def projection_aggregate(self) -> CountAggregate:
        self.expect_punct("(")
        kw = self.keyword()
        if kw in _OTHER_AGGREGATES:
            raise self.unsupported(f"aggregate {kw} (only COUNT is supported)")
        if kw != "COUNT":
            raise self.unsupported("projection expressions (only COUNT(...) AS ?var)")
        self.i += 1
        self.expect_punct("(")
        distinct = self.accept_keyword("DISTINCT")
        if self.accept_punct("*"):
            var = None
        else:
            tok = self.next()
            if tok[0] != "VAR":
                raise self.unsupported("COUNT over an expression (use a variable or *)", tok)
            var = tok[1][1:]
        self.expect_punct(")")
        self.expect_keyword("AS")
        tok = self.next()
        if tok[0] != "VAR":
            raise self.error("expected a variable after AS", tok)
        self.expect_punct(")")
        return CountAggregate(tok[1][1:], var, distinct)

    def check_select(self, query: Query, positions: dict):
        in_pattern = set(query.pattern.variables())
        aggregates = query.aggregates
        grouped = bool(aggregates or query.group_by)
        for name in query.group_by:
            if name not in in_pattern:
                raise self.error(f"GROUP BY variable ?{name} does not appear in the pattern")
        if query.projection is None:
            if grouped:
                raise self.error("SELECT * cannot be combined with GROUP BY")
            return
        for item in query.projection:
            if isinstance(item, CountAggregate):
                if item.alias in in_pattern:
                    raise self.error(f"alias ?{item.alias} is already used in the pattern", positions[item.alias])
                if item.var is not None and item.var not in in_pattern:
                    raise self.error(f"counted variable ?{item.var} does not appear in the pattern", positions[item.alias])
                continue
            if item not in in_pattern:
                raise self.error(f"projected variable ?{item} does not appear in the pattern", positions[item])
            if grouped and item not in query.group_by:
                raise self.error(f"variable ?{item} must appear in GROUP BY to be projected", positions[item])

    def construct(self) -> Query:
        self.i += 1
        if self.accept_keyword("WHERE"):
            self.expect_punct("{")
            patterns = self.triples_until("}")
            self.expect_punct("}")
            group = GroupPattern([BGP(list(patterns))] if patterns else [])
            query = Query("CONSTRUCT", group, template=patterns)
        else:
            self.expect_punct("{", "'{' to open the CONSTRUCT template")
            template = self.triples_until("}")
            self.expect_punct("}")
            self.dataset_clause()
            query = Query("CONSTRUCT", self.where_clause(), template=template)
        self.modifiers(query)
        return query

    def triples_until(self, closer: str) -> list[TriplePattern]:
        out: list[TriplePattern] = []
        while not self.is_punct(closer):
            if self.peek() is _EOF:
                raise self.error(f"expected {closer!r}")
            self.triples_same_subject(out)
            if not self.accept_punct("."):
                break
        return out

    def where_clause(self) -> GroupPattern:
        self.accept_keyword("WHERE")
        if not self.is_punct("{"):
            raise self.error("expected '{' to open the WHERE clause")
        return self.group()

    def modifiers(self, query: Query):
        if self.accept_keyword("GROUP"):
            self.expect_keyword("BY")
            while self.peek()[0] == "VAR":
                query.group_by.append(self.next()[1][1:])
            if not query.group_by:
                if self.is_punct("("):
                    raise self.unsupported("GROUP BY expressions")
                raise self.error("expected a variable after GROUP BY")
        if self.keyword() == "HAVING":
            raise self.unsupported("HAVING")
        if self.accept_keyword("ORDER"):
            self.expect_keyword("BY")
            while True:
                kw = self.keyword()
                if kw in ("ASC", "DESC"):
                    self.i += 1
                    self.expect_punct("(")
                    expr = self.expression()
                    self.expect_punct(")")
                    query.order_by.append((expr, kw == "ASC"))
                elif self.peek()[0] == "VAR":
                    query.order_by.append((Var(self.next()[1][1:]), True))
                elif self.is_punct("("):
                    self.i += 1
                    expr = self.expression()
                    self.expect_punct(")")
                    query.order_by.append((expr, True))
                elif kw is not None and kw not in ("LIMIT", "OFFSET", "VALUES"):
                    query.order_by.append((self.builtin_call(), True))
                else:
                    break
            if not query.order_by:
                raise self.error("expected an ordering condition after ORDER BY")
        seen = set()
        while self.keyword() in ("LIMIT", "OFFSET") and self.keyword() not in seen:
            kw = self.keyword()
            seen.add(kw)
            self.i += 1
            tok = self.next()
            if tok[0] != "INTEGER" or tok[1].startswith("-"):
                raise self.error(f"{kw} requires a non-negative integer", tok)
            if kw == "LIMIT":
                query.limit = int(tok[1])
            else:
                query.offset = int(tok[1])

    # -- graph patterns --------------------------------------------------------

    def group(self) -> GroupPattern:
        self.expect_punct("{")
        if self.keyword() == "SELECT":
            raise self.unsupported("subqueries")
        group = GroupPattern()
        bgp: BGP | None = None
        after_element = False
        while not self.is_punct("}"):
            tok = self.peek()
            if tok is _EOF:
                raise self.error("expected '}' to close the group")
            kw = self.keyword()
            if kw == "OPTIONAL":
                self.i += 1
                group.elements.append(OptionalPattern(self.group()))
                bgp, after_element = None, True
            elif kw == "FILTER":
                self.i += 1
                group.filters.append(self.constraint())
                after_element = True
            elif kw in _GROUP_KEYWORDS:
                raise self.unsupported(_GROUP_KEYWORDS[kw])
            elif self.is_punct("{"):
                branches = [self.group()]
                while self.accept_keyword("UNION"):
                    if not self.is_punct("{"):
                        raise self.error("expected '{' after UNION")
                    branches.append(self.group())
                group.elements.append(SubGroup(branches[0]) if len(branches) == 1 else UnionPattern(branches))
                bgp, after_element = None, True
            elif self.is_punct(".") and after_element:
                self.i += 1
                after_element = False
            else:
                if bgp is None:
                    bgp = BGP()
                    group.elements.append(bgp)
                self.triples_same_subject(bgp.patterns)
                after_element = False
                if not self.accept_punct("."):
                    if not (self.is_punct("}") or self.is_punct("{") or self.keyword() in ("OPTIONAL", "FILTER")):
                        kw = self.keyword()
                        if kw in _GROUP_KEYWORDS:
                            raise self.unsupported(_GROUP_KEYWORDS[kw])
                        raise self.error("expected '.' or '}' after triple pattern")
        self.i += 1
        return group

    def constraint(self):
        if self.is_punct("("):
            self.i += 1
            expr = self.expression()
            self.expect_punct(")")
            return expr
        kind = self.peek()[0]
        if kind in ("IRI", "PNAME"):
            raise self.unsupported(f"extension function {self.peek()[1]}")
        if kind == "WORD":
            return self.builtin_call()
        raise self.error("expected '(' or a function call after FILTER")

    def triples_same_subject(self, out: list[TriplePattern]):
        if self.is_punct("["):
            subject = self.blank_node_property_list(out)
            if self.is_punct(".") or self.is_punct("}"):
                return
        elif self.is_punct("("):
            subject = self.collection(out)
        else:
            subject = self.var_or_term("subject")
        self.property_list(subject, out)

    def property_list(self, subject, out: list[TriplePattern]):
        self.verb_object_list(subject, out)
        while self.accept_punct(";"):
            while self.accept_punct(";"):
                pass
            if self.is_punct(".") or self.is_punct("]") or self.is_punct("}"):
                return
            self.verb_object_list(subject, out)

    def verb_object_list(self, subject, out: list[TriplePattern]):
        tok = self.peek()
        if tok[0] == "PUNCT" and tok[1] in "^!(":
            raise self.unsupported("property paths")
        if tok[0] == "WORD" and tok[1] == "a":
            self.i += 1
            verb = RDF_TYPE
        elif tok[0] == "VAR":
            self.i += 1
            verb = Var(tok[1][1:])
        elif tok[0] in ("IRI", "PNAME"):
            verb = self.iri()
        else:
            raise self.error("expected a predicate (IRI, variable or 'a')")
        nxt = self.peek()
        if nxt[0] == "PUNCT" and nxt[1] in ("/", "|", "^", "*", "+", "?"):
            raise self.unsupported("property paths", nxt)
        while True:
            out.append(TriplePattern(subject, verb, self.object(out)))
            if not self.accept_punct(","):
                break

    def object(self, out: list[TriplePattern]):
        if self.is_punct("["):
            return self.blank_node_property_list(out)
        if self.is_punct("("):
            return self.collection(out)
        return self.var_or_term("object")

    def fresh_blank(self) -> Var:
        self.anon += 1
        return Var(f"_:#{self.anon}")

    def blank_node_property_list(self, out: list[TriplePattern]) -> Var:
        self.i += 1
        node = self.fresh_blank()
        if self.accept_punct("]"):
            return node
        self.property_list(node, out)
        self.expect_punct("]", "']' to close the blank node")
        return node

    def collection(self, out: list[TriplePattern]):
        self.i += 1
        items = []
        while not self.accept_punct(")"):
            if self.peek() is _EOF:
                raise self.error("expected ')' to close the collection")
            items.append(self.object(out))
        nil = IRI(RDF + "nil")
        if not items:
            return nil
        first, rest = IRI(RDF + "first"), IRI(RDF + "rest")
        head = node = self.fresh_blank()
        for index, item in enumerate(items):
            out.append(TriplePattern(node, first, item))
            nxt = self.fresh_blank() if index + 1 < len(items) else nil
            out.append(TriplePattern(node, rest, nxt))
            node = nxt
        return head

    def var_or_term(self, role: str):
        tok = self.peek()
        kind = tok[0]
        if kind == "VAR":
            self.i += 1
            return Var(tok[1][1:])
        if kind == "BNODE":
            self.i += 1
            return Var(tok[1])
        if kind in ("IRI", "PNAME"):
            return self.iri()
        if self.is_punct("[") or self.is_punct("("):
            raise self.error(f"unexpected {tok[1]!r}")
        term = self.literal()
        if term is None:
            found = "end of query" if tok is _EOF else repr(tok[1])
            raise self.error(f"expected a variable or RDF term as {role}, found {found}")
        return term

    def iri(self) -> IRI:
        tok = self.next()
        if tok[0] == "IRI":
            return IRI(self.iriref(tok))
        if tok[0] == "PNAME":
            prefix, _, local = tok[1].partition(":")
            if prefix not in self.prefixes:
                raise self.error(f"undefined prefix '{prefix}:'", tok)
            local = re.sub(r"\\(.)", r"\1", local)
            return IRI(self.prefixes[prefix] + local)
        raise self.error("expected an IRI", tok)

    def literal(self) -> Literal | None:
        """Parse a literal at the cursor; None (without consuming) if there is none."""
        kind, value, _ = tok = self.peek()
        if kind == "INTEGER":
            self.i += 1
            return Literal(value, XSD_INTEGER)
        if kind == "DECIMAL":
            self.i += 1
            return Literal(value, XSD_DECIMAL)
        if kind == "DOUBLE":
            self.i += 1
            return Literal(value, XSD_DOUBLE)
        if kind == "WORD" and value in ("true", "false"):
            self.i += 1
            return Literal(value, XSD_BOOLEAN)
        if kind not in ("STR1", "STR2", "LSTR1", "LSTR2"):
            return None
        self.i += 1
        quote = 3 if kind.startswith("L") else 1
        try:
            lexical = _unescape_string(value[quote:-quote])
        except ValueError as exc:
            raise self.error(str(exc), tok) from None
        try:
            if self.peek()[0] == "LANG":
                return Literal(lexical, language=self.next()[1][1:])
            if self.accept_punct("^^"):
                return Literal(lexical, self.iri().value)
            return Literal(lexical)
        except ValueError as exc:
            raise self.error(str(exc), tok) from None

    # -- expressions -----------------------------------------------------------

    def expression(self):
        return self.or_expr()

    def or_expr(self):
        args = [self.and_expr()]
        while self.accept_punct("||"):
            args.append(self.and_expr())
        return args[0] if len(args) == 1 else Op("||", tuple(args))

    def and_expr(self):
        args = [self.relational()]
        while self.accept_punct("&&"):
            args.append(self.relational())
        return args[0] if len(args) == 1 else Op("&&", tuple(args))

    def relational(self):
        left = self.unary()
        tok = self.peek()
        if tok[0] == "PUNCT" and tok[1] in _COMPARISONS:
            self.i += 1
            return Op(tok[1], (left, self.unary()))
        negated = False
        if self.keyword() == "NOT" and self.keyword(1) == "IN":
            self.i += 1
            negated = True
        if self.accept_keyword("IN"):
            self.expect_punct("(")
            items = []
            if not self.is_punct(")"):
                items.append(self.expression())
                while self.accept_punct(","):
                    items.append(self.expression())
            self.expect_punct(")")
            return Op("notin" if negated else "in", (left, *items))
        return left

    def unary(self):
        if self.accept_punct("!"):
            return Op("!", (self.unary(),))
        expr = self.primary()
        tok = self.peek()
        if (tok[0] == "PUNCT" and tok[1] in "+-*/") or (
            tok[0] in ("INTEGER", "DECIMAL", "DOUBLE") and tok[1][0] in "+-"
        ):
            raise self.unsupported("arithmetic expressions", tok)
        return expr

    def primary(self):
        tok = self.peek()
        kind = tok[0]
        if self.accept_punct("("):
            expr = self.expression()
            self.expect_punct(")")
            return expr
        if kind == "PUNCT" and tok[1] in "+-":
            raise self.unsupported("arithmetic expressions", tok)
        if kind == "VAR":
            self.i += 1
            return Var(tok[1][1:])
        if kind in ("IRI", "PNAME"):
            iri = self.iri()
            if self.is_punct("("):
                raise self.unsupported(f"extension function <{iri.value}>", tok)
            return Const(iri)
        literal = self.literal()
        if literal is not None:
            return Const(literal)
        if kind == "WORD":
            return self.builtin_call()
        found = "end of query" if tok is _EOF else repr(tok[1])
        raise self.error(f"expected an expression, found {found}")

    def builtin_call(self) -> Call:
        tok = self.next()
        name = tok[1].upper()
        if name == "NOT" and self.keyword() == "EXISTS" or name == "EXISTS":
            raise self.unsupported("EXISTS filters", tok)
        if name == "COUNT" or name in _OTHER_AGGREGATES:
            raise self.unsupported(f"aggregate {name} inside an expression", tok)
        if not self.is_punct("("):
            raise self.error(f"unexpected keyword {tok[1]!r}", tok)
        if name not in BUILTINS:
            raise self.unsupported(f"function {name}", tok)
        self.i += 1
        args = []
        if not self.is_punct(")"):
            args.append(self.expression())
            while self.accept_punct(","):
                args.append(self.expression())
        self.expect_punct(")")
        lo, hi = BUILTINS[name]
        if not lo <= len(args) <= hi:
            raise self.error(f"{name} takes {lo if lo == hi else f'{lo} to {hi}'} argument(s), got {len(args)}", tok)
        if name == "BOUND" and not isinstance(args[0], Var):
            raise self.error("BOUND requires a variable", tok)
        return Call(name, tuple(args))


def parse_query(text: str) -> Query:
    """Parse query text; raises QuerySyntaxError or UnsupportedFeatureError."""
    return _Parser(text).parse()

