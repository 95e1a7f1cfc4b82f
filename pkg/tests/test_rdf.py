import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgforge.rdf import (
    IRI,
    XSD,
    BlankNode,
    Dataset,
    Graph,
    Literal,
    RDFSyntaxError,
    parse_nquads,
    parse_ntriples,
    parse_turtle,
    serialize,
    validate_syntax,
)
from kgforge.rdf.iri import resolve

from oracles import NS, isomorphic, random_graph

EX = "http://ex.org/"


def ex(local):
    return IRI(EX + local)


class TestTerms:
    def test_iri_must_be_absolute(self):
        with pytest.raises(ValueError):
            IRI("relative/path")

    def test_literal_defaults_to_xsd_string(self):
        assert Literal("x").datatype == XSD + "string"

    def test_language_literal_is_langstring(self):
        lit = Literal("Hallo", language="DE")
        assert lit.datatype == "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"
        assert lit.language == "de"

    def test_literal_equality_is_term_equality(self):
        assert Literal("1", XSD + "integer") != Literal("01", XSD + "integer")
        assert Literal("1", XSD + "integer") != Literal("1", XSD + "decimal")
        assert Literal("a", language="en") != Literal("a")

    def test_distinct_kinds_never_equal(self):
        assert IRI("urn:x") != Literal("urn:x")
        assert BlankNode("x") != Literal("x")

    def test_empty_blank_label_rejected(self):
        with pytest.raises(ValueError):
            BlankNode("")


class TestGraph:
    def test_duplicate_insert_keeps_size(self):
        g = Graph()
        assert g.add((ex("a"), ex("p"), ex("b")))
        assert not g.add((ex("a"), ex("p"), ex("b")))
        assert len(g) == 1

    def test_literal_subject_rejected(self):
        with pytest.raises(ValueError):
            Graph().add((Literal("x"), ex("p"), ex("b")))

    def test_non_iri_predicate_rejected(self):
        with pytest.raises(ValueError):
            Graph().add((ex("a"), BlankNode(), ex("b")))

    @given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 2), st.integers(0, 4))))
    def test_size_equals_distinct_count(self, rows):
        g = Graph((ex(f"s{s}"), ex(f"p{p}"), ex(f"o{o}")) for s, p, o in rows)
        assert len(g) == len(set(rows))


class TestParseTurtle:
    def test_empty_document(self):
        assert len(parse_turtle("")) == 0

    def test_minimal_document_default_string_datatype(self):
        g = parse_turtle('<http://ex.org/a> <http://ex.org/p> "x" .')
        assert list(g) == [(ex("a"), ex("p"), Literal("x", XSD + "string"))]

    def test_prefix_expansion_matches_concatenation(self):
        namespace, local = "http://ex.org/", "a"
        g = parse_turtle("@prefix ex: <http://ex.org/> . ex:a ex:p ex:b .")
        assert set(g) == {(IRI(namespace + local), IRI(namespace + "p"), IRI(namespace + "b"))}

    def test_sparql_style_directives(self):
        g = parse_turtle("PREFIX ex: <http://ex.org/>\nBASE <http://base.org/dir/>\nex:a ex:p <rel> .")
        assert set(g) == {(ex("a"), ex("p"), IRI("http://base.org/dir/rel"))}

    def test_relative_iri_without_base_is_error(self):
        with pytest.raises(RDFSyntaxError, match="base"):
            parse_turtle("<a> <http://ex.org/p> <b> .")

    def test_relative_iri_with_base(self):
        g = parse_turtle("<a> <http://ex.org/p> <../b> .", base="http://ex.org/x/y")
        assert set(g) == {(IRI("http://ex.org/x/a"), ex("p"), IRI("http://ex.org/b"))}

    def test_predicate_object_and_object_lists(self):
        g = parse_turtle("@prefix ex: <http://ex.org/> . ex:a ex:p ex:b , ex:c ; ex:q 1 ; a ex:T .")
        assert len(g) == 4
        assert (ex("a"), ex("q"), Literal("1", XSD + "integer")) in g
        assert (ex("a"), IRI("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), ex("T")) in g

    def test_numeric_and_boolean_literals(self):
        g = parse_turtle("@prefix ex: <http://ex.org/> . ex:a ex:p -5, 1.5, 2E3, .5e-1, false .")
        got = {t[2] for t in g}
        assert got == {
            Literal("-5", XSD + "integer"),
            Literal("1.5", XSD + "decimal"),
            Literal("2E3", XSD + "double"),
            Literal(".5e-1", XSD + "double"),
            Literal("false", XSD + "boolean"),
        }

    def test_string_forms_and_escapes(self):
        text = (
            '@prefix ex: <http://ex.org/> .\n'
            "ex:a ex:p 'single', \"\"\"long\n\"quoted\" text\"\"\", \"tab\\tu\\u00e9\\U0001F600\", "
            "'''x''' , \"typed\"^^ex:dt , \"hi\"@en-GB ."
        )
        got = {t[2] for t in parse_turtle(text)}
        assert Literal("single") in got
        assert Literal('long\n"quoted" text') in got
        assert Literal("tab\tué\U0001F600") in got
        assert Literal("typed", EX + "dt") in got
        assert Literal("hi", language="en-gb") in got

    def test_blank_node_property_list_and_anon(self):
        g = parse_turtle("@prefix ex: <http://ex.org/> . ex:a ex:p [ ex:q 1 ] . [] ex:r 2 . [ ex:s 3 ] .")
        assert len(g) == 4
        inner = next(t[2] for t in g if t[1] == ex("p"))
        assert isinstance(inner, BlankNode)
        assert (inner, ex("q"), Literal("1", XSD + "integer")) in g

    def test_collection(self):
        g = parse_turtle("@prefix ex: <http://ex.org/> . ex:a ex:list (1 2) . ex:b ex:list () .")
        rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
        assert (ex("b"), ex("list"), IRI(rdf + "nil")) in g
        assert len(g) == 6

    def test_blank_labels_are_document_local(self):
        g1 = parse_turtle("_:x <http://ex.org/p> <http://ex.org/o> .")
        g2 = parse_turtle("_:x <http://ex.org/p> <http://ex.org/o> .")
        assert next(iter(g1))[0] != next(iter(g2))[0]
        g = parse_turtle("_:x <http://ex.org/p> _:x .")
        s, _, o = next(iter(g))
        assert s == o

    def test_local_name_escapes_and_trailing_dot(self):
        g = parse_turtle("@prefix ex: <http://ex.org/> . ex:a\\-b ex:p ex:c.d.")
        assert set(g) == {(ex("a-b"), ex("p"), ex("c.d"))}

    @pytest.mark.parametrize(
        "text,line,column",
        [
            ("@prefix ex: <http://ex.org/> .\nex:a ex:p ex:b\nex:c ex:p ex:d .", 2, 15),
            ("<http://ex.org/a> <http://ex.org/p> .", 1, 37),
            ("@prefix ex: <http://ex.org/> .\nex:a ex:p \"open\n", 2, 11),
            ("undeclared:a <http://ex.org/p> 1 .", 1, 1),
            ("<http://ex.org/a> <http://ex.org/p> 1", 1, 38),
        ],
    )
    def test_error_positions(self, text, line, column):
        with pytest.raises(RDFSyntaxError) as info:
            parse_turtle(text)
        assert (info.value.line, info.value.column) == (line, column)

    def test_deep_nesting_is_a_syntax_error_not_a_crash(self):
        text = "<http://ex.org/a> <http://ex.org/p> " + "[ <http://ex.org/p> " * 5000 + "1" + " ]" * 5000 + " ."
        with pytest.raises(RDFSyntaxError, match="nesting"):
            parse_turtle(text)

    @settings(max_examples=300, deadline=None)
    @given(st.text(max_size=80))
    def test_parsing_is_total(self, text):
        try:
            parse_turtle(text)
        except RDFSyntaxError as exc:
            assert exc.line >= 1 and exc.column >= 1


class TestParseNQuads:
    def test_empty(self):
        ds = parse_nquads("")
        assert len(ds) == 0 and not ds.named_graphs

    def test_four_terms_route_to_named_graph(self):
        ds = parse_nquads("<http://ex.org/a> <http://ex.org/p> <http://ex.org/b> <http://ex.org/g> .\n")
        assert list(ds.named_graphs) == [ex("g")]
        assert len(ds.named_graphs[ex("g")]) == 1
        assert len(ds.default_graph) == 0

    def test_three_terms_go_to_default_graph(self):
        ds = parse_nquads('<http://ex.org/a> <http://ex.org/p> "x"@en .')
        assert len(ds.default_graph) == 1 and not ds.named_graphs

    def test_comments_and_blank_lines(self):
        text = "# header\n\n<http://ex.org/a> <http://ex.org/p> _:b1 . # trailing\n"
        assert len(parse_nquads(text)) == 1

    def test_ntriples_rejects_graph_label(self):
        with pytest.raises(RDFSyntaxError) as info:
            parse_ntriples("<http://ex.org/a> <http://ex.org/p> <http://ex.org/b> <http://ex.org/g> .")
        assert info.value.line == 1

    def test_relative_iri_rejected(self):
        with pytest.raises(RDFSyntaxError, match="relative"):
            parse_ntriples("<a> <http://ex.org/p> <http://ex.org/b> .")

    def test_missing_dot_reports_line(self):
        text = "<http://ex.org/a> <http://ex.org/p> \"1\" .\n<http://ex.org/a> <http://ex.org/p> <http://ex.org/c>\n"
        with pytest.raises(RDFSyntaxError) as info:
            parse_ntriples(text)
        assert info.value.line == 2

    def test_literal_subject_rejected(self):
        with pytest.raises(RDFSyntaxError, match="subject"):
            parse_ntriples('"x" <http://ex.org/p> <http://ex.org/b> .')

    @settings(max_examples=300, deadline=None)
    @given(st.text(max_size=80))
    def test_parsing_is_total(self, text):
        try:
            parse_nquads(text)
        except RDFSyntaxError as exc:
            assert exc.line >= 1 and exc.column >= 1


class TestSerialize:
    def test_empty_graph_ntriples(self):
        assert serialize(Graph(), "ntriples") == ""

    def test_single_triple_one_line(self):
        out = serialize(Graph([(ex("a"), ex("p"), Literal("x"))]), "ntriples")
        assert out.count("\n") == 1 and out.endswith(" .\n")

    def test_blank_nodes_relabelled_in_first_seen_order(self):
        b1, b2 = BlankNode("zzz"), BlankNode("aaa")
        g = Graph([(b1, ex("p"), b2), (b2, ex("p"), ex("c"))])
        assert serialize(g, "ntriples") == (
            "_:b0 <http://ex.org/p> _:b1 .\n_:b1 <http://ex.org/p> <http://ex.org/c> .\n"
        )

    def test_turtle_uses_prefixes_and_shortcuts(self):
        g = Graph([(ex("a"), ex("p"), Literal("5", XSD + "integer")), (ex("a"), ex("q"), Literal("x", XSD + "date"))])
        out = serialize(g, "turtle", prefixes={"ex": EX, "xsd": XSD})
        assert "ex:a ex:p 5 ;" in out
        assert '"x"^^xsd:date' in out

    def test_dataset_named_graphs_need_nquads(self):
        ds = Dataset()
        ds.add((ex("a"), ex("p"), ex("b")), ex("g"))
        assert serialize(ds, "nquads").strip().endswith("<http://ex.org/g> .")
        with pytest.raises(ValueError):
            serialize(ds, "turtle")

    def test_graph_into_named_graph(self):
        out = serialize(Graph([(ex("a"), ex("p"), ex("b"))]), "nquads", graph_name=ex("g"))
        ds = parse_nquads(out)
        assert len(ds.named_graphs[ex("g")]) == 1

    @pytest.mark.parametrize("fmt", ["turtle", "ntriples", "nquads"])
    def test_round_trip_50_triple_graphs(self, fmt):
        rng = random.Random(50)
        for _ in range(20):
            g = Graph()
            while len(g) < 50:
                g.update(random_graph(rng, 60))
                extra = list(g)[50:]
                for t in extra:
                    g.discard(t)
            text = serialize(g, fmt, prefixes={"ex": NS})
            back = parse_turtle(text) if fmt == "turtle" else parse_nquads(text).default_graph
            assert isomorphic(g, back)

    def test_round_trip_nquads_dataset(self):
        rng = random.Random(7)
        ds = Dataset()
        for t in random_graph(rng, 30):
            ds.add(t)
        for t in random_graph(rng, 30):
            ds.add(t, ex("g1"))
        back = parse_nquads(serialize(ds, "nquads"))
        assert isomorphic(ds.default_graph, back.default_graph)
        # blank nodes are shared across graphs of one document, so compare per graph
        assert len(back.named_graphs.get(ex("g1"), Graph())) == len(ds.named_graphs.get(ex("g1"), Graph()))


class TestValidateSyntax:
    def test_well_formed_file(self, tmp_path):
        path = tmp_path / "ok.ttl"
        path.write_text("@prefix ex: <http://ex.org/> .\nex:a ex:p 1 .\nex:a ex:p 2 .\nex:b ex:p 3 .\n")
        report = validate_syntax(path)
        assert report.ok and report.triple_count == 3 and report.errors == []

    def test_missing_terminal_dot(self, tmp_path):
        path = tmp_path / "bad.ttl"
        path.write_text("@prefix ex: <http://ex.org/> .\nex:a ex:p 1 .\nex:a ex:p 2\nex:b ex:p 3 .\n")
        report = validate_syntax(path)
        assert not report.ok
        assert len(report.errors) == 1
        assert report.errors[0].line == 3

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.nq"
        path.write_text("")
        report = validate_syntax(path)
        assert report.ok and report.triple_count == 0

    def test_undecodable_bytes_reported(self, tmp_path):
        path = tmp_path / "bin.nt"
        path.write_bytes(b'<http://ex.org/a> <http://ex.org/p> "\xff" .\n')
        report = validate_syntax(path)
        assert not report.ok and report.errors[0].line == 1

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(OSError):
            validate_syntax(tmp_path / "nope.ttl")


@pytest.mark.parametrize(
    "ref,expected",
    [
        ("g:h", "g:h"),
        ("g", "http://a/b/c/g"),
        ("./g", "http://a/b/c/g"),
        ("g/", "http://a/b/c/g/"),
        ("/g", "http://a/g"),
        ("//g", "http://g"),
        ("?y", "http://a/b/c/d;p?y"),
        ("g?y", "http://a/b/c/g?y"),
        ("#s", "http://a/b/c/d;p?q#s"),
        ("", "http://a/b/c/d;p?q"),
        (".", "http://a/b/c/"),
        ("..", "http://a/b/"),
        ("../g", "http://a/b/g"),
        ("../../../g", "http://a/g"),
        ("/./g", "http://a/g"),
        ("g;x=1/../y", "http://a/b/c/y"),
    ],
)
def test_rfc3986_reference_resolution(ref, expected):
    assert resolve("http://a/b/c/d;p?q", ref) == expected
