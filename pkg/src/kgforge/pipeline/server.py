"""Read-only SPARQL query endpoint over a loaded store.

GET  /sparql?query=...                       query in the URL
POST /sparql  application/sparql-query       query as the body
POST /sparql  application/x-www-form-urlencoded with a query field

SELECT and ASK answer in SPARQL JSON results, CONSTRUCT in Turtle. Every
other method is rejected with 405.
"""

from __future__ import annotations

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from ..rdf import Graph, serialize
from ..sparql import MEDIA_TYPES, QueryError, evaluate, parse_query, serialize_results
from ..store import TripleStore

ENDPOINT_PATHS = ("/", "/sparql")
TURTLE = "text/turtle; charset=utf-8"


def answer(store: TripleStore, query_text: str) -> tuple[int, str, str]:
    """(status, content type, body) for one query; shared by the handler and tests."""
    try:
        query = parse_query(query_text)
        result = evaluate(query, store)
    except QueryError as exc:
        return 400, "text/plain; charset=utf-8", f"{type(exc).__name__}: {exc}\n"
    if isinstance(result, Graph):
        return 200, TURTLE, serialize(result, "turtle")
    return 200, MEDIA_TYPES["sparql-json"], serialize_results(result, "sparql-json")


class _Handler(BaseHTTPRequestHandler):
    server_version = "kgforge"
    store: TripleStore  # set on the generated subclass

    def log_message(self, format, *args):  # quiet by default
        if getattr(self.server, "verbose", False):
            super().log_message(format, *args)

    def _send(self, status: int, ctype: str, body: str, extra: dict | None = None) -> None:
        data = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        for k, v in (extra or {}).items():
            self.send_header(k, v)
        self.end_headers()
        if self.command != "HEAD":
            self.wfile.write(data)

    def _path_ok(self) -> bool:
        if urlsplit(self.path).path in ENDPOINT_PATHS:
            return True
        self._send(404, "text/plain; charset=utf-8", "not found\n")
        return False

    def _run(self, query: str | None) -> None:
        if not query:
            self._send(400, "text/plain; charset=utf-8", "missing 'query' parameter\n")
            return
        self._send(*answer(self.store, query))

    def do_GET(self):
        if not self._path_ok():
            return
        params = parse_qs(urlsplit(self.path).query, keep_blank_values=True)
        if "update" in params:
            self._reject()
            return
        self._run((params.get("query") or [None])[0])

    def do_POST(self):
        if not self._path_ok():
            return
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length).decode("utf-8", errors="replace")
        ctype = (self.headers.get("Content-Type") or "").split(";")[0].strip().lower()
        if ctype == "application/sparql-query":
            self._run(body)
        elif ctype == "application/x-www-form-urlencoded":
            params = parse_qs(body, keep_blank_values=True)
            if "update" in params:
                self._reject()
                return
            self._run((params.get("query") or [None])[0])
        elif ctype == "application/sparql-update":
            self._reject()
        else:
            self._send(415, "text/plain; charset=utf-8", f"unsupported media type {ctype or '(none)'}\n")

    def _reject(self):
        self._send(405, "text/plain; charset=utf-8", "read-only endpoint: updates are not accepted\n", {"Allow": "GET, POST"})

    do_PUT = do_DELETE = do_PATCH = _reject


def make_server(store: TripleStore, bind: str = "127.0.0.1", port: int = 0, verbose: bool = False) -> ThreadingHTTPServer:
    """Bound (not yet serving) server; port 0 picks a free port. OSError on bind failure."""
    handler = type("Handler", (_Handler,), {"store": store})
    server = ThreadingHTTPServer((bind, port), handler)
    server.daemon_threads = True
    server.verbose = verbose
    return server


def serve_in_thread(store: TripleStore, bind: str = "127.0.0.1", port: int = 0) -> tuple[ThreadingHTTPServer, threading.Thread]:
    server = make_server(store, bind, port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread
