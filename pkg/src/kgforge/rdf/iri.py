"""Reference resolution for relative IRIs (RFC 3986, section 5.2).

urllib.parse.urljoin only resolves schemes it knows about, so `urn:`- or
`tag:`-based bases would silently fail there.
"""

from __future__ import annotations

import re

_URI = re.compile(r"^(?:([A-Za-z][A-Za-z0-9+.\-]*):)?(?://([^/?#]*))?([^?#]*)(?:\?([^#]*))?(?:#(.*))?$", re.S)


def _split(ref: str):
    # optional groups distinguish an absent component (None) from an empty one
    return _URI.match(ref).groups()


def _remove_dot_segments(path: str) -> str:
    out: list[str] = []
    while path:
        if path.startswith("../"):
            path = path[3:]
        elif path.startswith("./"):
            path = path[2:]
        elif path.startswith("/./"):
            path = path[2:]
        elif path == "/.":
            path = "/"
        elif path.startswith("/../"):
            path = path[3:]
            if out:
                out.pop()
        elif path == "/..":
            path = "/"
            if out:
                out.pop()
        elif path in (".", ".."):
            path = ""
        else:
            start = 1 if path.startswith("/") else 0
            idx = path.find("/", start)
            if idx < 0:
                idx = len(path)
            out.append(path[:idx])
            path = path[idx:]
    return "".join(out)


def _merge(base_authority, base_path: str, ref_path: str) -> str:
    if base_authority is not None and base_path == "":
        return "/" + ref_path
    idx = base_path.rfind("/")
    return base_path[: idx + 1] + ref_path


def resolve(base: str, ref: str) -> str:
    """Resolve `ref` against the absolute IRI `base`."""
    r_scheme, r_auth, r_path, r_query, r_frag = _split(ref)
    if r_scheme is not None:
        t_scheme, t_auth, t_path, t_query = r_scheme, r_auth, _remove_dot_segments(r_path), r_query
    else:
        b_scheme, b_auth, b_path, b_query, _ = _split(base)
        t_scheme = b_scheme
        if r_auth is not None:
            t_auth, t_path, t_query = r_auth, _remove_dot_segments(r_path), r_query
        else:
            t_auth = b_auth
            if r_path == "":
                t_path = b_path
                t_query = r_query if r_query is not None else b_query
            else:
                if r_path.startswith("/"):
                    t_path = _remove_dot_segments(r_path)
                else:
                    t_path = _remove_dot_segments(_merge(b_auth, b_path, r_path))
                t_query = r_query
    out = t_scheme + ":"
    if t_auth is not None:
        out += "//" + t_auth
    out += t_path
    if t_query is not None:
        out += "?" + t_query
    if r_frag is not None:
        out += "#" + r_frag
    return out
