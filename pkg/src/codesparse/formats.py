"""Text file formats and JSON serialization.

Formats (UTF-8 text, whitespace separated; rationals render as num/den):

  code        line 1: ``code <p> <n> <k>``; then n rows of k integers;
              optional final line ``weights <w_1> ... <w_n>``.
  graph       line 1: ``graph <n> <m>``; then m lines ``u v [w]``.
  hypergraph  line 1: ``hypergraph <n> <m>``; then m lines of vertex ids
              with an optional trailing ``w=<rational>``.
  cayley      line 1: ``cayley <k> <m>``; then m lines ``<k-bit string>
              [w]`` where string position j is coordinate j.
  csp         line 1: ``csp <p|-> <k> <m>``; then m constraint lines
              ``affine p a0 .. ar : v1 .. vr [w=..]`` or
              ``table r <bits> : v1 .. vr [w=..]``.

Sparsifiers travel as JSON: {"coords": [...], "weights": ["num/den", ...]}.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .cayley import CayleySpec
from .codes import GeneratorMatrix, Sparsifier
from .csp import AffinePredicate, Constraint, CSPInstance, Predicate
from .errors import ParseError
from .field import PrimeField
from .graphs import Graph
from .hypergraphs import Hypergraph


def fraction_to_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str, line: int | None = None, column: int | None = None) -> Fraction:
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}: {exc}", line, column) from None


def fraction_decimal_str(x: Fraction, places: int = 9) -> str:
    """Deterministic fixed-point decimal rendering for display fields."""
    sign = "-" if x < 0 else ""
    x = abs(x)
    scaled = (x.numerator * 10**places + x.denominator // 2) // x.denominator
    whole, frac = divmod(scaled, 10**places)
    return f"{sign}{whole}.{str(frac).zfill(places)}"


def _tokens(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line.split()


def _expect_int(tok: str, line: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer {what}, got {tok!r}", line) from None


# --- code files ------------------------------------------------------------


def render_code(G: GeneratorMatrix, weights=None) -> str:
    lines = [f"code {G.p} {G.n} {G.k}"]
    for row in G.entries:
        lines.append(" ".join(str(int(v)) for v in row))
    if weights is not None:
        lines.append("weights " + " ".join(fraction_to_str(Fraction(w)) for w in weights))
    return "\n".join(lines) + "\n"


def parse_code(text: str) -> tuple[GeneratorMatrix, tuple[Fraction, ...] | None]:
    rows = []
    header = None
    weights = None
    for lineno, toks in _tokens(text):
        if header is None:
            if toks[0] != "code" or len(toks) != 4:
                raise ParseError("expected header 'code <p> <n> <k>'", lineno, 1)
            header = tuple(_expect_int(t, lineno, "in header") for t in toks[1:])
            continue
        if toks[0] == "weights":
            if weights is not None:
                raise ParseError("duplicate weights line", lineno, 1)
            weights = tuple(
                parse_fraction(t, lineno, j + 2) for j, t in enumerate(toks[1:])
            )
            continue
        rows.append((lineno, [_expect_int(t, lineno, "matrix entry") for t in toks]))
    if header is None:
        raise ParseError("empty code file", 1, 1)
    p, n, k = header
    try:
        field = PrimeField(p)
    except ValueError as exc:
        raise ParseError(str(exc), 1) from None
    if len(rows) != n:
        raise ParseError(f"expected {n} matrix rows, found {len(rows)}", 1)
    for lineno, row in rows:
        if len(row) != k:
            raise ParseError(f"expected {k} entries per row", lineno, 1)
        for j, v in enumerate(row):
            if not 0 <= v < p:
                raise ParseError(f"entry {v} outside [0, {p})", lineno, j + 1)
    if weights is not None and len(weights) != n:
        raise ParseError(f"expected {n} weights, found {len(weights)}", 1)
    matrix = GeneratorMatrix(
        field, np.array([r for _, r in rows], dtype=np.int64).reshape(n, k)
    )
    return matrix, weights


# --- graph files -----------------------------------------------------------


def render_graph(g: Graph) -> str:
    lines = [f"graph {g.n_vertices} {g.m}"]
    for u, v, w in g.edges:
        if w == 1:
            lines.append(f"{u} {v}")
        else:
            lines.append(f"{u} {v} {fraction_to_str(w)}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    header = None
    edges = []
    for lineno, toks in _tokens(text):
        if header is None:
            if toks[0] != "graph" or len(toks) != 3:
                raise ParseError("expected header 'graph <n> <m>'", lineno, 1)
            header = (
                _expect_int(toks[1], lineno, "vertex count"),
                _expect_int(toks[2], lineno, "edge count"),
            )
            continue
        if len(toks) not in (2, 3):
            raise ParseError("expected 'u v [weight]'", lineno, 1)
        u = _expect_int(toks[0], lineno, "endpoint")
        v = _expect_int(toks[1], lineno, "endpoint")
        w = parse_fraction(toks[2], lineno, 3) if len(toks) == 3 else Fraction(1)
        edges.append((u, v, w))
    if header is None:
        raise ParseError("empty graph file", 1, 1)
    n, m = header
    if len(edges) != m:
        raise ParseError(f"expected {m} edges, found {len(edges)}", 1)
    try:
        return Graph(n, tuple(edges))
    except ValueError as exc:
        raise ParseError(str(exc), 1) from None


# --- hypergraph files ------------------------------------------------------


def render_hypergraph(h: Hypergraph) -> str:
    lines = [f"hypergraph {h.n_vertices} {h.m}"]
    for e, w in zip(h.hyperedges, h.weights):
        body = " ".join(str(v) for v in e)
        lines.append(body if w == 1 else f"{body} w={fraction_to_str(w)}")
    return "\n".join(lines) + "\n"


def parse_hypergraph(text: str) -> Hypergraph:
    header = None
    edges = []
    weights = []
    for lineno, toks in _tokens(text):
        if header is None:
            if toks[0] != "hypergraph" or len(toks) != 3:
                raise ParseError("expected header 'hypergraph <n> <m>'", lineno, 1)
            header = (
                _expect_int(toks[1], lineno, "vertex count"),
                _expect_int(toks[2], lineno, "edge count"),
            )
            continue
        w = Fraction(1)
        if toks and toks[-1].startswith("w="):
            w = parse_fraction(toks[-1][2:], lineno, len(toks))
            toks = toks[:-1]
        if len(toks) < 2:
            raise ParseError("hyperedge needs at least two vertices", lineno, 1)
        edges.append(tuple(_expect_int(t, lineno, "vertex id") for t in toks))
        weights.append(w)
    if header is None:
        raise ParseError("empty hypergraph file", 1, 1)
    n, m = header
    if len(edges) != m:
        raise ParseError(f"expected {m} hyperedges, found {len(edges)}", 1)
    try:
        return Hypergraph(n, tuple(edges), tuple(weights))
    except ValueError as exc:
        raise ParseError(str(exc), 1) from None


# --- cayley files ----------------------------------------------------------


def render_cayley(spec: CayleySpec) -> str:
    lines = [f"cayley {spec.k} {spec.n}"]
    for vec, w in spec.generators:
        bits = "".join("1" if (vec >> j) & 1 else "0" for j in range(spec.k))
        lines.append(bits if w == 1 else f"{bits} {fraction_to_str(w)}")
    return "\n".join(lines) + "\n"


def parse_cayley(text: str) -> CayleySpec:
    header = None
    gens = []
    for lineno, toks in _tokens(text):
        if header is None:
            if toks[0] != "cayley" or len(toks) != 3:
                raise ParseError("expected header 'cayley <k> <m>'", lineno, 1)
            header = (
                _expect_int(toks[1], lineno, "dimension"),
                _expect_int(toks[2], lineno, "generator count"),
            )
            continue
        k = header[0]
        bits = toks[0]
        if len(bits) != k or set(bits) - {"0", "1"}:
            raise ParseError(f"expected a {k}-bit 0/1 string", lineno, 1)
        vec = sum(1 << j for j, b in enumerate(bits) if b == "1")
        w = parse_fraction(toks[1], lineno, 2) if len(toks) > 1 else Fraction(1)
        gens.append((vec, w))
    if header is None:
        raise ParseError("empty cayley file", 1, 1)
    k, m = header
    if len(gens) != m:
        raise ParseError(f"expected {m} generators, found {len(gens)}", 1)
    try:
        return CayleySpec(k, tuple(gens))
    except ValueError as exc:
        raise ParseError(str(exc), 1) from None


# --- csp files -------------------------------------------------------------


def render_csp(instance: CSPInstance) -> str:
    primes = {
        c.predicate.p
        for c in instance.constraints
        if isinstance(c.predicate, AffinePredicate)
    }
    shared = str(primes.pop()) if len(primes) == 1 and all(
        isinstance(c.predicate, AffinePredicate) for c in instance.constraints
    ) else "-"
    lines = [f"csp {shared} {instance.k} {instance.m}"]
    for c in instance.constraints:
        suffix = "" if c.weight == 1 else f" w={fraction_to_str(c.weight)}"
        vars_part = " ".join(str(v) for v in c.variables)
        if isinstance(c.predicate, AffinePredicate):
            coeffs = " ".join(str(a) for a in c.predicate.coefficients)
            lines.append(f"affine {c.predicate.p} {coeffs} : {vars_part}{suffix}")
        else:
            lines.append(
                f"table {c.predicate.arity} {c.predicate.to_string()} : {vars_part}{suffix}"
            )
    return "\n".join(lines) + "\n"


def parse_csp(text: str) -> CSPInstance:
    header = None
    constraints = []
    for lineno, toks in _tokens(text):
        if header is None:
            if toks[0] != "csp" or len(toks) != 4:
                raise ParseError("expected header 'csp <p|-> <k> <m>'", lineno, 1)
            header = (
                toks[1],
                _expect_int(toks[2], lineno, "variable count"),
                _expect_int(toks[3], lineno, "constraint count"),
            )
            continue
        weight = Fraction(1)
        if toks and toks[-1].startswith("w="):
            weight = parse_fraction(toks[-1][2:], lineno, len(toks))
            toks = toks[:-1]
        if ":" not in toks:
            raise ParseError("constraint needs ':' before its variables", lineno, 1)
        sep = toks.index(":")
        head, var_toks = toks[:sep], toks[sep + 1 :]
        variables = tuple(_expect_int(t, lineno, "variable index") for t in var_toks)
        if head and head[0] == "affine":
            if len(head) < 3:
                raise ParseError("affine constraint needs p and coefficients", lineno, 1)
            p = _expect_int(head[1], lineno, "prime")
            coeffs = tuple(_expect_int(t, lineno, "coefficient") for t in head[2:])
            try:
                pred = AffinePredicate(p, coeffs)
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
        elif head and head[0] == "table":
            if len(head) != 3:
                raise ParseError("table constraint needs arity and bits", lineno, 1)
            arity = _expect_int(head[1], lineno, "arity")
            try:
                pred = Predicate.from_string(head[2])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            if pred.arity != arity:
                raise ParseError(f"table length disagrees with arity {arity}", lineno)
        else:
            raise ParseError("constraint must start with 'affine' or 'table'", lineno, 1)
        try:
            constraints.append(Constraint(pred, variables, weight))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    if header is None:
        raise ParseError("empty csp file", 1, 1)
    _, k, m = header
    if len(constraints) != m:
        raise ParseError(f"expected {m} constraints, found {len(constraints)}", 1)
    try:
        return CSPInstance(k, tuple(constraints))
    except ValueError as exc:
        raise ParseError(str(exc), 1) from None


# --- sparsifier JSON -------------------------------------------------------


def sparsifier_to_json(sp: Sparsifier) -> str:
    return json.dumps(
        {
            "coords": list(sp.coords),
            "weights": [fraction_to_str(w) for w in sp.weights],
        }
    )


def sparsifier_from_json(text: str) -> Sparsifier:
    try:
        obj = json.loads(text)
        coords = tuple(int(c) for c in obj["coords"])
        weights = tuple(parse_fraction(str(w)) for w in obj["weights"])
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ParseError(f"bad sparsifier JSON: {exc}") from None
    return Sparsifier(coords, weights)
