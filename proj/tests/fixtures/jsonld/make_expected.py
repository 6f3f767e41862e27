#!/usr/bin/env python3
"""Regenerates expected/*.nq from corpus/*.jsonld with pyld.

pyld renders JSON floats as xsd:double; the toolkit uses xsd:decimal, so
floats are rewritten into decimal value objects first.
"""
import json
import pathlib
import sys
import types

try:
    import frozendict  # noqa: F401
except ImportError:
    shim = types.ModuleType("frozendict")
    shim.frozendict = dict
    sys.modules["frozendict"] = shim

from pyld import jsonld  # noqa: E402

XSD_DECIMAL = "http://www.w3.org/2001/XMLSchema#decimal"
CONTEXT = {"@vocab": "https://schema.org/", "schema": "https://schema.org/"}
HERE = pathlib.Path(__file__).parent


def prepare(node):
    if isinstance(node, dict):
        if "@value" in node:
            return node
        return {k: prepare(v) for k, v in node.items() if v is not None}
    if isinstance(node, list):
        return [prepare(x) for x in node]
    if isinstance(node, float):
        text = repr(node)
        if text.endswith(".0"):
            return int(node)
        return {"@value": text, "@type": XSD_DECIMAL}
    return node


def main():
    out_dir = HERE / "expected"
    out_dir.mkdir(exist_ok=True)
    for src in sorted((HERE / "corpus").glob("*.jsonld")):
        doc = prepare(json.loads(src.read_text(encoding="utf-8")))
        doc["@context"] = CONTEXT
        nq = jsonld.to_rdf(doc, {"format": "application/n-quads"})
        lines = sorted(set(nq.splitlines()))
        (out_dir / (src.stem + ".nq")).write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(src.stem, len(lines))


if __name__ == "__main__":
    main()
