"""Python access to the tourism knowledge graph toolkit.

Functions take and return plain Python values; documents may be given as
dicts or as JSON text.
"""

import json

try:
    from . import _tkg
except ImportError:  # in-tree build: the extension sits next to the package
    import _tkg

Error = _tkg.Error
ParseError = _tkg.ParseError
InvalidArgument = _tkg.InvalidArgument
UnknownName = _tkg.UnknownName


def _text(value):
    return value if isinstance(value, str) else json.dumps(value)


def annotation_to_nquads(doc, graph="urn:kg:default"):
    return _tkg.annotation_to_nquads(_text(doc), graph)


def validate(doc, ds):
    return json.loads(_tkg.validate(_text(doc), _text(ds)))


def apply_mapping(spec, records):
    return json.loads(_tkg.apply_mapping(_text(spec), _text(records)))


def price_offer(space, room, check_in, nights, persons, board):
    return json.loads(_tkg.price_offer(_text(space), room, check_in, nights, persons, board))


def materialize(space, k=5, strategy="global-min-first"):
    return json.loads(_tkg.materialize(_text(space), k, strategy))


class Store:
    """Quad store with explicit and inferred quads."""

    def __init__(self, path=None):
        self._store = _tkg.Store()
        if path is not None:
            self._store.load(str(path))

    def __len__(self):
        return len(self._store)

    @property
    def inferred_count(self):
        return self._store.inferred_count()

    def add_nquads(self, text):
        return self._store.add_nquads(text)

    def to_nquads(self):
        return self._store.to_nquads()

    def save(self, path):
        self._store.save(str(path))

    def ingest(self, docs, source, date):
        return json.loads(self._store.ingest(_text(docs), source, date))

    def query(self, text):
        return json.loads(self._store.query(text))

    def price_series(self, region, from_month, to_month):
        return json.loads(self._store.price_series(region, from_month, to_month))


__all__ = ["Error", "ParseError", "InvalidArgument", "UnknownName", "Store", "annotation_to_nquads", "validate",
           "apply_mapping", "price_offer", "materialize"]
