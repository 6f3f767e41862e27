#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tkg/quad_store.hpp"

namespace tkg {

/// Canonical N-Quads: one statement per line, lines sorted bytewise, each
/// line terminated by '\n'. With `graph` set only that graph is emitted.
std::string serialize_nquads(const QuadStore& store, const std::optional<Term>& graph = std::nullopt);
std::string serialize_nquads(std::vector<Quad> quads);

/// Parses N-Quads text. Statements without a graph label land in
/// `urn:kg:default`. Throws ParseError carrying the 1-based line number.
std::vector<Quad> parse_nquads(std::string_view text);

/// Whole-store text form: explicit quads, then a `# inferred` comment line,
/// then inferred quads, each block canonical. Plain N-Quads readers see every
/// quad; `load_store` restores the provenance flags.
std::string serialize_store(const QuadStore& store);
void load_store(std::string_view text, QuadStore& store);

/// Parses a single N-Quads term (`<iri>`, `_:b`, or a literal).
Term parse_term(std::string_view text);

}  // namespace tkg
