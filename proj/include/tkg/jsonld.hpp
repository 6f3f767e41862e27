#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tkg/error.hpp"
#include "tkg/term.hpp"

namespace tkg::jsonld {

/// Annotation documents are plain JSON trees in the restricted JSON-LD
/// subset: a schema.org `@context` string, `@type`, `@id`, value objects
/// (`@value` with `@language` or `@type`), nesting and arrays.
using AnnotationDocument = nlohmann::json;

/// How nodes without `@id` are named.
struct SkolemPolicy {
    std::string base = "urn:kg:skolem:";
    /// Any digest name known to OpenSSL ("sha256", "sha512", ...).
    std::string hash_algorithm = "sha256";
};

/// A reference cycle reachable from the requested root.
class CycleError : public Error {
public:
    explicit CycleError(std::vector<Term> cycle);
    const std::vector<Term>& cycle() const noexcept { return cycle_; }

private:
    std::vector<Term> cycle_;
};

/// True for "https://schema.org" / "http://schema.org", with or without trailing slash.
bool is_schema_org_context(const nlohmann::json& context);

/// Parses JSON text and checks the document invariants.
AnnotationDocument parse_annotation(std::string_view text);

/// Throws InvalidArgument when `doc` is outside the supported subset
/// (untyped root, relative @id, empty array, unsupported keyword, ...).
void check_annotation(const AnnotationDocument& doc);

/// `policy.base` + lowercase hex digest of `description`.
std::string skolemize_hash(std::string_view description, const SkolemPolicy& policy = {});

/// Converts a document into quads in `graph`. Unidentified nodes are named
/// by hashing their own statements (nested nodes first), so equal
/// documents always produce equal quads.
std::vector<Quad> annotation_to_quads(const AnnotationDocument& doc, const Term& graph,
                                      const SkolemPolicy& policy = {});

/// Rebuilds the document rooted at `root` from a quad slice. Graph labels are
/// ignored. Skolem subjects are emitted without `@id`. Throws CycleError when
/// a reference cycle is reachable from `root`.
AnnotationDocument quads_to_annotation(std::span<const Quad> slice, const Term& root,
                                       const SkolemPolicy& policy = {});

/// Converts a literal term to its JSON-LD value form.
nlohmann::json literal_to_json(const Term& literal);

}  // namespace tkg::jsonld
