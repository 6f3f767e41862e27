#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace tkg {

namespace vocab {
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kSchema = "https://schema.org/";

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kLangString = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
inline constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kXsdDecimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view kXsdBoolean = "http://www.w3.org/2001/XMLSchema#boolean";
inline constexpr std::string_view kOwlSameAs = "http://www.w3.org/2002/07/owl#sameAs";

/// Graph that receives statements written without an explicit graph label.
inline constexpr std::string_view kDefaultGraph = "urn:kg:default";

inline std::string schema(std::string_view local) { return std::string(kSchema) + std::string(local); }
}  // namespace vocab

/// True when `iri` starts with a URI scheme followed by ':'.
bool is_absolute_iri(std::string_view iri);

/// An RDF term. Equality and ordering are structural.
class Term {
public:
    enum class Kind : unsigned char { Iri = 0, BlankNode = 1, Literal = 2 };

    Term() = default;

    /// Throws InvalidArgument for a relative IRI.
    static Term iri(std::string value);
    static Term blank(std::string label);
    /// Literal with the given datatype; xsd:string when `datatype` is empty.
    static Term literal(std::string lexical, std::string datatype = {});
    static Term lang_literal(std::string lexical, std::string language);

    Kind kind() const noexcept { return kind_; }
    bool is_iri() const noexcept { return kind_ == Kind::Iri; }
    bool is_blank() const noexcept { return kind_ == Kind::BlankNode; }
    bool is_literal() const noexcept { return kind_ == Kind::Literal; }

    /// IRI string, blank-node label, or literal lexical form depending on kind.
    const std::string& value() const noexcept { return value_; }
    const std::string& datatype() const noexcept { return datatype_; }
    const std::string& language() const noexcept { return language_; }

    /// N-Quads rendering (`<iri>`, `_:label`, `"lex"^^<dt>`, `"lex"@lang`).
    std::string to_nquads() const;

    bool operator==(const Term&) const = default;
    auto operator<=>(const Term&) const = default;

private:
    Kind kind_ = Kind::Iri;
    std::string value_;
    std::string datatype_;
    std::string language_;
};

struct TermHash {
    std::size_t operator()(const Term& t) const noexcept;
};

/// One statement in a named graph.
struct Quad {
    Term subject;
    Term predicate;
    Term object;
    Term graph;

    /// Throws InvalidArgument when a position holds a term of the wrong kind.
    void check() const;
    std::string to_nquads() const;

    bool operator==(const Quad&) const = default;
    auto operator<=>(const Quad&) const = default;
};

Quad make_quad(Term s, Term p, Term o, Term g = Term::iri(std::string(vocab::kDefaultGraph)));

/// A quad pattern; an empty optional is a wildcard.
struct QuadPattern {
    std::optional<Term> subject;
    std::optional<Term> predicate;
    std::optional<Term> object;
    std::optional<Term> graph;

    bool matches(const Quad& q) const;
};

}  // namespace tkg
