#include "tkg/term.hpp"

#include <cctype>
#include <cstdio>

#include "tkg/error.hpp"

namespace tkg {

namespace {

void hash_combine(std::size_t& seed, std::size_t v) { seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2); }

void escape_literal(std::string& out, std::string_view s) {
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            default: out += c;
        }
    }
}

void escape_iri(std::string& out, std::string_view s) {
    for (unsigned char c : s) {
        if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
            c == '^' || c == '`' || c == '\\') {
            char buf[12];
            std::snprintf(buf, sizeof buf, "\\u%04X", c);
            out += buf;
        } else {
            out += static_cast<char>(c);
        }
    }
}

}  // namespace

bool is_absolute_iri(std::string_view iri) {
    if (iri.empty() || !std::isalpha(static_cast<unsigned char>(iri.front()))) return false;
    for (std::size_t i = 1; i < iri.size(); ++i) {
        const auto c = static_cast<unsigned char>(iri[i]);
        if (c == ':') return true;
        if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return false;
    }
    return false;
}

Term Term::iri(std::string value) {
    if (!is_absolute_iri(value)) throw InvalidArgument("relative IRI '" + value + "'");
    Term t;
    t.kind_ = Kind::Iri;
    t.value_ = std::move(value);
    return t;
}

Term Term::blank(std::string label) {
    if (label.empty()) throw InvalidArgument("empty blank node label");
    Term t;
    t.kind_ = Kind::BlankNode;
    t.value_ = std::move(label);
    return t;
}

Term Term::literal(std::string lexical, std::string datatype) {
    if (datatype.empty()) datatype = vocab::kXsdString;
    if (datatype == vocab::kLangString) throw InvalidArgument("language-tagged literal requires a language tag");
    if (!is_absolute_iri(datatype)) throw InvalidArgument("relative datatype IRI '" + datatype + "'");
    Term t;
    t.kind_ = Kind::Literal;
    t.value_ = std::move(lexical);
    t.datatype_ = std::move(datatype);
    return t;
}

Term Term::lang_literal(std::string lexical, std::string language) {
    if (language.empty()) throw InvalidArgument("empty language tag");
    Term t;
    t.kind_ = Kind::Literal;
    t.value_ = std::move(lexical);
    t.datatype_ = vocab::kLangString;
    for (auto& c : language) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    t.language_ = std::move(language);
    return t;
}

std::string Term::to_nquads() const {
    std::string out;
    switch (kind_) {
        case Kind::Iri:
            out += '<';
            escape_iri(out, value_);
            out += '>';
            break;
        case Kind::BlankNode:
            out += "_:";
            out += value_;
            break;
        case Kind::Literal:
            out += '"';
            escape_literal(out, value_);
            out += '"';
            if (!language_.empty()) {
                out += '@';
                out += language_;
            } else if (datatype_ != vocab::kXsdString) {
                out += "^^<";
                escape_iri(out, datatype_);
                out += '>';
            }
            break;
    }
    return out;
}

std::size_t TermHash::operator()(const Term& t) const noexcept {
    std::size_t seed = static_cast<std::size_t>(t.kind());
    hash_combine(seed, std::hash<std::string>{}(t.value()));
    hash_combine(seed, std::hash<std::string>{}(t.datatype()));
    hash_combine(seed, std::hash<std::string>{}(t.language()));
    return seed;
}

void Quad::check() const {
    if (subject.is_literal()) throw InvalidArgument("literal in subject position: " + subject.to_nquads());
    if (!predicate.is_iri()) throw InvalidArgument("predicate is not an IRI: " + predicate.to_nquads());
    if (!graph.is_iri()) throw InvalidArgument("graph label is not an IRI: " + graph.to_nquads());
    for (const Term* t : {&subject, &predicate, &object, &graph})
        if (t->is_iri() && !is_absolute_iri(t->value())) throw InvalidArgument("relative IRI '" + t->value() + "'");
}

std::string Quad::to_nquads() const {
    return subject.to_nquads() + ' ' + predicate.to_nquads() + ' ' + object.to_nquads() + ' ' +
           graph.to_nquads() + " .";
}

Quad make_quad(Term s, Term p, Term o, Term g) { return Quad{std::move(s), std::move(p), std::move(o), std::move(g)}; }

bool QuadPattern::matches(const Quad& q) const {
    return (!subject || *subject == q.subject) && (!predicate || *predicate == q.predicate) &&
           (!object || *object == q.object) && (!graph || *graph == q.graph);
}

}  // namespace tkg
