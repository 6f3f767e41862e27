#include "tkg/nquads.hpp"

#include <algorithm>
#include <cctype>

#include "tkg/error.hpp"

namespace tkg {

namespace {
constexpr std::string_view kInferredMarker = "# inferred";
}

std::string serialize_nquads(std::vector<Quad> quads) {
    std::vector<std::string> lines;
    lines.reserve(quads.size());
    for (const auto& q : quads) lines.push_back(q.to_nquads());
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

std::string serialize_nquads(const QuadStore& store, const std::optional<Term>& graph) {
    QuadPattern pattern;
    pattern.graph = graph;
    return serialize_nquads(store.match(pattern));
}

std::string serialize_store(const QuadStore& store) {
    std::vector<Quad> explicit_quads, inferred_quads;
    for (auto& [q, prov] : store.match_with_provenance({}))
        (prov == Provenance::Explicit ? explicit_quads : inferred_quads).push_back(std::move(q));
    return serialize_nquads(std::move(explicit_quads)) + std::string(kInferredMarker) + "\n" +
           serialize_nquads(std::move(inferred_quads));
}

void load_store(std::string_view text, QuadStore& store) {
    std::size_t marker = std::string_view::npos;
    for (std::size_t pos = 0; pos < text.size();) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line == kInferredMarker) {
            marker = pos;
            break;
        }
        pos = nl + 1;
    }
    const auto explicit_quads = parse_nquads(text.substr(0, marker));
    store.add_quads(explicit_quads, Provenance::Explicit);
    if (marker != std::string_view::npos) {
        // Keep line numbers in errors relative to the whole file.
        std::string rest(static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(marker), '\n')), '\n');
        rest += text.substr(marker);
        store.add_quads(parse_nquads(rest), Provenance::Inferred);
    }
}

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class LineParser {
public:
    LineParser(std::string_view line, std::size_t lineno) : s_(line), lineno_(lineno) {}

    bool at_end_or_comment() {
        skip_ws();
        return pos_ >= s_.size() || s_[pos_] == '#';
    }

    Quad statement() {
        Term subject = term();
        if (subject.is_literal()) fail("literal in subject position");
        Term predicate = term();
        if (!predicate.is_iri()) fail("predicate must be an IRI");
        Term object = term();
        skip_ws();
        Term graph = Term::iri(std::string(vocab::kDefaultGraph));
        if (pos_ < s_.size() && s_[pos_] != '.') {
            graph = term();
            if (!graph.is_iri()) fail("graph label must be an IRI");
        }
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '.') fail("expected '.' at end of statement");
        ++pos_;
        if (!at_end_or_comment()) fail("unexpected content after '.'");
        return Quad{std::move(subject), std::move(predicate), std::move(object), std::move(graph)};
    }

    Term term() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of line");
        switch (s_[pos_]) {
            case '<': return Term::iri(iriref());
            case '_': return blank();
            case '"': return literal();
            default: fail(std::string("unexpected character '") + s_[pos_] + "'");
        }
    }

    void expect_end() {
        if (!at_end_or_comment()) fail("trailing content after term");
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, lineno_); }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    std::uint32_t hex(std::size_t n) {
        if (pos_ + n > s_.size()) fail("truncated \\u escape");
        std::uint32_t v = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const char c = s_[pos_++];
            v <<= 4;
            if (c >= '0' && c <= '9') v |= static_cast<std::uint32_t>(c - '0');
            else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint32_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') v |= static_cast<std::uint32_t>(c - 'A' + 10);
            else fail("invalid hex digit in escape");
        }
        return v;
    }

    std::string iriref() {
        ++pos_;  // '<'
        std::string out;
        while (true) {
            if (pos_ >= s_.size()) fail("unterminated IRI");
            const char c = s_[pos_++];
            if (c == '>') break;
            if (c == '\\') {
                if (pos_ >= s_.size()) fail("truncated escape in IRI");
                const char e = s_[pos_++];
                if (e == 'u') append_utf8(out, hex(4));
                else if (e == 'U') append_utf8(out, hex(8));
                else fail("invalid escape in IRI");
                continue;
            }
            if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' ||
                c == '|' || c == '^' || c == '`')
                fail("invalid character in IRI");
            out += c;
        }
        if (!is_absolute_iri(out)) fail("relative IRI '" + out + "'");
        return out;
    }

    Term blank() {
        if (pos_ + 1 >= s_.size() || s_[pos_ + 1] != ':') fail("expected '_:' blank node");
        pos_ += 2;
        const std::size_t start = pos_;
        while (pos_ < s_.size()) {
            const auto c = static_cast<unsigned char>(s_[pos_]);
            if (std::isalnum(c) || c == '_' || c == '-' || c == '.' || c >= 0x80) ++pos_;
            else break;
        }
        // A label may not end with '.'.
        while (pos_ > start && s_[pos_ - 1] == '.') --pos_;
        if (pos_ == start) fail("empty blank node label");
        return Term::blank(std::string(s_.substr(start, pos_ - start)));
    }

    Term literal() {
        ++pos_;  // '"'
        std::string lex;
        while (true) {
            if (pos_ >= s_.size()) fail("unterminated string literal");
            const char c = s_[pos_++];
            if (c == '"') break;
            if (c == '\\') {
                if (pos_ >= s_.size()) fail("truncated escape in literal");
                const char e = s_[pos_++];
                switch (e) {
                    case 't': lex += '\t'; break;
                    case 'b': lex += '\b'; break;
                    case 'n': lex += '\n'; break;
                    case 'r': lex += '\r'; break;
                    case 'f': lex += '\f'; break;
                    case '"': lex += '"'; break;
                    case '\'': lex += '\''; break;
                    case '\\': lex += '\\'; break;
                    case 'u': append_utf8(lex, hex(4)); break;
                    case 'U': append_utf8(lex, hex(8)); break;
                    default: fail("invalid escape in literal");
                }
                continue;
            }
            if (c == '\n' || c == '\r') fail("raw line break in literal");
            lex += c;
        }
        if (pos_ < s_.size() && s_[pos_] == '@') {
            ++pos_;
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-'))
                ++pos_;
            if (pos_ == start) fail("empty language tag");
            return Term::lang_literal(std::move(lex), std::string(s_.substr(start, pos_ - start)));
        }
        if (pos_ + 1 < s_.size() && s_[pos_] == '^' && s_[pos_ + 1] == '^') {
            pos_ += 2;
            if (pos_ >= s_.size() || s_[pos_] != '<') fail("expected datatype IRI after '^^'");
            std::string dt = iriref();
            if (dt == vocab::kLangString) fail("rdf:langString literal without language tag");
            return Term::literal(std::move(lex), std::move(dt));
        }
        return Term::literal(std::move(lex));
    }

    std::string_view s_;
    std::size_t lineno_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<Quad> parse_nquads(std::string_view text) {
    std::vector<Quad> out;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++lineno;
        LineParser p(line, lineno);
        if (!p.at_end_or_comment()) out.push_back(p.statement());
        start = end + 1;
    }
    return out;
}

Term parse_term(std::string_view text) {
    LineParser p(text, 0);
    Term t = p.term();
    p.expect_end();
    return t;
}

}  // namespace tkg
