#include "tkg/jsonld.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <set>

#include <openssl/evp.h>

namespace tkg::jsonld {

namespace {

using json = nlohmann::json;

std::string number_lexical(const json& v, bool& integral) {
    if (v.is_number_integer() || v.is_number_unsigned()) {
        integral = true;
        return v.dump();
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw InvalidArgument("non-finite number");
    char buf[512];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::fixed);
    if (ec != std::errc{}) throw InvalidArgument("number out of range");
    std::string lex(buf, ptr);
    integral = std::floor(d) == d;
    if (integral) {
        if (auto dot = lex.find('.'); dot != std::string::npos) lex.erase(dot);
        if (lex == "-0") lex = "0";
    }
    return lex;
}

Term scalar_literal(const json& v) {
    if (v.is_string()) return Term::literal(v.get<std::string>());
    if (v.is_boolean()) return Term::literal(v.get<bool>() ? "true" : "false", std::string(vocab::kXsdBoolean));
    if (v.is_number()) {
        bool integral = false;
        std::string lex = number_lexical(v, integral);
        return Term::literal(std::move(lex), std::string(integral ? vocab::kXsdInteger : vocab::kXsdDecimal));
    }
    throw InvalidArgument("unsupported scalar value " + v.dump());
}

std::string expand_vocab(const std::string& name) {
    if (name.empty()) throw InvalidArgument("empty property or type name");
    if (name.starts_with("schema:")) return vocab::schema(name.substr(7));
    if (is_absolute_iri(name)) return name;
    return vocab::schema(name);
}

bool is_value_object(const json& v) { return v.is_object() && v.contains("@value"); }

bool is_node_reference(const json& v) {
    if (!v.is_object() || !v.contains("@id")) return false;
    for (const auto& [k, _] : v.items())
        if (k != "@id" && k != "@context") return false;
    return true;
}

Term value_object_literal(const json& v) {
    for (const auto& [k, _] : v.items())
        if (k != "@value" && k != "@language" && k != "@type")
            throw InvalidArgument("unsupported key '" + k + "' in value object");
    const json& val = v.at("@value");
    if (!(val.is_string() || val.is_number() || val.is_boolean()))
        throw InvalidArgument("@value must be a scalar");
    if (v.contains("@language")) {
        if (v.contains("@type")) throw InvalidArgument("value object with both @language and @type");
        if (!val.is_string() || !v["@language"].is_string()) throw InvalidArgument("@language needs a string @value");
        return Term::lang_literal(val.get<std::string>(), v["@language"].get<std::string>());
    }
    if (v.contains("@type")) {
        if (!v["@type"].is_string()) throw InvalidArgument("value @type must be a string");
        const std::string dt = v["@type"].get<std::string>();
        if (!is_absolute_iri(dt)) throw InvalidArgument("relative datatype IRI '" + dt + "'");
        std::string lex;
        if (val.is_string()) lex = val.get<std::string>();
        else if (val.is_boolean()) lex = val.get<bool>() ? "true" : "false";
        else {
            bool integral = false;
            lex = number_lexical(val, integral);
        }
        return Term::literal(std::move(lex), dt);
    }
    return scalar_literal(val);
}

class Converter {
public:
    Converter(const Term& graph, const SkolemPolicy& policy) : graph_(graph), policy_(policy) {}

    Term node(const json& n, bool root) {
        if (!n.is_object()) throw InvalidArgument("node must be a JSON object");
        if (root) {
            if (!n.contains("@context")) throw InvalidArgument("missing @context");
        }
        if (n.contains("@context") && !is_schema_org_context(n["@context"]))
            throw InvalidArgument("unsupported @context " + n["@context"].dump());

        std::vector<std::pair<Term, Term>> own;
        const Term rdf_type = Term::iri(std::string(vocab::kRdfType));

        std::size_t type_count = 0;
        if (n.contains("@type")) {
            const json& t = n["@type"];
            auto add_type = [&](const json& x) {
                if (!x.is_string()) throw InvalidArgument("@type entries must be strings");
                own.emplace_back(rdf_type, Term::iri(expand_vocab(x.get<std::string>())));
                ++type_count;
            };
            if (t.is_array()) {
                if (t.empty()) throw InvalidArgument("empty @type array");
                for (const auto& x : t) add_type(x);
            } else {
                add_type(t);
            }
        }
        if (root && type_count == 0) throw InvalidArgument("root node has no @type");

        std::optional<Term> id;
        if (n.contains("@id")) {
            if (!n["@id"].is_string()) throw InvalidArgument("@id must be a string");
            const std::string iri = n["@id"].get<std::string>();
            if (!is_absolute_iri(iri)) throw InvalidArgument("relative @id '" + iri + "'");
            id = Term::iri(iri);
        }

        for (const auto& [key, value] : n.items()) {
            if (key == "@context" || key == "@type" || key == "@id") continue;
            if (key.starts_with('@')) throw InvalidArgument("unsupported keyword " + key);
            const Term predicate = Term::iri(expand_vocab(key));
            if (value.is_array()) {
                if (value.empty()) throw InvalidArgument("empty array for property '" + key + "'");
                for (const auto& v : value) {
                    if (v.is_array()) throw InvalidArgument("nested arrays are not supported ('" + key + "')");
                    if (auto obj = object(v)) own.emplace_back(predicate, std::move(*obj));
                }
            } else if (auto obj = object(value)) {
                own.emplace_back(predicate, std::move(*obj));
            }
        }

        Term subject;
        if (id) {
            subject = *id;
        } else {
            std::vector<std::string> lines;
            lines.reserve(own.size());
            for (const auto& [p, o] : own) lines.push_back(p.to_nquads() + ' ' + o.to_nquads());
            std::sort(lines.begin(), lines.end());
            lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
            std::string description;
            for (const auto& l : lines) {
                description += l;
                description += '\n';
            }
            subject = Term::iri(skolemize_hash(description, policy_));
        }
        for (auto& [p, o] : own) out.push_back(Quad{subject, std::move(p), std::move(o), graph_});
        return subject;
    }

    std::vector<Quad> out;

private:
    std::optional<Term> object(const json& v) {
        if (v.is_null()) return std::nullopt;
        if (v.is_object()) {
            if (is_value_object(v)) return value_object_literal(v);
            if (is_node_reference(v)) {
                const json& id = v["@id"];
                if (!id.is_string() || !is_absolute_iri(id.get<std::string>()))
                    throw InvalidArgument("relative or non-string @id reference " + id.dump());
                return Term::iri(id.get<std::string>());
            }
            return node(v, false);
        }
        return scalar_literal(v);
    }

    const Term& graph_;
    const SkolemPolicy& policy_;
};

std::string compact_iri(const std::string& iri) {
    if (iri.starts_with(vocab::kSchema)) {
        std::string local = iri.substr(vocab::kSchema.size());
        if (!local.empty() && !is_absolute_iri(local) && !local.starts_with('@')) return local;
    }
    return iri;
}

}  // namespace

CycleError::CycleError(std::vector<Term> cycle) : Error([&] {
    std::string msg = "reference cycle:";
    for (const auto& t : cycle) msg += ' ' + t.to_nquads();
    return msg;
}()), cycle_(std::move(cycle)) {}

bool is_schema_org_context(const json& context) {
    if (!context.is_string()) return false;
    const auto& s = context.get_ref<const std::string&>();
    return s == "https://schema.org" || s == "https://schema.org/" || s == "http://schema.org" ||
           s == "http://schema.org/";
}

std::string skolemize_hash(std::string_view description, const SkolemPolicy& policy) {
    const EVP_MD* md = EVP_get_digestbyname(policy.hash_algorithm.c_str());
    if (!md) throw InvalidArgument("unknown hash algorithm '" + policy.hash_algorithm + "'");
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(description.data(), description.size(), digest, &len, md, nullptr) != 1)
        throw Error("digest computation failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out = policy.base;
    for (unsigned i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

std::vector<Quad> annotation_to_quads(const AnnotationDocument& doc, const Term& graph, const SkolemPolicy& policy) {
    if (!graph.is_iri()) throw InvalidArgument("graph label must be an IRI");
    if (!is_absolute_iri(policy.base)) throw InvalidArgument("skolem base must be an absolute IRI prefix");
    Converter c(graph, policy);
    c.node(doc, true);
    return std::move(c.out);
}

void check_annotation(const AnnotationDocument& doc) {
    annotation_to_quads(doc, Term::iri(std::string(vocab::kDefaultGraph)));
}

AnnotationDocument parse_annotation(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    check_annotation(doc);
    return doc;
}

json literal_to_json(const Term& t) {
    const std::string& dt = t.datatype();
    if (!t.language().empty()) return {{"@value", t.value()}, {"@language", t.language()}};
    if (dt == vocab::kXsdString) return t.value();
    if (dt == vocab::kXsdBoolean && (t.value() == "true" || t.value() == "false")) return t.value() == "true";
    if (dt == vocab::kXsdInteger) {
        long long v = 0;
        auto [ptr, ec] = std::from_chars(t.value().data(), t.value().data() + t.value().size(), v);
        if (ec == std::errc{} && ptr == t.value().data() + t.value().size() && std::to_string(v) == t.value())
            return v;
    }
    if (dt == vocab::kXsdDecimal) {
        double d = 0;
        auto [ptr, ec] = std::from_chars(t.value().data(), t.value().data() + t.value().size(), d);
        if (ec == std::errc{} && ptr == t.value().data() + t.value().size() && std::floor(d) != d) {
            bool integral = false;
            if (number_lexical(json(d), integral) == t.value()) return d;
        }
    }
    return {{"@value", t.value()}, {"@type", dt}};
}

AnnotationDocument quads_to_annotation(std::span<const Quad> slice, const Term& root, const SkolemPolicy& policy) {
    std::map<Term, std::set<std::pair<Term, Term>>> outgoing;
    for (const auto& q : slice) outgoing[q.subject].emplace(q.predicate, q.object);
    if (!outgoing.contains(root)) throw InvalidArgument("root " + root.to_nquads() + " is not a subject of the slice");

    const Term rdf_type = Term::iri(std::string(vocab::kRdfType));
    std::vector<Term> stack;

    auto build = [&](auto&& self, const Term& subject) -> json {
        if (auto it = std::find(stack.begin(), stack.end(), subject); it != stack.end())
            throw CycleError(std::vector<Term>(it, stack.end()));
        stack.push_back(subject);

        json node = json::object();
        if (subject.is_iri() && !subject.value().starts_with(policy.base)) node["@id"] = subject.value();

        std::vector<std::string> types;
        std::map<std::string, std::vector<json>> props;
        for (const auto& [p, o] : outgoing.at(subject)) {
            if (p == rdf_type && o.is_iri()) {
                types.push_back(compact_iri(o.value()));
                continue;
            }
            json value;
            if (o.is_literal()) value = literal_to_json(o);
            else if (outgoing.contains(o)) value = self(self, o);
            else if (o.is_iri()) value = json{{"@id", o.value()}};
            else value = json::object();
            props[compact_iri(p.value())].push_back(std::move(value));
        }
        std::sort(types.begin(), types.end());
        if (types.size() == 1) node["@type"] = types.front();
        else if (!types.empty()) node["@type"] = types;
        for (auto& [key, values] : props) {
            if (values.size() == 1) {
                node[key] = std::move(values.front());
            } else {
                std::sort(values.begin(), values.end(),
                          [](const json& a, const json& b) { return a.dump() < b.dump(); });
                node[key] = std::move(values);
            }
        }
        stack.pop_back();
        return node;
    };

    json doc = build(build, root);
    doc["@context"] = "https://schema.org/";
    return doc;
}

}  // namespace tkg::jsonld
