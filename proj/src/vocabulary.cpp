#include "tkg/vocabulary.hpp"

#include <vector>

#include "tkg/error.hpp"
#include "tkg/term.hpp"

namespace tkg {

extern const char* const kBundledSchemaOrgSubset;

namespace {

bool walk_up(const std::map<std::string, std::vector<std::string>>& parents, const std::string& from,
             const std::string& target) {
    std::vector<std::string> stack{from};
    std::set<std::string> seen;
    while (!stack.empty()) {
        auto cur = std::move(stack.back());
        stack.pop_back();
        if (cur == target) return true;
        if (!seen.insert(cur).second) continue;
        if (auto it = parents.find(cur); it != parents.end())
            for (const auto& p : it->second) stack.push_back(p);
    }
    return false;
}

}  // namespace

const Vocabulary& Vocabulary::schema_org() {
    static const Vocabulary v = from_json(nlohmann::json::parse(kBundledSchemaOrgSubset));
    return v;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
    Vocabulary v;
    for (const auto& [name, parents] : j.at("types").items())
        v.parents_[name] = parents.get<std::vector<std::string>>();
    for (const auto& [name, parents] : j.at("datatypes").items())
        v.datatype_parents_[name] = parents.get<std::vector<std::string>>();
    for (const auto& [name, spec] : j.at("properties").items()) {
        Property p;
        p.domains = spec.value("domains", std::vector<std::string>{});
        p.ranges = spec.value("ranges", std::vector<std::string>{});
        v.properties_[name] = std::move(p);
    }
    if (j.contains("subProperties")) {
        for (const auto& [name, supers] : j.at("subProperties").items()) {
            auto it = v.properties_.find(name);
            if (it == v.properties_.end()) throw UnknownName(name);
            it->second.super_properties = supers.get<std::vector<std::string>>();
        }
    }
    return v;
}

std::optional<std::string> Vocabulary::local_name(std::string_view name) {
    for (std::string_view prefix : {std::string_view("https://schema.org/"), std::string_view("http://schema.org/"),
                                    std::string_view("schema:")}) {
        if (name.starts_with(prefix)) return std::string(name.substr(prefix.size()));
    }
    if (is_absolute_iri(name)) return std::nullopt;
    return std::string(name);
}

const Vocabulary::Property* Vocabulary::property(std::string_view local) const {
    auto it = properties_.find(local);
    return it == properties_.end() ? nullptr : &it->second;
}

bool Vocabulary::is_subtype_of(std::string_view sub, std::string_view super) const {
    const std::string s(sub), t(super);
    if (has_datatype(s)) return walk_up(datatype_parents_, s, t);
    return walk_up(parents_, s, t);
}

std::string Vocabulary::require_type(std::string_view name) const {
    auto local = local_name(name);
    if (!local || !has_type(*local)) throw UnknownName(std::string(name));
    return *local;
}

std::string Vocabulary::require_property(std::string_view name) const {
    auto local = local_name(name);
    if (!local || !has_property(*local)) throw UnknownName(std::string(name));
    return *local;
}

ClassHierarchy Vocabulary::hierarchy() const {
    ClassHierarchy h;
    for (const auto& [name, parents] : parents_)
        for (const auto& p : parents) h.subclass_of.emplace(vocab::schema(name), vocab::schema(p));
    for (const auto& [name, prop] : properties_)
        for (const auto& sp : prop.super_properties) h.subproperty_of.emplace(vocab::schema(name), vocab::schema(sp));
    return h;
}

}  // namespace tkg
