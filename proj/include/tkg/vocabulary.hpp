#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tkg/inference.hpp"

namespace tkg {

/// A schema.org subset: classes, datatypes and properties with their
/// domain/range "includes" lists. Names are kept in local form ("Hotel").
class Vocabulary {
public:
    struct Property {
        std::vector<std::string> domains;
        std::vector<std::string> ranges;
        std::vector<std::string> super_properties;
    };

    /// The subset compiled into the library.
    static const Vocabulary& schema_org();
    static Vocabulary from_json(const nlohmann::json& j);

    /// Accepts `Hotel`, `schema:Hotel`, `https://schema.org/Hotel` and the
    /// http variant; returns the local name, or nullopt for foreign IRIs.
    static std::optional<std::string> local_name(std::string_view name);

    bool has_type(std::string_view local) const { return parents_.contains(std::string(local)); }
    bool has_datatype(std::string_view local) const { return datatype_parents_.contains(std::string(local)); }
    bool has_property(std::string_view local) const { return properties_.contains(std::string(local)); }
    const Property* property(std::string_view local) const;

    /// Reflexive-transitive subclass test over classes, and over datatypes
    /// (Integer is a Number, URL is a Text).
    bool is_subtype_of(std::string_view sub, std::string_view super) const;

    /// Resolves a type name or throws UnknownName.
    std::string require_type(std::string_view name) const;
    /// Resolves a property name or throws UnknownName.
    std::string require_property(std::string_view name) const;

    const std::map<std::string, std::vector<std::string>>& types() const { return parents_; }

    /// Subclass and subproperty edges as full schema.org IRIs. Domain and
    /// range are deliberately left out: schema.org's domainIncludes and
    /// rangeIncludes are disjunctive hints, not rdfs:domain/rdfs:range.
    ClassHierarchy hierarchy() const;

private:
    std::map<std::string, std::vector<std::string>> parents_;
    std::map<std::string, std::vector<std::string>> datatype_parents_;
    std::map<std::string, Property, std::less<>> properties_;
};

}  // namespace tkg
