#pragma once

#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tkg/vocabulary.hpp"

namespace tkg::ds {

struct DomainSpecification;

struct PropertyConstraint {
    std::string property;             // schema.org local name
    bool required = false;
    std::vector<std::string> ranges;  // datatype or class local names, non-empty
    bool multiple = false;
    std::shared_ptr<const DomainSpecification> nested;
};

struct NumericRange {
    std::optional<double> min;
    std::optional<double> max;
};

struct Pattern {
    std::string source;
    std::regex regex;
};

struct ValueIn {
    std::vector<std::string> values;
};

/// The value at the rule's path must not be later than the value at `other`.
struct DateOrder {
    std::vector<std::string> other;
};

struct SemanticRule {
    std::vector<std::string> path;  // non-empty, local names
    std::variant<NumericRange, Pattern, ValueIn, DateOrder> check;
};

/// A schema.org subset for one target type.
struct DomainSpecification {
    std::string name;
    std::string target_type;
    std::vector<PropertyConstraint> properties;
    std::vector<SemanticRule> rules;

    const PropertyConstraint* constraint(std::string_view property) const;
};

/// Parses the DS JSON format. Throws UnknownName for names outside the
/// vocabulary, InvalidArgument for duplicate properties or malformed rules,
/// ParseError for invalid JSON.
DomainSpecification load_ds(std::string_view text, const Vocabulary& vocabulary = Vocabulary::schema_org());
DomainSpecification load_ds(const nlohmann::json& j, const Vocabulary& vocabulary = Vocabulary::schema_org());
inline DomainSpecification load_ds(const std::string& text,
                                   const Vocabulary& vocabulary = Vocabulary::schema_org()) {
    return load_ds(std::string_view(text), vocabulary);
}

struct Finding {
    std::string code;
    std::string path;
    std::string message;

    bool operator==(const Finding&) const = default;
};

namespace codes {
inline constexpr std::string_view kMissingRequired = "MissingRequiredProperty";
inline constexpr std::string_view kUnexpectedType = "UnexpectedType";
inline constexpr std::string_view kRange = "RangeViolation";
inline constexpr std::string_view kCardinality = "CardinalityViolation";
inline constexpr std::string_view kRule = "RuleViolation";
inline constexpr std::string_view kUnknownProperty = "UnknownProperty";
inline constexpr std::string_view kInvalidDocument = "InvalidDocument";
}  // namespace codes

struct ValidationReport {
    std::string document_id;
    std::vector<Finding> errors;
    std::vector<Finding> warnings;

    bool valid() const { return errors.empty(); }
    nlohmann::json to_json() const;
};

ValidationReport validate(const nlohmann::json& doc, const DomainSpecification& ds,
                          const Vocabulary& vocabulary = Vocabulary::schema_org(), std::string document_id = {});

struct BatchSummary {
    std::vector<ValidationReport> reports;  // input order
    std::map<std::string, std::size_t> error_counts;
    std::map<std::string, std::size_t> warning_counts;
    std::size_t valid_count = 0;
    std::size_t invalid_count = 0;

    nlohmann::json to_json() const;
};

/// Validates documents, in parallel when the batch is large; `ids` may be
/// shorter than `docs` (missing ids fall back to the document's @id or index).
BatchSummary validate_batch(const std::vector<nlohmann::json>& docs, const DomainSpecification& ds,
                            const std::vector<std::string>& ids = {},
                            const Vocabulary& vocabulary = Vocabulary::schema_org());

/// Renders a property trail the way reports do: "schema:address/schema:postalCode".
std::string render_path(const std::vector<std::string>& trail);

}  // namespace tkg::ds
