#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tkg/error.hpp"
#include "tkg/vocabulary.hpp"

namespace tkg::mapping {

/// A compiled source path: `$`, `.member`, `[n]`, and a terminal `[*]`.
class SourcePath {
public:
    static SourcePath parse(std::string_view text);

    /// Values the path resolves to; empty when any step is missing or null.
    std::vector<const nlohmann::json*> resolve(const nlohmann::json& record) const;
    const std::string& text() const { return text_; }

private:
    struct Step {
        std::variant<std::string, std::size_t> key;
    };
    std::string text_;
    std::vector<Step> steps_;
    bool spread_ = false;
};

enum class Transform { Trim, Lowercase, ToNumber };

struct MappingSpec;

struct ConcatPart {
    std::variant<SourcePath, nlohmann::json> part;  // path or constant
};

struct FieldRule {
    struct Path {
        SourcePath path;
    };
    struct Constant {
        nlohmann::json value;
    };
    struct Nested {
        SourcePath at;
        std::shared_ptr<const MappingSpec> spec;
    };
    struct Concat {
        std::vector<ConcatPart> parts;
        std::string separator;
    };

    std::variant<Path, Constant, Nested, Concat> source;
    std::vector<Transform> transforms;
};

enum class SourceFormat { Json, Csv };

/// One wrapper definition: how a source record becomes a schema.org document.
struct MappingSpec {
    SourceFormat format = SourceFormat::Json;
    std::string target_type;                         // schema.org local name
    std::vector<std::pair<std::string, FieldRule>> fields;  // property local name -> rule
};

/// Parses and checks the mapping JSON format against the vocabulary.
MappingSpec load_mapping(std::string_view text, const Vocabulary& vocabulary = Vocabulary::schema_org());
MappingSpec load_mapping(const nlohmann::json& j, const Vocabulary& vocabulary = Vocabulary::schema_org());
inline MappingSpec load_mapping(const std::string& text,
                                const Vocabulary& vocabulary = Vocabulary::schema_org()) {
    return load_mapping(std::string_view(text), vocabulary);
}

/// A record that could not be mapped.
class MappingError : public Error {
public:
    using Error::Error;
};

/// Maps one record (a JSON object; CSV rows arrive as flat string objects).
nlohmann::json apply_mapping(const MappingSpec& spec, const nlohmann::json& record);

struct RecordError {
    std::size_t index;
    std::string message;
};

struct BatchResult {
    std::vector<nlohmann::json> documents;  // successes, input order
    std::vector<RecordError> errors;
};

BatchResult apply_batch(const MappingSpec& spec, const std::vector<nlohmann::json>& records);

/// Parses RFC 4180 CSV with a header row into flat string records; empty
/// cells are left out of the record.
std::vector<nlohmann::json> parse_csv(std::string_view text);

/// Parses source text according to the spec's format: a JSON array or
/// object (one record), or CSV. Throws ParseError.
std::vector<nlohmann::json> parse_records(std::string_view text, SourceFormat format);

}  // namespace tkg::mapping
