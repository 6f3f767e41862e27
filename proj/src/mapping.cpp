#include "tkg/mapping.hpp"

#include <cmath>

#include "tkg/util.hpp"

namespace tkg::mapping {

namespace {

using json = nlohmann::json;

Transform parse_transform(const std::string& name) {
    if (name == "trim") return Transform::Trim;
    if (name == "lowercase") return Transform::Lowercase;
    if (name == "to-number" || name == "toNumber") return Transform::ToNumber;
    throw InvalidArgument("unknown transform '" + name + "'");
}

ConcatPart parse_concat_part(const json& p) {
    if (p.is_string()) return {SourcePath::parse(p.get<std::string>())};
    if (p.is_object()) {
        if (p.contains("path") && p.contains("constant")) throw InvalidArgument("concat part has both path and constant");
        if (p.contains("path")) return {SourcePath::parse(p["path"].get<std::string>())};
        if (p.contains("constant")) return {std::variant<SourcePath, json>(std::in_place_index<1>, p["constant"])};
    }
    throw InvalidArgument("concat part must be a path string or {path}/{constant} object");
}

MappingSpec parse_spec(const json& j, const Vocabulary& vocabulary, bool nested);

FieldRule parse_rule(const std::string& property, const json& r, const Vocabulary& vocabulary) {
    if (!r.is_object()) throw InvalidArgument("rule for '" + property + "' must be an object");
    int kinds = 0;
    for (const char* k : {"path", "constant", "nested", "concat"}) kinds += r.contains(k);
    if (kinds != 1)
        throw InvalidArgument("rule for '" + property + "' must have exactly one of path, constant, nested, concat");

    FieldRule rule;
    if (r.contains("path")) {
        rule.source = FieldRule::Path{SourcePath::parse(r["path"].get<std::string>())};
    } else if (r.contains("constant")) {
        const json& c = r["constant"];
        if (!(c.is_string() || c.is_number() || c.is_boolean()))
            throw InvalidArgument("constant for '" + property + "' must be a scalar");
        rule.source = FieldRule::Constant{c};
    } else if (r.contains("nested")) {
        const json& n = r["nested"];
        FieldRule::Nested nested{SourcePath::parse(n.value("path", std::string("$"))),
                                 std::make_shared<MappingSpec>(parse_spec(n, vocabulary, true))};
        rule.source = std::move(nested);
    } else {
        const json& c = r["concat"];
        FieldRule::Concat concat;
        const json& parts = c.is_object() ? c.at("parts") : c;
        if (!parts.is_array() || parts.empty()) throw InvalidArgument("concat for '" + property + "' must be a non-empty list");
        for (const auto& p : parts) concat.parts.push_back(parse_concat_part(p));
        concat.separator = c.is_object() ? c.value("separator", std::string()) : r.value("separator", std::string());
        rule.source = std::move(concat);
    }
    if (r.contains("transform")) {
        const json& t = r["transform"];
        if (t.is_string()) rule.transforms.push_back(parse_transform(t.get<std::string>()));
        else
            for (const auto& x : t) rule.transforms.push_back(parse_transform(x.get<std::string>()));
    }
    return rule;
}

MappingSpec parse_spec(const json& j, const Vocabulary& vocabulary, bool nested) {
    MappingSpec spec;
    if (!nested) {
        const std::string fmt = j.value("sourceFormat", std::string("json"));
        if (fmt == "json") spec.format = SourceFormat::Json;
        else if (fmt == "csv") spec.format = SourceFormat::Csv;
        else throw InvalidArgument("unknown sourceFormat '" + fmt + "'");
    }
    spec.target_type = vocabulary.require_type(j.at("targetType").get<std::string>());
    const json& fields = j.at("fields");
    if (!fields.is_object() || fields.empty()) throw InvalidArgument("mapping needs at least one field rule");
    for (const auto& [name, rule] : fields.items()) {
        std::string property = vocabulary.require_property(name);
        spec.fields.emplace_back(property, parse_rule(property, rule, vocabulary));
    }
    return spec;
}

json apply_transforms(json v, const std::vector<Transform>& transforms, const std::string& where) {
    for (Transform t : transforms) {
        switch (t) {
            case Transform::Trim:
                if (v.is_string()) v = trim(v.get<std::string>());
                break;
            case Transform::Lowercase:
                if (v.is_string()) v = to_lower(v.get<std::string>());
                break;
            case Transform::ToNumber:
                if (v.is_number()) break;
                if (v.is_string()) {
                    const std::string raw = v.get<std::string>();
                    auto n = parse_number(trim(raw));
                    if (!n) throw MappingError("cannot convert value '" + raw + "' at " + where + " to a number");
                    if (std::floor(*n) == *n && std::abs(*n) < 9e15) v = static_cast<std::int64_t>(*n);
                    else v = *n;
                    break;
                }
                throw MappingError("cannot convert value " + v.dump() + " at " + where + " to a number");
        }
    }
    return v;
}

std::vector<json> scalars_at(const SourcePath& path, const json& record) {
    std::vector<json> out;
    auto take = [&](const json& v) {
        if (v.is_null()) return;
        if (v.is_string() || v.is_number() || v.is_boolean()) out.push_back(v);
        else throw MappingError("non-scalar value at " + path.text());
    };
    for (const json* v : path.resolve(record)) {
        if (v->is_array())
            for (const auto& e : *v) take(e);
        else
            take(*v);
    }
    return out;
}

json map_node(const MappingSpec& spec, const json& record, bool root) {
    if (!record.is_object()) throw MappingError("record is not an object");
    json doc = json::object();
    if (root) doc["@context"] = "https://schema.org/";
    doc["@type"] = spec.target_type;

    for (const auto& [property, rule] : spec.fields) {
        std::vector<json> values;
        std::visit(
            [&](const auto& src) {
                using T = std::decay_t<decltype(src)>;
                if constexpr (std::is_same_v<T, FieldRule::Path>) {
                    for (auto& v : scalars_at(src.path, record))
                        values.push_back(apply_transforms(std::move(v), rule.transforms, src.path.text()));
                } else if constexpr (std::is_same_v<T, FieldRule::Constant>) {
                    values.push_back(apply_transforms(src.value, rule.transforms, "constant for " + property));
                } else if constexpr (std::is_same_v<T, FieldRule::Nested>) {
                    for (const json* sub : src.at.resolve(record)) {
                        auto visit_one = [&](const json& obj) {
                            if (!obj.is_object()) throw MappingError("nested path " + src.at.text() + " is not an object");
                            json child = map_node(*src.spec, obj, false);
                            if (child.size() > 1) values.push_back(std::move(child));
                        };
                        if (sub->is_array())
                            for (const auto& e : *sub) visit_one(e);
                        else
                            visit_one(*sub);
                    }
                } else {
                    std::string joined;
                    bool any_path = false, any_resolved = false;
                    for (const auto& part : src.parts) {
                        std::vector<json> pieces;
                        if (auto* p = std::get_if<SourcePath>(&part.part)) {
                            any_path = true;
                            pieces = scalars_at(*p, record);
                            if (!pieces.empty()) any_resolved = true;
                        } else {
                            pieces.push_back(std::get<json>(part.part));
                        }
                        for (const auto& piece : pieces) {
                            if (!joined.empty()) joined += src.separator;
                            joined += piece.is_string() ? piece.get<std::string>() : piece.dump();
                        }
                    }
                    if (!any_path || any_resolved)
                        values.push_back(apply_transforms(json(joined), rule.transforms, "concat for " + property));
                }
            },
            rule.source);

        if (values.size() == 1) doc[property] = std::move(values.front());
        else if (values.size() > 1) doc[property] = std::move(values);
    }
    return doc;
}

}  // namespace

SourcePath SourcePath::parse(std::string_view text) {
    SourcePath p;
    p.text_ = std::string(text);
    if (text.empty() || text.front() != '$') throw ParseError("path '" + p.text_ + "' must start with '$'");
    std::size_t i = 1;
    while (i < text.size()) {
        if (p.spread_) throw ParseError("'[*]' must be the last step in '" + p.text_ + "'");
        if (text[i] == '.') {
            std::size_t j = i + 1;
            while (j < text.size() && text[j] != '.' && text[j] != '[') ++j;
            if (j == i + 1) throw ParseError("empty member name in '" + p.text_ + "'");
            p.steps_.push_back({std::string(text.substr(i + 1, j - i - 1))});
            i = j;
        } else if (text[i] == '[') {
            const std::size_t close = text.find(']', i);
            if (close == std::string_view::npos) throw ParseError("unterminated '[' in '" + p.text_ + "'");
            const std::string_view inner = text.substr(i + 1, close - i - 1);
            if (inner == "*") {
                p.spread_ = true;
            } else {
                if (inner.empty() || inner.find_first_not_of("0123456789") != std::string_view::npos)
                    throw ParseError("invalid index '" + std::string(inner) + "' in '" + p.text_ + "'");
                p.steps_.push_back({static_cast<std::size_t>(std::stoull(std::string(inner)))});
            }
            i = close + 1;
        } else {
            throw InvalidArgument("unexpected '" + std::string(1, text[i]) + "' in path '" + p.text_ + "'");
        }
    }
    return p;
}

std::vector<const nlohmann::json*> SourcePath::resolve(const nlohmann::json& record) const {
    const json* cur = &record;
    for (const auto& step : steps_) {
        if (auto* key = std::get_if<std::string>(&step.key)) {
            if (!cur->is_object()) return {};
            auto it = cur->find(*key);
            if (it == cur->end()) return {};
            cur = &*it;
        } else {
            const auto idx = std::get<std::size_t>(step.key);
            if (!cur->is_array() || idx >= cur->size()) return {};
            cur = &(*cur)[idx];
        }
        if (cur->is_null()) return {};
    }
    std::vector<const json*> out;
    if (spread_) {
        if (!cur->is_array()) return {};
        for (const auto& e : *cur)
            if (!e.is_null()) out.push_back(&e);
    } else if (!cur->is_null()) {
        out.push_back(cur);
    }
    return out;
}

MappingSpec load_mapping(const nlohmann::json& j, const Vocabulary& vocabulary) {
    try {
        return parse_spec(j, vocabulary, false);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed mapping: ") + e.what());
    }
}

MappingSpec load_mapping(std::string_view text, const Vocabulary& vocabulary) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return load_mapping(j, vocabulary);
}

nlohmann::json apply_mapping(const MappingSpec& spec, const nlohmann::json& record) {
    return map_node(spec, record, true);
}

BatchResult apply_batch(const MappingSpec& spec, const std::vector<nlohmann::json>& records) {
    BatchResult result;
    for (std::size_t i = 0; i < records.size(); ++i) {
        try {
            result.documents.push_back(apply_mapping(spec, records[i]));
        } catch (const Error& e) {
            result.errors.push_back({i, e.what()});
        }
    }
    return result;
}

std::vector<nlohmann::json> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, field_started = false;
    std::size_t line = 1;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
        row.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == '"') {
            if (field_started) throw ParseError("stray quote inside unquoted field", line);
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n') continue;
            end_row();
            ++line;
        } else if (c == '\n') {
            end_row();
            ++line;
        } else {
            field += c;
            field_started = true;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", line);
    if (field_started || !row.empty()) end_row();

    if (rows.empty()) throw ParseError("CSV input has no header row", 1);
    const auto& header = rows.front();
    std::vector<json> records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != header.size())
            throw ParseError("row has " + std::to_string(rows[r].size()) + " fields, header has " +
                                 std::to_string(header.size()),
                             r + 1);
        json rec = json::object();
        for (std::size_t c = 0; c < header.size(); ++c)
            if (!rows[r][c].empty()) rec[header[c]] = rows[r][c];
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<nlohmann::json> parse_records(std::string_view text, SourceFormat format) {
    if (format == SourceFormat::Csv) return parse_csv(text);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (j.is_array()) return j.get<std::vector<json>>();
    return {j};
}

}  // namespace tkg::mapping
