#include "tkg/query.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "tkg/error.hpp"
#include "tkg/nquads.hpp"
#include "tkg/util.hpp"

namespace tkg::query {

namespace {

using json = nlohmann::json;

const std::map<std::string, std::string, std::less<>>& prefixes() {
    static const std::map<std::string, std::string, std::less<>> table = {
        {"schema", std::string(vocab::kSchema)}, {"rdf", std::string(vocab::kRdf)},
        {"rdfs", std::string(vocab::kRdfs)},     {"xsd", std::string(vocab::kXsd)},
        {"owl", std::string(vocab::kOwl)}};
    return table;
}

std::optional<std::string> expand_prefixed(std::string_view token) {
    const std::size_t colon = token.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    auto it = prefixes().find(token.substr(0, colon));
    if (it == prefixes().end()) return std::nullopt;
    return it->second + std::string(token.substr(colon + 1));
}

std::vector<std::string> tokenize(std::string_view line, std::size_t lineno) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (line[i] == '"') {
            ++i;
            while (i < line.size() && line[i] != '"') i += line[i] == '\\' ? 2 : 1;
            if (i >= line.size()) throw ParseError("unterminated string literal", lineno);
            ++i;
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;  // @lang / ^^type
        } else if (line[i] == '<' && line.find('>', i) != std::string_view::npos &&
                   line.substr(i, line.find('>', i) - i).find(' ') == std::string_view::npos && i + 1 < line.size() &&
                   line[i + 1] != '=' && line[i + 1] != ' ') {
            i = line.find('>', i) + 1;
        } else {
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        }
        tokens.emplace_back(line.substr(start, i - start));
    }
    return tokens;
}

Slot parse_slot(const std::string& token) {
    if (token.size() > 1 && token.front() == '?') return Variable{token.substr(1)};
    return parse_query_term(token);
}

CompareOp parse_op(const std::string& op, std::size_t lineno) {
    if (op == "<") return CompareOp::Lt;
    if (op == "<=") return CompareOp::Le;
    if (op == ">") return CompareOp::Gt;
    if (op == ">=") return CompareOp::Ge;
    if (op == "=" || op == "==") return CompareOp::Eq;
    if (op == "!=") return CompareOp::Ne;
    throw ParseError("unknown comparison operator '" + op + "'", lineno);
}

bool compare(int cmp, CompareOp op) {
    switch (op) {
        case CompareOp::Lt: return cmp < 0;
        case CompareOp::Le: return cmp <= 0;
        case CompareOp::Gt: return cmp > 0;
        case CompareOp::Ge: return cmp >= 0;
        case CompareOp::Eq: return cmp == 0;
        case CompareOp::Ne: return cmp != 0;
    }
    return false;
}

bool passes(const Term& bound, const Filter& f) {
    if (auto rhs = numeric_value(f.value); rhs && f.value.is_literal()) {
        auto lhs = numeric_value(bound);
        if (!lhs) return false;
        return compare(*lhs < *rhs ? -1 : (*lhs > *rhs ? 1 : 0), f.op);
    }
    if (f.op == CompareOp::Eq || f.op == CompareOp::Ne) {
        const bool same = bound.is_literal() && f.value.is_literal() && f.value.datatype() == vocab::kXsdString
                              ? bound.is_literal() && bound.value() == f.value.value()
                              : bound == f.value;
        return (f.op == CompareOp::Eq) == same;
    }
    const int c = bound.value().compare(f.value.value());
    return compare(c < 0 ? -1 : (c > 0 ? 1 : 0), f.op);
}

struct Compiled {
    // Each slot is either a constant or a variable index.
    struct Position {
        std::optional<Term> constant;
        std::size_t var = 0;
    };
    std::array<Position, 4> slots;
    bool has_graph = false;
};

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string render_cell(const std::optional<Term>& t) {
    if (!t) return "";
    if (t->is_blank()) return "_:" + t->value();
    return t->value();
}

}  // namespace

Term parse_query_term(std::string_view text) {
    if (text == "a") return Term::iri(std::string(vocab::kRdfType));
    if (text.empty()) throw InvalidArgument("empty term");
    if (text.front() == '"') {
        const std::size_t close = text.rfind('"');
        std::string_view suffix = text.substr(close + 1);
        if (suffix.starts_with("^^") && suffix.size() > 2 && suffix[2] != '<') {
            auto dt = expand_prefixed(suffix.substr(2));
            if (!dt) throw InvalidArgument("unknown datatype prefix in '" + std::string(text) + "'");
            return parse_term(std::string(text.substr(0, close + 1)) + "^^<" + *dt + ">");
        }
        return parse_term(text);
    }
    if (text.front() == '<' || text.starts_with("_:")) return parse_term(text);
    if (auto iri = expand_prefixed(text)) return Term::iri(*iri);
    if (auto n = parse_number(text)) {
        const bool integral = text.find_first_of(".eE") == std::string_view::npos;
        return Term::literal(std::string(text), std::string(integral ? vocab::kXsdInteger : vocab::kXsdDecimal));
    }
    if (text == "true" || text == "false") return Term::literal(std::string(text), std::string(vocab::kXsdBoolean));
    throw InvalidArgument("cannot read term '" + std::string(text) + "'");
}

std::vector<Variable> PatternQuery::pattern_variables() const {
    std::vector<Variable> out;
    auto note = [&](const Slot& s) {
        if (auto* v = std::get_if<Variable>(&s))
            if (std::find(out.begin(), out.end(), *v) == out.end()) out.push_back(*v);
    };
    for (const auto& p : patterns) {
        note(p.subject);
        note(p.predicate);
        note(p.object);
        if (p.graph) note(*p.graph);
        else if (graph_scope) note(*graph_scope);
    }
    return out;
}

void PatternQuery::check() const {
    if (patterns.empty()) throw InvalidArgument("query has no patterns");
    const auto vars = pattern_variables();
    auto bound = [&](const Variable& v) { return std::find(vars.begin(), vars.end(), v) != vars.end(); };
    for (const auto& v : projection)
        if (!bound(v)) throw InvalidArgument("projected variable ?" + v.name + " is not bound by any pattern");
    for (const auto& f : filters)
        if (!bound(f.variable)) throw InvalidArgument("filtered variable ?" + f.variable.name + " is not bound by any pattern");
}

PatternQuery parse_query(std::string_view text) {
    PatternQuery q;
    std::size_t lineno = 0, pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++lineno;
        if (line.empty() || line.front() == '#') continue;
        auto tokens = tokenize(line, lineno);
        const std::string keyword = [&] {
            std::string k = tokens.front();
            for (auto& c : k) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            return k;
        }();
        try {
            if (keyword == "SELECT") {
                if (tokens.size() == 2 && tokens[1] == "*") continue;
                if (tokens.size() < 2) throw ParseError("SELECT needs variables or *", lineno);
                for (std::size_t i = 1; i < tokens.size(); ++i) {
                    if (tokens[i].size() < 2 || tokens[i].front() != '?')
                        throw ParseError("SELECT expects ?variables, got '" + tokens[i] + "'", lineno);
                    q.projection.push_back({tokens[i].substr(1)});
                }
            } else if (keyword == "GRAPH") {
                if (tokens.size() != 2) throw ParseError("GRAPH takes one IRI or variable", lineno);
                q.graph_scope = parse_slot(tokens[1]);
            } else if (keyword == "PATTERN") {
                if (tokens.size() != 4 && tokens.size() != 5)
                    throw ParseError("PATTERN takes subject, predicate, object and an optional graph", lineno);
                TriplePattern p{parse_slot(tokens[1]), parse_slot(tokens[2]), parse_slot(tokens[3]), std::nullopt};
                if (tokens.size() == 5) p.graph = parse_slot(tokens[4]);
                q.patterns.push_back(std::move(p));
            } else if (keyword == "FILTER") {
                if (tokens.size() != 4 || tokens[1].size() < 2 || tokens[1].front() != '?')
                    throw ParseError("FILTER syntax is: FILTER ?var <op> value", lineno);
                q.filters.push_back({{tokens[1].substr(1)}, parse_op(tokens[2], lineno), parse_query_term(tokens[3])});
            } else {
                throw ParseError("unknown keyword '" + tokens.front() + "'", lineno);
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    try {
        q.check();
    } catch (const Error& e) {
        throw ParseError(e.what(), lineno);
    }
    return q;
}

std::optional<double> numeric_value(const Term& t) {
    if (!t.is_literal()) return std::nullopt;
    return parse_number(trim(t.value()));
}

ResultTable evaluate(const QuadStore& store, const PatternQuery& query) {
    query.check();
    const auto vars = query.pattern_variables();
    auto index_of = [&](const Variable& v) {
        return static_cast<std::size_t>(std::find(vars.begin(), vars.end(), v) - vars.begin());
    };

    std::vector<Compiled> compiled;
    for (const auto& p : query.patterns) {
        Compiled c;
        const Slot* slots[4] = {&p.subject, &p.predicate, &p.object,
                                p.graph ? &*p.graph : (query.graph_scope ? &*query.graph_scope : nullptr)};
        c.has_graph = slots[3] != nullptr;
        for (std::size_t i = 0; i < 4; ++i) {
            if (!slots[i]) continue;
            if (auto* t = std::get_if<Term>(slots[i])) c.slots[i].constant = *t;
            else c.slots[i].var = index_of(std::get<Variable>(*slots[i]));
        }
        compiled.push_back(std::move(c));
    }

    using Binding = std::vector<std::optional<Term>>;
    std::vector<Binding> solutions;
    Binding current(vars.size());

    auto extend = [&](auto& self, std::size_t depth) -> void {
        if (depth == compiled.size()) {
            solutions.push_back(current);
            return;
        }
        const Compiled& c = compiled[depth];
        QuadPattern qp;
        std::optional<Term>* targets[4] = {&qp.subject, &qp.predicate, &qp.object, &qp.graph};
        for (std::size_t i = 0; i < 4; ++i) {
            if (i == 3 && !c.has_graph) continue;
            if (c.slots[i].constant) *targets[i] = c.slots[i].constant;
            else if (current[c.slots[i].var]) *targets[i] = current[c.slots[i].var];
        }
        for (const auto& quad : store.match(qp)) {
            const Term* values[4] = {&quad.subject, &quad.predicate, &quad.object, &quad.graph};
            std::vector<std::size_t> newly;
            bool ok = true;
            for (std::size_t i = 0; i < 4 && ok; ++i) {
                if ((i == 3 && !c.has_graph) || c.slots[i].constant) continue;
                auto& slot = current[c.slots[i].var];
                if (!slot) {
                    slot = *values[i];
                    newly.push_back(c.slots[i].var);
                } else if (*slot != *values[i]) {
                    ok = false;
                }
            }
            if (ok) self(self, depth + 1);
            for (std::size_t v : newly) current[v].reset();
        }
    };
    extend(extend, 0);

    ResultTable table;
    const std::vector<Variable>& projection = query.projection.empty() ? vars : query.projection;
    for (const auto& v : projection) table.variables.push_back(v.name);
    for (const auto& row : solutions) {
        bool keep = true;
        for (const auto& f : query.filters) {
            const auto& bound = row[index_of(f.variable)];
            if (!bound || !passes(*bound, f)) {
                keep = false;
                break;
            }
        }
        if (!keep) continue;
        std::vector<std::optional<Term>> out;
        for (const auto& v : projection) out.push_back(row[index_of(v)]);
        table.rows.push_back(std::move(out));
    }
    return table;
}

std::string ResultTable::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < variables.size(); ++i) out += (i ? "," : "") + csv_cell(variables[i]);
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(render_cell(row[i]));
        out += "\n";
    }
    return out;
}

json ResultTable::to_json() const {
    json bindings = json::array();
    for (const auto& row : rows) {
        json b = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (!row[i]) continue;
            const Term& t = *row[i];
            json cell = {{"value", t.value()}};
            if (t.is_iri()) cell["type"] = "uri";
            else if (t.is_blank()) cell["type"] = "bnode";
            else {
                cell["type"] = "literal";
                if (!t.language().empty()) cell["xml:lang"] = t.language();
                else if (t.datatype() != vocab::kXsdString) cell["datatype"] = t.datatype();
            }
            b[variables[i]] = std::move(cell);
        }
        bindings.push_back(std::move(b));
    }
    return {{"head", {{"vars", variables}}}, {"results", {{"bindings", bindings}}}};
}

std::optional<Date> graph_date(const std::string& graph_iri) {
    if (!graph_iri.starts_with("urn:snapshot:") && !graph_iri.starts_with("urn:crawl:")) return std::nullopt;
    if (graph_iri.size() < 11 || graph_iri[graph_iri.size() - 11] != ':') return std::nullopt;
    return Date::try_parse(std::string_view(graph_iri).substr(graph_iri.size() - 10));
}

std::vector<PriceSeriesPoint> price_series(const QuadStore& store, const std::string& region, YearMonth from,
                                           YearMonth to) {
    auto rows = compare_regions(store, {region}, from, to);
    std::vector<PriceSeriesPoint> out;
    for (auto& r : rows)
        if (r.cells.front()) out.push_back(std::move(*r.cells.front()));
    return out;
}

std::vector<ComparisonRow> compare_regions(const QuadStore& store, const std::vector<std::string>& regions,
                                           YearMonth from, YearMonth to) {
    if (to < from) throw InvalidArgument("month range is inverted: " + from.to_string() + " > " + to.to_string());

    // entity -> normalized localities, from any graph
    std::map<Term, std::set<std::string>> localities;
    {
        PatternQuery q;
        q.patterns = {{Variable{"e"}, Term::iri(vocab::schema("address")), Variable{"a"}, std::nullopt},
                      {Variable{"a"}, Term::iri(vocab::schema("addressLocality")), Variable{"l"}, std::nullopt}};
        for (const auto& row : evaluate(store, q).rows) localities[*row[0]].insert(normalize_key(row[2]->value()));
        PatternQuery direct;
        direct.patterns = {{Variable{"e"}, Term::iri(vocab::schema("addressLocality")), Variable{"l"}, std::nullopt}};
        for (const auto& row : evaluate(store, direct).rows) localities[*row[0]].insert(normalize_key(row[1]->value()));
    }

    PatternQuery offers;
    offers.graph_scope = Variable{"g"};
    offers.patterns = {{Variable{"o"}, Term::iri(vocab::schema("itemOffered")), Variable{"e"}, std::nullopt},
                       {Variable{"o"}, Term::iri(vocab::schema("priceSpecification")), Variable{"ps"}, std::nullopt},
                       {Variable{"ps"}, Term::iri(vocab::schema("price")), Variable{"p"}, std::nullopt}};
    offers.projection = {{"e"}, {"g"}, {"p"}};

    // (region index, month) -> entity -> (min, max)
    std::map<std::pair<std::size_t, YearMonth>, std::map<Term, std::pair<std::int64_t, std::int64_t>>> extremes;
    std::map<std::string, std::optional<Date>> date_cache;
    for (const auto& row : evaluate(store, offers).rows) {
        const Term& entity = *row[0];
        auto loc = localities.find(entity);
        if (loc == localities.end()) continue;
        auto [cached, fresh] = date_cache.try_emplace(row[1]->value());
        if (fresh) cached->second = graph_date(row[1]->value());
        if (!cached->second) continue;
        const YearMonth month = YearMonth::of(*cached->second);
        if (month < from || to < month) continue;
        if (!row[2]->is_literal()) continue;
        auto cents = parse_cents(trim(row[2]->value()));
        if (!cents) continue;
        for (std::size_t r = 0; r < regions.size(); ++r) {
            if (!loc->second.count(normalize_key(regions[r]))) continue;
            auto& slot = extremes[{r, month}];
            auto [it, inserted] = slot.try_emplace(entity, *cents, *cents);
            if (!inserted) {
                it->second.first = std::min(it->second.first, *cents);
                it->second.second = std::max(it->second.second, *cents);
            }
        }
    }

    std::vector<ComparisonRow> rows;
    for (YearMonth m = from; m <= to; m = m.next()) {
        ComparisonRow row{m, std::vector<std::optional<PriceSeriesPoint>>(regions.size())};
        bool any = false;
        for (std::size_t r = 0; r < regions.size(); ++r) {
            auto it = extremes.find({r, m});
            if (it == extremes.end() || it->second.empty()) continue;
            std::int64_t sum_min = 0, sum_max = 0;
            for (const auto& [_, mm] : it->second) {
                sum_min += mm.first;
                sum_max += mm.second;
            }
            const auto n = static_cast<std::int64_t>(it->second.size());
            row.cells[r] = PriceSeriesPoint{regions[r], m, div_round_half_up(sum_min, n), div_round_half_up(sum_max, n),
                                            it->second.size()};
            any = true;
        }
        if (any) rows.push_back(std::move(row));
    }
    return rows;
}

std::string series_to_csv(const std::vector<PriceSeriesPoint>& points) {
    std::string out = "region,year,month,avg_min,avg_max,count\n";
    for (const auto& p : points)
        out += csv_cell(p.region) + "," + std::to_string(p.month.year) + "," + std::to_string(p.month.month) + "," +
               format_cents(p.avg_min_cents) + "," + format_cents(p.avg_max_cents) + "," + std::to_string(p.count) +
               "\n";
    return out;
}

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows, const std::vector<std::string>& regions) {
    std::string out = "region,year,month,avg_min,avg_max,count\n";
    for (const auto& row : rows)
        for (std::size_t r = 0; r < regions.size(); ++r) {
            out += csv_cell(regions[r]) + "," + std::to_string(row.month.year) + "," + std::to_string(row.month.month);
            if (const auto& p = row.cells[r])
                out += "," + format_cents(p->avg_min_cents) + "," + format_cents(p->avg_max_cents) + "," +
                       std::to_string(p->count) + "\n";
            else
                out += ",,,\n";
        }
    return out;
}

json series_to_json(const std::vector<PriceSeriesPoint>& points) {
    json out = json::array();
    for (const auto& p : points)
        out.push_back({{"region", p.region},
                       {"year", p.month.year},
                       {"month", p.month.month},
                       {"avgMin", format_cents(p.avg_min_cents)},
                       {"avgMax", format_cents(p.avg_max_cents)},
                       {"count", p.count}});
    return out;
}

}  // namespace tkg::query
