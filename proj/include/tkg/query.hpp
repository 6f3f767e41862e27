#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tkg/date.hpp"
#include "tkg/quad_store.hpp"

namespace tkg::query {

struct Variable {
    std::string name;  // without '?'
    bool operator==(const Variable&) const = default;
};

using Slot = std::variant<Term, Variable>;

struct TriplePattern {
    Slot subject, predicate, object;
    std::optional<Slot> graph;  // falls back to the query's graph scope
};

enum class CompareOp { Lt, Le, Gt, Ge, Eq, Ne };

struct Filter {
    Variable variable;
    CompareOp op = CompareOp::Eq;
    Term value;
};

struct PatternQuery {
    std::vector<TriplePattern> patterns;
    std::optional<Slot> graph_scope;  // unset: all graphs
    std::vector<Filter> filters;
    std::vector<Variable> projection;  // empty: every pattern variable, first-seen order

    /// Variables in first-appearance order across patterns and scope.
    std::vector<Variable> pattern_variables() const;
    /// Throws InvalidArgument for projected or filtered variables that no pattern binds.
    void check() const;
};

/// Line syntax:
///   SELECT ?a ?b | SELECT *
///   GRAPH <iri> | GRAPH ?g
///   PATTERN s p o [g]
///   FILTER ?v <op> value        op: < <= > >= = !=
/// Terms: <iri>, prefixed names (schema: rdf: rdfs: xsd: owl:), `a`,
/// "literal" with @lang or ^^type, bare numbers, ?variables. `#` starts a
/// comment line. Throws ParseError with the line number.
PatternQuery parse_query(std::string_view text);

/// Expands a prefixed name or parses an N-Quads style term.
Term parse_query_term(std::string_view text);

struct ResultTable {
    std::vector<std::string> variables;
    std::vector<std::vector<std::optional<Term>>> rows;

    std::string to_csv() const;
    /// `{"head":{"vars":[...]},"results":{"bindings":[...]}}`
    nlohmann::json to_json() const;
};

/// Natural join of the patterns in the given order, then filters, then
/// projection. Duplicate rows are kept.
ResultTable evaluate(const QuadStore& store, const PatternQuery& query);

/// Numeric value of a literal whose lexical form is a number, any datatype.
std::optional<double> numeric_value(const Term& t);

/// Date encoded at the end of `urn:snapshot:...:<date>` and `urn:crawl:...:<date>` graph IRIs.
std::optional<Date> graph_date(const std::string& graph_iri);

struct PriceSeriesPoint {
    std::string region;
    YearMonth month;
    std::int64_t avg_min_cents = 0;
    std::int64_t avg_max_cents = 0;
    std::size_t count = 0;  // accommodations contributing

    bool operator==(const PriceSeriesPoint&) const = default;
};

/// Per month, mean of each accommodation's minimum and maximum
/// price-per-person-per-night over offers in graphs dated in that month.
/// Accommodations are placed in regions by their address locality.
std::vector<PriceSeriesPoint> price_series(const QuadStore& store, const std::string& region, YearMonth from,
                                           YearMonth to);

struct ComparisonRow {
    YearMonth month;
    std::vector<std::optional<PriceSeriesPoint>> cells;  // one per region, in request order
};

std::vector<ComparisonRow> compare_regions(const QuadStore& store, const std::vector<std::string>& regions,
                                           YearMonth from, YearMonth to);

/// `region,year,month,avg_min,avg_max,count`
std::string series_to_csv(const std::vector<PriceSeriesPoint>& points);
/// Same columns; one row per region and month, empty cells where a region has no data.
std::string comparison_to_csv(const std::vector<ComparisonRow>& rows, const std::vector<std::string>& regions);
nlohmann::json series_to_json(const std::vector<PriceSeriesPoint>& points);

}  // namespace tkg::query
