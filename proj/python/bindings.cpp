// Python module. Structured values cross the boundary as JSON text; the
// package wrapper in tkg/__init__.py turns them into dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tkg/domain_spec.hpp"
#include "tkg/ingest.hpp"
#include "tkg/jsonld.hpp"
#include "tkg/lifecycle.hpp"
#include "tkg/mapping.hpp"
#include "tkg/nquads.hpp"
#include "tkg/offers.hpp"
#include "tkg/query.hpp"

namespace py = pybind11;
using json = nlohmann::json;
using namespace tkg;

namespace {

json offer_json(const offers::ConcreteOffer& o) {
    return {{"room", o.room_id},      {"checkIn", o.check_in.to_string()}, {"nights", o.nights},
            {"persons", o.persons},   {"board", o.board_id},               {"totalCents", o.total_cents},
            {"ppnCents", o.ppn_cents}, {"sku", offers::offer_sku(o)}};
}

std::vector<json> documents(const std::string& text) {
    auto j = json::parse(text);
    if (j.is_array()) return j.get<std::vector<json>>();
    return {std::move(j)};
}

}  // namespace

PYBIND11_MODULE(_tkg, m) {
    m.doc() = "Tourism knowledge graph toolkit";

    static py::exception<Error> base(m, "Error", PyExc_ValueError);
    static py::exception<ParseError> parse_error(m, "ParseError", base.ptr());
    static py::exception<InvalidArgument> invalid(m, "InvalidArgument", base.ptr());
    static py::exception<UnknownName> unknown(m, "UnknownName", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            py::set_error(parse_error, e.what());
        } catch (const UnknownName& e) {
            py::set_error(unknown, e.what());
        } catch (const InvalidArgument& e) {
            py::set_error(invalid, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        } catch (const json::exception& e) {
            py::set_error(parse_error, e.what());
        }
    });

    m.def("annotation_to_nquads", [](const std::string& doc, const std::string& graph) {
        return serialize_nquads(jsonld::annotation_to_quads(json::parse(doc), Term::iri(graph)));
    }, py::arg("doc"), py::arg("graph") = "urn:kg:default");

    m.def("validate", [](const std::string& doc, const std::string& ds) {
        return ds::validate(json::parse(doc), ds::load_ds(ds)).to_json().dump();
    }, py::arg("doc"), py::arg("ds"));

    m.def("apply_mapping", [](const std::string& spec, const std::string& records) {
        const auto mapping = mapping::load_mapping(spec);
        const auto batch = mapping::apply_batch(mapping, mapping::parse_records(records, mapping.format));
        json errors = json::array();
        for (const auto& e : batch.errors) errors.push_back({{"index", e.index}, {"message", e.message}});
        return json{{"documents", batch.documents}, {"errors", errors}}.dump();
    }, py::arg("spec"), py::arg("records"));

    m.def("price_offer", [](const std::string& space, const std::string& room, const std::string& check_in,
                            int nights, int persons, const std::string& board) {
        return offer_json(offers::price_offer(offers::load_offer_space(space), room, Date::parse(check_in), nights,
                                              persons, board)).dump();
    }, py::arg("space"), py::arg("room"), py::arg("check_in"), py::arg("nights"), py::arg("persons"), py::arg("board"));

    m.def("materialize", [](const std::string& space_text, std::size_t k, const std::string& strategy) {
        const auto space = offers::load_offer_space(space_text);
        json out = json::array();
        for (const auto& o : offers::materialize_representatives(space, space.validity, k, offers::parse_strategy(strategy)))
            out.push_back(offer_json(o));
        return out.dump();
    }, py::arg("space"), py::arg("k") = 5, py::arg("strategy") = "global-min-first");

    py::class_<QuadStore>(m, "Store")
        .def(py::init<>())
        .def("__len__", &QuadStore::size)
        .def("inferred_count", &QuadStore::inferred_count)
        .def("add_nquads", [](QuadStore& s, const std::string& text) { return s.add_quads(parse_nquads(text)); })
        .def("to_nquads", [](const QuadStore& s) { return serialize_nquads(s); })
        .def("load", [](QuadStore& s, const std::string& path) { lifecycle::load_store_file(path, s); })
        .def("save", [](const QuadStore& s, const std::string& path) { lifecycle::save_store_file(path, s); })
        .def("ingest", [](QuadStore& s, const std::string& docs, const std::string& source, const std::string& date) {
            return ingest::ingest_snapshot(s, documents(docs), {source, Date::parse(date)}).to_json().dump();
        }, py::arg("docs"), py::arg("source"), py::arg("date"))
        .def("query", [](const QuadStore& s, const std::string& text) {
            return query::evaluate(s, query::parse_query(text)).to_json().dump();
        })
        .def("price_series", [](const QuadStore& s, const std::string& region, const std::string& from,
                                const std::string& to) {
            return query::series_to_json(query::price_series(s, region, YearMonth::parse(from), YearMonth::parse(to)))
                .dump();
        }, py::arg("region"), py::arg("from_month"), py::arg("to_month"));
}
