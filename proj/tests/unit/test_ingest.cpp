#include <doctest.h>

#include "oracles.hpp"
#include "tkg/ingest.hpp"
#include "tkg/jsonld.hpp"
#include "tkg/mapping.hpp"
#include "tkg/nquads.hpp"
#include "tkg/util.hpp"

using namespace tkg;
using namespace tkg::ingest;
using json = nlohmann::json;

namespace {

Date D(const char* s) { return Date::parse(s); }

json hotel(const std::string& name, const std::string& plz = "6100") {
    return {{"@context", "https://schema.org/"},
            {"@type", "Hotel"},
            {"name", name},
            {"address", {{"@type", "PostalAddress"}, {"postalCode", plz}, {"addressLocality", "Seefeld in Tirol"}}}};
}

Term S(const std::string& local) { return Term::iri(vocab::schema(local)); }

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("snapshot naming") {
    SnapshotId id{"tirol-dmo", D("2018-02-01")};
    CHECK(id.graph_iri() == "urn:snapshot:tirol-dmo:2018-02-01");
}

TEST_CASE("one clean hotel document") {
    QuadStore store;
    const json doc = {{"@context", "https://schema.org/"}, {"@type", "Hotel"}, {"name", "Alpenhof"}};
    IngestOptions plain;
    plain.infer = false;
    const SnapshotId snap{"dmo", D("2018-02-01")};
    const auto report = ingest_snapshot(store, {doc}, snap, plain);
    CHECK(report.quads_written == jsonld::annotation_to_quads(doc, snap.graph()).size());
    CHECK(report.quads_written == 2);
    CHECK(report.rejected.empty());
    CHECK(report.graphs == std::vector<std::string>{snap.graph_iri()});

    const auto again = ingest_snapshot(store, {doc}, snap, plain);
    CHECK(again.quads_written == 0);
    CHECK(again.duplicates_suppressed == 2);
    CHECK(oracle::partition_holds(store));
}

TEST_CASE("inference runs inside the snapshot graph") {
    QuadStore store;
    const SnapshotId snap{"dmo", D("2018-02-01")};
    const auto report = ingest_snapshot(store, {hotel("Alpenhof")}, snap);
    CHECK(report.inferred_added > 0);
    QuadPattern lodging;
    lodging.predicate = Term::iri(std::string(vocab::kRdfType));
    lodging.object = S("LodgingBusiness");
    const auto hits = store.match(lodging);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].graph == snap.graph());
    CHECK(store.provenance(hits[0]) == Provenance::Inferred);
    CHECK(store.inferred_count() == report.inferred_added);
    CHECK(oracle::partition_holds(store));
}

TEST_CASE("rejections are itemized") {
    QuadStore store;
    const auto hotel_ds = ds::load_ds(read_file(oracle::fixture("ds/hotel.ds.json")));
    IngestOptions opts;
    opts.ds = &hotel_ds;
    auto missing = hotel("Seehof");
    missing.erase("address");
    const std::vector<json> docs{hotel("Alpenhof"), missing, json::parse(R"({"@type":"Hotel"})"), hotel("Post")};
    const auto report = ingest_snapshot(store, docs, {"dmo", D("2018-02-01")}, opts);
    CHECK(report.documents_received == 4);
    CHECK(report.documents_accepted() == 2);
    REQUIRE(report.rejected.size() == 2);
    CHECK(report.rejected[0].index == 1);
    CHECK(report.rejected[0].reason.find("MissingRequiredProperty") != std::string::npos);
    CHECK(report.rejected[1].index == 2);
    const auto j = report.to_json();
    CHECK(j["rejections"].size() == 2);
}

TEST_CASE("day-2 ingest leaves day-1 untouched") {
    QuadStore store;
    ingest_snapshot(store, {hotel("Alpenhof"), hotel("Seehof")}, {"dmo", D("2018-02-01")});
    const Term day1 = SnapshotId{"dmo", D("2018-02-01")}.graph();
    const auto before = serialize_nquads(store, day1);
    auto changed = hotel("Alpenhof");
    changed["priceRange"] = "€€€";
    ingest_snapshot(store, {changed, hotel("Neuhof")}, {"dmo", D("2018-02-02")});
    CHECK(serialize_nquads(store, day1) == before);
    CHECK(store.graphs().size() == 2);
    CHECK(oracle::partition_holds(store));
}

TEST_CASE("consolidation on a hand-built graph") {
    QuadStore store;
    const Term g = Term::iri("urn:snapshot:t:2018-02-01");
    const Term a = Term::iri("urn:kg:skolem:aaa"), b = Term::iri("urn:kg:skolem:bbb");
    const Term type = Term::iri(std::string(vocab::kRdfType));
    std::vector<Quad> six{{a, type, S("Hotel"), g},
                          {a, S("name"), Term::literal("Alpenhof"), g},
                          {a, S("postalCode"), Term::literal("6020"), g},
                          {b, type, S("Hotel"), g},
                          {b, S("name"), Term::literal("  ALPENHOF "), g},
                          {b, S("postalCode"), Term::literal("6020"), g}};
    store.add_quads(six);
    CHECK(consolidate_entities(store, g) == 1);

    const std::set<Quad> expected{{a, type, S("Hotel"), g},
                                  {a, S("name"), Term::literal("Alpenhof"), g},
                                  {a, S("name"), Term::literal("  ALPENHOF "), g},
                                  {a, S("postalCode"), Term::literal("6020"), g},
                                  {a, Term::iri(std::string(vocab::kOwlSameAs)), b, g}};
    const auto all = store.match({});
    CHECK(std::set<Quad>(all.begin(), all.end()) == expected);
    CHECK(consolidate_entities(store, g) == 0);
}

TEST_CASE("no merge without a shared key") {
    QuadStore store;
    const SnapshotId snap{"dmo", D("2018-02-01")};
    IngestOptions off;
    off.consolidate = false;
    ingest_snapshot(store, {hotel("Alpenhof", "6100"), hotel("Alpenhof", "6020")}, snap, off);
    CHECK(consolidate_entities(store, snap.graph()) == 0);

    QuadStore nameless;
    nameless.add({Term::iri("https://ex.org/x"), S("telephone"), Term::literal("1"), snap.graph()});
    CHECK(consolidate_entities(nameless, snap.graph()) == 0);
}

TEST_CASE("duplicates in one snapshot merge and stay merged on re-ingest") {
    QuadStore store;
    const SnapshotId snap{"dmo", D("2018-02-01")};
    auto twin = hotel("Alpenhof");
    twin["telephone"] = "+43 5212 1";
    const std::vector<json> docs{hotel("Alpenhof"), twin};
    const auto first = ingest_snapshot(store, docs, snap);
    CHECK(first.entities_consolidated == 1);
    const auto size = store.size();
    const auto second = ingest_snapshot(store, docs, snap);
    CHECK(second.quads_written == 0);
    CHECK(second.entities_consolidated == 0);
    CHECK(store.size() == size);
    CHECK(oracle::partition_holds(store));
}

TEST_CASE("migrate_daily") {
    QuadStore store;
    std::vector<MigrationSource> sources(2);
    sources[0].id = "dmo";
    sources[0].documents = {hotel("Alpenhof"), hotel("Seehof")};
    sources[1].id = "partner";
    sources[1].documents = {hotel("Sonnalp", "6290")};
    auto outcome = migrate_daily(store, sources, D("2018-02-01"));
    REQUIRE(outcome.reports.size() == 2);
    CHECK(store.graphs().size() == 2);
    CHECK(outcome.reports[0].quads_written > 0);
    CHECK(outcome.reports[0].inferred_added + outcome.reports[1].inferred_added == store.inferred_count());

    outcome = migrate_daily(store, sources, D("2018-02-01"));
    for (const auto& r : outcome.reports) {
        CHECK(r.quads_written == 0);
        CHECK(r.inferred_added == 0);
    }
    CHECK(oracle::partition_holds(store));
}

TEST_CASE("half-malformed source reports its rejections") {
    const auto hotel_ds = ds::load_ds(read_file(oracle::fixture("ds/hotel.ds.json")));
    QuadStore store;
    std::vector<MigrationSource> sources(2);
    sources[0].id = "clean";
    sources[0].documents = {hotel("Alpenhof"), hotel("Seehof")};
    sources[1].id = "mixed";
    sources[1].ds = hotel_ds;
    const auto manifest = json::parse(read_file(oracle::fixture("validator/manifest.json")));
    std::size_t malformed = 0;
    for (const auto& entry : manifest) {
        if (entry["ds"] != "hotel.ds.json") continue;
        sources[1].documents.push_back(json::parse(read_file(oracle::fixture("validator/corpus/" + entry["file"].get<std::string>()))));
        malformed += !entry["defects"].empty();
    }
    const auto outcome = migrate_daily(store, sources, D("2018-02-01"));
    CHECK(outcome.reports[0].rejected.empty());
    CHECK(outcome.reports[1].rejected.size() == malformed);
    CHECK(outcome.reports[1].documents_accepted() == sources[1].documents.size() - malformed);
}

}  // TEST_SUITE
