#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "tkg/jsonld.hpp"
#include "tkg/nquads.hpp"
#include "tkg/util.hpp"

using namespace tkg;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const Term kGraph = Term::iri("urn:test:g");

json hotel_doc() { return json::parse(R"({"@context":"https://schema.org/","@type":"Hotel","name":"Alpenhof"})"); }

std::vector<Quad> as_set(std::vector<Quad> q) {
    std::sort(q.begin(), q.end());
    q.erase(std::unique(q.begin(), q.end()), q.end());
    return q;
}

}  // namespace

TEST_SUITE("jsonld") {

TEST_CASE("hotel document gives two quads on one skolem subject") {
    const auto quads = jsonld::annotation_to_quads(hotel_doc(), kGraph);
    REQUIRE(quads.size() == 2);
    CHECK(quads[0].subject == quads[1].subject);
    CHECK(quads[0].subject.value().rfind("urn:kg:skolem:", 0) == 0);
    CHECK(quads[0].subject.value().size() == std::string("urn:kg:skolem:").size() + 64);
    for (const auto& q : quads) CHECK(q.graph == kGraph);
    const std::set<std::string> expected = oracle::canonical_triples(
        parse_nquads(read_file(oracle::fixture("jsonld/expected/01-hotel-minimal.nq"))), "urn:kg:skolem:");
    CHECK(oracle::canonical_triples(quads, "urn:kg:skolem:") == expected);
}

TEST_CASE("@id passes through as the subject") {
    auto doc = hotel_doc();
    doc["@id"] = "https://ex.org/h1";
    for (const auto& q : jsonld::annotation_to_quads(doc, kGraph)) CHECK(q.subject.value() == "https://ex.org/h1");
}

TEST_CASE("nested address links two skolem subjects") {
    auto doc = json::parse(R"({"@context":"https://schema.org/","@type":"Hotel",
        "address":{"@type":"PostalAddress","postalCode":"6020"}})");
    const auto quads = jsonld::annotation_to_quads(doc, kGraph);
    CHECK(quads.size() == 4);
    std::set<Term> subjects;
    for (const auto& q : quads) subjects.insert(q.subject);
    CHECK(subjects.size() == 2);
    bool linked = false;
    for (const auto& q : quads)
        if (q.predicate.value() == vocab::schema("address")) linked = subjects.count(q.object) == 1;
    CHECK(linked);
}

TEST_CASE("every corpus document matches the reference processor output") {
    std::size_t n = 0;
    for (const auto& entry : fs::directory_iterator(oracle::fixture("jsonld/corpus"))) {
        const auto stem = entry.path().stem().string();
        CAPTURE(stem);
        const auto doc = jsonld::parse_annotation(read_file(entry.path().string()));
        const auto got = jsonld::annotation_to_quads(doc, kGraph);
        const auto expected = parse_nquads(read_file(oracle::fixture("jsonld/expected/" + stem + ".nq")));
        CHECK(oracle::canonical_triples(got, "urn:kg:skolem:") == oracle::canonical_triples(expected, "urn:kg:skolem:"));
        ++n;
    }
    CHECK(n >= 20);
}

TEST_CASE("conversion is deterministic and content-addressed") {
    const auto a = jsonld::annotation_to_quads(hotel_doc(), kGraph);
    const auto b = jsonld::annotation_to_quads(hotel_doc(), kGraph);
    CHECK(a == b);
    auto other = hotel_doc();
    other["name"] = "Alpenhog";
    CHECK(jsonld::annotation_to_quads(other, kGraph)[0].subject != a[0].subject);
    // key order does not matter
    auto reordered = json::parse(R"({"name":"Alpenhof","@type":"Hotel","@context":"http://schema.org"})");
    CHECK(as_set(jsonld::annotation_to_quads(reordered, kGraph)) == as_set(a));
}

TEST_CASE("skolemize_hash") {
    CHECK(jsonld::skolemize_hash("abc") == jsonld::skolemize_hash("abc"));
    CHECK(jsonld::skolemize_hash("abc") != jsonld::skolemize_hash("abd"));
    // sha256("abc")
    CHECK(jsonld::skolemize_hash("abc") ==
          "urn:kg:skolem:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    jsonld::SkolemPolicy p{"https://kg.example/.well-known/genid/", "sha512"};
    const auto iri = jsonld::skolemize_hash("Alpenhof", p);
    CHECK(iri.rfind(p.base, 0) == 0);
    CHECK(iri.size() == p.base.size() + 128);
    CHECK_THROWS_AS(jsonld::skolemize_hash("x", {"urn:x:", "no-such-digest"}), InvalidArgument);
}

TEST_CASE("documents outside the subset are rejected") {
    const char* bad[] = {
        R"({"@type":"Hotel","name":"no context"})",
        R"({"@context":"https://example.org/ctx","@type":"Hotel"})",
        R"({"@context":"https://schema.org/","name":"untyped root"})",
        R"({"@context":"https://schema.org/","@type":"Hotel","@id":"relative"})",
        R"({"@context":"https://schema.org/","@type":"Hotel","name":[]})",
        R"({"@context":"https://schema.org/","@type":"Hotel","@graph":[]})",
        R"({"@context":"https://schema.org/","@type":"Hotel","name":{"@value":"x","@language":"de","@type":"Text"}})",
        R"({"@context":"https://schema.org/","@type":"Hotel","name":[["nested"]]})",
        R"(["not an object"])",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(jsonld::check_annotation(json::parse(text)), InvalidArgument);
    }
    CHECK_THROWS_AS(jsonld::parse_annotation("{not json"), ParseError);
}

TEST_CASE("quads_to_annotation rebuilds the hotel document") {
    const auto quads = jsonld::annotation_to_quads(hotel_doc(), kGraph);
    const auto doc = jsonld::quads_to_annotation(quads, quads[0].subject);
    CHECK(doc["@type"] == "Hotel");
    CHECK(doc["name"] == "Alpenhof");
    CHECK_FALSE(doc.contains("@id"));
}

TEST_CASE("type-only root") {
    const Term root = Term::iri("https://ex.org/only");
    std::vector<Quad> quads{{root, Term::iri(std::string(vocab::kRdfType)), Term::iri(vocab::schema("Place")), kGraph}};
    const auto doc = jsonld::quads_to_annotation(quads, root);
    CHECK(doc["@type"] == "Place");
    CHECK(doc["@id"] == "https://ex.org/only");
    for (const auto& [k, _] : doc.items()) CHECK((k == "@type" || k == "@id" || k == "@context"));
}

TEST_CASE("reference cycles are reported") {
    const Term a = Term::iri("urn:kg:skolem:a"), b = Term::iri("urn:kg:skolem:b");
    const Term knows = Term::iri(vocab::schema("knows"));
    std::vector<Quad> quads{{a, knows, b, kGraph}, {b, knows, a, kGraph}};
    CHECK_THROWS_AS(jsonld::quads_to_annotation(quads, a), jsonld::CycleError);
}

TEST_CASE("corpus documents round-trip through quads") {
    for (const auto& entry : fs::directory_iterator(oracle::fixture("jsonld/corpus"))) {
        CAPTURE(entry.path().filename().string());
        const auto doc = jsonld::parse_annotation(read_file(entry.path().string()));
        const auto quads = jsonld::annotation_to_quads(doc, kGraph);
        const auto rebuilt = jsonld::quads_to_annotation(quads, quads.back().subject);
        CHECK(as_set(jsonld::annotation_to_quads(rebuilt, kGraph)) == as_set(quads));
    }
}

TEST_CASE("literal_to_json keeps datatypes") {
    CHECK(jsonld::literal_to_json(Term::literal("x")) == "x");
    CHECK(jsonld::literal_to_json(Term::literal("5", std::string(vocab::kXsdInteger))) == 5);
    CHECK(jsonld::literal_to_json(Term::literal("true", std::string(vocab::kXsdBoolean))) == true);
    CHECK(jsonld::literal_to_json(Term::lang_literal("Berg", "de")) == json{{"@value", "Berg"}, {"@language", "de"}});
}

}  // TEST_SUITE
