#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tkg/error.hpp"
#include "tkg/inference.hpp"
#include "tkg/nquads.hpp"
#include "tkg/quad_store.hpp"
#include "tkg/vocabulary.hpp"

using namespace tkg;

namespace {

Term S(const std::string& local) { return Term::iri(vocab::schema(local)); }
Term X(const std::string& local) { return Term::iri("https://ex.org/" + local); }
Term type() { return Term::iri(std::string(vocab::kRdfType)); }
Term G(const std::string& name = "g") { return Term::iri("urn:test:" + name); }

Quad random_quad(std::mt19937& rng) {
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    Term s = pick(4) == 0 ? Term::blank("b" + std::to_string(pick(5))) : X("s" + std::to_string(pick(10)));
    Term p = S("p" + std::to_string(pick(5)));
    Term o;
    switch (pick(5)) {
        case 0: o = X("o" + std::to_string(pick(10))); break;
        case 1: o = Term::literal("v \"" + std::to_string(pick(50)) + "\"\n\\"); break;
        case 2: o = Term::lang_literal("wert " + std::to_string(pick(9)), pick(2) ? "de" : "en-gb"); break;
        case 3: o = Term::literal(std::to_string(pick(1000)), std::string(vocab::kXsdInteger)); break;
        default: o = Term::literal("Größe ☃ " + std::to_string(pick(9)));
    }
    return {s, p, o, G("g" + std::to_string(pick(3)))};
}

}  // namespace

TEST_SUITE("rdf-core") {

TEST_CASE("terms reject relative IRIs and quads reject misplaced kinds") {
    CHECK_THROWS_AS(Term::iri("relative/path"), InvalidArgument);
    CHECK(is_absolute_iri("urn:x"));
    CHECK_FALSE(is_absolute_iri("1abc:x"));
    Quad bad{Term::literal("x"), S("name"), Term::literal("y"), G()};
    CHECK_THROWS_AS(bad.check(), InvalidArgument);
    Quad bad_pred{X("a"), Term::blank("p"), Term::literal("y"), G()};
    CHECK_THROWS_AS(bad_pred.check(), InvalidArgument);
    CHECK(Term::literal("a").datatype() == vocab::kXsdString);
}

TEST_CASE("add_quads counts new quads with set semantics") {
    QuadStore store;
    std::vector<Quad> two{{X("a"), type(), S("Hotel"), G()}, {X("a"), S("name"), Term::literal("A"), G()}};
    CHECK(store.add_quads(two) == 2);
    CHECK(store.size() == 2);

    QuadStore other;
    std::vector<Quad> same{two[0], two[0]};
    CHECK(other.add_quads(same) == 1);
    CHECK(oracle::partition_holds(store));
}

TEST_CASE("a malformed quad rejects the whole call") {
    QuadStore store;
    std::vector<Quad> quads{{X("a"), type(), S("Hotel"), G()}, {Term::literal("oops"), type(), S("Hotel"), G()}};
    try {
        store.add_quads(quads);
        FAIL("expected rejection");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
    CHECK(store.size() == 0);
}

TEST_CASE("explicit insertion upgrades an inferred quad") {
    QuadStore store;
    Quad q{X("a"), type(), S("Place"), G()};
    store.add(q, Provenance::Inferred);
    CHECK(store.inferred_count() == 1);
    CHECK(store.add_quads(std::vector<Quad>{q}, Provenance::Explicit) == 0);
    // recount flags over the full store
    std::size_t ex = 0, inf = 0;
    for (const auto& [_, p] : store.match_with_provenance({})) (p == Provenance::Explicit ? ex : inf)++;
    CHECK(ex == 1);
    CHECK(inf == 0);
    CHECK(store.explicit_count() == 1);
    CHECK(store.inferred_count() == 0);
    // inferred insertion never downgrades
    store.add(q, Provenance::Inferred);
    CHECK(store.provenance(q) == Provenance::Explicit);
}

TEST_CASE("match on hand-written quads agrees with a linear scan") {
    QuadStore store;
    CHECK(store.match({}).empty());
    std::vector<Quad> five{{X("h1"), type(), S("Hotel"), G()},
                           {X("h2"), type(), S("Hotel"), G("other")},
                           {X("r1"), type(), S("Restaurant"), G()},
                           {X("h1"), S("name"), Term::literal("Alpenhof"), G()},
                           {X("h2"), S("name"), Term::literal("Seehof"), G()}};
    store.add_quads(five);

    QuadPattern typed;
    typed.predicate = type();
    typed.object = S("Hotel");
    std::vector<Quad> expected;
    for (const auto& q : five)
        if (typed.matches(q)) expected.push_back(q);
    auto got = store.match(typed);
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    CHECK(got.size() == 2);
    CHECK(got == expected);

    QuadPattern exact{five[3].subject, five[3].predicate, five[3].object, five[3].graph};
    CHECK(store.match(exact) == std::vector<Quad>{five[3]});
    CHECK(store.graphs().size() == 2);

    std::mt19937 rng(7);
    for (int i = 0; i < 64; ++i) {
        QuadPattern p;
        const Quad& ref = five[rng() % five.size()];
        if (rng() % 2) p.subject = ref.subject;
        if (rng() % 2) p.predicate = ref.predicate;
        if (rng() % 2) p.object = ref.object;
        if (rng() % 2) p.graph = ref.graph;
        std::size_t n = 0;
        for (const auto& q : five) n += p.matches(q);
        CHECK(store.match(p).size() == n);
    }
}

TEST_CASE("remove_quads keeps counts consistent") {
    QuadStore store;
    Quad a{X("a"), S("name"), Term::literal("A"), G()};
    Quad b{X("b"), type(), S("Hotel"), G()};
    store.add(a);
    store.add(b, Provenance::Inferred);
    CHECK(store.remove_quads(std::vector<Quad>{a, b, a}) == 2);
    CHECK(store.size() == 0);
    CHECK(oracle::partition_holds(store));
}

TEST_CASE("closure examples") {
    QuadStore store;
    store.add({X("x"), type(), S("A"), G()});
    CHECK(rdfs_closure(store, {}) == 0);

    ClassHierarchy h;
    h.subclass_of = {{vocab::schema("A"), vocab::schema("B")}, {vocab::schema("B"), vocab::schema("C")}};
    CHECK(rdfs_closure(store, h) == 2);
    CHECK(store.provenance({X("x"), type(), S("B"), G()}) == Provenance::Inferred);
    CHECK(store.provenance({X("x"), type(), S("C"), G()}) == Provenance::Inferred);
    CHECK(rdfs_closure(store, h) == 0);
    CHECK(oracle::partition_holds(store));
}

TEST_CASE("closure follows subproperty, domain and range, skipping literal ranges") {
    QuadStore store;
    store.add({X("h"), S("containedInPlace"), X("town"), G()});
    store.add({X("h"), S("name"), Term::literal("n"), G()});
    ClassHierarchy h;
    h.subproperty_of = {{vocab::schema("containedInPlace"), vocab::schema("isPartOf")}};
    h.domain = {{vocab::schema("containedInPlace"), vocab::schema("Place")}};
    h.range = {{vocab::schema("containedInPlace"), vocab::schema("Place")}, {vocab::schema("name"), vocab::schema("Text")}};
    rdfs_closure(store, h);
    CHECK(store.contains({X("h"), S("isPartOf"), X("town"), G()}));
    CHECK(store.contains({X("h"), type(), S("Place"), G()}));
    CHECK(store.contains({X("town"), type(), S("Place"), G()}));
    QuadPattern text;
    text.object = S("Text");
    CHECK(store.match(text).empty());
}

TEST_CASE("closure handles cycles and stays inside the requested graph") {
    QuadStore store;
    store.add({X("x"), type(), S("A"), G("one")});
    store.add({X("y"), type(), S("A"), G("two")});
    ClassHierarchy h;
    h.subclass_of = {{vocab::schema("A"), vocab::schema("B")}, {vocab::schema("B"), vocab::schema("A")}};
    CHECK(rdfs_closure(store, h, G("one")) == 1);
    CHECK(store.contains({X("x"), type(), S("B"), G("one")}));
    CHECK_FALSE(store.contains({X("y"), type(), S("B"), G("two")}));
}

TEST_CASE("closure matches the naive fixpoint on random cases") {
    std::mt19937 rng(2024);
    for (int round = 0; round < 40; ++round) {
        auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
        const int classes = pick(20) + 2;
        ClassHierarchy h;
        auto cls = [&] { return vocab::schema("C" + std::to_string(pick(classes))); };
        auto prop = [&] { return vocab::schema("p" + std::to_string(pick(6))); };
        for (int i = pick(30); i > 0; --i) h.subclass_of.insert({cls(), cls()});
        for (int i = pick(4); i > 0; --i) h.subproperty_of.insert({prop(), prop()});
        for (int i = pick(3); i > 0; --i) h.domain.insert({prop(), cls()});
        for (int i = pick(3); i > 0; --i) h.range.insert({prop(), cls()});
        QuadStore store;
        std::set<Quad> base;
        for (int i = pick(60); i > 0; --i) {
            Quad q = pick(2) ? Quad{X("i" + std::to_string(pick(15))), type(), Term::iri(cls()), G("g" + std::to_string(pick(2)))}
                             : Quad{X("i" + std::to_string(pick(15))), Term::iri(prop()),
                                    pick(3) ? X("i" + std::to_string(pick(15))) : Term::literal("lit"),
                                    G("g" + std::to_string(pick(2)))};
            base.insert(q);
        }
        store.add_quads(std::vector<Quad>(base.begin(), base.end()));
        rdfs_closure(store, h);
        const auto expected = oracle::naive_closure(base, h);
        const auto got = store.match({});
        CHECK(std::set<Quad>(got.begin(), got.end()) == expected);
        CHECK(rdfs_closure(store, h) == 0);
        CHECK(oracle::partition_holds(store));
    }
}

TEST_CASE("bundled vocabulary hierarchy") {
    const auto& v = Vocabulary::schema_org();
    CHECK(v.is_subtype_of("Hotel", "LodgingBusiness"));
    CHECK(v.is_subtype_of("Hotel", "Thing"));
    CHECK_FALSE(v.is_subtype_of("Offer", "Place"));
    CHECK(v.is_subtype_of("Integer", "Number"));
    CHECK(Vocabulary::local_name("http://schema.org/Hotel") == "Hotel");
    CHECK(Vocabulary::local_name("schema:name") == "name");
    CHECK_FALSE(Vocabulary::local_name("https://other.example/x"));
    CHECK_THROWS_AS(v.require_type("NotAType"), UnknownName);
    CHECK(v.hierarchy().subclass_of.count({vocab::schema("Hotel"), vocab::schema("LodgingBusiness")}));
}

TEST_CASE("serialize_nquads format") {
    QuadStore store;
    CHECK(serialize_nquads(store).empty());
    store.add({X("a"), S("name"), Term::literal("A"), G()});
    const auto text = serialize_nquads(store);
    CHECK(text == "<https://ex.org/a> <https://schema.org/name> \"A\" <urn:test:g> .\n");
}

TEST_CASE("parse_nquads errors carry line numbers") {
    CHECK(parse_nquads("").empty());
    try {
        parse_nquads("<https://ex.org/a> <https://schema.org/name> \"A\" <urn:g>");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
    try {
        parse_nquads("# comment\n\n<https://ex.org/a> <https://schema.org/name> \"A\" .\n<a> <b> <c> .\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
    auto quads = parse_nquads("<https://ex.org/a> <https://schema.org/name> \"A\" .\n");
    REQUIRE(quads.size() == 1);
    CHECK(quads[0].graph.value() == vocab::kDefaultGraph);
}

TEST_CASE("escapes survive a round trip") {
    auto quads = parse_nquads(
        "_:b1 <https://schema.org/name> \"tab\\there \\\"q\\\" \\u00E9 \\U0001F600\"@de-AT <urn:g> .\n");
    REQUIRE(quads.size() == 1);
    CHECK(quads[0].object.value() == "tab\there \"q\" é 😀");
    CHECK(quads[0].object.language() == "de-at");
    CHECK(parse_nquads(serialize_nquads(quads)) == quads);
}

TEST_CASE("serialize-parse round trip on a random 100-quad store") {
    std::mt19937 rng(99);
    QuadStore store;
    while (store.size() < 100) store.add(random_quad(rng));
    const auto text = serialize_nquads(store);
    const auto back = parse_nquads(text);
    const auto all = store.match({});
    CHECK(std::set<Quad>(back.begin(), back.end()) == std::set<Quad>(all.begin(), all.end()));
    QuadStore again;
    again.add_quads(back);
    CHECK(serialize_nquads(again) == text);

    const Term g = G("g1");
    for (const auto& line : parse_nquads(serialize_nquads(store, g))) CHECK(line.graph == g);
}

TEST_CASE("store text form keeps provenance") {
    QuadStore store;
    store.add({X("a"), type(), S("Hotel"), G()});
    store.add({X("a"), type(), S("LodgingBusiness"), G()}, Provenance::Inferred);
    const auto text = serialize_store(store);
    CHECK(text.find("# inferred\n") != std::string::npos);
    QuadStore back;
    load_store(text, back);
    CHECK(back.explicit_count() == 1);
    CHECK(back.inferred_count() == 1);
    CHECK(serialize_store(back) == text);
    // plain readers see every quad
    CHECK(parse_nquads(text).size() == 2);
}

}  // TEST_SUITE
