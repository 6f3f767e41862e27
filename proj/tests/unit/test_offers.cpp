#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tkg/domain_spec.hpp"
#include "tkg/jsonld.hpp"
#include "tkg/offers.hpp"
#include "tkg/util.hpp"

using namespace tkg;
using namespace tkg::offers;
using json = nlohmann::json;

namespace {

Date D(const char* s) { return Date::parse(s); }

OfferSpace alpenhof() { return load_offer_space(read_file(oracle::fixture("offers/alpenhof.space.json"))); }

OfferSpace single(std::int64_t rate = 10000) {
    OfferSpace s;
    s.accommodation_id = "https://ex.org/h";
    s.validity = {D("2018-02-01"), D("2018-02-02")};
    s.rooms = {{"R", {{{D("2018-02-01"), D("2018-02-02")}, rate}}}};
    s.boards = {{"RO", 0}};
    return s;
}

}  // namespace

TEST_SUITE("offer-heuristics") {

TEST_CASE("space loading and checks") {
    const auto s = alpenhof();
    CHECK(s.rooms.size() == 3);
    CHECK(s.room("B").rates[0].rate_cents == 8050);
    CHECK(s.board("HB").surcharge_cents == 1850);
    CHECK(s.provider_id == "alpenhof-ibe");
    CHECK(load_offer_space(to_json(s)).rooms.size() == 3);
    CHECK_THROWS_AS(s.room("Z"), OutOfBounds);

    auto gap = to_json(s);
    gap["roomTypes"][2]["rates"][0]["start"] = "2018-01-20";
    CHECK_THROWS_AS(load_offer_space(gap), InvalidArgument);
    auto overlap = to_json(s);
    overlap["roomTypes"][0]["rates"][1]["start"] = "2018-02-01";
    CHECK_THROWS_AS(load_offer_space(overlap), InvalidArgument);
    auto negative = to_json(s);
    negative["perPersonSurcharge"] = -1;
    CHECK_THROWS_AS(load_offer_space(negative), InvalidArgument);
    auto inverted = to_json(s);
    inverted["stayLengths"] = {{"min", 4}, {"max", 2}};
    CHECK_THROWS_AS(load_offer_space(inverted), InvalidArgument);
}

TEST_CASE("combination_count examples") {
    CHECK(combination_count(single(), {D("2018-02-01"), D("2018-02-02")}) == 1);
    CHECK(combination_count(single(), {D("2017-01-01"), D("2017-02-01")}) == 0);
    CHECK(combination_count(single(), {D("2018-02-01"), D("2018-02-01")}) == 0);

    // 3 rooms, 2 stay lengths, 2 occupancies, 2 boards over a 31-day window:
    // 30 check-ins fit a 2-night stay and 31 fit a 1-night stay.
    OfferSpace s;
    s.accommodation_id = "https://ex.org/h";
    s.validity = {D("2018-03-01"), D("2018-04-01")};
    for (const char* id : {"A", "B", "C"}) s.rooms.push_back({id, {{s.validity, 10000}}});
    s.min_persons = 1;
    s.max_persons = 2;
    s.boards = {{"BB", 0}, {"HB", 1500}};
    s.min_nights = 1;
    s.max_nights = 2;
    CHECK(combination_count(s, s.validity) == oracle::brute_enumerate(s, s.validity).size());
    CHECK(combination_count(s, s.validity) == 3 * (31 + 30) * 2 * 2);
    s.min_nights = s.max_nights = 2;
    CHECK(combination_count(s, s.validity) == 3 * 30 * 2 * 2);
}

TEST_CASE("price_offer examples") {
    auto one = price_offer(single(), "R", D("2018-02-01"), 1, 1, "RO");
    CHECK(one.total_cents == 10000);
    CHECK(one.ppn_cents == 10000);

    OfferSpace s = single();
    s.validity = {D("2018-02-01"), D("2018-02-03")};
    s.rooms[0].rates = {{{D("2018-02-01"), D("2018-02-02")}, 10000}, {{D("2018-02-02"), D("2018-02-03")}, 12000}};
    s.max_nights = 2;
    CHECK(price_offer(s, "R", D("2018-02-01"), 2, 1, "RO").total_cents == 22000);

    const auto a = alpenhof();
    const auto o = price_offer(a, "A", D("2018-02-01"), 3, 2, "HB");
    CHECK(o.total_cents == oracle::brute_total(a, "A", D("2018-02-01"), 3, 2, "HB"));
    // 100 + 100 + 120 room, 25 x 3 extra person, 18.50 x 2 x 3 board
    CHECK(o.total_cents == 32000 + 7500 + 11100);
    CHECK(o.check_out() == D("2018-02-04"));
}

TEST_CASE("price_offer names the violated bound") {
    const auto a = alpenhof();
    auto message = [&](auto&& fn) {
        try {
            fn();
        } catch (const OutOfBounds& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message([&] { price_offer(a, "A", D("2018-02-01"), 3, 4, "HB"); }).find("persons") != std::string::npos);
    CHECK(message([&] { price_offer(a, "A", D("2018-02-01"), 9, 2, "HB"); }).find("nights") != std::string::npos);
    CHECK(message([&] { price_offer(a, "A", D("2018-03-14"), 2, 2, "HB"); }).find("validity") != std::string::npos);
    CHECK(message([&] { price_offer(a, "Q", D("2018-02-01"), 2, 2, "HB"); }).find("Q") != std::string::npos);
    CHECK(message([&] { price_offer(a, "A", D("2018-02-01"), 2, 2, "AI"); }).find("AI") != std::string::npos);
}

TEST_CASE("per-person-per-night stays within rounding of the total") {
    std::mt19937 rng(11);
    for (int i = 0; i < 20; ++i) {
        const auto s = oracle::random_space(rng, 3000);
        for (const auto& o : enumerate_offers(s, s.validity)) {
            const auto pn = static_cast<std::int64_t>(o.persons) * o.nights;
            CHECK(std::llabs(o.ppn_cents * pn - o.total_cents) * 2 <= pn);
        }
    }
}

TEST_CASE("representatives") {
    const auto a = alpenhof();
    const auto all = enumerate_offers(a, a.validity);
    CHECK(all.size() == combination_count(a, a.validity));
    CHECK(std::is_sorted(all.begin(), all.end(), offer_less));

    const auto everything = materialize_representatives(a, a.validity, all.size() + 3, Strategy::GlobalMinFirst);
    CHECK(everything == all);

    const auto brute = oracle::brute_enumerate(a, a.validity);
    const auto cheapest = *std::min_element(brute.begin(), brute.end(), [](const auto& x, const auto& y) {
        return std::tie(x.total, x.check_in, x.room, x.board, x.nights, x.persons) <
               std::tie(y.total, y.check_in, y.room, y.board, y.nights, y.persons);
    });
    const auto k1 = materialize_representatives(a, a.validity, 1, Strategy::PerMonthMin);
    REQUIRE(k1.size() == 1);
    CHECK(k1[0].total_cents == cheapest.total);
    CHECK(k1[0].room_id == cheapest.room);
    CHECK(k1[0].check_in == cheapest.check_in);

    const auto k5 = materialize_representatives(a, a.validity, 5, Strategy::PerRoomMin);
    CHECK(k5.size() == 5);
    for (const auto& room : a.rooms) {
        std::int64_t best = INT64_MAX;
        for (const auto& b : brute)
            if (b.room == room.id) best = std::min(best, b.total);
        bool present = false;
        for (const auto& o : k5) present |= o.room_id == room.id && o.total_cents == best;
        CHECK_MESSAGE(present, room.id);
    }

    const auto months = materialize_representatives(a, a.validity, 5, Strategy::PerMonthMin);
    std::set<std::pair<int, unsigned>> seen;
    for (const auto& o : months) seen.insert({o.check_in.year(), o.check_in.month()});
    CHECK(seen.size() == 3);

    CHECK(materialize_representatives(a, {D("2017-01-01"), D("2017-02-01")}, 5, Strategy::PerRoomMin).empty());
    CHECK_THROWS_AS(materialize_representatives(a, a.validity, 0, Strategy::PerRoomMin), InvalidArgument);
    CHECK(parse_strategy("per-month-min") == Strategy::PerMonthMin);
    CHECK(to_string(Strategy::PerRoomMin) == "per-room-min");
    CHECK_THROWS_AS(parse_strategy("cheapest"), InvalidArgument);
}

TEST_CASE("random spaces agree with brute force") {
    std::mt19937 rng(1234);
    for (int i = 0; i < 15; ++i) {
        const auto s = oracle::random_space(rng, 2000);
        const auto brute = oracle::brute_enumerate(s, s.validity);
        const auto fast = enumerate_offers(s, s.validity);
        REQUIRE(fast.size() == brute.size());
        std::multiset<std::int64_t> a, b;
        for (const auto& o : fast) a.insert(o.total_cents);
        for (const auto& o : brute) b.insert(o.total);
        CHECK(a == b);
        for (const auto& o : brute)
            CHECK(price_offer(s, o.room, o.check_in, o.nights, o.persons, o.board).total_cents == o.total);
    }
}

TEST_CASE("raising a rate never lowers a total") {
    std::mt19937 rng(77);
    for (int i = 0; i < 10; ++i) {
        const auto s = oracle::random_space(rng, 1500);
        auto raised = s;
        auto& rates = raised.rooms[rng() % raised.rooms.size()].rates;
        rates[rng() % rates.size()].rate_cents += 1 + rng() % 5000;
        raised.boards[rng() % raised.boards.size()].surcharge_cents += rng() % 300;
        raised.per_person_surcharge_cents += rng() % 300;
        const auto before = enumerate_offers(s, s.validity);
        for (const auto& o : before)
            CHECK(price_offer(raised, o.room_id, o.check_in, o.nights, o.persons, o.board_id).total_cents >= o.total_cents);
    }
}

TEST_CASE("sku round trip") {
    const auto o = price_offer(alpenhof(), "B", D("2018-02-08"), 3, 2, "BB");
    CHECK(offer_sku(o) == "B|2018-02-08|3|2|BB");
    const auto back = parse_offer_sku(offer_sku(o));
    CHECK(back.room_id == "B");
    CHECK(back.check_in == o.check_in);
    CHECK(back.nights == 3);
    CHECK(back.persons == 2);
    CHECK(back.board_id == "BB");
    CHECK_THROWS_AS(parse_offer_sku("B|x"), InvalidArgument);
}

TEST_CASE("annotations") {
    CHECK(offers_to_annotations({}, "https://ex.org/h").empty());

    ConcreteOffer o{"R", D("2018-02-01"), 2, 1, "RO", 22000, 11000};
    const auto docs = offers_to_annotations({o}, "https://ex.org/h");
    REQUIRE(docs.size() == 1);
    CHECK(docs[0]["@type"] == "Offer");
    CHECK(docs[0]["price"] == "220.00");
    CHECK(docs[0]["priceCurrency"] == "EUR");
    CHECK(docs[0]["itemOffered"]["@id"] == "https://ex.org/h");
    CHECK(docs[0]["validFrom"] == "2018-02-01");
    CHECK(docs[0]["validThrough"] == "2018-02-03");
    CHECK(docs[0]["eligibleQuantity"]["value"] == 1);

    const auto a = alpenhof();
    const auto offer_ds = ds::load_ds(read_file(oracle::fixture("ds/offer.ds.json")));
    const auto five = materialize_representatives(a, a.validity, 5, Strategy::GlobalMinFirst);
    REQUIRE(five.size() == 5);
    for (const auto& doc : offers_to_annotations(five, a.accommodation_id, {a.provider_id})) {
        CAPTURE(doc.dump());
        CHECK(ds::validate(doc, offer_ds).errors.empty());
        CHECK(doc["seller"]["identifier"] == "alpenhof-ibe");
        const auto quads = jsonld::annotation_to_quads(doc, Term::iri("urn:test:g"));
        const auto rebuilt = jsonld::quads_to_annotation(quads, quads.back().subject);
        CHECK(rebuilt["price"] == doc["price"]);
        CHECK(rebuilt["sku"] == doc["sku"]);
    }
}

}  // TEST_SUITE
