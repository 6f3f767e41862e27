#include "tkg/offers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "tkg/util.hpp"

namespace tkg::offers {

namespace {

using json = nlohmann::json;

std::int64_t money(const json& v, const std::string& field) {
    if (v.is_number_integer()) return v.get<std::int64_t>() * 100;
    if (v.is_number()) return static_cast<std::int64_t>(std::llround(v.get<double>() * 100.0));
    if (v.is_string())
        if (auto c = parse_cents(v.get<std::string>())) return *c;
    throw InvalidArgument("field '" + field + "' is not a money amount: " + v.dump());
}

json money_json(std::int64_t cents) { return format_cents(cents); }

DateInterval interval(const json& j) {
    return {Date::parse(j.at("start").get<std::string>()), Date::parse(j.at("end").get<std::string>())};
}

// Per-room prefix sums of nightly rates over the validity window.
struct RateIndex {
    Date origin;
    std::vector<std::vector<std::int64_t>> prefix;  // prefix[r][i] = Σ rates of days [origin, origin+i)

    explicit RateIndex(const OfferSpace& space) : origin(space.validity.start) {
        const auto days = static_cast<std::size_t>(space.validity.length());
        for (const auto& room : space.rooms) {
            std::vector<std::int64_t> p(days + 1, 0);
            std::size_t ri = 0;
            for (std::size_t i = 0; i < days; ++i) {
                const Date d = origin + static_cast<std::int64_t>(i);
                while (ri < room.rates.size() && room.rates[ri].span.end <= d) ++ri;
                p[i + 1] = p[i] + room.rates[ri].rate_cents;
            }
            prefix.push_back(std::move(p));
        }
    }

    std::int64_t stay(std::size_t room, Date check_in, int nights) const {
        const auto a = static_cast<std::size_t>(check_in - origin);
        return prefix[room][a + static_cast<std::size_t>(nights)] - prefix[room][a];
    }
};

std::int64_t total_for(const OfferSpace& space, std::int64_t room_component, int persons, int nights,
                       std::int64_t board_surcharge) {
    return room_component + space.per_person_surcharge_cents * std::max(0, persons - 1) * nights +
           board_surcharge * persons * nights;
}

template <typename F>
void for_each_offer(const OfferSpace& space, const DateInterval& window, F&& visit) {
    const DateInterval w = window.intersect(space.validity);
    if (w.empty()) return;
    const RateIndex index(space);
    for (std::size_t r = 0; r < space.rooms.size(); ++r) {
        for (Date d = w.start; d < w.end; d = d + 1) {
            for (int n = space.min_nights; n <= space.max_nights && d + n <= w.end; ++n) {
                const std::int64_t room_component = index.stay(r, d, n);
                for (int p = space.min_persons; p <= space.max_persons; ++p) {
                    for (const auto& b : space.boards) {
                        ConcreteOffer o;
                        o.room_id = space.rooms[r].id;
                        o.check_in = d;
                        o.nights = n;
                        o.persons = p;
                        o.board_id = b.id;
                        o.total_cents = total_for(space, room_component, p, n, b.surcharge_cents);
                        o.ppn_cents = div_round_half_up(o.total_cents, static_cast<std::int64_t>(p) * n);
                        visit(std::move(o));
                    }
                }
            }
        }
    }
}

}  // namespace

const RoomType& OfferSpace::room(std::string_view id) const {
    for (const auto& r : rooms)
        if (r.id == id) return r;
    throw OutOfBounds("unknown room '" + std::string(id) + "'");
}

const BoardOption& OfferSpace::board(std::string_view id) const {
    for (const auto& b : boards)
        if (b.id == id) return b;
    throw OutOfBounds("unknown board option '" + std::string(id) + "'");
}

void OfferSpace::check() const {
    if (validity.empty()) throw InvalidArgument("offer space validity window is empty");
    if (rooms.empty()) throw InvalidArgument("offer space has no room types");
    if (boards.empty()) throw InvalidArgument("offer space has no board options");
    if (min_persons < 1 || min_persons > max_persons)
        throw InvalidArgument("occupancy must satisfy 1 <= min <= max");
    if (min_nights < 1 || min_nights > max_nights)
        throw InvalidArgument("stay lengths must satisfy 1 <= min <= max");
    if (per_person_surcharge_cents < 0) throw InvalidArgument("per-person surcharge is negative");
    std::set<std::string> seen;
    for (const auto& b : boards) {
        if (b.surcharge_cents < 0) throw InvalidArgument("board '" + b.id + "' has a negative surcharge");
        if (!seen.insert(b.id).second) throw InvalidArgument("duplicate board id '" + b.id + "'");
    }
    seen.clear();
    for (const auto& r : rooms) {
        if (!seen.insert(r.id).second) throw InvalidArgument("duplicate room id '" + r.id + "'");
        if (r.rates.empty()) throw InvalidArgument("room '" + r.id + "' has no rates");
        for (std::size_t i = 0; i < r.rates.size(); ++i) {
            const auto& iv = r.rates[i];
            if (iv.span.empty()) throw InvalidArgument("room '" + r.id + "' has an empty rate interval");
            if (iv.rate_cents < 0) throw InvalidArgument("room '" + r.id + "' has a negative rate");
            if (i > 0 && r.rates[i - 1].span.end > iv.span.start)
                throw InvalidArgument("room '" + r.id + "' has overlapping rate intervals at " +
                                      iv.span.start.to_string());
        }
        Date covered = validity.start;
        for (const auto& iv : r.rates) {
            if (iv.span.end <= covered) continue;
            if (iv.span.start > covered) break;
            covered = iv.span.end;
        }
        if (covered < validity.end)
            throw InvalidArgument("rates of room '" + r.id + "' do not cover " + covered.to_string());
    }
}

OfferSpace load_offer_space(const json& j) {
    try {
        OfferSpace s;
        s.accommodation_id = j.at("accommodationId").get<std::string>();
        for (const auto& r : j.at("roomTypes")) {
            RoomType room{r.at("id").get<std::string>(), {}};
            for (const auto& rate : r.at("rates")) room.rates.push_back({interval(rate), money(rate.at("rate"), "rate")});
            std::sort(room.rates.begin(), room.rates.end(),
                      [](const RateInterval& a, const RateInterval& b) { return a.span.start < b.span.start; });
            s.rooms.push_back(std::move(room));
        }
        if (j.contains("validity")) {
            s.validity = interval(j["validity"]);
        } else {
            bool first = true;
            for (const auto& r : s.rooms)
                for (const auto& iv : r.rates) {
                    if (first || iv.span.start < s.validity.start) s.validity.start = iv.span.start;
                    if (first || iv.span.end > s.validity.end) s.validity.end = iv.span.end;
                    first = false;
                }
        }
        const json& occ = j.at("occupancy");
        s.min_persons = occ.at("min").get<int>();
        s.max_persons = occ.at("max").get<int>();
        s.per_person_surcharge_cents =
            j.contains("perPersonSurcharge") ? money(j["perPersonSurcharge"], "perPersonSurcharge") : 0;
        for (const auto& b : j.at("boardOptions"))
            s.boards.push_back({b.at("id").get<std::string>(),
                                b.contains("surcharge") ? money(b["surcharge"], "surcharge") : 0});
        const json& stay = j.at("stayLengths");
        s.min_nights = stay.at("min").get<int>();
        s.max_nights = stay.at("max").get<int>();
        if (j.contains("providerId")) s.provider_id = j["providerId"].get<std::string>();
        s.check();
        return s;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed offer space: ") + e.what());
    }
}

OfferSpace load_offer_space(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return load_offer_space(j);
}

json to_json(const OfferSpace& s) {
    json rooms = json::array();
    for (const auto& r : s.rooms) {
        json rates = json::array();
        for (const auto& iv : r.rates)
            rates.push_back({{"start", iv.span.start.to_string()},
                             {"end", iv.span.end.to_string()},
                             {"rate", money_json(iv.rate_cents)}});
        rooms.push_back({{"id", r.id}, {"rates", rates}});
    }
    json boards = json::array();
    for (const auto& b : s.boards) boards.push_back({{"id", b.id}, {"surcharge", money_json(b.surcharge_cents)}});
    json j = {{"accommodationId", s.accommodation_id},
              {"validity", {{"start", s.validity.start.to_string()}, {"end", s.validity.end.to_string()}}},
              {"roomTypes", rooms},
              {"occupancy", {{"min", s.min_persons}, {"max", s.max_persons}}},
              {"perPersonSurcharge", money_json(s.per_person_surcharge_cents)},
              {"boardOptions", boards},
              {"stayLengths", {{"min", s.min_nights}, {"max", s.max_nights}}}};
    if (s.provider_id) j["providerId"] = *s.provider_id;
    return j;
}

bool offer_less(const ConcreteOffer& a, const ConcreteOffer& b) {
    return std::tie(a.total_cents, a.check_in, a.room_id, a.board_id, a.nights, a.persons) <
           std::tie(b.total_cents, b.check_in, b.room_id, b.board_id, b.nights, b.persons);
}

std::uint64_t combination_count(const OfferSpace& space, const DateInterval& window) {
    const std::int64_t w = window.intersect(space.validity).length();
    std::uint64_t starts = 0;
    for (std::int64_t n = space.min_nights; n <= space.max_nights; ++n)
        starts += static_cast<std::uint64_t>(std::max<std::int64_t>(0, w - n + 1));
    return starts * space.rooms.size() * space.boards.size() *
           static_cast<std::uint64_t>(space.max_persons - space.min_persons + 1);
}

ConcreteOffer price_offer(const OfferSpace& space, std::string_view room_id, Date check_in, int nights,
                          int persons, std::string_view board_id) {
    const RoomType& room = space.room(room_id);
    const BoardOption& board = space.board(board_id);
    if (persons < space.min_persons || persons > space.max_persons)
        throw OutOfBounds("persons " + std::to_string(persons) + " outside occupancy " +
                          std::to_string(space.min_persons) + ".." + std::to_string(space.max_persons));
    if (nights < space.min_nights || nights > space.max_nights)
        throw OutOfBounds("nights " + std::to_string(nights) + " outside stay lengths " +
                          std::to_string(space.min_nights) + ".." + std::to_string(space.max_nights));
    if (check_in < space.validity.start || check_in + nights > space.validity.end)
        throw OutOfBounds("stay " + check_in.to_string() + ".." + (check_in + nights).to_string() +
                          " outside validity " + space.validity.start.to_string() + ".." +
                          space.validity.end.to_string());

    std::int64_t room_component = 0;
    for (int i = 0; i < nights; ++i) {
        const Date d = check_in + i;
        auto it = std::find_if(room.rates.begin(), room.rates.end(),
                               [&](const RateInterval& iv) { return iv.span.contains(d); });
        room_component += it->rate_cents;
    }
    ConcreteOffer o{room.id, check_in, nights, persons, board.id, 0, 0};
    o.total_cents = total_for(space, room_component, persons, nights, board.surcharge_cents);
    o.ppn_cents = div_round_half_up(o.total_cents, static_cast<std::int64_t>(persons) * nights);
    return o;
}

Strategy parse_strategy(std::string_view name) {
    if (name == "global-min-first") return Strategy::GlobalMinFirst;
    if (name == "per-room-min") return Strategy::PerRoomMin;
    if (name == "per-month-min") return Strategy::PerMonthMin;
    throw InvalidArgument("unknown strategy '" + std::string(name) + "'");
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::GlobalMinFirst: return "global-min-first";
        case Strategy::PerRoomMin: return "per-room-min";
        case Strategy::PerMonthMin: return "per-month-min";
    }
    return "";
}

std::vector<ConcreteOffer> enumerate_offers(const OfferSpace& space, const DateInterval& window) {
    std::vector<ConcreteOffer> all;
    all.reserve(combination_count(space, window));
    for_each_offer(space, window, [&](ConcreteOffer&& o) { all.push_back(std::move(o)); });
    std::sort(all.begin(), all.end(), offer_less);
    return all;
}

std::vector<ConcreteOffer> materialize_representatives(const OfferSpace& space, const DateInterval& window,
                                                       std::size_t k, Strategy strategy) {
    if (k < 1) throw InvalidArgument("k must be at least 1");
    const std::uint64_t count = combination_count(space, window);
    if (count == 0) return {};
    if (k >= count) return enumerate_offers(space, window);

    // k cheapest overall, kept as a max-heap; plus the minimum of each group.
    std::priority_queue<ConcreteOffer, std::vector<ConcreteOffer>, decltype(&offer_less)> cheapest(&offer_less);
    std::map<std::string, ConcreteOffer> group_min;
    for_each_offer(space, window, [&](ConcreteOffer&& o) {
        if (strategy != Strategy::GlobalMinFirst) {
            std::string key = strategy == Strategy::PerRoomMin ? o.room_id : YearMonth::of(o.check_in).to_string();
            auto it = group_min.find(key);
            if (it == group_min.end()) group_min.emplace(std::move(key), o);
            else if (offer_less(o, it->second)) it->second = o;
        }
        if (cheapest.size() < k) cheapest.push(std::move(o));
        else if (offer_less(o, cheapest.top())) {
            cheapest.pop();
            cheapest.push(std::move(o));
        }
    });

    std::vector<ConcreteOffer> pool;
    while (!cheapest.empty()) {
        pool.push_back(cheapest.top());
        cheapest.pop();
    }
    std::reverse(pool.begin(), pool.end());

    std::vector<ConcreteOffer> out{pool.front()};
    std::vector<ConcreteOffer> minima;
    for (auto& [_, o] : group_min) minima.push_back(o);
    std::sort(minima.begin(), minima.end(), offer_less);
    auto add = [&](const ConcreteOffer& o) {
        if (out.size() < k && std::find(out.begin(), out.end(), o) == out.end()) out.push_back(o);
    };
    for (const auto& o : minima) add(o);
    for (const auto& o : pool) add(o);
    std::sort(out.begin(), out.end(), offer_less);
    return out;
}

std::string offer_sku(const ConcreteOffer& o) {
    return o.room_id + "|" + o.check_in.to_string() + "|" + std::to_string(o.nights) + "|" +
           std::to_string(o.persons) + "|" + o.board_id;
}

ConcreteOffer parse_offer_sku(std::string_view sku) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t bar = sku.find('|', start);
        parts.emplace_back(sku.substr(start, bar == std::string_view::npos ? bar : bar - start));
        if (bar == std::string_view::npos) break;
        start = bar + 1;
    }
    if (parts.size() != 5) throw InvalidArgument("malformed offer sku '" + std::string(sku) + "'");
    ConcreteOffer o;
    o.room_id = parts[0];
    o.check_in = Date::parse(parts[1]);
    auto n = parse_number(parts[2]);
    auto p = parse_number(parts[3]);
    if (!n || !p) throw InvalidArgument("malformed offer sku '" + std::string(sku) + "'");
    o.nights = static_cast<int>(*n);
    o.persons = static_cast<int>(*p);
    o.board_id = parts[4];
    return o;
}

std::vector<json> offers_to_annotations(const std::vector<ConcreteOffer>& offers, const std::string& accommodation_id,
                                        const AnnotationOptions& options) {
    std::vector<json> docs;
    for (const auto& o : offers) {
        json doc = {
            {"@context", "https://schema.org/"},
            {"@type", "Offer"},
            {"name", o.room_id + ", " + o.board_id + ", " + std::to_string(o.persons) + " persons, " +
                         std::to_string(o.nights) + " nights"},
            {"sku", offer_sku(o)},
            {"price", format_cents(o.total_cents)},
            {"priceCurrency", "EUR"},
            {"itemOffered", {{"@id", accommodation_id}}},
            {"validFrom", o.check_in.to_string()},
            {"validThrough", o.check_out().to_string()},
            {"eligibleQuantity", {{"@type", "QuantitativeValue"}, {"value", o.persons}, {"unitText", "persons"}}},
            {"eligibleDuration", {{"@type", "QuantitativeValue"}, {"value", o.nights}, {"unitText", "nights"}}},
            {"priceSpecification",
             {{"@type", "UnitPriceSpecification"},
              {"price", format_cents(o.ppn_cents)},
              {"priceCurrency", "EUR"},
              {"unitText", "per person per night"}}},
        };
        if (options.provider_id)
            doc["seller"] = {{"@type", "Organization"}, {"identifier", *options.provider_id}};
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace tkg::offers
