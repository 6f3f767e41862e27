#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tkg/date.hpp"
#include "tkg/error.hpp"

namespace tkg::offers {

struct RateInterval {
    DateInterval span;  // half-open
    std::int64_t rate_cents = 0;  // per room per night
};

struct RoomType {
    std::string id;
    std::vector<RateInterval> rates;
};

struct BoardOption {
    std::string id;
    std::int64_t surcharge_cents = 0;  // per person per night
};

/// Parametric description of every bookable combination of one accommodation.
struct OfferSpace {
    std::string accommodation_id;
    DateInterval validity;
    std::vector<RoomType> rooms;
    int min_persons = 1, max_persons = 1;
    std::int64_t per_person_surcharge_cents = 0;  // per extra person per night
    std::vector<BoardOption> boards;
    int min_nights = 1, max_nights = 1;
    std::optional<std::string> provider_id;

    const RoomType& room(std::string_view id) const;
    const BoardOption& board(std::string_view id) const;
    /// Throws InvalidArgument on overlapping or non-covering rate tables,
    /// inverted ranges, or negative money.
    void check() const;
};

/// Reads the JSON file format; money may be a number or a decimal string.
OfferSpace load_offer_space(const nlohmann::json& j);
OfferSpace load_offer_space(std::string_view text);
inline OfferSpace load_offer_space(const std::string& text) {
    return load_offer_space(std::string_view(text));
}
nlohmann::json to_json(const OfferSpace& space);

struct ConcreteOffer {
    std::string room_id;
    Date check_in;
    int nights = 0;
    int persons = 0;
    std::string board_id;
    std::int64_t total_cents = 0;
    std::int64_t ppn_cents = 0;  // per person per night, half-up

    Date check_out() const { return check_in + nights; }
    bool operator==(const ConcreteOffer&) const = default;
};

/// Publication order: price, then check-in, room, board, nights, persons.
bool offer_less(const ConcreteOffer& a, const ConcreteOffer& b);

/// Raised when a requested tuple lies outside the space.
class OutOfBounds : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Number of (room, check-in, nights, persons, board) tuples whose stay lies
/// inside window ∩ validity.
std::uint64_t combination_count(const OfferSpace& space, const DateInterval& window);

ConcreteOffer price_offer(const OfferSpace& space, std::string_view room_id, Date check_in, int nights,
                          int persons, std::string_view board_id);

enum class Strategy { GlobalMinFirst, PerRoomMin, PerMonthMin };
Strategy parse_strategy(std::string_view name);
std::string to_string(Strategy s);

/// Few representative offers, sorted in publication order. Always holds the
/// global minimum when the window has any combination.
std::vector<ConcreteOffer> materialize_representatives(const OfferSpace& space, const DateInterval& window,
                                                       std::size_t k, Strategy strategy);

/// Every combination in the window, sorted in publication order.
std::vector<ConcreteOffer> enumerate_offers(const OfferSpace& space, const DateInterval& window);

/// "room|check-in|nights|persons|board"; the broker reads it back.
std::string offer_sku(const ConcreteOffer& offer);
ConcreteOffer parse_offer_sku(std::string_view sku);

struct AnnotationOptions {
    std::optional<std::string> provider_id;  // rendered as seller identifier
};

std::vector<nlohmann::json> offers_to_annotations(const std::vector<ConcreteOffer>& offers,
                                                  const std::string& accommodation_id,
                                                  const AnnotationOptions& options = {});

}  // namespace tkg::offers
