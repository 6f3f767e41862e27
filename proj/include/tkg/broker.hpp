#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "tkg/date.hpp"
#include "tkg/error.hpp"
#include "tkg/quad_store.hpp"
#include "tkg/vocabulary.hpp"

namespace httplib {
class Server;
}

namespace tkg::broker {

/// A failure with the HTTP status the service answers with.
class BrokerError : public Error {
public:
    BrokerError(int status, const std::string& message) : Error(message), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

struct InputField {
    std::string name;
    bool required = false;
};

/// A provider's booking API, described as a schema.org Action:
///   {"@type": "ReserveAction",
///    "target": {"@type": "EntryPoint", "urlTemplate": "...", "httpMethod": "POST"},
///    "input": [{"@type": "PropertyValueSpecification", "valueName": "...", "valueRequired": true}],
///    "result": {"@type": "LodgingReservation"}}
struct ProviderDescriptor {
    std::string id;
    nlohmann::json action;
    std::string url_template;
    std::string http_method = "POST";
    std::vector<InputField> inputs;

    /// Throws InvalidArgument for relative endpoints, unnamed inputs or a
    /// non-Action type.
    static ProviderDescriptor from_json(const std::string& id, const nlohmann::json& action,
                                        const Vocabulary& vocabulary = Vocabulary::schema_org());
};

struct SearchRequest {
    std::string item_type = "LodgingBusiness";
    std::optional<std::string> region;
    std::optional<Date> from;  // earliest check-in
    std::optional<Date> to;    // latest check-out
    std::optional<int> persons;
    std::optional<std::int64_t> max_price_cents;
};

struct BookingResult {
    std::string offer_id;
    std::string provider_id;
    std::string confirmation_code;
    std::int64_t price_cents = 0;
    bool confirmed = false;

    nlohmann::json to_json() const;
};

struct BrokerOptions {
    std::chrono::seconds token_ttl{15 * 60};
    std::chrono::milliseconds provider_timeout{3000};
    std::string public_base = "http://127.0.0.1";  // prefix of issued action targets
};

class Broker {
public:
    using Clock = std::chrono::steady_clock;

    explicit Broker(const QuadStore& store, BrokerOptions options = {},
                    const Vocabulary& vocabulary = Vocabulary::schema_org());

    /// Registers or replaces; a replacement is recorded in the audit log.
    std::string register_provider(ProviderDescriptor descriptor);
    std::optional<ProviderDescriptor> provider(const std::string& id) const;
    std::vector<std::string> audit_log() const;

    /// Offers matching the request, cheapest first, each embedding the
    /// owning provider's action with a fresh single-use token. Offers whose
    /// seller is not a registered provider are left out.
    std::vector<nlohmann::json> handle_search(const SearchRequest& request);

    /// Checks the token and payload, then forwards to the provider.
    /// Throws BrokerError: 404 unknown/expired token, 400 missing field,
    /// 502 provider failure.
    BookingResult execute_action(const std::string& token, const nlohmann::json& payload);

    void set_public_base(std::string base);
    /// Test hook for token expiry.
    void set_clock(std::function<Clock::time_point()> now);
    std::size_t live_tokens() const;

    /// The SearchAction entry point describing `GET /search`.
    nlohmann::json search_action() const;

private:
    struct Issued {
        std::string provider_id;
        std::string offer_id;
        std::string sku;
        std::string item_offered;
        std::int64_t price_cents = 0;
        Clock::time_point expires;
    };

    const QuadStore& store_;
    BrokerOptions options_;
    const Vocabulary& vocabulary_;
    std::function<Clock::time_point()> now_;

    mutable std::shared_mutex providers_mutex_;
    std::map<std::string, ProviderDescriptor> providers_;
    std::vector<std::string> audit_;

    mutable std::mutex tokens_mutex_;
    std::map<std::string, Issued> tokens_;
};

/// 128 random bits as 32 lowercase hex digits.
std::string random_token();

/// Maps query parameters (type, region, from, to, persons, maxPrice) onto a
/// request. Throws BrokerError(400) on malformed values.
SearchRequest parse_search_params(const std::multimap<std::string, std::string>& params);

/// Booking engine stand-in: `POST /mock-ibe/book` answers
/// `{"confirmation": "MOCK-000001", "price": ..., "status": "confirmed"}`.
struct MockIbeBehavior {
    std::chrono::milliseconds delay{0};
    int fail_status = 0;  // when non-zero, answer with this status instead
};

/// HTTP front end. Routes: GET /, GET /search, POST /action/{token},
/// PUT /providers/{id}; plus the mock IBE when enabled.
class Server {
public:
    Server(Broker& broker, bool with_mock_ibe = false);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds (port 0 picks a free port) and serves on a background thread.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Binds and serves on the calling thread until stop().
    void listen(const std::string& host, int port);
    void stop();
    int port() const { return port_; }

    void set_mock_behavior(MockIbeBehavior behavior);
    /// Bodies received by the mock IBE, in arrival order.
    std::vector<nlohmann::json> mock_requests() const;

private:
    void install_routes();

    Broker& broker_;
    bool mock_;
    std::unique_ptr<httplib::Server> http_;
    std::thread thread_;
    int port_ = 0;

    mutable std::mutex mock_mutex_;
    MockIbeBehavior behavior_;
    std::vector<nlohmann::json> mock_requests_;
    std::uint64_t mock_counter_ = 0;
};

}  // namespace tkg::broker
