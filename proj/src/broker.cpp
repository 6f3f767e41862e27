#include "tkg/broker.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <httplib.h>
#include <openssl/rand.h>

#include "tkg/crawler.hpp"
#include "tkg/jsonld.hpp"
#include "tkg/query.hpp"
#include "tkg/util.hpp"

namespace tkg::broker {

namespace {

using json = nlohmann::json;

constexpr const char* kSkolemPrefix = "urn:kg:skolem:";

std::optional<std::int64_t> money_of(const json& v) {
    if (v.is_number_integer()) return v.get<std::int64_t>() * 100;
    if (v.is_number()) return static_cast<std::int64_t>(std::llround(v.get<double>() * 100));
    if (v.is_string()) return parse_cents(trim(v.get<std::string>()));
    return std::nullopt;
}

std::optional<Term> first_object(const QuadStore& store, const Term& s, const std::string& local,
                                 const std::optional<Term>& graph) {
    QuadPattern p;
    p.subject = s;
    p.predicate = Term::iri(vocab::schema(local));
    p.graph = graph;
    auto found = store.match(p);
    if (found.empty()) return std::nullopt;
    return found.front().object;
}

// Explicit statements about `root` in `graph`, following nested (skolem or
// blank) nodes but stopping at other IRIs.
std::vector<Quad> description(const QuadStore& store, const Term& root, const Term& graph) {
    std::vector<Quad> out;
    std::set<Term> seen{root};
    std::vector<Term> todo{root};
    while (!todo.empty()) {
        Term s = todo.back();
        todo.pop_back();
        QuadPattern p;
        p.subject = s;
        p.graph = graph;
        for (auto& [q, prov] : store.match_with_provenance(p)) {
            if (prov != Provenance::Explicit) continue;
            const bool nested = q.object.is_blank() || (q.object.is_iri() && q.object.value().starts_with(kSkolemPrefix));
            if (nested && seen.insert(q.object).second) todo.push_back(q.object);
            out.push_back(std::move(q));
        }
    }
    return out;
}

std::string expand_template(const std::string& tmpl, const json& payload) {
    std::string out;
    for (std::size_t i = 0; i < tmpl.size();) {
        if (tmpl[i] == '{') {
            const std::size_t close = tmpl.find('}', i);
            if (close != std::string::npos) {
                const std::string name = tmpl.substr(i + 1, close - i - 1);
                if (payload.contains(name)) {
                    const json& v = payload[name];
                    out += httplib::detail::encode_url(v.is_string() ? v.get<std::string>() : v.dump());
                }
                i = close + 1;
                continue;
            }
        }
        out += tmpl[i++];
    }
    return out;
}

json error_body(int status, const std::string& message) { return {{"status", status}, {"error", message}}; }

}  // namespace

ProviderDescriptor ProviderDescriptor::from_json(const std::string& id, const json& action, const Vocabulary& vocabulary) {
    if (id.empty()) throw InvalidArgument("provider id is empty");
    if (!action.is_object()) throw InvalidArgument("provider descriptor must be a JSON object");
    const std::string type = action.value("@type", std::string());
    if (!vocabulary.has_type(type) || !vocabulary.is_subtype_of(*Vocabulary::local_name(type), "Action"))
        throw InvalidArgument("provider descriptor @type must be an Action type, got '" + type + "'");

    ProviderDescriptor d;
    d.id = id;
    d.action = action;
    const json& target = action.contains("target") ? action["target"] : json();
    if (target.is_string()) {
        d.url_template = target.get<std::string>();
    } else if (target.is_object()) {
        d.url_template = target.value("urlTemplate", std::string());
        d.http_method = target.value("httpMethod", std::string("POST"));
    }
    if (d.url_template.empty()) throw InvalidArgument("provider '" + id + "' has no target urlTemplate");
    if (!crawl::Url::parse(d.url_template))
        throw InvalidArgument("provider '" + id + "' endpoint is not an absolute http(s) URL: " + d.url_template);
    std::transform(d.http_method.begin(), d.http_method.end(), d.http_method.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (d.http_method != "POST" && d.http_method != "PUT" && d.http_method != "GET")
        throw InvalidArgument("provider '" + id + "' uses unsupported method " + d.http_method);

    if (action.contains("input")) {
        const json& in = action["input"];
        const json list = in.is_array() ? in : json::array({in});
        for (const auto& spec : list) {
            if (!spec.is_object() || !spec.contains("valueName") || !spec["valueName"].is_string() ||
                spec["valueName"].get<std::string>().empty())
                throw InvalidArgument("provider '" + id + "' has an input without valueName");
            bool required = false;
            if (spec.contains("valueRequired")) {
                const json& r = spec["valueRequired"];
                required = r.is_boolean() ? r.get<bool>() : (r.is_string() && r.get<std::string>() == "true");
            }
            d.inputs.push_back({spec["valueName"].get<std::string>(), required});
        }
    }
    return d;
}

json BookingResult::to_json() const {
    return {{"offerId", offer_id},
            {"providerId", provider_id},
            {"confirmation", confirmation_code},
            {"price", format_cents(price_cents)},
            {"status", confirmed ? "confirmed" : "rejected"}};
}

std::string random_token() {
    unsigned char bytes[16];
    if (RAND_bytes(bytes, sizeof bytes) != 1) throw Error("random token generation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned char b : bytes) {
        out += hex[b >> 4];
        out += hex[b & 15];
    }
    return out;
}

Broker::Broker(const QuadStore& store, BrokerOptions options, const Vocabulary& vocabulary)
    : store_(store), options_(std::move(options)), vocabulary_(vocabulary), now_([] { return Clock::now(); }) {}

std::string Broker::register_provider(ProviderDescriptor descriptor) {
    std::unique_lock lock(providers_mutex_);
    const std::string id = descriptor.id;
    auto [it, inserted] = providers_.insert_or_assign(id, std::move(descriptor));
    if (!inserted) audit_.push_back("provider '" + id + "' replaced");
    return id;
}

std::optional<ProviderDescriptor> Broker::provider(const std::string& id) const {
    std::shared_lock lock(providers_mutex_);
    auto it = providers_.find(id);
    if (it == providers_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> Broker::audit_log() const {
    std::shared_lock lock(providers_mutex_);
    return audit_;
}

void Broker::set_public_base(std::string base) { options_.public_base = std::move(base); }

void Broker::set_clock(std::function<Clock::time_point()> now) { now_ = std::move(now); }

std::size_t Broker::live_tokens() const {
    std::lock_guard lock(tokens_mutex_);
    const auto now = now_();
    return static_cast<std::size_t>(
        std::count_if(tokens_.begin(), tokens_.end(), [&](const auto& kv) { return kv.second.expires > now; }));
}

json Broker::search_action() const {
    return {{"@context", "https://schema.org/"},
            {"@type", "SearchAction"},
            {"target",
             {{"@type", "EntryPoint"},
              {"urlTemplate", options_.public_base +
                                  "/search?type={type}&region={region}&from={from}&to={to}&persons={persons}"
                                  "&maxPrice={maxPrice}"},
              {"httpMethod", "GET"}}},
            {"query", "type"}};
}

std::vector<json> Broker::handle_search(const SearchRequest& request) {
    auto local = Vocabulary::local_name(request.item_type);
    if (!local || !vocabulary_.has_type(*local)) throw BrokerError(400, "unknown item type '" + request.item_type + "'");

    using query::Variable;
    query::PatternQuery q;
    q.patterns = {
        {Variable{"o"}, Term::iri(vocab::schema("itemOffered")), Variable{"e"}, Variable{"g"}},
        {Variable{"o"}, Term::iri(vocab::schema("price")), Variable{"p"}, Variable{"g"}},
        {Variable{"e"}, Term::iri(std::string(vocab::kRdfType)), Term::iri(vocab::schema(*local)), Variable{"tg"}},
    };
    if (request.max_price_cents)
        q.filters.push_back({Variable{"p"}, query::CompareOp::Le,
                             Term::literal(format_cents(*request.max_price_cents), std::string(vocab::kXsdDecimal))});
    q.projection = {{"o"}, {"e"}, {"g"}, {"p"}};
    const auto table = query::evaluate(store_, q);

    // Latest dated graph wins when an offer was published repeatedly.
    struct Candidate {
        Term offer, entity, graph;
        std::int64_t price = 0;
    };
    std::map<Term, Candidate> best;
    for (const auto& row : table.rows) {
        auto cents = parse_cents(trim(row[3]->value()));
        if (!cents) continue;
        auto it = best.find(*row[0]);
        const auto date = query::graph_date(row[2]->value());
        if (it != best.end()) {
            const auto old_date = query::graph_date(it->second.graph.value());
            if (!(date && (!old_date || *date > *old_date))) continue;
        }
        best.insert_or_assign(*row[0], Candidate{*row[0], *row[1], *row[2], *cents});
    }

    std::vector<Candidate> hits;
    for (auto& [_, c] : best) {
        if (request.region) {
            bool found = false;
            QuadPattern ap;
            ap.subject = c.entity;
            ap.predicate = Term::iri(vocab::schema("address"));
            for (const auto& aq : store_.match(ap)) {
                QuadPattern lp;
                lp.subject = aq.object;
                lp.predicate = Term::iri(vocab::schema("addressLocality"));
                for (const auto& lq : store_.match(lp))
                    if (normalize_key(lq.object.value()) == normalize_key(*request.region)) found = true;
            }
            if (!found) continue;
        }
        if (request.from) {
            auto v = first_object(store_, c.offer, "validFrom", c.graph);
            auto d = v ? Date::try_parse(v->value()) : std::nullopt;
            if (!d || *d < *request.from) continue;
        }
        if (request.to) {
            auto v = first_object(store_, c.offer, "validThrough", c.graph);
            auto d = v ? Date::try_parse(v->value()) : std::nullopt;
            if (!d || *d > *request.to) continue;
        }
        if (request.persons) {
            auto qv = first_object(store_, c.offer, "eligibleQuantity", c.graph);
            auto v = qv ? first_object(store_, *qv, "value", c.graph) : std::nullopt;
            auto n = v ? query::numeric_value(*v) : std::nullopt;
            if (!n || static_cast<int>(*n) != *request.persons) continue;
        }
        hits.push_back(std::move(c));
    }
    std::sort(hits.begin(), hits.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.price, a.offer) < std::tie(b.price, b.offer);
    });

    std::vector<json> out;
    for (const auto& c : hits) {
        auto seller = first_object(store_, c.offer, "seller", c.graph);
        auto pid = seller ? first_object(store_, *seller, "identifier", c.graph) : std::nullopt;
        if (!pid) continue;
        auto descriptor = provider(pid->value());
        if (!descriptor) continue;

        const auto quads = description(store_, c.offer, c.graph);
        json doc = jsonld::quads_to_annotation(quads, c.offer);

        Issued issued;
        issued.provider_id = descriptor->id;
        issued.offer_id = c.offer.value();
        issued.item_offered = c.entity.value();
        issued.price_cents = c.price;
        if (doc.contains("sku") && doc["sku"].is_string()) issued.sku = doc["sku"].get<std::string>();
        issued.expires = now_() + options_.token_ttl;
        std::string token = random_token();
        {
            std::lock_guard lock(tokens_mutex_);
            tokens_.emplace(token, std::move(issued));
        }

        json action = descriptor->action;
        action.erase("@context");
        action.erase("@id");
        action["target"] = {{"@type", "EntryPoint"},
                            {"urlTemplate", options_.public_base + "/action/" + token},
                            {"httpMethod", "POST"},
                            {"contentType", "application/json"}};
        doc["potentialAction"] = std::move(action);
        out.push_back(std::move(doc));
    }
    return out;
}

BookingResult Broker::execute_action(const std::string& token, const json& payload) {
    Issued issued;
    {
        std::lock_guard lock(tokens_mutex_);
        auto it = tokens_.find(token);
        if (it == tokens_.end()) throw BrokerError(404, "unknown offer token");
        if (it->second.expires <= now_()) {
            tokens_.erase(it);
            throw BrokerError(404, "offer token expired");
        }
        issued = it->second;
    }
    auto descriptor = provider(issued.provider_id);
    if (!descriptor) throw BrokerError(404, "provider '" + issued.provider_id + "' is no longer registered");
    if (!payload.is_object()) throw BrokerError(400, "payload must be a JSON object");
    for (const auto& in : descriptor->inputs)
        if (in.required && (!payload.contains(in.name) || payload[in.name].is_null()))
            throw BrokerError(400, "missing required field '" + in.name + "'");

    {
        std::lock_guard lock(tokens_mutex_);
        // Another request may have consumed it meanwhile.
        if (tokens_.erase(token) == 0) throw BrokerError(404, "unknown offer token");
    }

    json body = payload;
    body["offerId"] = issued.offer_id;
    body["offer"] = issued.sku;
    body["itemOffered"] = issued.item_offered;
    body["price"] = format_cents(issued.price_cents);

    const std::string url = expand_template(descriptor->url_template, payload);
    const auto u = crawl::Url::parse(url);
    if (!u) throw BrokerError(502, "provider '" + descriptor->id + "' endpoint is unusable: " + url);
    httplib::Client client(u->origin());
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.provider_timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.provider_timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Result res = descriptor->http_method == "GET"
                              ? client.Get(u->target)
                              : descriptor->http_method == "PUT"
                                    ? client.Put(u->target, body.dump(), "application/json")
                                    : client.Post(u->target, body.dump(), "application/json");
    if (!res)
        throw BrokerError(502, "provider '" + descriptor->id + "' did not answer: " + httplib::to_string(res.error()));
    if (res->status >= 500)
        throw BrokerError(502, "provider '" + descriptor->id + "' failed with HTTP " + std::to_string(res->status));

    BookingResult result;
    result.offer_id = issued.offer_id;
    result.provider_id = descriptor->id;
    result.price_cents = issued.price_cents;
    if (res->status >= 400) return result;

    json answer;
    try {
        answer = json::parse(res->body);
    } catch (const json::parse_error&) {
        throw BrokerError(502, "provider '" + descriptor->id + "' sent a non-JSON answer");
    }
    if (!answer.is_object()) throw BrokerError(502, "provider '" + descriptor->id + "' sent a malformed answer");
    if (answer.contains("confirmation") && answer["confirmation"].is_string())
        result.confirmation_code = answer["confirmation"].get<std::string>();
    if (answer.contains("price"))
        if (auto cents = money_of(answer["price"])) result.price_cents = *cents;
    result.confirmed = answer.value("status", std::string()) == "confirmed" && !result.confirmation_code.empty();
    return result;
}

SearchRequest parse_search_params(const std::multimap<std::string, std::string>& params) {
    SearchRequest r;
    auto get = [&](const char* key) -> std::optional<std::string> {
        auto it = params.find(key);
        if (it == params.end() || it->second.empty()) return std::nullopt;
        return it->second;
    };
    if (auto v = get("type")) r.item_type = *v;
    r.region = get("region");
    auto date = [&](const char* key) -> std::optional<Date> {
        auto v = get(key);
        if (!v) return std::nullopt;
        auto d = Date::try_parse(*v);
        if (!d) throw BrokerError(400, std::string("parameter '") + key + "' is not a YYYY-MM-DD date");
        return d;
    };
    r.from = date("from");
    r.to = date("to");
    if (auto v = get("persons")) {
        auto n = parse_number(*v);
        if (!n || *n < 1 || std::floor(*n) != *n) throw BrokerError(400, "parameter 'persons' must be a positive integer");
        r.persons = static_cast<int>(*n);
    }
    if (auto v = get("maxPrice")) {
        auto c = parse_cents(*v);
        if (!c || *c < 0) throw BrokerError(400, "parameter 'maxPrice' must be a non-negative amount");
        r.max_price_cents = c;
    }
    return r;
}

Server::Server(Broker& broker, bool with_mock_ibe)
    : broker_(broker), mock_(with_mock_ibe), http_(std::make_unique<httplib::Server>()) {
    install_routes();
}

Server::~Server() { stop(); }

void Server::install_routes() {
    auto send = [](httplib::Response& res, int status, const json& body, const char* type = "application/json") {
        res.status = status;
        res.set_content(body.dump(2), type);
    };

    http_->Get("/", [this, send](const httplib::Request&, httplib::Response& res) {
        send(res, 200, broker_.search_action(), "application/ld+json");
    });

    http_->Get("/search", [this, send](const httplib::Request& req, httplib::Response& res) {
        try {
            auto docs = broker_.handle_search(parse_search_params(req.params));
            send(res, 200, json(docs), "application/ld+json");
        } catch (const BrokerError& e) {
            send(res, e.status(), error_body(e.status(), e.what()));
        } catch (const std::exception& e) {
            send(res, 500, error_body(500, e.what()));
        }
    });

    http_->Post(R"(/action/([0-9A-Za-z]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
        json payload;
        try {
            payload = json::parse(req.body.empty() ? std::string("{}") : req.body);
        } catch (const json::parse_error&) {
            send(res, 400, error_body(400, "payload is not valid JSON"));
            return;
        }
        try {
            send(res, 200, broker_.execute_action(req.matches[1], payload).to_json());
        } catch (const BrokerError& e) {
            send(res, e.status(), error_body(e.status(), e.what()));
        } catch (const std::exception& e) {
            send(res, 500, error_body(500, e.what()));
        }
    });

    http_->Put(R"(/providers/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
        try {
            const bool existed = broker_.provider(req.matches[1]).has_value();
            auto d = ProviderDescriptor::from_json(req.matches[1], json::parse(req.body));
            broker_.register_provider(std::move(d));
            send(res, existed ? 200 : 201, {{"providerId", std::string(req.matches[1])}, {"replaced", existed}});
        } catch (const json::parse_error&) {
            send(res, 400, error_body(400, "descriptor is not valid JSON"));
        } catch (const Error& e) {
            send(res, 400, error_body(400, e.what()));
        }
    });

    if (mock_) {
        http_->Post("/mock-ibe/book", [this, send](const httplib::Request& req, httplib::Response& res) {
            MockIbeBehavior behavior;
            std::uint64_t n = 0;
            json body;
            try {
                body = json::parse(req.body);
            } catch (const json::parse_error&) {
                send(res, 400, {{"status", "rejected"}, {"error", "invalid JSON"}});
                return;
            }
            {
                std::lock_guard lock(mock_mutex_);
                behavior = behavior_;
                mock_requests_.push_back(body);
                n = ++mock_counter_;
            }
            if (behavior.delay.count() > 0) std::this_thread::sleep_for(behavior.delay);
            if (behavior.fail_status != 0) {
                send(res, behavior.fail_status, {{"status", "rejected"}, {"error", "mock failure"}});
                return;
            }
            char code[32];
            std::snprintf(code, sizeof code, "MOCK-%06llu", static_cast<unsigned long long>(n));
            send(res, 200, {{"confirmation", code}, {"price", body.value("price", std::string("0.00"))}, {"status", "confirmed"}});
        });
    }
}

int Server::start(const std::string& host, int port) {
    port_ = port == 0 ? http_->bind_to_any_port(host) : (http_->bind_to_port(host, port) ? port : -1);
    if (port_ < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    return port_;
}

void Server::listen(const std::string& host, int port) {
    if (!http_->bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
    port_ = port;
    http_->listen_after_bind();
}

void Server::stop() {
    if (http_) http_->stop();
    if (thread_.joinable()) thread_.join();
}

void Server::set_mock_behavior(MockIbeBehavior behavior) {
    std::lock_guard lock(mock_mutex_);
    behavior_ = behavior;
}

std::vector<json> Server::mock_requests() const {
    std::lock_guard lock(mock_mutex_);
    return mock_requests_;
}

}  // namespace tkg::broker
