// tkg: command-line front end for the tourism knowledge graph toolkit.

#include <csignal>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tkg/broker.hpp"
#include "tkg/crawler.hpp"
#include "tkg/domain_spec.hpp"
#include "tkg/ingest.hpp"
#include "tkg/lifecycle.hpp"
#include "tkg/mapping.hpp"
#include "tkg/nquads.hpp"
#include "tkg/offers.hpp"
#include "tkg/query.hpp"
#include "tkg/util.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace tkg;

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsage = 2;

struct Globals {
    std::string config_file;
    std::string format = "json";
    std::string store;
};

lifecycle::Config config_of(const Globals& g) {
    lifecycle::Config c = g.config_file.empty() ? lifecycle::Config{} : lifecycle::Config::load(g.config_file);
    if (!g.store.empty()) c.store_path = g.store;
    return c;
}

std::string need_file(const std::string& path, const char* what) {
    if (!fs::exists(path)) throw lifecycle::UsageError(std::string(what) + " not found: " + path);
    return read_file(path);
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string offers_csv(const std::vector<offers::ConcreteOffer>& list) {
    std::string out = "room,check_in,nights,persons,board,total,per_person_night\n";
    for (const auto& o : list)
        out += o.room_id + "," + o.check_in.to_string() + "," + std::to_string(o.nights) + "," +
               std::to_string(o.persons) + "," + o.board_id + "," + format_cents(o.total_cents) + "," +
               format_cents(o.ppn_cents) + "\n";
    return out;
}

json offer_json(const offers::ConcreteOffer& o) {
    return {{"room", o.room_id},
            {"checkIn", o.check_in.to_string()},
            {"nights", o.nights},
            {"persons", o.persons},
            {"board", o.board_id},
            {"total", format_cents(o.total_cents)},
            {"perPersonPerNight", format_cents(o.ppn_cents)}};
}

broker::Server* g_server = nullptr;
void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tourism knowledge graph toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_file, "JSON config file");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--store", g.store, "N-Quads store file");

    // validate
    auto* validate = app.add_subcommand("validate", "Validate annotation documents against a domain specification");
    std::string ds_file;
    std::vector<std::string> doc_files;
    validate->add_option("--ds", ds_file, "Domain specification")->required();
    validate->add_option("documents", doc_files, "Annotation documents")->required();

    // map
    auto* map = app.add_subcommand("map", "Map source records to annotations");
    std::string mapping_file, records_file;
    map->add_option("--mapping", mapping_file, "Mapping definition")->required();
    map->add_option("records", records_file, "Source records (JSON or CSV)")->required();

    // offers
    auto* offers_cmd = app.add_subcommand("offers", "Offer space operations");
    offers_cmd->require_subcommand(1);
    std::string space_file, from_s, to_s, strategy = "global-min-first";
    std::size_t k = 5;
    bool annotate = false;
    auto* materialize = offers_cmd->add_subcommand("materialize", "Pick representative offers");
    materialize->add_option("--space", space_file, "Offer space")->required();
    materialize->add_option("--from", from_s, "Window start (YYYY-MM-DD)");
    materialize->add_option("--to", to_s, "Window end, exclusive");
    materialize->add_option("-k", k, "Number of offers")->check(CLI::PositiveNumber);
    materialize->add_option("--strategy", strategy)->check(
        CLI::IsMember({"global-min-first", "per-room-min", "per-month-min"}));
    materialize->add_flag("--annotate", annotate, "Emit schema.org Offer documents");
    auto* price = offers_cmd->add_subcommand("price", "Price one combination");
    std::string room, board, check_in;
    int nights = 1, persons = 1;
    price->add_option("--space", space_file, "Offer space")->required();
    price->add_option("--room", room)->required();
    price->add_option("--board", board)->required();
    price->add_option("--check-in", check_in)->required();
    price->add_option("--nights", nights)->required();
    price->add_option("--persons", persons)->required();

    // crawl
    auto* crawl_cmd = app.add_subcommand("crawl", "Crawl sites for embedded annotations");
    std::string seeds_file, date_s;
    long delay_ms = -1;
    std::size_t max_pages = 0;
    bool crawl_ingest = false;
    crawl_cmd->add_option("--seeds", seeds_file, "Seed list, one URL per line")->required();
    crawl_cmd->add_option("--date", date_s, "Crawl date (YYYY-MM-DD)")->required();
    crawl_cmd->add_option("--delay-ms", delay_ms, "Per-host delay");
    crawl_cmd->add_option("--max-pages", max_pages, "Page cap per site");
    crawl_cmd->add_flag("--ingest", crawl_ingest, "Ingest into the store");

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "Ingest documents as a snapshot");
    std::string source_id;
    ingest_cmd->add_option("--source", source_id, "Source identifier")->required();
    ingest_cmd->add_option("--date", date_s, "Snapshot date")->required();
    ingest_cmd->add_option("--ds", ds_file, "Validate against this domain specification");
    ingest_cmd->add_option("documents", doc_files, "Document files or directories")->required();

    // migrate
    auto* migrate = app.add_subcommand("migrate", "Run the daily migration for a manifest");
    std::string manifest_file;
    migrate->add_option("--manifest", manifest_file, "Migration manifest (overrides config)");
    migrate->add_option("--date", date_s, "Migration date")->required();

    // query
    auto* query_cmd = app.add_subcommand("query", "Evaluate a pattern query");
    std::string query_file, query_text;
    query_cmd->add_option("file", query_file, "Query file");
    query_cmd->add_option("-e,--text", query_text, "Query text");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Price analytics");
    analyze->require_subcommand(1);
    std::vector<std::string> regions;
    std::string from_m, to_m;
    auto* series = analyze->add_subcommand("price-series", "Monthly price series of one region");
    series->add_option("--region", regions)->required()->expected(1);
    series->add_option("--from", from_m, "YYYY-MM")->required();
    series->add_option("--to", to_m, "YYYY-MM")->required();
    auto* compare = analyze->add_subcommand("compare", "Align several regions by month");
    compare->add_option("--region", regions)->required();
    compare->add_option("--from", from_m, "YYYY-MM")->required();
    compare->add_option("--to", to_m, "YYYY-MM")->required();

    // serve
    auto* serve = app.add_subcommand("serve", "Run the action broker");
    std::string host;
    int port = 0;
    bool mock_ibe = false;
    std::vector<std::string> provider_specs;
    serve->add_option("--host", host);
    serve->add_option("--port", port)->check(CLI::Range(1, 65535));
    serve->add_flag("--mock-ibe", mock_ibe, "Also serve POST /mock-ibe/book");
    serve->add_option("--provider", provider_specs, "id=descriptor.json");

    // export
    auto* export_cmd = app.add_subcommand("export", "Print the store as N-Quads");
    std::string graph;
    export_cmd->add_option("--graph", graph, "Only this graph");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    const bool csv = g.format == "csv";
    try {
        auto cfg = config_of(g);
        auto open_store = [&] {
            QuadStore store;
            lifecycle::load_store_file(cfg.store_path, store);
            return store;
        };

        if (*validate) {
            const auto ds = ds::load_ds(need_file(ds_file, "domain specification"));
            std::vector<json> docs;
            std::vector<std::string> ids;
            for (const auto& f : doc_files) {
                const auto text = need_file(f, "document");
                try {
                    docs.push_back(json::parse(text));
                } catch (const json::parse_error& e) {
                    docs.push_back(json(text));  // reported as InvalidDocument
                }
                ids.push_back(f);
            }
            const auto summary = ds::validate_batch(docs, ds, ids);
            print_json(doc_files.size() == 1 ? summary.reports.front().to_json() : summary.to_json());
            return summary.invalid_count == 0 ? kOk : kDomainFailure;
        }

        if (*map) {
            const auto spec = mapping::load_mapping(need_file(mapping_file, "mapping"));
            const auto records = mapping::parse_records(need_file(records_file, "records"), spec.format);
            const auto batch = mapping::apply_batch(spec, records);
            json errors = json::array();
            for (const auto& e : batch.errors) errors.push_back({{"record", e.index}, {"message", e.message}});
            print_json(json(batch.documents));
            if (!batch.errors.empty()) std::cerr << errors.dump(2) << "\n";
            return batch.errors.empty() ? kOk : kDomainFailure;
        }

        if (*materialize) {
            const auto space = offers::load_offer_space(need_file(space_file, "offer space"));
            DateInterval window = space.validity;
            if (!from_s.empty()) window.start = Date::parse(from_s);
            if (!to_s.empty()) window.end = Date::parse(to_s);
            const auto list = offers::materialize_representatives(space, window, k, offers::parse_strategy(strategy));
            if (annotate) {
                print_json(json(offers::offers_to_annotations(list, space.accommodation_id, {space.provider_id})));
            } else if (csv) {
                std::cout << offers_csv(list);
            } else {
                json out = json::array();
                for (const auto& o : list) out.push_back(offer_json(o));
                print_json(out);
            }
            return kOk;
        }

        if (*price) {
            const auto space = offers::load_offer_space(need_file(space_file, "offer space"));
            try {
                const auto o = offers::price_offer(space, room, Date::parse(check_in), nights, persons, board);
                if (csv) std::cout << offers_csv({o});
                else print_json(offer_json(o));
                return kOk;
            } catch (const offers::OutOfBounds& e) {
                print_json({{"error", e.what()}});
                return kDomainFailure;
            }
        }

        if (*crawl_cmd) {
            crawl::CrawlJob job;
            job.seeds = crawl::parse_seed_list(need_file(seeds_file, "seed list"));
            job.crawl_date = Date::parse(date_s);
            job.per_host_delay = delay_ms >= 0 ? std::chrono::milliseconds(delay_ms) : cfg.crawl_delay;
            job.max_pages_per_site = max_pages > 0 ? max_pages : cfg.crawl_max_pages;
            job.parallelism = cfg.crawl_parallelism;
            job.fetch.timeout = cfg.crawl_timeout;
            std::mutex m;
            std::map<std::string, std::vector<json>> collected;
            const auto result = crawl::run_crawl(job, [&](const json& doc, const std::string& graph_iri) {
                std::lock_guard lock(m);
                collected[graph_iri].push_back(doc);
            });
            json out = result.to_json();
            if (crawl_ingest) {
                QuadStore store = open_store();
                json reports = json::array();
                for (auto& [graph_iri, docs] : collected)
                    reports.push_back(ingest::ingest_documents(store, docs, Term::iri(graph_iri)).to_json());
                out["ingest"] = reports;
                lifecycle::save_store_file(cfg.store_path, store);
            }
            print_json(out);
            return kOk;
        }

        if (*ingest_cmd) {
            std::optional<ds::DomainSpecification> spec;
            if (!ds_file.empty()) spec = ds::load_ds(need_file(ds_file, "domain specification"));
            std::vector<json> docs;
            std::vector<ingest::Rejection> unreadable;
            for (const auto& f : doc_files) {
                auto loaded = lifecycle::load_documents(f);
                for (auto& d : loaded.documents) docs.push_back(std::move(d));
                for (auto& [file, msg] : loaded.failures) unreadable.push_back({0, file, "unparseable JSON: " + msg});
            }
            QuadStore store = open_store();
            ingest::IngestOptions options;
            if (spec) options.ds = &*spec;
            auto report = ingest::ingest_snapshot(store, docs, {source_id, Date::parse(date_s)}, options);
            for (auto& r : unreadable) {
                r.index = report.documents_received++;
                report.rejected.push_back(std::move(r));
            }
            lifecycle::save_store_file(cfg.store_path, store);
            print_json(report.to_json());
            return report.documents_received > 0 && report.documents_accepted() == 0 ? kDomainFailure : kOk;
        }

        if (*migrate) {
            if (!manifest_file.empty()) cfg.manifest_path = manifest_file;
            const auto result = lifecycle::run_lifecycle(cfg, Date::parse(date_s));
            print_json(result.to_json());
            return result.exit_code;
        }

        if (*query_cmd) {
            if (query_file.empty() == query_text.empty())
                throw lifecycle::UsageError("give exactly one of a query file or --text");
            const auto q = query::parse_query(query_text.empty() ? need_file(query_file, "query") : query_text);
            const auto table = query::evaluate(open_store(), q);
            if (csv) std::cout << table.to_csv();
            else print_json(table.to_json());
            return kOk;
        }

        if (*series || *compare) {
            const auto from = YearMonth::parse(from_m), to = YearMonth::parse(to_m);
            if (to < from) throw lifecycle::UsageError("--from is after --to");
            const QuadStore store = open_store();
            if (*series) {
                const auto points = query::price_series(store, regions.front(), from, to);
                if (csv) std::cout << query::series_to_csv(points);
                else print_json(query::series_to_json(points));
            } else {
                const auto rows = query::compare_regions(store, regions, from, to);
                if (csv) {
                    std::cout << query::comparison_to_csv(rows, regions);
                } else {
                    json out = json::array();
                    for (const auto& row : rows) {
                        json cells = json::object();
                        for (std::size_t i = 0; i < regions.size(); ++i)
                            cells[regions[i]] = row.cells[i] ? query::series_to_json({*row.cells[i]}).front() : json();
                        out.push_back({{"year", row.month.year}, {"month", row.month.month}, {"regions", cells}});
                    }
                    print_json(out);
                }
            }
            return kOk;
        }

        if (*serve) {
            const QuadStore store = open_store();
            const std::string bind_host = host.empty() ? cfg.broker_host : host;
            const int bind_port = port == 0 ? cfg.broker_port : port;
            broker::Broker b(store);
            b.set_public_base("http://" + bind_host + ":" + std::to_string(bind_port));
            auto providers = cfg.providers;
            for (const auto& spec : provider_specs) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos) throw lifecycle::UsageError("--provider expects id=file, got " + spec);
                providers.emplace_back(spec.substr(0, eq), spec.substr(eq + 1));
            }
            for (const auto& [id, file] : providers)
                b.register_provider(broker::ProviderDescriptor::from_json(
                    id, json::parse(need_file(file.string(), "provider descriptor"))));
            broker::Server server(b, mock_ibe);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "listening on " << bind_host << ":" << bind_port << "\n";
            server.listen(bind_host, bind_port);
            return kOk;
        }

        if (*export_cmd) {
            const QuadStore store = open_store();
            std::cout << (graph.empty() ? serialize_nquads(store) : serialize_nquads(store, Term::iri(graph)));
            return kOk;
        }
    } catch (const lifecycle::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomainFailure;
    }
    return kUsage;
}
