#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tkg/date.hpp"

namespace tkg::crawl {

struct ScriptBlock {
    std::string text;
    std::size_t offset = 0;  // byte offset of the first content byte
};

/// Contents of every `<script type="application/ld+json">` element, in
/// document order. Tolerates tag soup; never throws.
std::vector<ScriptBlock> extract_jsonld(std::string_view html);

/// `href` values of anchor elements, in document order.
std::vector<std::string> extract_links(std::string_view html);

struct Url {
    std::string scheme;  // "http" or "https"
    std::string host;
    int port = 0;
    std::string target;  // path plus query, always starts with '/'

    static std::optional<Url> parse(std::string_view text);
    /// host, plus ":port" when the port is not the scheme default.
    std::string authority() const;
    std::string origin() const { return scheme + "://" + authority(); }
    std::string to_string() const { return origin() + target; }
};

/// Resolves an href against a base URL; drops fragments. nullopt for
/// non-http(s) references such as mailto: or javascript:.
std::optional<std::string> resolve_url(const std::string& base, std::string_view href);

struct FetchPolicy {
    std::chrono::milliseconds timeout{5000};
    int max_redirects = 5;
};

enum class FetchError { None, InvalidUrl, Network, Timeout, HttpStatus, RedirectLimit };
std::string to_string(FetchError e);

struct FetchResult {
    int status = 0;
    std::string body;
    std::string final_url;
    FetchError error = FetchError::None;
    std::string message;

    bool ok() const { return error == FetchError::None; }
};

/// GET with manual redirect handling; failures are reported, not thrown.
FetchResult fetch_page(const std::string& url, const FetchPolicy& policy = {});

struct CrawlJob {
    std::vector<std::string> seeds;
    std::size_t max_pages_per_site = 100;
    std::chrono::milliseconds per_host_delay{0};
    Date crawl_date;
    std::size_t parallelism = 4;
    FetchPolicy fetch;

    /// Throws InvalidArgument when seeds are empty or malformed.
    void check() const;
};

/// One URL per line; blank lines and `#` comments ignored.
std::vector<std::string> parse_seed_list(std::string_view text);

std::string crawl_graph_iri(const std::string& authority, Date date);

struct PageResult {
    std::string url;
    int status = 0;
    FetchError error = FetchError::None;
    std::string error_message;
    std::size_t blocks = 0;
    std::size_t documents = 0;  // blocks parsed and delivered
    std::vector<std::string> parse_errors;
};

struct SiteResult {
    std::string authority;
    std::string graph_iri;
    std::vector<PageResult> pages;
};

struct CrawlResult {
    std::vector<SiteResult> sites;  // in order of first seed

    std::size_t pages_fetched() const;
    std::size_t blocks_extracted() const;
    std::size_t documents_delivered() const;
    std::size_t parse_failures() const;
    nlohmann::json to_json() const;
};

/// Receives each parsed annotation with its site graph. May be called from
/// several worker threads at once.
using Sink = std::function<void(const nlohmann::json& document, const std::string& graph_iri)>;

/// Breadth-first crawl of each seed's host, following same-host links. Hosts
/// run in parallel; requests to one host are spaced by per_host_delay,
/// measured from the previous response.
CrawlResult run_crawl(const CrawlJob& job, const Sink& sink);

}  // namespace tkg::crawl
