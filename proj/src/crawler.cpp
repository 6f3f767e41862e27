#include "tkg/crawler.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <thread>

#include <httplib.h>

#include "tkg/error.hpp"
#include "tkg/util.hpp"

namespace tkg::crawl {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

bool ieq_at(std::string_view s, std::size_t pos, std::string_view word) {
    if (pos + word.size() > s.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(s[pos + i])) != word[i]) return false;
    return true;
}

std::size_t ifind(std::string_view s, std::string_view word, std::size_t from) {
    for (std::size_t i = from; i + word.size() <= s.size(); ++i)
        if (ieq_at(s, i, word)) return i;
    return std::string_view::npos;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

struct Tag {
    std::string name;  // lowercased
    std::map<std::string, std::string> attributes;
    std::size_t end = 0;  // one past '>'
};

// Parses the tag opening at html[pos] == '<'. Attribute names are lowercased.
Tag read_tag(std::string_view html, std::size_t pos) {
    Tag tag;
    std::size_t i = pos + 1;
    while (i < html.size() && !is_space(html[i]) && html[i] != '>' && html[i] != '/')
        tag.name += static_cast<char>(std::tolower(static_cast<unsigned char>(html[i++])));
    while (i < html.size() && html[i] != '>') {
        if (is_space(html[i]) || html[i] == '/') {
            ++i;
            continue;
        }
        std::string name;
        while (i < html.size() && !is_space(html[i]) && html[i] != '=' && html[i] != '>' && html[i] != '/')
            name += static_cast<char>(std::tolower(static_cast<unsigned char>(html[i++])));
        while (i < html.size() && is_space(html[i])) ++i;
        std::string value;
        if (i < html.size() && html[i] == '=') {
            ++i;
            while (i < html.size() && is_space(html[i])) ++i;
            if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
                const char q = html[i++];
                const std::size_t close = html.find(q, i);
                const std::size_t stop = close == std::string_view::npos ? html.size() : close;
                value = std::string(html.substr(i, stop - i));
                i = stop == html.size() ? stop : stop + 1;
            } else {
                while (i < html.size() && !is_space(html[i]) && html[i] != '>') value += html[i++];
            }
        }
        if (!name.empty() && !tag.attributes.count(name)) tag.attributes.emplace(std::move(name), std::move(value));
    }
    tag.end = i < html.size() ? i + 1 : html.size();
    return tag;
}

template <typename F>
void scan_tags(std::string_view html, F&& on_tag) {
    std::size_t i = 0;
    while ((i = html.find('<', i)) != std::string_view::npos) {
        if (html.compare(i, 4, "<!--") == 0) {
            const std::size_t close = html.find("-->", i + 4);
            if (close == std::string_view::npos) return;
            i = close + 3;
            continue;
        }
        if (i + 1 >= html.size() || !std::isalpha(static_cast<unsigned char>(html[i + 1]))) {
            ++i;
            continue;
        }
        Tag tag = read_tag(html, i);
        i = on_tag(tag);
    }
}

std::string decode_entities(std::string_view s) {
    static const std::pair<std::string_view, char> table[] = {
        {"&amp;", '&'}, {"&quot;", '"'}, {"&#39;", '\''}, {"&apos;", '\''}, {"&lt;", '<'}, {"&gt;", '>'}};
    std::string out;
    for (std::size_t i = 0; i < s.size();) {
        bool hit = false;
        if (s[i] == '&')
            for (const auto& [entity, c] : table)
                if (s.substr(i, entity.size()) == entity) {
                    out += c;
                    i += entity.size();
                    hit = true;
                    break;
                }
        if (!hit) out += s[i++];
    }
    return out;
}

std::string remove_dot_segments(const std::string& path) {
    std::vector<std::string> out;
    std::size_t i = 1;
    const bool trailing = path.size() > 1 && (path.back() == '/' || path.ends_with("/.") || path.ends_with("/.."));
    while (i <= path.size()) {
        std::size_t slash = path.find('/', i);
        if (slash == std::string::npos) slash = path.size();
        const std::string seg = path.substr(i, slash - i);
        if (seg == "..") {
            if (!out.empty()) out.pop_back();
        } else if (seg != "." && !seg.empty()) {
            out.push_back(seg);
        }
        i = slash + 1;
    }
    std::string result;
    for (const auto& seg : out) result += "/" + seg;
    if (result.empty() || trailing) result += "/";
    return result;
}

}  // namespace

std::vector<ScriptBlock> extract_jsonld(std::string_view html) {
    std::vector<ScriptBlock> blocks;
    scan_tags(html, [&](const Tag& tag) -> std::size_t {
        if (tag.name != "script") return tag.end;
        std::size_t close = ifind(html, "</script", tag.end);
        if (close == std::string_view::npos) close = html.size();
        auto it = tag.attributes.find("type");
        if (it != tag.attributes.end() && to_lower(trim(it->second)) == "application/ld+json")
            blocks.push_back({std::string(html.substr(tag.end, close - tag.end)), tag.end});
        return close;
    });
    return blocks;
}

std::vector<std::string> extract_links(std::string_view html) {
    std::vector<std::string> links;
    scan_tags(html, [&](const Tag& tag) -> std::size_t {
        if (tag.name == "a") {
            auto it = tag.attributes.find("href");
            if (it != tag.attributes.end()) links.push_back(decode_entities(trim(it->second)));
        } else if (tag.name == "script" || tag.name == "style") {
            const std::size_t close = ifind(html, "</" + tag.name, tag.end);
            return close == std::string_view::npos ? html.size() : close;
        }
        return tag.end;
    });
    return links;
}

std::optional<Url> Url::parse(std::string_view text) {
    const std::size_t sep = text.find("://");
    if (sep == std::string_view::npos) return std::nullopt;
    Url u;
    u.scheme = to_lower(text.substr(0, sep));
    if (u.scheme != "http" && u.scheme != "https") return std::nullopt;
    std::string_view rest = text.substr(sep + 3);
    const std::size_t hash = rest.find('#');
    if (hash != std::string_view::npos) rest = rest.substr(0, hash);
    const std::size_t slash = rest.find_first_of("/?");
    std::string_view authority = rest.substr(0, slash);
    u.target = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    if (u.target.front() == '?') u.target.insert(0, "/");
    if (authority.empty() || authority.find('@') != std::string_view::npos) return std::nullopt;
    u.port = u.scheme == "https" ? 443 : 80;
    const std::size_t colon = authority.rfind(':');
    if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
        const std::string_view port = authority.substr(colon + 1);
        if (port.empty() || port.size() > 5 || port.find_first_not_of("0123456789") != std::string_view::npos)
            return std::nullopt;
        u.port = std::stoi(std::string(port));
        if (u.port < 1 || u.port > 65535) return std::nullopt;
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) return std::nullopt;
    u.host = to_lower(authority);
    return u;
}

std::string Url::authority() const {
    const int def = scheme == "https" ? 443 : 80;
    return port == def ? host : host + ":" + std::to_string(port);
}

std::optional<std::string> resolve_url(const std::string& base, std::string_view href_in) {
    auto b = Url::parse(base);
    if (!b) return std::nullopt;
    std::string href(href_in.substr(0, href_in.find('#')));
    std::size_t colon = href.find(':');
    const std::size_t first_delim = href.find_first_of("/?");
    if (colon != std::string::npos && (first_delim == std::string::npos || colon < first_delim)) {
        auto u = Url::parse(href);
        if (!u) return std::nullopt;
        u->target = remove_dot_segments(u->target.substr(0, u->target.find('?'))) +
                    (u->target.find('?') == std::string::npos ? "" : u->target.substr(u->target.find('?')));
        return u->to_string();
    }
    if (href.starts_with("//")) {
        auto u = Url::parse(b->scheme + ":" + href);
        return u ? std::optional<std::string>(u->to_string()) : std::nullopt;
    }
    const std::string base_path = b->target.substr(0, b->target.find('?'));
    std::string path, query;
    const std::size_t q = href.find('?');
    if (q != std::string::npos) {
        query = href.substr(q);
        href = href.substr(0, q);
    }
    if (href.empty()) {
        path = base_path;
        if (query.empty()) query = b->target.find('?') == std::string::npos ? "" : b->target.substr(b->target.find('?'));
    } else if (href.front() == '/') {
        path = href;
    } else {
        path = base_path.substr(0, base_path.rfind('/') + 1) + href;
    }
    b->target = remove_dot_segments(path) + query;
    return b->to_string();
}

std::string to_string(FetchError e) {
    switch (e) {
        case FetchError::None: return "none";
        case FetchError::InvalidUrl: return "invalid-url";
        case FetchError::Network: return "network";
        case FetchError::Timeout: return "timeout";
        case FetchError::HttpStatus: return "http-status";
        case FetchError::RedirectLimit: return "redirect-limit";
    }
    return "unknown";
}

FetchResult fetch_page(const std::string& url, const FetchPolicy& policy) {
    FetchResult result;
    std::string current = url;
    for (int redirects = 0;; ++redirects) {
        result.final_url = current;
        auto u = Url::parse(current);
        if (!u) {
            result.error = FetchError::InvalidUrl;
            result.message = "not an absolute http(s) URL: " + current;
            return result;
        }
        httplib::Client client(u->origin());
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(policy.timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(policy.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        client.set_follow_location(false);
        auto res = client.Get(u->target);
        if (!res) {
            const auto err = res.error();
            result.error = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                               ? FetchError::Timeout
                               : FetchError::Network;
            result.message = httplib::to_string(err) + " fetching " + current;
            return result;
        }
        result.status = res->status;
        if (res->status >= 300 && res->status < 400 && res->has_header("Location")) {
            if (redirects >= policy.max_redirects) {
                result.error = FetchError::RedirectLimit;
                result.message = "more than " + std::to_string(policy.max_redirects) + " redirects starting at " + url;
                return result;
            }
            auto next = resolve_url(current, res->get_header_value("Location"));
            if (!next) {
                result.error = FetchError::InvalidUrl;
                result.message = "unusable redirect target '" + res->get_header_value("Location") + "'";
                return result;
            }
            current = *next;
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            result.error = FetchError::HttpStatus;
            result.message = "HTTP " + std::to_string(res->status) + " for " + current;
            return result;
        }
        result.body = std::move(res->body);
        return result;
    }
}

void CrawlJob::check() const {
    if (seeds.empty()) throw InvalidArgument("crawl job has no seeds");
    for (const auto& s : seeds)
        if (!Url::parse(s)) throw InvalidArgument("seed is not an absolute http(s) URL: " + s);
    if (per_host_delay.count() < 0) throw InvalidArgument("per-host delay is negative");
    if (max_pages_per_site == 0) throw InvalidArgument("page cap must be at least 1");
}

std::vector<std::string> parse_seed_list(std::string_view text) {
    std::vector<std::string> seeds;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        std::string line = trim(text.substr(start, nl - start));
        if (!line.empty() && line.front() != '#') seeds.push_back(std::move(line));
        start = nl + 1;
    }
    return seeds;
}

std::string crawl_graph_iri(const std::string& authority, Date date) {
    return "urn:crawl:" + authority + ":" + date.to_string();
}

std::size_t CrawlResult::pages_fetched() const {
    std::size_t n = 0;
    for (const auto& s : sites)
        for (const auto& p : s.pages) n += p.error == FetchError::None;
    return n;
}

std::size_t CrawlResult::blocks_extracted() const {
    std::size_t n = 0;
    for (const auto& s : sites)
        for (const auto& p : s.pages) n += p.blocks;
    return n;
}

std::size_t CrawlResult::documents_delivered() const {
    std::size_t n = 0;
    for (const auto& s : sites)
        for (const auto& p : s.pages) n += p.documents;
    return n;
}

std::size_t CrawlResult::parse_failures() const {
    std::size_t n = 0;
    for (const auto& s : sites)
        for (const auto& p : s.pages) n += p.parse_errors.size();
    return n;
}

json CrawlResult::to_json() const {
    json j = {{"pagesFetched", pages_fetched()},
              {"blocksExtracted", blocks_extracted()},
              {"documentsDelivered", documents_delivered()},
              {"parseFailures", parse_failures()},
              {"sites", json::array()}};
    for (const auto& s : sites) {
        json site = {{"site", s.authority}, {"graph", s.graph_iri}, {"pages", json::array()}};
        for (const auto& p : s.pages) {
            json page = {{"url", p.url}, {"status", p.status}, {"blocks", p.blocks}, {"documents", p.documents}};
            if (p.error != FetchError::None) {
                page["error"] = to_string(p.error);
                page["message"] = p.error_message;
            }
            if (!p.parse_errors.empty()) page["parseErrors"] = p.parse_errors;
            site["pages"].push_back(std::move(page));
        }
        j["sites"].push_back(std::move(site));
    }
    return j;
}

namespace {

void crawl_site(const CrawlJob& job, const std::vector<std::string>& seeds, SiteResult& site, const Sink& sink) {
    std::deque<std::string> frontier;
    std::set<std::string> seen;
    for (const auto& s : seeds) {
        const std::string u = Url::parse(s)->to_string();
        if (seen.insert(u).second) frontier.push_back(u);
    }
    std::optional<Clock::time_point> last_done;
    while (!frontier.empty() && site.pages.size() < job.max_pages_per_site) {
        const std::string url = frontier.front();
        frontier.pop_front();
        if (last_done) std::this_thread::sleep_until(*last_done + job.per_host_delay);
        FetchResult fetched = fetch_page(url, job.fetch);
        last_done = Clock::now();

        PageResult page;
        page.url = url;
        page.status = fetched.status;
        page.error = fetched.error;
        page.error_message = fetched.message;
        if (fetched.ok()) {
            seen.insert(fetched.final_url);
            for (const auto& block : extract_jsonld(fetched.body)) {
                ++page.blocks;
                json parsed;
                try {
                    parsed = json::parse(block.text);
                } catch (const json::parse_error& e) {
                    page.parse_errors.push_back("block at offset " + std::to_string(block.offset) + ": " + e.what());
                    continue;
                }
                std::vector<json> docs;
                if (parsed.is_array()) docs = parsed.get<std::vector<json>>();
                else docs.push_back(std::move(parsed));
                for (const auto& doc : docs) {
                    if (!doc.is_object()) {
                        page.parse_errors.push_back("block at offset " + std::to_string(block.offset) +
                                                    ": not a JSON object");
                        continue;
                    }
                    try {
                        sink(doc, site.graph_iri);
                        ++page.documents;
                    } catch (const std::exception& e) {
                        page.parse_errors.push_back("block at offset " + std::to_string(block.offset) + ": " +
                                                    e.what());
                    }
                }
            }
            for (const auto& href : extract_links(fetched.body)) {
                auto next = resolve_url(fetched.final_url, href);
                if (!next) continue;
                auto nu = Url::parse(*next);
                if (nu->authority() != site.authority) continue;
                if (seen.insert(*next).second) frontier.push_back(*next);
            }
        }
        site.pages.push_back(std::move(page));
    }
}

}  // namespace

CrawlResult run_crawl(const CrawlJob& job, const Sink& sink) {
    job.check();
    CrawlResult result;
    std::vector<std::vector<std::string>> site_seeds;
    for (const auto& s : job.seeds) {
        const std::string authority = Url::parse(s)->authority();
        auto it = std::find_if(result.sites.begin(), result.sites.end(),
                               [&](const SiteResult& r) { return r.authority == authority; });
        if (it == result.sites.end()) {
            result.sites.push_back({authority, crawl_graph_iri(authority, job.crawl_date), {}});
            site_seeds.push_back({s});
        } else {
            site_seeds[static_cast<std::size_t>(it - result.sites.begin())].push_back(s);
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < result.sites.size(); i = next++)
            crawl_site(job, site_seeds[i], result.sites[i], sink);
    };
    const std::size_t threads = std::clamp<std::size_t>(job.parallelism, 1, result.sites.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return result;
}

}  // namespace tkg::crawl
