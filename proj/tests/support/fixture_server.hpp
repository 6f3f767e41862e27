#pragma once

// Static site server for crawler tests. Serves a directory, records the
// arrival time of every request and offers a few canned misbehaviours:
//   /hop/<n>   redirects to /hop/<n-1>, /hop/0 answers 200
//   /missing   404
//   /slow      answers after 2 s

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "tkg/util.hpp"

namespace fixture {

class SiteServer {
public:
    using Clock = std::chrono::steady_clock;

    struct Hit {
        std::string path;
        Clock::time_point at;
    };

    explicit SiteServer(std::filesystem::path root) : root_(std::move(root)) {
        server_.Get(R"(/hop/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
            const int n = std::stoi(req.matches[1]);
            if (n == 0) {
                res.set_content("<html>landed</html>", "text/html");
                return;
            }
            res.status = 302;
            res.set_header("Location", "/hop/" + std::to_string(n - 1));
        });
        server_.Get("/slow", [](const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(std::chrono::seconds(2));
            res.set_content("late", "text/plain");
        });
        server_.Get(R"(/(.*))", [this](const httplib::Request& req, httplib::Response& res) {
            std::string rel = req.matches[1];
            if (rel.empty()) rel = "index.html";
            const auto file = root_ / rel;
            if (rel.find("..") != std::string::npos || !std::filesystem::is_regular_file(file)) {
                res.status = 404;
                res.set_content("not found", "text/plain");
                return;
            }
            res.set_content(tkg::read_file(file.string()), "text/html");
        });
        server_.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response&) {
            std::lock_guard lock(mutex_);
            hits_.push_back({req.path, Clock::now()});
            return httplib::Server::HandlerResponse::Unhandled;
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~SiteServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    int port() const { return port_; }
    std::string base() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::vector<Hit> hits() const {
        std::lock_guard lock(mutex_);
        return hits_;
    }
    void clear() {
        std::lock_guard lock(mutex_);
        hits_.clear();
    }

private:
    std::filesystem::path root_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    mutable std::mutex mutex_;
    std::vector<Hit> hits_;
};

}  // namespace fixture
