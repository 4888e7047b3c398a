#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "ngsim/errors.hpp"

namespace ngsim {

struct ChatMessage {
    std::string role;
    std::string content;
};

// `session` is an opaque per-agent conversation key used for request
// correlation; it never appears in the prompt text.
struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    std::string session;
};

struct ChatResult {
    std::string text;
    int retries = 0;
};

class ChatEndpoint {
public:
    virtual ~ChatEndpoint() = default;
    virtual ChatResult complete(const ChatRequest& request) = 0;
};

struct ClientConfig {
    std::string base_url = "http://localhost:8080";
    std::string path = "/v1/chat/completions";
    std::string model = "mock";
    std::string api_key_env = "NGSIM_API_KEY";
    double temperature = 0.0;
    int max_attempts = 3;       // total attempts, not extra retries
    int backoff_ms = 100;       // doubles per retry
    int max_in_flight = 4;
    int timeout_s = 30;
};

// Chat-completion style HTTP client with exponential backoff and a
// bounded in-flight request count.
class HttpChatEndpoint : public ChatEndpoint {
public:
    explicit HttpChatEndpoint(ClientConfig config)
        : cfg_(std::move(config)), client_(cfg_.base_url) {
        client_.set_connection_timeout(cfg_.timeout_s);
        client_.set_read_timeout(cfg_.timeout_s);
        if (const char* key = std::getenv(cfg_.api_key_env.c_str()))
            client_.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
    }

    ChatResult complete(const ChatRequest& request) override {
        InFlightGuard guard(*this);
        const std::string body = encode(request);
        int status = 0;
        std::string last_error;
        for (int attempt = 0; attempt < cfg_.max_attempts; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(cfg_.backoff_ms << (attempt - 1)));
            auto res = client_.Post(cfg_.path, body, "application/json");
            if (!res) {
                last_error = httplib::to_string(res.error());
                continue;
            }
            status = res->status;
            if (status >= 200 && status < 300)
                return ChatResult{decode(res->body), attempt};
            if (status != 429 && status < 500)
                throw ProviderError("provider: status " + std::to_string(status) + ": " +
                                        res->body.substr(0, 200),
                                    status);
            last_error = "status " + std::to_string(status);
        }
        if (status != 0)
            throw ProviderError("provider: giving up after " + std::to_string(cfg_.max_attempts) +
                                    " attempts (" + last_error + ")",
                                status);
        throw TransportError("transport: " + cfg_.base_url + " unreachable after " +
                             std::to_string(cfg_.max_attempts) + " attempts (" + last_error + ")");
    }

private:
    std::string encode(const ChatRequest& request) const {
        nlohmann::json body;
        body["model"] = cfg_.model.empty() ? request.model : cfg_.model;
        body["temperature"] = request.temperature;
        auto& msgs = body["messages"];
        for (const auto& m : request.messages)
            msgs.push_back({{"role", m.role}, {"content", m.content}});
        if (!request.session.empty()) body["user"] = request.session;
        return body.dump();
    }

    static std::string decode(const std::string& body) {
        const auto parsed = nlohmann::json::parse(body, nullptr, false);
        if (parsed.is_discarded())
            throw ProviderError("provider: response is not JSON", 200);
        try {
            return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception&) {
            throw ProviderError("provider: unexpected response shape: " + body.substr(0, 200), 200);
        }
    }

    // Cheap semaphore; counting_semaphore has no portable max at runtime.
    class InFlightGuard {
    public:
        explicit InFlightGuard(HttpChatEndpoint& owner) : owner_(owner) {
            std::unique_lock lock(owner_.mutex_);
            owner_.cv_.wait(lock, [&] { return owner_.in_flight_ < owner_.cfg_.max_in_flight; });
            ++owner_.in_flight_;
        }
        ~InFlightGuard() {
            {
                std::lock_guard lock(owner_.mutex_);
                --owner_.in_flight_;
            }
            owner_.cv_.notify_one();
        }

    private:
        HttpChatEndpoint& owner_;
    };

    ClientConfig cfg_;
    httplib::Client client_;
    std::mutex mutex_;
    std::condition_variable cv_;
    int in_flight_ = 0;
};

// In-process deterministic endpoint for tests and offline runs.
class MockEndpoint : public ChatEndpoint {
public:
    using Handler = std::function<std::string(const ChatRequest&)>;

    explicit MockEndpoint(Handler handler) : handler_(std::move(handler)) {}

    static std::unique_ptr<MockEndpoint> fixed(std::string reply) {
        return std::make_unique<MockEndpoint>(
            [reply = std::move(reply)](const ChatRequest&) { return reply; });
    }

    ChatResult complete(const ChatRequest& request) override {
        return ChatResult{handler_(request), 0};
    }

private:
    Handler handler_;
};

} // namespace ngsim
