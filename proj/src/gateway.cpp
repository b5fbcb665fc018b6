#include "kgfake/gateway.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <thread>

#include <httplib.h>

#include "kgfake/error.hpp"
#include "kgfake/hash.hpp"

namespace kgfake {

std::string to_string(ProviderKind kind) { return kind == ProviderKind::kRemote ? "remote" : "mock"; }

std::chrono::milliseconds RetryPolicy::delay_after(int attempt, std::uint64_t jitter_seed) const {
    double base = static_cast<double>(base_delay.count()) * std::pow(factor, attempt - 1);
    std::mt19937_64 rng(jitter_seed + static_cast<std::uint64_t>(attempt));
    double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double scale = 1.0 + jitter * (2.0 * unit - 1.0);
    return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(base * scale)));
}

bool is_retryable_status(int status) noexcept {
    return status == 0 || status == 408 || status == 429 || (status >= 500 && status < 600);
}

namespace {

void validate(const CompletionRequest& request) {
    if (request.max_tokens < 16) throw PreconditionError("max_tokens must be at least 16");
    if (request.temperature < 0.0) throw PreconditionError("temperature must be non-negative");
}

MockProvider::Table parse_table(const nlohmann::json& doc) {
    MockProvider::Table t;
    if (doc.contains("default")) t.fallback = doc.at("default").get<std::string>();
    if (doc.contains("responses")) t.responses = doc.at("responses").get<std::map<std::string, std::string>>();
    if (doc.contains("failures")) t.failures = doc.at("failures").get<std::map<std::string, std::string>>();
    return t;
}

void replace_all(std::string& text, std::string_view from, std::string_view to) {
    for (std::size_t pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
        text.replace(pos, from.size(), to);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Mock

MockProvider MockProvider::from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ProtocolError("mock table must be a JSON object");
    MockProvider m;
    try {
        m.shared_ = parse_table(doc);
        if (doc.contains("models")) {
            for (const auto& [model, section] : doc.at("models").items()) m.per_model_[model] = parse_table(section);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("malformed mock table: ") + e.what());
    }
    return m;
}

MockProvider MockProvider::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PathError(path);
    auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ProtocolError("mock table is not valid JSON: " + path);
    return from_json(doc);
}

std::optional<std::string> MockProvider::lookup(const Table* model, const CompletionRequest& request) const {
    const auto& fp = request.prompt.fingerprint;
    for (const Table* t : {model, &shared_}) {
        if (!t) continue;
        if (auto f = t->failures.find(fp); f != t->failures.end()) {
            throw TransportError(503, "mock failure for " + request.request_id + ": " + f->second);
        }
    }
    for (const Table* t : {model, &shared_}) {
        if (!t) continue;
        if (auto r = t->responses.find(fp); r != t->responses.end()) return r->second;
    }
    if (model && model->fallback) return model->fallback;
    return shared_.fallback;
}

CompletionResult MockProvider::complete(const CompletionRequest& request) {
    validate(request);
    auto start = std::chrono::steady_clock::now();
    auto m = per_model_.find(request.model_name);
    auto text = lookup(m == per_model_.end() ? nullptr : &m->second, request);
    if (!text) throw RequestError(404, "no canned response for fingerprint " + request.prompt.fingerprint);
    replace_all(*text, "{{fingerprint}}", request.prompt.fingerprint);

    CompletionResult out;
    out.request_id = request.request_id;
    out.raw_text = std::move(*text);
    out.attempt_count = 1;
    out.provider = ProviderKind::kMock;
    out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return out;
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix without trailing '/'
};

SplitUrl split_url(const std::string& url) {
    static const std::regex re(R"(^((?:https?://)?[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw PreconditionError("invalid endpoint URL: " + url);
    SplitUrl out{m[1].str(), m[2].matched ? m[2].str() : ""};
    while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    return out;
}

class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(const EndpointConfig& endpoint) : url_(split_url(endpoint.base_url)), client_(url_.origin) {
        client_.set_connection_timeout(endpoint.connect_timeout);
        client_.set_read_timeout(endpoint.read_timeout);
        client_.set_write_timeout(endpoint.read_timeout);
    }

    std::optional<HttpResponse> post(const std::string& path, const std::string& body,
                                     const std::map<std::string, std::string>& headers) override {
        httplib::Headers h(headers.begin(), headers.end());
        std::string full = url_.prefix + (path.empty() || path.front() == '/' ? path : "/" + path);
        auto res = client_.Post(full, h, body, "application/json");
        if (!res) return std::nullopt;
        return HttpResponse{res->status, res->body};
    }

private:
    SplitUrl url_;
    httplib::Client client_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(const EndpointConfig& endpoint) {
    return std::make_unique<HttplibTransport>(endpoint);
}

RemoteProvider::RemoteProvider(EndpointConfig endpoint) : endpoint_(std::move(endpoint)) {
    split_url(endpoint_.base_url);
}

RemoteProvider::RemoteProvider(EndpointConfig endpoint, std::unique_ptr<HttpTransport> transport)
    : endpoint_(std::move(endpoint)), transport_(std::move(transport)) {}

nlohmann::json RemoteProvider::request_body(const CompletionRequest& request, bool system_role) {
    nlohmann::json messages = nlohmann::json::array();
    if (system_role) {
        messages.push_back({{"role", "system"}, {"content", request.prompt.system_part}});
        messages.push_back({{"role", "user"}, {"content", request.prompt.user_part}});
    } else {
        messages.push_back({{"role", "user"}, {"content", request.prompt.single_message()}});
    }
    return {
        {"model", request.model_name},
        {"messages", std::move(messages)},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
}

std::string RemoteProvider::extract_text(const std::string& body) {
    auto doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded()) throw ProtocolError("response body is not JSON");
    if (doc.is_object() && doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
        const auto& first = doc["choices"][0];
        if (first.contains("message") && first["message"].is_object() && first["message"].contains("content") &&
            first["message"]["content"].is_string()) {
            return first["message"]["content"].get<std::string>();
        }
        if (first.contains("text") && first["text"].is_string()) return first["text"].get<std::string>();
    }
    throw ProtocolError("response carries no choices[0].message.content");
}

CompletionResult RemoteProvider::complete(const CompletionRequest& request) {
    validate(request);
    const std::string body = request_body(request, endpoint_.system_role).dump();
    std::map<std::string, std::string> headers;
    if (!endpoint_.api_token.empty()) headers["Authorization"] = "Bearer " + endpoint_.api_token;

    std::unique_ptr<HttpTransport> local;
    HttpTransport* transport = transport_.get();
    if (!transport) {
        local = make_http_transport(endpoint_);
        transport = local.get();
    }

    const auto seed = Fnv1a{}.update(request.request_id).value();
    const int max_attempts = std::max(1, endpoint_.retry.max_attempts);
    auto start = std::chrono::steady_clock::now();
    int last_status = 0;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        auto res = transport->post(endpoint_.path, body, headers);
        last_status = res ? res->status : 0;
        if (res && res->status >= 200 && res->status < 300) {
            CompletionResult out;
            out.request_id = request.request_id;
            out.raw_text = extract_text(res->body);
            out.attempt_count = attempt;
            out.provider = ProviderKind::kRemote;
            out.latency =
                std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
            return out;
        }
        if (!is_retryable_status(last_status)) {
            throw RequestError(last_status, "HTTP " + std::to_string(last_status) + " for " + request.request_id);
        }
        if (attempt < max_attempts) std::this_thread::sleep_for(endpoint_.retry.delay_after(attempt, seed));
    }
    throw TransportError(last_status, "retries exhausted for " + request.request_id + " (last status " +
                                          std::to_string(last_status) + ")");
}

std::unique_ptr<CompletionProvider> make_provider(const EndpointConfig& endpoint) {
    if (endpoint.kind == ProviderKind::kMock) {
        return std::make_unique<MockProvider>(MockProvider::from_file(endpoint.mock_path));
    }
    return std::make_unique<RemoteProvider>(endpoint);
}

// ---------------------------------------------------------------------------
// Batch

std::vector<BatchEntry> complete_batch(CompletionProvider& provider, std::span<const CompletionRequest> requests,
                                       std::size_t parallelism) {
    if (parallelism == 0) throw PreconditionError("parallelism must be at least 1");
    std::set<std::string_view> ids;
    for (const auto& r : requests) {
        if (!ids.insert(r.request_id).second) throw PreconditionError("duplicate request id " + r.request_id);
    }

    std::vector<BatchEntry> out(requests.size());
    auto run = [&](std::size_t i) {
        try {
            out[i].result = provider.complete(requests[i]);
        } catch (const Error& e) {
            out[i].error_category = e.category();
            out[i].error = e.what();
        } catch (const std::exception& e) {
            out[i].error_category = "internal";
            out[i].error = e.what();
        }
    };

    std::size_t workers = std::min(parallelism, requests.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < requests.size(); ++i) run(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < requests.size(); i = next++) run(i);
            });
        }
    }
    return out;
}

}  // namespace kgfake
