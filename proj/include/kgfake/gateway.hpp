#pragma once
// Chat-completions dispatch.
//
// A CompletionProvider turns one request into one completion or throws one of
// TransportError / RequestError / ProtocolError. complete_batch fans requests
// out over a bounded worker pool and returns results in request order.

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgfake/prompts.hpp"

namespace kgfake {

enum class ProviderKind { kRemote, kMock };

std::string to_string(ProviderKind kind);

struct CompletionRequest {
    PromptText prompt;
    std::string model_name;
    double temperature = 0.0;
    int max_tokens = 16;  // >= 16
    std::string request_id;
};

struct CompletionResult {
    std::string request_id;
    std::string raw_text;
    std::chrono::milliseconds latency{0};
    int attempt_count = 1;
    ProviderKind provider = ProviderKind::kMock;
};

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base_delay{1000};
    double factor = 2.0;
    double jitter = 0.25;  // delay scaled by a factor drawn from [1 - jitter, 1 + jitter]

    // Delay before attempt `attempt + 1`, attempts counted from 1.
    std::chrono::milliseconds delay_after(int attempt, std::uint64_t jitter_seed) const;
};

bool is_retryable_status(int status) noexcept;

struct EndpointConfig {
    ProviderKind kind = ProviderKind::kRemote;
    // scheme://host[:port][/prefix]
    std::string base_url = "http://127.0.0.1:8080";
    std::string path = "/v1/chat/completions";
    std::string api_token;
    // When false the system and user parts travel as one user message.
    bool system_role = true;
    std::chrono::seconds connect_timeout{10};
    std::chrono::seconds read_timeout{120};
    RetryPolicy retry;
    std::string mock_path;  // used when kind == kMock
};

class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual CompletionResult complete(const CompletionRequest& request) = 0;
};

// Canned responses keyed by prompt fingerprint.
//
// File layout:
//   {"default": "...", "responses": {"<fp>": "..."}, "failures": {"<fp>": "reason"},
//    "models": {"<model>": {same three keys}}}
// Lookup order: a failure listed in the request model's section or at the top
// level, then an exact response (model section first), then the model's
// default, then the top-level default. The text "{{fingerprint}}" inside a
// response is replaced by the prompt fingerprint.
class MockProvider final : public CompletionProvider {
public:
    struct Table {
        std::optional<std::string> fallback;
        std::map<std::string, std::string> responses;
        std::map<std::string, std::string> failures;
    };

    MockProvider() = default;
    static MockProvider from_json(const nlohmann::json& doc);
    static MockProvider from_file(const std::string& path);

    Table& table() { return shared_; }
    Table& table_for_model(const std::string& model) { return per_model_[model]; }

    CompletionResult complete(const CompletionRequest& request) override;

private:
    std::optional<std::string> lookup(const Table* model, const CompletionRequest& request) const;

    Table shared_;
    std::map<std::string, Table> per_model_;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

// One POST; nullopt on connection-level failure.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual std::optional<HttpResponse> post(const std::string& path, const std::string& body,
                                             const std::map<std::string, std::string>& headers) = 0;
};

std::unique_ptr<HttpTransport> make_http_transport(const EndpointConfig& endpoint);

// Speaks the chat-completions wire shape: body {model, messages, temperature,
// max_tokens}; text taken from choices[0].message.content (or choices[0].text).
class RemoteProvider final : public CompletionProvider {
public:
    explicit RemoteProvider(EndpointConfig endpoint);
    RemoteProvider(EndpointConfig endpoint, std::unique_ptr<HttpTransport> transport);

    CompletionResult complete(const CompletionRequest& request) override;

    static nlohmann::json request_body(const CompletionRequest& request, bool system_role);
    // Throws ProtocolError when no text field is present.
    static std::string extract_text(const std::string& body);

private:
    EndpointConfig endpoint_;
    std::unique_ptr<HttpTransport> transport_;  // null: a fresh transport per call
};

std::unique_ptr<CompletionProvider> make_provider(const EndpointConfig& endpoint);

struct BatchEntry {
    std::optional<CompletionResult> result;
    std::string error_category;
    std::string error;

    bool ok() const noexcept { return result.has_value(); }
};

// At most `parallelism` requests in flight; entry i answers request i.
// Per-request failures become error entries. Throws PreconditionError on
// parallelism 0 or duplicate request ids.
std::vector<BatchEntry> complete_batch(CompletionProvider& provider, std::span<const CompletionRequest> requests,
                                       std::size_t parallelism);

}  // namespace kgfake
