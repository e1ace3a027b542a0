#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace corrpus {

struct CompletionRequest {
    std::string model = "code-davinci-002";
    std::string prompt;
    double temperature = 0.0;
    double top_p = 0.95;
    int sample_count = 1;
    int max_output_tokens = 1024;
    std::vector<std::string> stop = {"\n\nclass "};
};

// Compact JSON of every request field, keys sorted.
std::string canonical_request_json(const CompletionRequest& request);

// Hex SHA-256 over the canonical request plus the sample index.
std::string fingerprint(const CompletionRequest& request, int sample_index);

std::string sha256_hex(std::string_view data);

struct CompletionRecord {
    std::string fingerprint;
    int sample_index = 0;
    std::string completion;
    std::string backend_id;
    std::string timestamp;
};

enum class GatewayErrorKind { transport, cache_miss, auth, malformed, bad_request };

std::string_view to_string(GatewayErrorKind kind);

class GatewayError : public std::runtime_error {
public:
    GatewayError(GatewayErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    GatewayErrorKind kind() const noexcept { return kind_; }

private:
    GatewayErrorKind kind_;
};

// Append-only JSONL store of completion records. Lookups and appends are
// thread-safe; each append is written and flushed as one line.
class Cassette {
public:
    Cassette() = default;  // in-memory only
    explicit Cassette(std::filesystem::path path);

    std::optional<std::string> find(const std::string& fingerprint) const;
    // Returns false (and writes nothing) when the fingerprint is already present.
    bool append(const CompletionRecord& record);
    std::size_t size() const;
    const std::optional<std::filesystem::path>& path() const { return path_; }

private:
    std::optional<std::filesystem::path> path_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> records_;
};

std::string utc_timestamp();

class Completer {
public:
    virtual ~Completer() = default;
    // Returns exactly request.sample_count texts.
    virtual std::vector<std::string> complete(const CompletionRequest& request) = 0;
    virtual std::string id() const = 0;
};

// Replay only: every sample must already be in the cassette.
class CacheCompleter : public Completer {
public:
    explicit CacheCompleter(std::shared_ptr<Cassette> cassette) : cassette_(std::move(cassette)) {}
    std::vector<std::string> complete(const CompletionRequest& request) override;
    std::string id() const override { return "cache"; }

private:
    std::shared_ptr<Cassette> cassette_;
};

// Deterministic completer for tests and mock backends.
class ScriptedCompleter : public Completer {
public:
    using Script = std::function<std::string(const CompletionRequest&, int sample_index)>;
    ScriptedCompleter(std::string id, Script script) : id_(std::move(id)), script_(std::move(script)) {}
    std::vector<std::string> complete(const CompletionRequest& request) override;
    std::string id() const override { return id_; }

private:
    std::string id_;
    Script script_;
};

// Wraps another completer, answering from the cassette when possible and
// recording whatever the inner completer returns.
class RecordingCompleter : public Completer {
public:
    RecordingCompleter(std::shared_ptr<Completer> inner, std::shared_ptr<Cassette> cassette)
        : inner_(std::move(inner)), cassette_(std::move(cassette)) {}
    std::vector<std::string> complete(const CompletionRequest& request) override;
    std::string id() const override { return inner_->id(); }

private:
    std::shared_ptr<Completer> inner_;
    std::shared_ptr<Cassette> cassette_;
};

struct HttpSettings {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;
    int max_retries = 4;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::seconds timeout{120};
};

// OpenAI-compatible POST <base>/completions.
class HttpCompleter : public Completer {
public:
    explicit HttpCompleter(HttpSettings settings);
    std::vector<std::string> complete(const CompletionRequest& request) override;
    std::string id() const override { return "live:" + settings_.base_url; }

private:
    HttpSettings settings_;
};

struct EntailmentScore {
    double entailment = 0;
    double neutral = 0;
    double contradiction = 0;

    // Divides by the sum; throws GatewayError(malformed) on negative or all-zero input.
    static EntailmentScore normalized(double entailment, double neutral, double contradiction);
    bool operator==(const EntailmentScore&) const = default;
};

class EntailmentScorer {
public:
    virtual ~EntailmentScorer() = default;
    virtual EntailmentScore score(const std::string& premise, const std::string& hypothesis) = 0;
    virtual std::string id() const = 0;
};

// POST {premise, hypothesis} -> {entailment, neutral, contradiction}.
class HttpScorer : public EntailmentScorer {
public:
    explicit HttpScorer(HttpSettings settings);
    EntailmentScore score(const std::string& premise, const std::string& hypothesis) override;
    std::string id() const override { return "http:" + settings_.base_url; }

private:
    HttpSettings settings_;
};

class ConstantScorer : public EntailmentScorer {
public:
    explicit ConstantScorer(EntailmentScore value) : value_(value) {}
    EntailmentScore score(const std::string&, const std::string&) override { return value_; }
    std::string id() const override { return "constant"; }

private:
    EntailmentScore value_;
};

// Lookup table keyed by (premise, hypothesis); unknown pairs get `fallback`.
class TableScorer : public EntailmentScorer {
public:
    using Key = std::pair<std::string, std::string>;
    TableScorer(std::map<Key, EntailmentScore> table, EntailmentScore fallback)
        : table_(std::move(table)), fallback_(fallback) {}
    // JSON array of {premise, hypothesis, entailment, neutral, contradiction}.
    static std::shared_ptr<TableScorer> from_file(const std::filesystem::path& path,
                                                  EntailmentScore fallback);
    EntailmentScore score(const std::string& premise, const std::string& hypothesis) override;
    std::string id() const override { return "table"; }

private:
    std::map<Key, EntailmentScore> table_;
    EntailmentScore fallback_;
};

class FunctionScorer : public EntailmentScorer {
public:
    using Fn = std::function<EntailmentScore(const std::string&, const std::string&)>;
    FunctionScorer(std::string id, Fn fn) : id_(std::move(id)), fn_(std::move(fn)) {}
    EntailmentScore score(const std::string& p, const std::string& h) override { return fn_(p, h); }
    std::string id() const override { return id_; }

private:
    std::string id_;
    Fn fn_;
};

// Memoizes by sentence-pair hash, optionally persisted as JSONL. With no
// inner scorer it answers only from the cache.
class CachingScorer : public EntailmentScorer {
public:
    CachingScorer(std::shared_ptr<EntailmentScorer> inner,
                  std::optional<std::filesystem::path> path = std::nullopt);
    EntailmentScore score(const std::string& premise, const std::string& hypothesis) override;
    std::string id() const override { return inner_ ? inner_->id() : "scorer-cache"; }
    std::size_t size() const;

private:
    std::shared_ptr<EntailmentScorer> inner_;
    std::optional<std::filesystem::path> path_;
    mutable std::mutex mutex_;
    std::map<std::string, EntailmentScore> cache_;
};

// Replaces every occurrence of `secret` with "***".
std::string redact(std::string text, std::string_view secret);

}  // namespace corrpus
