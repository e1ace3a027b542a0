#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "corrpus/llm_gateway.hpp"

#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

namespace corrpus {

namespace {

using json = nlohmann::json;

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // always starts with '/'
};

Endpoint split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw GatewayError(GatewayErrorKind::bad_request, "URL without scheme: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string join_path(std::string base, std::string_view tail) {
    while (!base.empty() && base.back() == '/') base.pop_back();
    return base + std::string(tail);
}

bool retryable(int status) { return status == 429 || status >= 500; }

// POSTs JSON with retry/backoff on transport errors, 429 and 5xx.
json post_json(const HttpSettings& settings, const std::string& url, const json& body) {
    Endpoint ep = split_url(url);
    httplib::Client client(ep.origin);
    client.set_connection_timeout(settings.timeout);
    client.set_read_timeout(settings.timeout);
    client.set_write_timeout(settings.timeout);
    httplib::Headers headers;
    if (!settings.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + settings.api_key);
    }
    const std::string payload = body.dump();
    spdlog::debug("POST {} {}", redact(url, settings.api_key), redact(payload, settings.api_key));

    auto backoff = settings.initial_backoff;
    std::string last_error;
    for (int attempt = 0; attempt <= settings.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        auto res = client.Post(ep.path, headers, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            spdlog::debug("attempt {} failed: {}", attempt + 1, last_error);
            continue;
        }
        spdlog::debug("status {} body {}", res->status, redact(res->body, settings.api_key));
        if (res->status == 401 || res->status == 403) {
            throw GatewayError(GatewayErrorKind::auth,
                               "authentication rejected (HTTP " + std::to_string(res->status) + ")");
        }
        if (retryable(res->status)) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            throw GatewayError(GatewayErrorKind::bad_request,
                               "HTTP " + std::to_string(res->status) + ": " + res->body);
        }
        try {
            return json::parse(res->body);
        } catch (const json::parse_error& e) {
            throw GatewayError(GatewayErrorKind::malformed, std::string("invalid JSON: ") + e.what());
        }
    }
    throw GatewayError(GatewayErrorKind::transport,
                       "giving up after " + std::to_string(settings.max_retries + 1) +
                           " attempts: " + last_error);
}

std::string pair_key(const std::string& premise, const std::string& hypothesis) {
    return sha256_hex(json::array({premise, hypothesis}).dump());
}

}  // namespace

std::string_view to_string(GatewayErrorKind kind) {
    switch (kind) {
        case GatewayErrorKind::transport: return "transport";
        case GatewayErrorKind::cache_miss: return "cache_miss";
        case GatewayErrorKind::auth: return "auth";
        case GatewayErrorKind::malformed: return "malformed";
        case GatewayErrorKind::bad_request: return "bad_request";
    }
    return "unknown";
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 failed");
    }
    std::ostringstream out;
    out << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
    return out.str();
}

std::string canonical_request_json(const CompletionRequest& r) {
    json j = {
        {"model", r.model},
        {"prompt", r.prompt},
        {"temperature", r.temperature},
        {"top_p", r.top_p},
        {"sample_count", r.sample_count},
        {"max_output_tokens", r.max_output_tokens},
        {"stop", r.stop},
    };
    return j.dump();
}

std::string fingerprint(const CompletionRequest& request, int sample_index) {
    return sha256_hex(canonical_request_json(request) + "#" + std::to_string(sample_index));
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

std::string redact(std::string text, std::string_view secret) {
    if (secret.empty()) return text;
    for (auto pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos + 3)) {
        text.replace(pos, secret.size(), "***");
    }
    return text;
}

// --- Cassette ------------------------------------------------------------

Cassette::Cassette(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(*path_);
    if (!in) return;  // created on first append
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            records_.try_emplace(j.at("fingerprint").get<std::string>(),
                                 j.at("completion").get<std::string>());
        } catch (const json::exception& e) {
            throw GatewayError(GatewayErrorKind::malformed,
                               path_->string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::optional<std::string> Cassette::find(const std::string& fp) const {
    std::lock_guard lock(mutex_);
    auto it = records_.find(fp);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

bool Cassette::append(const CompletionRecord& record) {
    std::lock_guard lock(mutex_);
    if (!records_.try_emplace(record.fingerprint, record.completion).second) return false;
    if (path_) {
        json j = {{"fingerprint", record.fingerprint},
                  {"sample_index", record.sample_index},
                  {"completion", record.completion},
                  {"backend", record.backend_id},
                  {"timestamp", record.timestamp}};
        std::ofstream out(*path_, std::ios::app | std::ios::binary);
        out << j.dump() << '\n';
        out.flush();
        if (!out) throw std::runtime_error("cannot write " + path_->string());
    }
    return true;
}

std::size_t Cassette::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

// --- Completers ------------------------------------------------------------

std::vector<std::string> CacheCompleter::complete(const CompletionRequest& request) {
    std::vector<std::string> out;
    for (int i = 0; i < request.sample_count; ++i) {
        auto fp = fingerprint(request, i);
        auto hit = cassette_->find(fp);
        if (!hit) {
            throw GatewayError(GatewayErrorKind::cache_miss,
                               "no cassette record for sample " + std::to_string(i) + " (" +
                                   fp.substr(0, 12) + ")");
        }
        out.push_back(std::move(*hit));
    }
    return out;
}

std::vector<std::string> ScriptedCompleter::complete(const CompletionRequest& request) {
    std::vector<std::string> out;
    for (int i = 0; i < request.sample_count; ++i) out.push_back(script_(request, i));
    return out;
}

std::vector<std::string> RecordingCompleter::complete(const CompletionRequest& request) {
    std::vector<std::string> cached;
    for (int i = 0; i < request.sample_count; ++i) {
        auto hit = cassette_->find(fingerprint(request, i));
        if (!hit) break;
        cached.push_back(std::move(*hit));
    }
    if (static_cast<int>(cached.size()) == request.sample_count) return cached;

    auto fresh = inner_->complete(request);
    if (static_cast<int>(fresh.size()) != request.sample_count) {
        throw GatewayError(GatewayErrorKind::malformed,
                           "backend returned " + std::to_string(fresh.size()) + " samples, wanted " +
                               std::to_string(request.sample_count));
    }
    const std::string stamp = utc_timestamp();
    for (int i = 0; i < request.sample_count; ++i) {
        cassette_->append(
            CompletionRecord{fingerprint(request, i), i, fresh[i], inner_->id(), stamp});
    }
    return fresh;
}

HttpCompleter::HttpCompleter(HttpSettings settings) : settings_(std::move(settings)) {}

std::vector<std::string> HttpCompleter::complete(const CompletionRequest& request) {
    if (settings_.api_key.empty()) {
        throw GatewayError(GatewayErrorKind::auth, "no API key configured (CORRPUS_API_KEY)");
    }
    json body = {
        {"model", request.model},
        {"prompt", request.prompt},
        {"temperature", request.temperature},
        {"top_p", request.top_p},
        {"n", request.sample_count},
        {"max_tokens", request.max_output_tokens},
        {"stop", request.stop},
    };
    json reply = post_json(settings_, join_path(settings_.base_url, "/completions"), body);
    try {
        const auto& choices = reply.at("choices");
        std::vector<std::string> out(request.sample_count);
        std::vector<bool> seen(request.sample_count, false);
        int fallback_index = 0;
        for (const auto& c : choices) {
            int index = c.value("index", fallback_index);
            ++fallback_index;
            if (index < 0 || index >= request.sample_count) continue;
            out[index] = c.at("text").get<std::string>();
            seen[index] = true;
        }
        for (int i = 0; i < request.sample_count; ++i) {
            if (!seen[i]) {
                throw GatewayError(GatewayErrorKind::malformed,
                                   "response lacks choice " + std::to_string(i));
            }
        }
        return out;
    } catch (const json::exception& e) {
        throw GatewayError(GatewayErrorKind::malformed, std::string("completion response: ") + e.what());
    }
}

// --- Scorers ---------------------------------------------------------------

EntailmentScore EntailmentScore::normalized(double e, double n, double c) {
    for (double v : {e, n, c}) {
        if (!std::isfinite(v) || v < 0) {
            throw GatewayError(GatewayErrorKind::malformed, "entailment probability out of range");
        }
    }
    double sum = e + n + c;
    if (sum <= 0) throw GatewayError(GatewayErrorKind::malformed, "entailment probabilities sum to 0");
    return EntailmentScore{e / sum, n / sum, c / sum};
}

HttpScorer::HttpScorer(HttpSettings settings) : settings_(std::move(settings)) {}

EntailmentScore HttpScorer::score(const std::string& premise, const std::string& hypothesis) {
    json reply = post_json(settings_, settings_.base_url, {{"premise", premise}, {"hypothesis", hypothesis}});
    try {
        return EntailmentScore::normalized(reply.at("entailment").get<double>(),
                                           reply.at("neutral").get<double>(),
                                           reply.at("contradiction").get<double>());
    } catch (const json::exception& e) {
        throw GatewayError(GatewayErrorKind::malformed, std::string("scorer response: ") + e.what());
    }
}

std::shared_ptr<TableScorer> TableScorer::from_file(const std::filesystem::path& path,
                                                    EntailmentScore fallback) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scorer table " + path.string());
    std::map<Key, EntailmentScore> table;
    try {
        json j = json::parse(in);
        for (const auto& row : j) {
            table[{row.at("premise").get<std::string>(), row.at("hypothesis").get<std::string>()}] =
                EntailmentScore::normalized(row.at("entailment").get<double>(),
                                            row.at("neutral").get<double>(),
                                            row.at("contradiction").get<double>());
        }
    } catch (const json::exception& e) {
        throw GatewayError(GatewayErrorKind::malformed, path.string() + ": " + e.what());
    }
    return std::make_shared<TableScorer>(std::move(table), fallback);
}

EntailmentScore TableScorer::score(const std::string& premise, const std::string& hypothesis) {
    auto it = table_.find(Key{premise, hypothesis});
    return it == table_.end() ? fallback_ : it->second;
}

CachingScorer::CachingScorer(std::shared_ptr<EntailmentScorer> inner,
                             std::optional<std::filesystem::path> path)
    : inner_(std::move(inner)), path_(std::move(path)) {
    if (!path_) return;
    std::ifstream in(*path_);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        cache_.try_emplace(j.at("key").get<std::string>(),
                           EntailmentScore{j.at("entailment").get<double>(),
                                           j.at("neutral").get<double>(),
                                           j.at("contradiction").get<double>()});
    }
}

EntailmentScore CachingScorer::score(const std::string& premise, const std::string& hypothesis) {
    const std::string key = pair_key(premise, hypothesis);
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    if (!inner_) {
        throw GatewayError(GatewayErrorKind::cache_miss, "no cached score for: " + hypothesis);
    }
    EntailmentScore s = inner_->score(premise, hypothesis);
    std::lock_guard lock(mutex_);
    if (cache_.try_emplace(key, s).second && path_) {
        std::ofstream out(*path_, std::ios::app);
        out << json{{"key", key},
                    {"premise", premise},
                    {"hypothesis", hypothesis},
                    {"entailment", s.entailment},
                    {"neutral", s.neutral},
                    {"contradiction", s.contradiction}}
                   .dump()
            << '\n';
    }
    return s;
}

std::size_t CachingScorer::size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

}  // namespace corrpus
