#include "settings.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace corrpus::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool is_secret(const std::string& key) { return key == "api_key"; }

}  // namespace

const std::map<std::string, std::string>& known_settings() {
    static const std::map<std::string, std::string> keys = {
        {"style", "--style"},
        {"backend", "--backend"},
        {"data", "--data"},
        {"limit", "--limit"},
        {"out", "--out"},
        {"cassette", "--cassette"},
        {"scorer", "--scorer"},
        {"scorer_cache", "--scorer-cache"},
        {"model", "--model"},
        {"temperature", "--temperature"},
        {"top_p", "--top-p"},
        {"samples", "--samples"},
        {"max_tokens", "--max-tokens"},
        {"parallelism", "--parallelism"},
        {"api_base", "--api-base"},
        {"api_key", "(env only)"},
        {"assets", "--assets"},
    };
    return keys;
}

Layer parse_config_text(const std::string& text, const std::string& source) {
    Layer out;
    std::istringstream in(text);
    int lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        if (!known_settings().contains(key)) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": unknown setting '" + key + "'");
        }
        if (is_secret(key)) {
            throw ConfigError(source + ":" + std::to_string(lineno) +
                              ": api_key belongs in CORRPUS_API_KEY, not a config file");
        }
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

Layer load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

Layer environment_layer() {
    static const std::pair<const char*, const char*> vars[] = {
        {"CORRPUS_API_KEY", "api_key"},       {"CORRPUS_API_BASE", "api_base"},
        {"CORRPUS_MODEL", "model"},           {"CORRPUS_CASSETTE", "cassette"},
        {"CORRPUS_SCORER_URL", "scorer"},     {"CORRPUS_ASSET_DIR", "assets"},
        {"CORRPUS_PARALLELISM", "parallelism"},
    };
    Layer out;
    for (const auto& [var, key] : vars) {
        if (const char* v = std::getenv(var); v != nullptr && *v != '\0') out[key] = v;
    }
    return out;
}

Settings::Settings(Layer flags, Layer env, Layer file)
    : flags_(std::move(flags)), env_(std::move(env)), file_(std::move(file)) {}

std::optional<std::string> Settings::get(const std::string& key) const {
    for (const Layer* layer : {&flags_, &env_, &file_}) {
        if (auto it = layer->find(key); it != layer->end()) return it->second;
    }
    return std::nullopt;
}

std::string Settings::get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

std::string Settings::require(const std::string& key) const {
    if (auto v = get(key)) return *v;
    auto flag = known_settings().find(key);
    throw ConfigError("missing required setting " +
                      (flag == known_settings().end() ? key : flag->second));
}

double Settings::number(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        double d = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument(*v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("setting '" + key + "' is not a number: " + *v);
    }
}

std::optional<long long> Settings::integer(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    try {
        std::size_t used = 0;
        long long n = std::stoll(*v, &used);
        if (used != v->size() || n < 0) throw std::invalid_argument(*v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("setting '" + key + "' is not a non-negative integer: " + *v);
    }
}

std::string Settings::source_of(const std::string& key) const {
    if (flags_.contains(key)) return "flag";
    if (env_.contains(key)) return "env";
    if (file_.contains(key)) return "config";
    return "default";
}

nlohmann::json Settings::echo() const {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, _] : known_settings()) {
        auto v = get(key);
        if (!v || is_secret(key)) continue;
        out[key] = {{"value", *v}, {"source", source_of(key)}};
    }
    return out;
}

}  // namespace corrpus::cli
