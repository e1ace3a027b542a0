#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace corrpus::cli {

enum ExitCode : int { kComplete = 0, kFailure = 1, kConfigError = 2, kDatasetError = 3 };

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raw string values from one source, keyed by setting name.
using Layer = std::map<std::string, std::string>;

// `key = value` lines; '#' starts a comment; blank lines ignored.
Layer parse_config_text(const std::string& text, const std::string& source);
Layer load_config_file(const std::filesystem::path& path);
// CORRPUS_* environment variables mapped onto setting names.
Layer environment_layer();

// Names accepted in config files and the flag each one mirrors.
const std::map<std::string, std::string>& known_settings();

// Flags override env, env overrides the config file.
class Settings {
public:
    Settings(Layer flags, Layer env, Layer file);

    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    std::optional<long long> integer(const std::string& key) const;
    std::string source_of(const std::string& key) const;

    // Every resolved value and where it came from; secrets are left out.
    nlohmann::json echo() const;

private:
    Layer flags_, env_, file_;
};

}  // namespace corrpus::cli
