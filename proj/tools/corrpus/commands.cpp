#include "commands.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "corrpus/babi_harness.hpp"
#include "corrpus/llm_gateway.hpp"
#include "corrpus/prompt_forge.hpp"
#include "corrpus/re3_harness.hpp"

namespace corrpus::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path asset_dir(const Settings& s) {
    if (auto v = s.get("assets")) return *v;
    return default_asset_dir();
}

PromptStyle style_setting(const Settings& s, const std::string& fallback) {
    try {
        return style_from_string(s.get_or("style", fallback));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

// `git describe` of the asset tree, so a manifest pins the prompts it used.
std::string describe_assets(const fs::path& assets) {
    std::string cmd = "git -C '" + assets.string() + "' describe --always --dirty 2>/dev/null";
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    if (!pipe) return "unknown";
    std::array<char, 128> buf{};
    std::string out;
    while (fgets(buf.data(), buf.size(), pipe.get()) != nullptr) out += buf.data();
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return out.empty() ? "unknown" : out;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

// Run output directory; refuses to touch a directory that already holds a
// manifest, since manifests are never rewritten.
class RunDir {
public:
    explicit RunDir(const Settings& s) : dir_(s.require("out")) {
        if (fs::exists(dir_ / "manifest.json")) {
            throw ConfigError(fmt::format("{} already holds a run manifest; choose a fresh --out",
                                          dir_.string()));
        }
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw ConfigError(fmt::format("cannot create {}: {}", dir_.string(), ec.message()));
        started_ = utc_timestamp();
    }

    const fs::path& dir() const { return dir_; }

    void finish(json manifest, json report, const std::string& table) {
        // run id covers everything that determines the report, not when or where it ran
        json identity = manifest;
        if (identity.contains("settings")) identity["settings"].erase("out");
        std::string run_id = sha256_hex(identity.dump()).substr(0, 16);
        manifest["run_id"] = run_id;
        manifest["timestamps"] = {{"started", started_}, {"finished", utc_timestamp()}};
        report["run_id"] = run_id;
        report["manifest"] = "manifest.json";
        write_file(dir_ / "report.json", report.dump(2) + "\n");
        write_file(dir_ / "report.txt", table);
        write_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
    }

private:
    fs::path dir_;
    std::string started_;
};

struct Backend {
    std::shared_ptr<Completer> completer;
    json manifest;
};

Backend make_backend(const Settings& s, const RunDir& run, std::shared_ptr<Completer> oracle) {
    std::string kind = s.get_or("backend", "oracle");
    Backend b;
    b.manifest["kind"] = kind;
    if (kind == "oracle") {
        // with a cassette the oracle's answers are recorded, giving a replayable fixture
        if (auto cassette = s.get("cassette")) {
            b.completer = std::make_shared<RecordingCompleter>(std::move(oracle),
                                                               std::make_shared<Cassette>(*cassette));
            b.manifest["cassette"] = *cassette;
        } else {
            b.completer = std::move(oracle);
            b.manifest["cassette"] = nullptr;
        }
        return b;
    }
    if (kind == "cache") {
        fs::path cassette = s.require("cassette");
        if (!fs::exists(cassette)) throw ConfigError("cassette not found: " + cassette.string());
        b.completer = std::make_shared<CacheCompleter>(std::make_shared<Cassette>(cassette));
        b.manifest["cassette"] = cassette.string();
        return b;
    }
    if (kind == "live") {
        HttpSettings http;
        http.base_url = s.get_or("api_base", http.base_url);
        http.api_key = s.get_or("api_key", "");
        if (http.api_key.empty()) throw ConfigError("live backend needs CORRPUS_API_KEY");
        fs::path cassette = s.get_or("cassette", (run.dir() / "cassette.jsonl").string());
        b.completer = std::make_shared<RecordingCompleter>(std::make_shared<HttpCompleter>(http),
                                                           std::make_shared<Cassette>(cassette));
        b.manifest["cassette"] = cassette.string();
        b.manifest["api_base"] = http.base_url;
        return b;
    }
    throw ConfigError("unknown backend '" + kind + "' (live, cache or oracle)");
}

Exemplar exemplar_for(const fs::path& assets, PresetId preset, PromptStyle style) {
    try {
        return load_exemplar(assets, preset, style);
    } catch (const std::exception& e) {
        throw ConfigError(fmt::format("cannot load exemplar: {}", e.what()));
    }
}

std::size_t parallelism(const Settings& s) {
    auto n = s.integer("parallelism").value_or(4);
    return n == 0 ? 1 : static_cast<std::size_t>(n);
}

std::shared_ptr<EntailmentScorer> make_scorer(const Settings& s, const std::vector<Re3Tuple>& tuples,
                                              json& manifest) {
    std::string spec = s.get_or("scorer", "mock");
    manifest["scorer"] = spec;
    std::shared_ptr<EntailmentScorer> inner;
    if (spec == "mock") {
        inner = std::make_shared<ConstantScorer>(EntailmentScore{0.5, 0.25, 0.25});
    } else if (spec == "mock:injected") {
        inner = injected_contradiction_scorer(tuples);
    } else if (spec.starts_with("table:")) {
        try {
            inner = TableScorer::from_file(spec.substr(6), EntailmentScore{1, 0, 0});
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    } else if (spec.starts_with("http://") || spec.starts_with("https://")) {
        HttpSettings http;
        http.base_url = spec;
        http.api_key = s.get_or("api_key", "");
        inner = std::make_shared<HttpScorer>(http);
    } else if (spec != "cache") {
        throw ConfigError("unknown scorer '" + spec + "' (URL, mock, mock:injected, table:FILE, cache)");
    }
    auto cache = s.get("scorer_cache");
    manifest["scorer_cache"] = cache ? json(*cache) : json(nullptr);
    if (spec == "cache" && !cache) throw ConfigError("--scorer cache needs --scorer-cache FILE");
    if (cache) {
        if (spec == "cache" && !fs::exists(*cache)) throw ConfigError("scorer cache not found: " + *cache);
        return std::make_shared<CachingScorer>(inner, fs::path(*cache));
    }
    return inner;
}

std::vector<BabiSample> load_babi(const fs::path& path) {
    if (!fs::exists(path)) throw DatasetError("dataset not found: " + path.string());
    try {
        auto samples = parse_babi_file(path);
        if (samples.empty()) throw DatasetError("dataset has no questions: " + path.string());
        return samples;
    } catch (const BabiFormatError& e) {
        throw DatasetError(e.what());
    }
}

std::vector<Re3Tuple> load_re3(const fs::path& path) {
    if (!fs::exists(path)) throw DatasetError("dataset not found: " + path.string());
    try {
        auto tuples = load_re3_dataset(path);
        if (tuples.empty()) throw DatasetError("dataset has no tuples: " + path.string());
        return tuples;
    } catch (const DatasetError&) {
        throw;
    } catch (const std::exception& e) {
        throw DatasetError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

json backend_params(const std::string& model, double temperature, double top_p, int samples,
                    int max_tokens) {
    return {{"model", model},
            {"temperature", temperature},
            {"top_p", top_p},
            {"sample_count", samples},
            {"max_output_tokens", max_tokens}};
}

}  // namespace

int babi_run(const Settings& s) {
    const fs::path assets = asset_dir(s);
    BabiConfig config;
    config.style = style_setting(s, "abstract");
    config.model = s.get_or("model", config.model);
    config.temperature = s.number("temperature", config.temperature);
    config.top_p = s.number("top_p", config.top_p);
    config.max_output_tokens = static_cast<int>(s.integer("max_tokens").value_or(config.max_output_tokens));
    config.parallelism = parallelism(s);
    if (auto limit = s.integer("limit")) config.sample_limit = static_cast<std::size_t>(*limit);
    const fs::path data = s.get_or("data", (assets / "data" / "babi" / "qa2_test.txt").string());

    Exemplar exemplar = exemplar_for(assets, PresetId::babi_task2, config.style);
    auto samples = load_babi(data);
    RunDir run(s);
    Backend backend = make_backend(s, run, make_oracle_completer(config.style));

    spdlog::info("bAbI run: {} samples, style {}, backend {}",
                 config.sample_limit ? std::min(*config.sample_limit, samples.size()) : samples.size(),
                 short_name(config.style), backend.completer->id());
    BabiReport report = run_babi(samples, config, *backend.completer, exemplar);

    json manifest = {
        {"task", "babi"},
        {"style", short_name(config.style)},
        {"backend", backend.manifest},
        {"request", backend_params(config.model, config.temperature, config.top_p, 1,
                                   config.max_output_tokens)},
        {"dataset", data.string()},
        {"limit", config.sample_limit ? json(*config.sample_limit) : json(nullptr)},
        {"assets", {{"path", assets.string()}, {"describe", describe_assets(assets)}}},
        {"settings", s.echo()},
    };
    run.finish(manifest, report.to_json(), report.to_text());
    std::cout << report.to_text();
    return kComplete;
}

int re3_run(const Settings& s) {
    const fs::path assets = asset_dir(s);
    Re3Config config;
    config.style = style_setting(s, "specific");
    if (!is_code_style(config.style)) throw ConfigError("Re3 runs need a code style");
    config.model = s.get_or("model", config.model);
    config.temperature = s.number("temperature", config.temperature);
    config.top_p = s.number("top_p", config.top_p);
    config.samples = static_cast<int>(s.integer("samples").value_or(config.samples));
    config.max_output_tokens = static_cast<int>(s.integer("max_tokens").value_or(config.max_output_tokens));
    config.parallelism = parallelism(s);
    if (config.samples < 1) throw ConfigError("samples must be at least 1");
    if (auto limit = s.integer("limit")) config.tuple_limit = static_cast<std::size_t>(*limit);
    const fs::path data = s.get_or("data", (assets / "data" / "re3" / "synthetic.json").string());

    Exemplar exemplar = exemplar_for(assets, PresetId::re3_character, config.style);
    auto tuples = load_re3(data);
    RunDir run(s);
    Backend backend = make_backend(s, run, make_template_completer(config.style));
    json manifest = {
        {"task", "re3"},
        {"style", short_name(config.style)},
        {"backend", backend.manifest},
        {"request", backend_params(config.model, config.temperature, config.top_p, config.samples,
                                   config.max_output_tokens)},
        {"dataset", data.string()},
        {"limit", config.tuple_limit ? json(*config.tuple_limit) : json(nullptr)},
        {"assets", {{"path", assets.string()}, {"describe", describe_assets(assets)}}},
    };
    auto scorer = make_scorer(s, tuples, manifest);
    manifest["settings"] = s.echo();

    spdlog::info("Re3 run: {} tuples, style {}, backend {}, scorer {}", tuples.size(),
                 short_name(config.style), backend.completer->id(), scorer->id());
    Re3Report report = run_re3(tuples, config, *backend.completer, exemplar, *scorer);
    for (const auto& w : report.warnings) spdlog::warn("{}", w);
    run.finish(manifest, report.to_json(), report.to_text());
    std::cout << report.to_text();
    return kComplete;
}

int oracle_solve(const Settings& s, const OracleOptions& options) {
    const fs::path assets = asset_dir(s);
    const PromptStyle style = style_setting(s, "comment");
    const fs::path data = s.get_or("data", (assets / "data" / "babi" / "qa2_test.txt").string());
    auto samples = load_babi(data);
    const auto& lexicon = ActionLexicon::standard();
    std::size_t matched = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& sample = samples[i];
        OracleResult result;
        try {
            result = oracle_solve(sample, lexicon, style);
        } catch (const OracleError& e) {
            throw DatasetError(fmt::format("sample {}: {}", i, e.what()));
        }
        bool ok = answers_match(result.answer, sample.gold_answer);
        matched += ok;
        std::cout << fmt::format("{}\t{}\t{}\t{}\t{}\n", i, sample.question, result.answer,
                                 sample.gold_answer, ok ? "ok" : "MISMATCH");
        if (options.show_program) std::cout << pretty_print(result.program) << '\n';
    }
    std::cout << fmt::format("matched {}/{}\n", matched, samples.size());
    return matched == samples.size() ? kComplete : kFailure;
}

int prompt_dump(const Settings& s, const DumpOptions& o) {
    const fs::path assets = asset_dir(s);
    PresetId preset;
    try {
        preset = preset_from_string(o.preset);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const PromptStyle style = style_setting(s, "comment");

    auto parse_checked = [&](const std::string& source) {
        try {
            return parse_program(source, style);
        } catch (const ParseError& e) {
            throw DatasetError(fmt::format("parse error at {}", e.what()));
        }
    };

    if (o.dump_ast) {
        std::string source;
        if (o.line) {
            source = "    def story(self):\n        " + *o.line + "\n";
        } else if (o.program_file) {
            source = read_text_file(*o.program_file);
        } else {
            source = read_text_file(exemplar_dir(assets, preset, style) / "program.py");
        }
        UpdateProgram program = parse_checked(source);
        std::cout << dump_ast(program);
        return program.faults.empty() ? kComplete : kDatasetError;
    }

    Exemplar exemplar;
    if (o.case_file) {
        exemplar.style = style;
        try {
            exemplar.story = case_from_json(json::parse(read_text_file(*o.case_file)));
        } catch (const std::exception& e) {
            throw DatasetError(fmt::format("{}: {}", *o.case_file, e.what()));
        }
        if (is_code_style(style)) {
            if (!o.program_file) throw ConfigError("--case needs --program for code styles");
            exemplar.program = parse_checked(read_text_file(*o.program_file));
            for (const auto& f : exemplar.program.faults) {
                std::cerr << fmt::format("{}:{}: {}: {}\n", *o.program_file, f.line, to_string(f.kind),
                                         f.message);
            }
            if (!exemplar.program.faults.empty()) return kDatasetError;
        }
    } else {
        exemplar = exemplar_for(assets, preset, style);
    }

    const SchemaPreset& schema = SchemaPreset::get(preset);
    if (o.target_file) {
        StoryCase target;
        try {
            target = case_from_json(json::parse(read_text_file(*o.target_file)));
        } catch (const std::exception& e) {
            throw DatasetError(fmt::format("{}: {}", *o.target_file, e.what()));
        }
        std::cout << render(target, style, schema, exemplar).request();
        return kComplete;
    }
    std::cout << render_worked(exemplar, schema);
    return kComplete;
}

}  // namespace corrpus::cli
