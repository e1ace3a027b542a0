#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "corrpus/llm_gateway.hpp"

using namespace corrpus::cli;

namespace {

// Flag values, recorded only when actually given so env and config can fill the rest.
struct FlagSet {
    std::map<std::string, std::string> values;
    std::string config_file;

    void add(CLI::App* cmd, const std::string& key, const std::string& help) {
        auto flag = known_settings().at(key);
        cmd->add_option_function<std::string>(
            flag, [this, key](const std::string& v) { values[key] = v; }, help);
    }
};

void add_run_flags(CLI::App* cmd, FlagSet& flags) {
    flags.add(cmd, "style", "comment | specific | abstract | natural");
    flags.add(cmd, "backend", "live | cache | oracle");
    flags.add(cmd, "data", "dataset file");
    flags.add(cmd, "limit", "evaluate only the first N items");
    flags.add(cmd, "out", "run output directory (must not hold a manifest)");
    flags.add(cmd, "cassette", "completion cassette (JSONL)");
    flags.add(cmd, "model", "completion model name");
    flags.add(cmd, "temperature", "sampling temperature");
    flags.add(cmd, "top_p", "nucleus sampling mass");
    flags.add(cmd, "max_tokens", "completion length cap");
    flags.add(cmd, "parallelism", "concurrent requests");
    flags.add(cmd, "api_base", "OpenAI-compatible base URL");
    flags.add(cmd, "assets", "asset directory");
    cmd->add_option("--config", flags.config_file, "key = value config file");
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("corrpus"));
    spdlog::set_pattern("[%l] %v");

    CLI::App app{"Story world-state tracking with code-completion models"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "debug logging");

    FlagSet flags;
    OracleOptions oracle_opts;
    DumpOptions dump_opts;

    auto* babi = app.add_subcommand("babi", "bAbI task 2 question answering")->require_subcommand(1);
    auto* babi_run_cmd = babi->add_subcommand("run", "evaluate a style against the dataset");
    add_run_flags(babi_run_cmd, flags);

    auto* re3 = app.add_subcommand("re3", "Re3 contradiction detection")->require_subcommand(1);
    auto* re3_run_cmd = re3->add_subcommand("run", "score premise/story pairs");
    add_run_flags(re3_run_cmd, flags);
    flags.add(re3_run_cmd, "scorer", "URL | mock | mock:injected | table:FILE | cache");
    flags.add(re3_run_cmd, "scorer_cache", "persistent entailment score cache (JSONL)");
    flags.add(re3_run_cmd, "samples", "generations per text");

    auto* oracle = app.add_subcommand("oracle", "symbolic bAbI solver")->require_subcommand(1);
    auto* solve = oracle->add_subcommand("solve", "print oracle answers next to gold answers");
    flags.add(solve, "data", "dataset file");
    flags.add(solve, "style", "program style for --show-program");
    flags.add(solve, "assets", "asset directory");
    solve->add_flag("--show-program", oracle_opts.show_program, "print each oracle program");

    auto* prompt = app.add_subcommand("prompt", "prompt inspection")->require_subcommand(1);
    auto* dump = prompt->add_subcommand("dump", "print a rendered prompt or program AST");
    flags.add(dump, "style", "comment | specific | abstract | natural");
    flags.add(dump, "assets", "asset directory");
    dump->add_option("--preset", dump_opts.preset, "babi | re3")->capture_default_str();
    dump->add_option("--case", dump_opts.case_file, "exemplar case.json (default: shipped exemplar)");
    dump->add_option("--program", dump_opts.program_file, "exemplar program source");
    dump->add_option("--target", dump_opts.target_file, "case.json to render as the prompt target");
    dump->add_option("--line", dump_opts.line, "single statement for --dump-ast");
    dump->add_flag("--dump-ast", dump_opts.dump_ast, "print the parsed program instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }
    if (verbose) spdlog::set_level(spdlog::level::debug);

    try {
        Layer file;
        if (!flags.config_file.empty()) file = load_config_file(flags.config_file);
        Settings settings(flags.values, environment_layer(), file);

        if (babi_run_cmd->parsed()) return babi_run(settings);
        if (re3_run_cmd->parsed()) return re3_run(settings);
        if (solve->parsed()) return oracle_solve(settings, oracle_opts);
        if (dump->parsed()) return prompt_dump(settings, dump_opts);
    } catch (const ConfigError& e) {
        spdlog::error("{}", e.what());
        return kConfigError;
    } catch (const DatasetError& e) {
        spdlog::error("{}", e.what());
        return kDatasetError;
    } catch (const corrpus::GatewayError& e) {
        spdlog::error("{}: {}", corrpus::to_string(e.kind()), e.what());
        return kFailure;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kFailure;
    }
    return kConfigError;
}
