#pragma once

#include <optional>
#include <string>

#include "settings.hpp"

namespace corrpus::cli {

int babi_run(const Settings& settings);
int re3_run(const Settings& settings);

struct OracleOptions {
    bool show_program = false;
};
int oracle_solve(const Settings& settings, const OracleOptions& options);

struct DumpOptions {
    std::string preset = "babi";
    std::optional<std::string> case_file;
    std::optional<std::string> program_file;
    std::optional<std::string> target_file;
    std::optional<std::string> line;
    bool dump_ast = false;
};
int prompt_dump(const Settings& settings, const DumpOptions& options);

}  // namespace corrpus::cli
