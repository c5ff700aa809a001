// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#ifndef C2E_CLI_HPP
#define C2E_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace c2e::cli {

// exit codes: 0 success, 1 domain failure, 2 usage/I-O failure
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

struct RunRequest {
    std::string scenario_path;  // "-" reads stdin
    std::filesystem::path output_dir;
    std::vector<std::string> overrides;  // dotted-path k=v
};

struct SweepRequest {
    std::string scenario_path;
    std::filesystem::path output_dir;
    std::vector<std::uint64_t> seeds;
    std::vector<std::vector<std::string>> override_sets;  // one entry per run config
    int jobs = 1;
};

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err);
int cmd_run(const RunRequest& req, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepRequest& req, std::ostream& out, std::ostream& err);
int cmd_config(const std::string& descriptor_path, bool emit_app, std::ostream& out,
               std::ostream& err);

/// Full argv entry point used by tools/c2e.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace c2e::cli

#endif  // C2E_CLI_HPP
