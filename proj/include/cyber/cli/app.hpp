#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cyber::cli {

/// Exit codes of run_scenario.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitModel = 3;

struct Diagnostic {
    /// JSON pointer of the offending field ("" for the document root).
    std::string path;
    std::string message;

    std::string str() const;
};

const std::vector<std::string>& scenario_kinds();

/// Structural and semantic validation without execution. Throws Error when
/// the file cannot be read.
std::vector<Diagnostic> validate_config(const std::filesystem::path& config);
std::vector<Diagnostic> validate_text(std::string_view text);

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::filesystem::path out = "out";
    std::optional<unsigned> threads;
};

/// Writes manifest.json, results.csv and summary.json into options.out.
/// Diagnostics and library errors go to err.
int run_scenario(const std::filesystem::path& config, const RunOptions& options, std::ostream& err);

std::string sha256_hex(std::string_view data);
/// Digest of the canonical form (sorted keys, no whitespace) of a JSON text.
std::string config_digest(std::string_view json_text);

std::string version();

}  // namespace cyber::cli
