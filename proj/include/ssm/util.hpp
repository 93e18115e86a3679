#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ssm {

/// Base for every error a module reports; the CLI turns these into exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line` is 1-based, 0 when not applicable.
class FormatError : public Error {
 public:
  FormatError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// -- logging ---------------------------------------------------------------

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

void set_log_level(LogLevel level);
LogLevel log_level();
void log(LogLevel level, const std::string& message);
inline void log_info(const std::string& m) { log(LogLevel::info, m); }
inline void log_warn(const std::string& m) { log(LogLevel::warn, m); }

// -- strings ---------------------------------------------------------------

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
std::vector<std::string> split_whitespace(std::string_view text);
bool starts_with_icase(std::string_view text, std::string_view prefix);
/// Fixed-notation rendering used in reports and CSV files.
std::string format_fixed(double value, int precision);

// -- files -----------------------------------------------------------------

std::string read_file(const std::filesystem::path& path);
std::vector<std::string> read_lines(const std::filesystem::path& path);
/// Writes to a sibling temp file then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// -- randomness ------------------------------------------------------------

using Rng = std::mt19937_64;

/// Mixes a base seed with stream coordinates so that every task (example,
/// pair, iteration) gets an independent, schedule-free random stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index storage; the call order is unspecified.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

/// Worker count used when a config asks for 0 (= auto).
std::size_t default_thread_count();

}  // namespace ssm
