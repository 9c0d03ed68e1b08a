#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfkchain/chain_transfer.hpp"

namespace gfkchain::cli {

/// Bad input from the user: exit code 2.
class UserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failure: exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// printf "%.6g".
std::string format_number(double value);

inline constexpr const char* kResultsHeader =
    "trial,seed,kernel,n_intermediates,direct_acc,chain_acc,collapsed";

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

std::string results_csv(const chain::ChainExperimentResult& result);
/// One row per kernel, one column per intermediate count ("direct", "1IS", ...).
std::string summary_csv(const chain::ChainExperimentResult& result);
std::string cells_csv(const chain::ChainExperimentResult& result);
std::string comparisons_csv(const chain::ChainExperimentResult& result);
std::string failures_csv(const chain::ChainExperimentResult& result);

struct ResultRow {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string kernel;
  int n_intermediates = 0;
  double direct_acc = 0.0;
  double chain_acc = 0.0;
  bool collapsed = false;
};

/// Parses a results CSV. Throws UserError naming the offending line.
std::vector<ResultRow> parse_results_csv(const std::string& text);

/// Loads manifest JSON; throws UserError if it is not a gfkchain manifest.
nlohmann::json load_manifest(const std::filesystem::path& path);

}  // namespace gfkchain::cli
