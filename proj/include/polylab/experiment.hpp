#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "polylab/distribution.hpp"

namespace polylab {

// One asserted identity or inequality, with the two sides it compared.
struct CheckResult {
    std::string name;
    bool pass = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
};

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

  private:
    std::vector<std::string> violations_;
};

// A fully serializable experiment description; identical configs reproduce
// identical data files byte-for-byte (wall time lives only in the manifest).
struct ExperimentConfig {
    std::string kind;  // free-energy | rate-function | corollary | smoothed | verify
    std::optional<DistributionModel> model;
    int d = 1;
    std::vector<int> n_list;
    std::vector<double> beta_grid;
    std::vector<double> rho_grid;   // optional custom rate-function grid
    std::optional<double> rho;      // threshold level for corollary runs
    std::vector<double> lambda_grid;
    std::vector<double> xi_list;
    std::vector<double> u_grid;
    double delta = 0.1;
    int M = 0;
    std::optional<std::uint64_t> seed;
    std::string output_dir;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);

    // Collects every violated field; throws ConfigError listing all of them.
    void validate() const;
};

struct RunSummary {
    std::string kind;
    bool all_pass = true;
    std::vector<CheckResult> checks;
    std::vector<std::string> files_written;
};

// Validates, computes, then writes manifest.json, the per-kind data CSVs and
// summary.json under config.output_dir. Nothing is written before the whole
// computation succeeds.
RunSummary run(const ExperimentConfig& config);

// Fixed battery of exact identities and pathwise inequalities at small sizes,
// deterministic in the seed. Entries are named by their ledger anchors.
std::vector<CheckResult> verify_suite(std::uint64_t seed);

inline constexpr std::uint64_t kDefaultVerifySeed = 0x706f6c796c616221ull;

}  // namespace polylab
