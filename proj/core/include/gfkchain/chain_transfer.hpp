#pragma once

// Self-training transfer of damage labels along a chain of structures, and
// the randomized experiment comparing direct and chained transfer.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gfkchain/spectral_sim.hpp"
#include "gfkchain/svm.hpp"

namespace gfkchain::chain {

enum class KernelKind { linear, gfk };

std::string_view to_string(KernelKind kind);

/// Throws DomainError naming the accepted values {linear, gfk}.
KernelKind parse_kernel(std::string_view name);

struct TransferConfig {
  KernelKind kernel = KernelKind::gfk;
  double svm_c = 1.0;
  double variance_threshold = 0.95;
  double svm_tolerance = 1e-5;
  long svm_max_iterations = 100000;
};

struct ChainConfig {
  int n_structures = 80;
  std::vector<int> intermediate_counts{0, 1, 3, 13, 78};
  std::vector<KernelKind> kernels{KernelKind::linear, KernelKind::gfk};
  double labeled_normal_fraction = 0.5;
  double noise_coeff = 0.0015;
  sim::DamageSpec damage{};
  sim::StiffnessSchedule schedule = sim::StiffnessSchedule::linear;
  int n_reps = 100;
  int n_modes = 15;
  int n_elements = 40;
  double svm_c = 1.0;
  double variance_threshold = 0.95;
  int n_trials = 100;
  std::uint64_t base_seed = 0;
  int threads = 0;  // 0 = hardware concurrency

  /// Throws DomainError on any out-of-range field.
  void validate() const;
  /// Only the fields needed to build a chain and sample its datasets.
  void validate_sampling() const;
  [[nodiscard]] TransferConfig transfer(KernelKind kernel) const;
};

/// Noise-free modal signatures of the chain, bridge first. Fixed across trials.
struct Chain {
  std::vector<double> positions;
  std::vector<sim::ModalSignature> signatures;

  [[nodiscard]] int size() const { return static_cast<int>(signatures.size()); }
};

Chain build_chain(const ChainConfig& config);

/// k intermediate indices round(i (N-1)/(k+1)), i = 1..k. Throws DomainError
/// unless 0 <= k <= N-2.
std::vector<int> select_intermediates(int chain_size, int k);

/// Hides every damaged label and all but round(fraction * n_healthy) healthy
/// labels, chosen uniformly at random.
void apply_label_visibility(sim::ModalDataset& dataset, double fraction, std::uint64_t seed);

/// Healthy/damaged ground truth as SVM labels.
std::vector<svm::Label> true_labels(const sim::ModalDataset& dataset);

struct StepResult {
  std::vector<svm::Label> predictions;
  bool collapsed = false;  // source labels held a single class
  int subspace_dim = 0;    // 0 for the linear kernel
};

/// One transfer: each domain is aligned by its own visible normal rows, an
/// SVM is trained on the source with `source_labels`, every target row is
/// predicted, and the target's visible normal rows are forced to healthy.
StepResult transfer_step(const sim::ModalDataset& source,
                         const std::vector<svm::Label>& source_labels,
                         const sim::ModalDataset& target, const TransferConfig& config);

/// Fraction of truly damaged rows predicted damaged.
double damage_accuracy(const sim::ModalDataset& dataset, const std::vector<svm::Label>& predictions);

struct PathResult {
  double accuracy = 0.0;
  bool collapsed = false;
  std::vector<svm::Label> final_predictions;
};

/// Transfers along path[0] -> path[1] -> ... -> path.back(), with each step's
/// predictions becoming the next step's training labels. path[0] uses its
/// true labels.
PathResult run_path(const std::vector<sim::ModalDataset>& domains, const std::vector<int>& path,
                    const TransferConfig& config);

struct ChainOutcome {
  double direct_accuracy = 0.0;
  double chain_accuracy = 0.0;
  bool collapsed = false;
};

/// Direct transfer first -> last, and chained transfer through k evenly
/// spaced intermediates.
ChainOutcome run_chain(const std::vector<sim::ModalDataset>& domains, int k,
                       const TransferConfig& config);

/// Datasets of one trial: per-domain seeds derived from trial_seed, labels
/// fully visible on the source and partially visible elsewhere.
std::vector<sim::ModalDataset> sample_trial(const Chain& chain, const ChainConfig& config,
                                            std::uint64_t trial_seed);

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  KernelKind kernel = KernelKind::gfk;
  int n_intermediates = 0;
  double direct_accuracy = 0.0;
  double chain_accuracy = 0.0;
  bool collapsed = false;
  bool failed = false;
  std::string error;
};

struct CellSummary {
  KernelKind kernel = KernelKind::gfk;
  int n_intermediates = 0;
  int n_trials = 0;  // successful trials
  int n_failed = 0;
  double mean_direct = 0.0;
  double mean_chain = 0.0;
  double fraction_chain_beats = 0.0;     // chain > direct
  double fraction_chain_at_least = 0.0;  // chain >= direct
  int n_collapsed = 0;
};

/// gfk against linear for the same trials and intermediate count.
struct KernelComparison {
  int n_intermediates = 0;
  int n_trials = 0;
  double mean_difference = 0.0;        // gfk chain - linear chain
  double fraction_gfk_beats = 0.0;     // gfk > linear
  double fraction_gfk_at_least = 0.0;  // gfk >= linear
};

struct ChainExperimentResult {
  std::vector<TrialRecord> trials;  // ordered by (trial, kernel, n_intermediates)
  std::vector<CellSummary> cells;   // ordered by (kernel, n_intermediates)
  std::vector<KernelComparison> comparisons;

  [[nodiscard]] const CellSummary* cell(KernelKind kernel, int n_intermediates) const;
};

/// Trial i uses seed base_seed + i. Trials run on config.threads workers;
/// the result does not depend on the thread count.
ChainExperimentResult run_experiment(const ChainConfig& config, const Chain& chain);
ChainExperimentResult run_experiment(const ChainConfig& config);

/// Aggregates from per-trial records (failed trials excluded).
std::vector<CellSummary> summarize(const std::vector<TrialRecord>& trials);
std::vector<KernelComparison> compare_kernels(const std::vector<TrialRecord>& trials);

}  // namespace gfkchain::chain
