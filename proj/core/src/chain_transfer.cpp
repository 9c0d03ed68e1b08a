#include "gfkchain/chain_transfer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <utility>

#include "gfkchain/alignment.hpp"
#include "gfkchain/errors.hpp"
#include "gfkchain/geodesic_kernel.hpp"
#include "gfkchain/rng.hpp"
#include "gfkchain/subspace.hpp"

namespace gfkchain::chain {
namespace {

constexpr std::uint64_t kVisibilityStream = 0x76697369ULL;

bool is_fraction(double x) { return x > 0.0 && x <= 1.0; }

}  // namespace

std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::linear ? "linear" : "gfk";
}

KernelKind parse_kernel(std::string_view name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "gfk") return KernelKind::gfk;
  throw DomainError("unknown kernel '" + std::string(name) + "', expected one of {linear, gfk}");
}

void ChainConfig::validate() const {
  validate_sampling();
  if (intermediate_counts.empty()) throw DomainError("intermediate_counts is empty");
  for (int k : intermediate_counts) {
    if (k < 0 || k > n_structures - 2) {
      throw DomainError("intermediate count " + std::to_string(k) + " outside [0, " +
                        std::to_string(n_structures - 2) + "]");
    }
  }
  if (kernels.empty()) throw DomainError("kernels is empty");
  if (!(svm_c > 0.0) || !std::isfinite(svm_c)) throw DomainError("svm_c must be positive");
  if (!(variance_threshold > 0.0 && variance_threshold < 1.0)) {
    throw DomainError("variance_threshold must lie in (0, 1)");
  }
  if (n_trials < 1) throw DomainError("n_trials must be at least 1");
  if (threads < 0) throw DomainError("threads must be non-negative");
}

void ChainConfig::validate_sampling() const {
  if (n_structures < 2) throw DomainError("n_structures must be at least 2");
  if (!is_fraction(labeled_normal_fraction)) {
    throw DomainError("labeled_normal_fraction must lie in (0, 1]");
  }
  if (!(noise_coeff >= 0.0) || !std::isfinite(noise_coeff)) {
    throw DomainError("noise_coeff must be non-negative");
  }
  damage.validate();
  if (n_reps < 2) throw DomainError("n_reps must be at least 2");
  if (n_modes < 2) throw DomainError("n_modes must be at least 2");
  if (n_elements < 20) throw DomainError("n_elements must be at least 20");
  if (static_cast<int>(std::lround(labeled_normal_fraction * n_reps)) < 2) {
    throw DomainError("labeled_normal_fraction * n_reps must leave at least 2 visible normals");
  }
}

TransferConfig ChainConfig::transfer(KernelKind kernel) const {
  TransferConfig t;
  t.kernel = kernel;
  t.svm_c = svm_c;
  t.variance_threshold = variance_threshold;
  return t;
}

Chain build_chain(const ChainConfig& config) {
  config.validate_sampling();
  Chain chain;
  chain.positions = sim::chain_positions(config.n_structures);
  chain.signatures.resize(chain.positions.size());
  for (std::size_t i = 0; i < chain.positions.size(); ++i) {
    const auto params = sim::interpolate_params(chain.positions[i], config.schedule);
    chain.signatures[i] =
        sim::modal_signature(params, config.damage, config.n_modes, config.n_elements);
  }
  return chain;
}

std::vector<int> select_intermediates(int chain_size, int k) {
  if (chain_size < 2) throw DomainError("chain needs at least 2 structures");
  if (k < 0 || k > chain_size - 2) {
    throw DomainError("cannot place " + std::to_string(k) + " intermediates in a chain of " +
                      std::to_string(chain_size));
  }
  std::vector<int> out;
  out.reserve(k);
  for (int i = 1; i <= k; ++i) {
    out.push_back(static_cast<int>(
        std::lround(static_cast<double>(i) * (chain_size - 1) / static_cast<double>(k + 1))));
  }
  return out;
}

void apply_label_visibility(sim::ModalDataset& dataset, double fraction, std::uint64_t seed) {
  if (!is_fraction(fraction)) throw DomainError("visible fraction must lie in (0, 1]");
  std::vector<int> healthy;
  for (int i = 0; i < dataset.n_samples(); ++i) {
    dataset.label_visible[i] = false;
    if (dataset.condition_labels[i] == sim::Condition::healthy) healthy.push_back(i);
  }
  Rng rng(mix_seed(seed));
  std::shuffle(healthy.begin(), healthy.end(), rng);
  const auto n_visible = static_cast<std::size_t>(
      std::lround(fraction * static_cast<double>(healthy.size())));
  for (std::size_t i = 0; i < n_visible && i < healthy.size(); ++i) {
    dataset.label_visible[healthy[i]] = true;
  }
}

std::vector<svm::Label> true_labels(const sim::ModalDataset& dataset) {
  std::vector<svm::Label> y(dataset.condition_labels.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = dataset.condition_labels[i] == sim::Condition::healthy ? svm::Label::healthy
                                                                  : svm::Label::damaged;
  }
  return y;
}

StepResult transfer_step(const sim::ModalDataset& source,
                         const std::vector<svm::Label>& source_labels,
                         const sim::ModalDataset& target, const TransferConfig& config) {
  if (static_cast<int>(source_labels.size()) != source.n_samples()) {
    throw DomainError("source label count does not match the source dataset");
  }
  if (source.dimension() != target.dimension()) {
    throw DomainError("source and target feature dimensions differ");
  }
  if (!source.features.allFinite() || !target.features.allFinite()) {
    throw NumericError("non-finite features in domain " + std::to_string(source.domain_index) +
                       " or " + std::to_string(target.domain_index));
  }
  const Eigen::MatrixXd xs = align::standardize(source.features, align::fit_normal_stats(source));
  const Eigen::MatrixXd xt = align::standardize(target.features, align::fit_normal_stats(target));

  StepResult result;
  const auto n_target = static_cast<std::size_t>(target.n_samples());
  const bool has_healthy =
      std::find(source_labels.begin(), source_labels.end(), svm::Label::healthy) !=
      source_labels.end();
  const bool has_damaged =
      std::find(source_labels.begin(), source_labels.end(), svm::Label::damaged) !=
      source_labels.end();

  if (!has_healthy || !has_damaged) {
    result.collapsed = true;
    result.predictions.assign(n_target, source_labels.empty() ? svm::Label::healthy
                                                              : source_labels.front());
  } else {
    Eigen::MatrixXd k_train;
    Eigen::MatrixXd k_test;
    if (config.kernel == KernelKind::gfk) {
      const int d = subspace::select_dimension(xs, xt, config.variance_threshold);
      const auto decomp =
          subspace::principal_decomposition(subspace::pca_basis(xs, d), subspace::pca_basis(xt, d));
      const auto g = gfk::gfk_matrix(decomp);
      k_train = gfk::gram(g, xs, xs);
      k_test = gfk::gram(g, xt, xs);
      result.subspace_dim = d;
    } else {
      k_train = xs * xs.transpose();
      k_test = xt * xs.transpose();
    }
    svm::SvmOptions opts;
    opts.regularization = config.svm_c;
    opts.tolerance = config.svm_tolerance;
    opts.max_iterations = config.svm_max_iterations;
    const auto model = svm::train(k_train, source_labels, opts);
    result.predictions = svm::predict(model, k_test);
  }

  for (std::size_t i = 0; i < n_target; ++i) {
    if (target.label_visible[i] && target.condition_labels[i] == sim::Condition::healthy) {
      result.predictions[i] = svm::Label::healthy;
    }
  }
  return result;
}

double damage_accuracy(const sim::ModalDataset& dataset,
                       const std::vector<svm::Label>& predictions) {
  if (static_cast<int>(predictions.size()) != dataset.n_samples()) {
    throw DomainError("prediction count does not match the dataset");
  }
  int n_damaged = 0;
  int hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (dataset.condition_labels[i] != sim::Condition::damaged) continue;
    ++n_damaged;
    if (predictions[i] == svm::Label::damaged) ++hits;
  }
  if (n_damaged == 0) throw InsufficientDataError("dataset has no damaged samples");
  return static_cast<double>(hits) / n_damaged;
}

PathResult run_path(const std::vector<sim::ModalDataset>& domains, const std::vector<int>& path,
                    const TransferConfig& config) {
  if (path.size() < 2) throw DomainError("transfer path needs at least 2 domains");
  for (int idx : path) {
    if (idx < 0 || idx >= static_cast<int>(domains.size())) {
      throw DomainError("transfer path index " + std::to_string(idx) + " out of range");
    }
  }
  PathResult out;
  std::vector<svm::Label> labels = true_labels(domains[path.front()]);
  for (std::size_t s = 1; s < path.size(); ++s) {
    StepResult step = transfer_step(domains[path[s - 1]], labels, domains[path[s]], config);
    out.collapsed = out.collapsed || step.collapsed;
    labels = std::move(step.predictions);
  }
  out.accuracy = damage_accuracy(domains[path.back()], labels);
  out.final_predictions = std::move(labels);
  return out;
}

ChainOutcome run_chain(const std::vector<sim::ModalDataset>& domains, int k,
                       const TransferConfig& config) {
  const int n = static_cast<int>(domains.size());
  std::vector<int> path{0};
  for (int idx : select_intermediates(n, k)) path.push_back(idx);
  path.push_back(n - 1);

  const PathResult direct = run_path(domains, {0, n - 1}, config);
  const PathResult chained = run_path(domains, path, config);
  return {direct.accuracy, chained.accuracy, direct.collapsed || chained.collapsed};
}

std::vector<sim::ModalDataset> sample_trial(const Chain& chain, const ChainConfig& config,
                                            std::uint64_t trial_seed) {
  std::vector<sim::ModalDataset> domains;
  domains.reserve(chain.signatures.size());
  for (int i = 0; i < chain.size(); ++i) {
    const std::uint64_t seed = derive_seed(trial_seed, static_cast<std::uint64_t>(i));
    auto ds = sim::sample_dataset(chain.signatures[i], config.n_reps, config.noise_coeff, seed, i);
    if (i > 0) {
      apply_label_visibility(ds, config.labeled_normal_fraction,
                             derive_seed(seed, kVisibilityStream));
    }
    domains.push_back(std::move(ds));
  }
  return domains;
}

namespace {

// All records of one trial. The datasets are shared by every kernel and
// intermediate count so that comparisons within a trial are paired.
std::vector<TrialRecord> run_trial(const ChainConfig& config, const Chain& chain, int trial) {
  const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(trial);
  std::vector<TrialRecord> records;
  for (KernelKind kernel : config.kernels) {
    for (int k : config.intermediate_counts) {
      TrialRecord r;
      r.trial = trial;
      r.seed = seed;
      r.kernel = kernel;
      r.n_intermediates = k;
      records.push_back(r);
    }
  }
  try {
    const auto domains = sample_trial(chain, config, seed);
    const int n = chain.size();
    std::size_t at = 0;
    for (KernelKind kernel : config.kernels) {
      const TransferConfig tc = config.transfer(kernel);
      const PathResult direct = run_path(domains, {0, n - 1}, tc);
      for (int k : config.intermediate_counts) {
        TrialRecord& r = records[at++];
        try {
          std::vector<int> path{0};
          for (int idx : select_intermediates(n, k)) path.push_back(idx);
          path.push_back(n - 1);
          const PathResult chained = run_path(domains, path, tc);
          r.direct_accuracy = direct.accuracy;
          r.chain_accuracy = chained.accuracy;
          r.collapsed = direct.collapsed || chained.collapsed;
        } catch (const std::exception& e) {
          r.failed = true;
          r.error = e.what();
        }
      }
    }
  } catch (const std::exception& e) {
    for (auto& r : records) {
      if (r.failed) continue;
      r.failed = true;
      r.error = e.what();
    }
  }
  return records;
}

}  // namespace

ChainExperimentResult run_experiment(const ChainConfig& config, const Chain& chain) {
  config.validate();
  if (chain.size() != config.n_structures) {
    throw DomainError("chain size does not match n_structures");
  }
  std::vector<std::vector<TrialRecord>> per_trial(static_cast<std::size_t>(config.n_trials));
  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(config.n_trials));

  std::atomic<int> next{0};
  auto work = [&] {
    for (int t = next.fetch_add(1); t < config.n_trials; t = next.fetch_add(1)) {
      per_trial[static_cast<std::size_t>(t)] = run_trial(config, chain, t);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  ChainExperimentResult result;
  for (auto& recs : per_trial) {
    for (auto& r : recs) result.trials.push_back(std::move(r));
  }
  result.cells = summarize(result.trials);
  result.comparisons = compare_kernels(result.trials);
  return result;
}

ChainExperimentResult run_experiment(const ChainConfig& config) {
  config.validate();
  return run_experiment(config, build_chain(config));
}

const CellSummary* ChainExperimentResult::cell(KernelKind kernel, int n_intermediates) const {
  for (const auto& c : cells) {
    if (c.kernel == kernel && c.n_intermediates == n_intermediates) return &c;
  }
  return nullptr;
}

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& trials) {
  std::map<std::pair<int, int>, std::vector<const TrialRecord*>> groups;
  for (const auto& r : trials) {
    groups[{static_cast<int>(r.kernel), r.n_intermediates}].push_back(&r);
  }
  std::vector<CellSummary> out;
  for (const auto& [key, recs] : groups) {
    CellSummary c;
    c.kernel = static_cast<KernelKind>(key.first);
    c.n_intermediates = key.second;
    int beats = 0;
    int at_least = 0;
    for (const TrialRecord* r : recs) {
      if (r->failed) {
        ++c.n_failed;
        continue;
      }
      ++c.n_trials;
      c.mean_direct += r->direct_accuracy;
      c.mean_chain += r->chain_accuracy;
      if (r->chain_accuracy > r->direct_accuracy) ++beats;
      if (r->chain_accuracy >= r->direct_accuracy) ++at_least;
      if (r->collapsed) ++c.n_collapsed;
    }
    if (c.n_trials > 0) {
      c.mean_direct /= c.n_trials;
      c.mean_chain /= c.n_trials;
      c.fraction_chain_beats = static_cast<double>(beats) / c.n_trials;
      c.fraction_chain_at_least = static_cast<double>(at_least) / c.n_trials;
    }
    out.push_back(c);
  }
  return out;
}

std::vector<KernelComparison> compare_kernels(const std::vector<TrialRecord>& trials) {
  // (trial, k) -> chain accuracy per kernel
  std::map<std::pair<int, int>, std::pair<const TrialRecord*, const TrialRecord*>> paired;
  for (const auto& r : trials) {
    if (r.failed) continue;
    auto& slot = paired[{r.n_intermediates, r.trial}];
    (r.kernel == KernelKind::linear ? slot.first : slot.second) = &r;
  }
  std::map<int, KernelComparison> by_k;
  std::map<int, std::pair<int, int>> wins;
  for (const auto& [key, pair] : paired) {
    if (pair.first == nullptr || pair.second == nullptr) continue;
    auto& c = by_k[key.first];
    c.n_intermediates = key.first;
    ++c.n_trials;
    const double diff = pair.second->chain_accuracy - pair.first->chain_accuracy;
    c.mean_difference += diff;
    if (pair.second->chain_accuracy > pair.first->chain_accuracy) ++wins[key.first].first;
    if (pair.second->chain_accuracy >= pair.first->chain_accuracy) ++wins[key.first].second;
  }
  std::vector<KernelComparison> out;
  for (auto& [k, c] : by_k) {
    c.mean_difference /= c.n_trials;
    c.fraction_gfk_beats = static_cast<double>(wins[k].first) / c.n_trials;
    c.fraction_gfk_at_least = static_cast<double>(wins[k].second) / c.n_trials;
    out.push_back(c);
  }
  return out;
}

}  // namespace gfkchain::chain
