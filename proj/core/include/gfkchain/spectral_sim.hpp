#pragma once

// Reduced-order parametric structures and their modal datasets.
//
// Every structure in the chain is an Euler-Bernoulli deck beam (two DOF per
// node: transverse displacement and rotation) resting on three equally
// spaced elastic supports and two end springs. The bridge and the aeroplane
// differ only in parameter values, so the topology never changes while the
// structure is morphed from one into the other.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace gfkchain::sim {

/// Morphable physical parameters of one structure. SI units throughout.
struct StructureParams {
  double span_length = 0.0;        // m, deck (or fuselage) length
  double deck_width = 0.0;         // m
  double deck_thickness = 0.0;     // m
  double support_height = 0.0;     // m
  double support_width = 0.0;      // m
  double support_thickness = 0.0;  // m
  double deck_youngs_modulus = 0.0;     // Pa
  double deck_density = 0.0;            // kg/m^3
  double support_youngs_modulus = 0.0;  // Pa
  double support_density = 0.0;         // kg/m^3
  double end_boundary_stiffness = 0.0;  // N/m, ground springs at both deck ends
  double support_base_stiffness = 0.0;  // N/m, lateral/forward restraint at support bases
  double morph_parameter = 0.0;         // 0 = bridge, 1 = aeroplane

  /// Throws DomainError unless lengths, moduli and densities are strictly
  /// positive, stiffnesses non-negative and morph_parameter in [0, 1].
  void validate() const;

  static StructureParams bridge();
  static StructureParams aeroplane();
};

/// How the two boundary stiffnesses travel between the endpoints. Every other
/// field is always interpolated linearly.
enum class StiffnessSchedule {
  linear,  // (1-t) k0 + t k1
  log,     // linear in log(1 + k); reaches zero at a zero endpoint
};

/// Structure at morph position t in [0, 1]. Throws DomainError outside.
StructureParams interpolate_params(double t,
                                   StiffnessSchedule schedule = StiffnessSchedule::linear);

/// A crack: Young's modulus reduced over the leftmost part of the span.
struct DamageSpec {
  double region_fraction = 0.05;      // (0, 1]
  double stiffness_reduction = 0.5;   // (0, 1)

  void validate() const;
};

/// Elastic attachment at an interior beam node.
struct NodeSupport {
  int node = 0;
  double translational_stiffness = 0.0;  // N/m
  double rotational_stiffness = 0.0;     // N m/rad
  double lumped_mass = 0.0;              // kg
};

/// Generic beam description, one level below StructureParams. Useful on its
/// own for analytic sanity models.
struct BeamSpec {
  double length = 0.0;
  double bending_stiffness = 0.0;  // E I
  double mass_per_length = 0.0;    // rho A
  int n_elements = 40;
  double left_spring = 0.0;   // translational ground spring at node 0
  double right_spring = 0.0;  // translational ground spring at the last node
  std::vector<NodeSupport> supports;
  std::optional<DamageSpec> damage;
};

struct SystemMatrices {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd stiffness;
};

/// Consistent-mass Hermite beam assembly. DOF ordering is
/// [w_0, phi_0, w_1, phi_1, ...].
SystemMatrices assemble_beam(const BeamSpec& spec);

/// Beam spec for a structure: deck section from width/thickness, three
/// supports at the nodes nearest L/4, L/2, 3L/4.
BeamSpec beam_spec(const StructureParams& params, const std::optional<DamageSpec>& damage,
                   int n_elements = 40);

/// Mass and stiffness matrices of a structure. Requires n_elements >= 20.
SystemMatrices assemble_model(const StructureParams& params,
                              const std::optional<DamageSpec>& damage,
                              int n_elements = 40);

/// Eigenvalues below this fraction of the largest one are rigid-body modes.
inline constexpr double kRigidBodyEigenvalueFraction = 1e-8;

/// The n_modes lowest natural frequencies (Hz) of K v = lambda M v, sorted
/// ascending. Throws NumericError on non-symmetric input or indefinite mass.
Eigen::VectorXd natural_frequencies(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& stiffness,
                                    int n_modes);

/// Noise-free healthy and damaged frequency vectors of one structure.
struct ModalSignature {
  Eigen::VectorXd healthy;
  Eigen::VectorXd damaged;
};

ModalSignature modal_signature(const StructureParams& params, const DamageSpec& damage,
                               int n_modes = 15, int n_elements = 40);

enum class Condition : std::uint8_t { healthy, damaged };

/// Noisy natural-frequency samples of one structure.
struct ModalDataset {
  Eigen::MatrixXd features;  // n_samples x D, Hz
  std::vector<Condition> condition_labels;
  std::vector<bool> label_visible;
  int domain_index = 0;

  [[nodiscard]] int n_samples() const { return static_cast<int>(features.rows()); }
  [[nodiscard]] int dimension() const { return static_cast<int>(features.cols()); }
};

/// n_reps healthy rows followed by n_reps damaged rows; every entry gets
/// independent N(0, (noise_coeff * f)^2) noise where f is its noise-free
/// frequency. All labels start visible.
ModalDataset sample_dataset(const ModalSignature& signature, int n_reps, double noise_coeff,
                            std::uint64_t rng_seed, int domain_index = 0);

/// modal_signature followed by sample_dataset, with D = 15 modes.
ModalDataset generate_dataset(const StructureParams& params, const DamageSpec& damage, int n_reps,
                              double noise_coeff, std::uint64_t rng_seed, int n_elements = 40);

/// Morph positions of an n-structure chain: uniform partition of [0, 1].
std::vector<double> chain_positions(int n_structures);

}  // namespace gfkchain::sim
