#include "gfkchain/spectral_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "gfkchain/errors.hpp"
#include "gfkchain/rng.hpp"

namespace gfkchain::sim {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be strictly positive, got " + std::to_string(v));
  }
}

void require_non_negative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be non-negative, got " + std::to_string(v));
  }
}

double lerp(double a, double b, double t) { return (1.0 - t) * a + t * b; }

double log_lerp(double a, double b, double t) {
  return std::expm1(lerp(std::log1p(a), std::log1p(b), t));
}

double max_asymmetry(const Eigen::MatrixXd& a) {
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

// Series connection of two springs; an open spring (0) breaks the path.
double series(double k1, double k2) {
  if (k1 <= 0.0 || k2 <= 0.0) return 0.0;
  return 1.0 / (1.0 / k1 + 1.0 / k2);
}

}  // namespace

void StructureParams::validate() const {
  require_positive(span_length, "span_length");
  require_positive(deck_width, "deck_width");
  require_positive(deck_thickness, "deck_thickness");
  require_positive(support_height, "support_height");
  require_positive(support_width, "support_width");
  require_positive(support_thickness, "support_thickness");
  require_positive(deck_youngs_modulus, "deck_youngs_modulus");
  require_positive(deck_density, "deck_density");
  require_positive(support_youngs_modulus, "support_youngs_modulus");
  require_positive(support_density, "support_density");
  require_non_negative(end_boundary_stiffness, "end_boundary_stiffness");
  require_non_negative(support_base_stiffness, "support_base_stiffness");
  if (!(morph_parameter >= 0.0 && morph_parameter <= 1.0)) {
    throw DomainError("morph_parameter must lie in [0, 1]");
  }
}

StructureParams StructureParams::bridge() {
  StructureParams p;
  p.span_length = 100.0;
  p.deck_width = 15.0;
  p.deck_thickness = 2.0;
  p.support_height = 15.0;
  p.support_width = 2.0;
  p.support_thickness = 2.0;
  p.deck_youngs_modulus = 30e9;
  p.deck_density = 2400.0;
  p.support_youngs_modulus = 5e9;
  p.support_density = 2000.0;
  p.end_boundary_stiffness = 10e10;
  p.support_base_stiffness = 10e10;
  p.morph_parameter = 0.0;
  return p;
}

// Fuselage as the deck, landing gear as the supports. The wings are free,
// so both boundary stiffnesses vanish.
StructureParams StructureParams::aeroplane() {
  StructureParams p;
  p.span_length = 20.0;
  p.deck_width = 2.0;
  p.deck_thickness = 2.0;
  p.support_height = 4.0;
  p.support_width = 0.5;
  p.support_thickness = 0.5;
  p.deck_youngs_modulus = 69e9;
  p.deck_density = 2700.0;
  p.support_youngs_modulus = 69e9;
  p.support_density = 2700.0;
  p.end_boundary_stiffness = 0.0;
  p.support_base_stiffness = 0.0;
  p.morph_parameter = 1.0;
  return p;
}

StructureParams interpolate_params(double t, StiffnessSchedule schedule) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("morph position must lie in [0, 1], got " + std::to_string(t));
  }
  const auto a = StructureParams::bridge();
  const auto b = StructureParams::aeroplane();
  StructureParams p;
  p.span_length = lerp(a.span_length, b.span_length, t);
  p.deck_width = lerp(a.deck_width, b.deck_width, t);
  p.deck_thickness = lerp(a.deck_thickness, b.deck_thickness, t);
  p.support_height = lerp(a.support_height, b.support_height, t);
  p.support_width = lerp(a.support_width, b.support_width, t);
  p.support_thickness = lerp(a.support_thickness, b.support_thickness, t);
  p.deck_youngs_modulus = lerp(a.deck_youngs_modulus, b.deck_youngs_modulus, t);
  p.deck_density = lerp(a.deck_density, b.deck_density, t);
  p.support_youngs_modulus = lerp(a.support_youngs_modulus, b.support_youngs_modulus, t);
  p.support_density = lerp(a.support_density, b.support_density, t);
  const auto stiff = schedule == StiffnessSchedule::log ? log_lerp : lerp;
  p.end_boundary_stiffness = stiff(a.end_boundary_stiffness, b.end_boundary_stiffness, t);
  p.support_base_stiffness = stiff(a.support_base_stiffness, b.support_base_stiffness, t);
  // Pin the endpoints exactly; lerp is not exact at t = 1 in floating point.
  if (t == 0.0) p = a;
  if (t == 1.0) p = b;
  p.morph_parameter = t;
  return p;
}

void DamageSpec::validate() const {
  if (!(region_fraction > 0.0 && region_fraction <= 1.0)) {
    throw DomainError("damage region_fraction must lie in (0, 1]");
  }
  if (!(stiffness_reduction > 0.0 && stiffness_reduction < 1.0)) {
    throw DomainError("damage stiffness_reduction must lie in (0, 1)");
  }
}

SystemMatrices assemble_beam(const BeamSpec& spec) {
  require_positive(spec.length, "beam length");
  require_positive(spec.bending_stiffness, "bending stiffness");
  require_positive(spec.mass_per_length, "mass per length");
  require_non_negative(spec.left_spring, "left spring");
  require_non_negative(spec.right_spring, "right spring");
  if (spec.n_elements < 1) throw DomainError("beam needs at least one element");
  if (spec.damage) spec.damage->validate();

  const int ne = spec.n_elements;
  const int ndof = 2 * (ne + 1);
  const double le = spec.length / ne;
  const double le2 = le * le;

  Eigen::Matrix4d k_unit;
  k_unit << 12, 6 * le, -12, 6 * le,
            6 * le, 4 * le2, -6 * le, 2 * le2,
            -12, -6 * le, 12, -6 * le,
            6 * le, 2 * le2, -6 * le, 4 * le2;
  Eigen::Matrix4d m_unit;
  m_unit << 156, 22 * le, 54, -13 * le,
            22 * le, 4 * le2, 13 * le, -3 * le2,
            54, 13 * le, 156, -22 * le,
            -13 * le, -3 * le2, -22 * le, 4 * le2;
  const Eigen::Matrix4d k_elem = (spec.bending_stiffness / (le2 * le)) * k_unit;
  const Eigen::Matrix4d m_elem = (spec.mass_per_length * le / 420.0) * m_unit;

  // Elements whose left edge lies inside the cracked region carry the
  // reduced modulus.
  const double crack_end = spec.damage ? spec.damage->region_fraction * spec.length : 0.0;
  const double crack_scale = spec.damage ? 1.0 - spec.damage->stiffness_reduction : 1.0;

  SystemMatrices out{Eigen::MatrixXd::Zero(ndof, ndof), Eigen::MatrixXd::Zero(ndof, ndof)};
  for (int e = 0; e < ne; ++e) {
    const bool cracked = spec.damage && e * le < crack_end * (1.0 - 1e-12);
    const int d0 = 2 * e;
    out.stiffness.block<4, 4>(d0, d0) += cracked ? (crack_scale * k_elem).eval() : k_elem;
    out.mass.block<4, 4>(d0, d0) += m_elem;
  }

  out.stiffness(0, 0) += spec.left_spring;
  out.stiffness(2 * ne, 2 * ne) += spec.right_spring;
  for (const auto& s : spec.supports) {
    if (s.node < 0 || s.node > ne) throw DomainError("support node outside the beam");
    require_non_negative(s.translational_stiffness, "support translational stiffness");
    require_non_negative(s.rotational_stiffness, "support rotational stiffness");
    require_non_negative(s.lumped_mass, "support lumped mass");
    out.stiffness(2 * s.node, 2 * s.node) += s.translational_stiffness;
    out.stiffness(2 * s.node + 1, 2 * s.node + 1) += s.rotational_stiffness;
    out.mass(2 * s.node, 2 * s.node) += s.lumped_mass;
  }
  return out;
}

// Each support is a column standing on a vertically fixed base. Vertically it
// acts through its axial stiffness. It also resists deck rotation by bending,
// but only as far as the horizontal base restraint lets it: the column's tip
// bending stiffness 3EI/h in series with the base spring seen through the
// lever arm h. Half of the column mass moves with the deck.
BeamSpec beam_spec(const StructureParams& params, const std::optional<DamageSpec>& damage,
                   int n_elements) {
  params.validate();
  if (n_elements < 4) throw DomainError("n_elements must be at least 4");
  BeamSpec spec;
  spec.length = params.span_length;
  const double area = params.deck_width * params.deck_thickness;
  const double inertia = params.deck_width * std::pow(params.deck_thickness, 3) / 12.0;
  spec.bending_stiffness = params.deck_youngs_modulus * inertia;
  spec.mass_per_length = params.deck_density * area;
  spec.n_elements = n_elements;
  spec.left_spring = params.end_boundary_stiffness;
  spec.right_spring = params.end_boundary_stiffness;
  spec.damage = damage;

  const double h = params.support_height;
  const double col_area = params.support_width * params.support_thickness;
  const double col_inertia = params.support_width * std::pow(params.support_thickness, 3) / 12.0;
  const double axial = params.support_youngs_modulus * col_area / h;
  const double rotational =
      series(3.0 * params.support_youngs_modulus * col_inertia / h, params.support_base_stiffness * h * h);
  const double mass = 0.5 * params.support_density * col_area * h;
  for (int q = 1; q <= 3; ++q) {
    const int node = static_cast<int>(std::lround(q * n_elements / 4.0));
    spec.supports.push_back({node, axial, rotational, mass});
  }
  return spec;
}

SystemMatrices assemble_model(const StructureParams& params,
                              const std::optional<DamageSpec>& damage, int n_elements) {
  if (n_elements < 20) throw DomainError("assemble_model requires n_elements >= 20");
  return assemble_beam(beam_spec(params, damage, n_elements));
}

Eigen::VectorXd natural_frequencies(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& stiffness,
                                    int n_modes) {
  const auto n = mass.rows();
  if (mass.cols() != n || stiffness.rows() != n || stiffness.cols() != n) {
    throw DomainError("mass and stiffness must be square matrices of equal size");
  }
  if (n_modes < 1 || n_modes > n) {
    throw DomainError("n_modes must lie in [1, " + std::to_string(n) + "]");
  }
  const double mass_scale = mass.cwiseAbs().maxCoeff();
  const double stiff_scale = stiffness.cwiseAbs().maxCoeff();
  if (max_asymmetry(mass) > 1e-12 * mass_scale) {
    std::ostringstream msg;
    msg << "mass matrix is not symmetric (max |M - M^T| = " << max_asymmetry(mass) << ")";
    throw NumericError(msg.str());
  }
  if (max_asymmetry(stiffness) > 1e-12 * stiff_scale) {
    std::ostringstream msg;
    msg << "stiffness matrix is not symmetric (max |K - K^T| = " << max_asymmetry(stiffness) << ")";
    throw NumericError(msg.str());
  }
  Eigen::LLT<Eigen::MatrixXd> chol(mass);
  if (chol.info() != Eigen::Success) {
    throw NumericError("mass matrix is not positive definite (Cholesky factorization failed)");
  }

  // K v = lambda M v  <=>  (L^-1 K L^-T) u = lambda u with M = L L^T.
  Eigen::MatrixXd reduced = chol.matrixL().solve(stiffness);
  reduced = chol.matrixL().solve(reduced.transpose()).transpose();
  reduced = 0.5 * (reduced + reduced.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("generalized eigensolver did not converge");

  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double floor = kRigidBodyEigenvalueFraction * std::max(lambda.maxCoeff(), 0.0);
  Eigen::VectorXd freq(n_modes);
  for (int i = 0; i < n_modes; ++i) {
    const double l = lambda(i) < floor ? 0.0 : lambda(i);
    freq(i) = std::sqrt(l) / (2.0 * std::numbers::pi);
  }
  return freq;
}

ModalSignature modal_signature(const StructureParams& params, const DamageSpec& damage,
                               int n_modes, int n_elements) {
  damage.validate();
  const auto healthy = assemble_model(params, std::nullopt, n_elements);
  const auto damaged = assemble_model(params, damage, n_elements);
  return {natural_frequencies(healthy.mass, healthy.stiffness, n_modes),
          natural_frequencies(damaged.mass, damaged.stiffness, n_modes)};
}

ModalDataset sample_dataset(const ModalSignature& signature, int n_reps, double noise_coeff,
                            std::uint64_t rng_seed, int domain_index) {
  if (n_reps < 1) throw DomainError("n_reps must be at least 1");
  if (!(noise_coeff >= 0.0) || !std::isfinite(noise_coeff)) {
    throw DomainError("noise_coeff must be non-negative");
  }
  const auto dim = signature.healthy.size();
  if (signature.damaged.size() != dim) throw DomainError("signature dimensions differ");

  ModalDataset ds;
  ds.features.resize(2 * n_reps, dim);
  ds.condition_labels.reserve(2 * n_reps);
  ds.label_visible.assign(2 * n_reps, true);
  ds.domain_index = domain_index;

  Rng rng(mix_seed(rng_seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int block = 0; block < 2; ++block) {
    const Eigen::VectorXd& mean = block == 0 ? signature.healthy : signature.damaged;
    const auto cond = block == 0 ? Condition::healthy : Condition::damaged;
    for (int r = 0; r < n_reps; ++r) {
      const int row = block * n_reps + r;
      for (Eigen::Index j = 0; j < dim; ++j) {
        ds.features(row, j) = mean(j) + noise_coeff * mean(j) * normal(rng);
      }
      ds.condition_labels.push_back(cond);
    }
  }
  return ds;
}

ModalDataset generate_dataset(const StructureParams& params, const DamageSpec& damage, int n_reps,
                              double noise_coeff, std::uint64_t rng_seed, int n_elements) {
  if (!(noise_coeff >= 0.0)) throw DomainError("noise_coeff must be non-negative");
  return sample_dataset(modal_signature(params, damage, 15, n_elements), n_reps, noise_coeff,
                        rng_seed);
}

std::vector<double> chain_positions(int n_structures) {
  if (n_structures < 1) throw DomainError("chain needs at least one structure");
  std::vector<double> t(n_structures, 0.0);
  for (int i = 1; i < n_structures; ++i) t[i] = static_cast<double>(i) / (n_structures - 1);
  return t;
}

}  // namespace gfkchain::sim
