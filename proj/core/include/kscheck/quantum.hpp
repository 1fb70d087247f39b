#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace kscheck {

using Vector3d = std::array<double, 3>;
using Matrix3d = std::array<std::array<double, 3>, 3>;

// Squared spin component of a spin 1 particle along the unit direction w, in
// the real Cartesian representation: I - w w^T. Its eigenvalues are {0, 1, 1}
// with w spanning the 0-eigenspace. Throws std::domain_error unless
// | |w| - 1 | <= 1e-12.
Matrix3d squared_spin(const Vector3d& direction);

// Measured defects of the three operator identities behind the SPIN axiom for
// one orthonormal triple: the pairwise commutators vanish, the operators sum
// to 2I, and each spectrum is {0, 1, 1}. Together these force every joint
// outcome to be a permutation of (1, 0, 1).
struct SpinAxiomReport {
  double commutator_defect = 0.0;  // max |entry| over the three commutators
  double sum_defect = 0.0;         // max |entry| of (sum - 2I)
  double spectrum_defect = 0.0;    // max eigenvalue distance from (0, 1, 1)

  bool holds(double identity_tolerance = 1e-12,
             double spectrum_tolerance = 1e-10) const {
    return commutator_defect <= identity_tolerance &&
           sum_defect <= identity_tolerance &&
           spectrum_defect <= spectrum_tolerance;
  }
};

// Throws std::domain_error unless the triple is orthonormal within 1e-9.
SpinAxiomReport verify_spin_axiom(const std::array<Vector3d, 3>& triple);

// Two-particle state vector over the tensor product of two one-particle
// spaces; component (i, j) lives at index 3*i + j.
using TwinState = std::array<double, 9>;

// The total-spin-zero state (e1(x)e1 + e2(x)e2 + e3(x)e3) / sqrt(3). It is
// rotationally invariant: (R (x) R) psi = psi for every rotation R.
TwinState singlet_state();

// Joint Born distribution for one run of the twinned experiment: side a
// measures the commuting squared spin family of an orthonormal triple, side b
// measures the squared spin along a single direction. The a outcome is one of
// (0,1,1), (1,0,1), (1,1,0), identified below by the index of its zero; the b
// outcome is 0 or 1.
struct OutcomeDistribution {
  // cell[k][b]: probability that the triple result has its 0 at member k and
  // side b observes b.
  std::array<std::array<double, 2>, 3> cell{};

  // The triple result whose zero sits at member k, e.g. pattern(1) = (1,0,1).
  static std::array<int, 3> pattern(int zero_index);

  double probability(int zero_index, int b_outcome) const {
    return cell[static_cast<std::size_t>(zero_index)]
               [static_cast<std::size_t>(b_outcome)];
  }
  double a_marginal(int zero_index) const;
  double b_marginal(int b_outcome) const;
  double total() const;

  // Probability that side b's outcome differs from component member_index of
  // side a's result. Meaningful when side b's direction equals that member.
  double disagreement_probability(int member_index) const;
};

// Exact distribution via spectral projectors of the commuting family on side
// a and of the squared spin on side b, applied to the singlet state. Inputs
// must be orthonormal (the triple) and unit (the direction) within 1e-9,
// otherwise std::domain_error.
OutcomeDistribution joint_distribution(const std::array<Vector3d, 3>& triple_a,
                                       const Vector3d& w_b);

struct SampleRecord {
  std::int64_t run_index = 0;
  int zero_index = 0;  // a outcome is OutcomeDistribution::pattern(zero_index)
  int b_outcome = 0;
};

struct SampleReport {
  OutcomeDistribution exact;
  std::array<std::array<std::int64_t, 2>, 3> counts{};
  std::vector<SampleRecord> log;
  std::int64_t runs = 0;
  std::uint64_t seed = 0;

  double empirical(int zero_index, int b_outcome) const;

  // Runs whose b outcome equals component member_index of the a outcome.
  std::int64_t agreement_count(int member_index) const;

  // True when every cell's empirical frequency sits within three binomial
  // standard deviations of its exact probability.
  bool within_three_sigma() const;
};

// Draws n independent samples from joint_distribution(triple_a, w_b) with the
// seeded generator documented in rng.hpp (mt19937_64 consuming one 53-bit
// uniform draw per run), so identical inputs and seed reproduce the log
// bit for bit. Requires n >= 1 (std::invalid_argument otherwise); input
// validation as in joint_distribution.
SampleReport sample_run(const std::array<Vector3d, 3>& triple_a,
                        const Vector3d& w_b, std::int64_t n,
                        std::uint64_t seed);

}  // namespace kscheck
