#include "kscheck/quantum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kscheck/rng.hpp"

namespace kscheck {

namespace {

Eigen::Vector3d to_eigen(const Vector3d& v) {
  return Eigen::Vector3d(v[0], v[1], v[2]);
}

Matrix3d from_eigen(const Eigen::Matrix3d& m) {
  Matrix3d out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = m(i, j);
  return out;
}

// I - v v^T without any unit-length gate; callers validate their inputs.
Eigen::Matrix3d complement_projector(const Vector3d& v) {
  const Eigen::Vector3d e = to_eigen(v);
  return Eigen::Matrix3d::Identity() - e * e.transpose();
}

void require_orthonormal(const std::array<Vector3d, 3>& triple,
                         double tolerance, const char* who) {
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      const double target = i == j ? 1.0 : 0.0;
      const double d = to_eigen(triple[i]).dot(to_eigen(triple[j]));
      if (std::abs(d - target) > tolerance)
        throw std::domain_error(std::string(who) +
                                " requires an orthonormal triple");
    }
  }
}

void require_unit(const Vector3d& w, double tolerance, const char* who) {
  if (std::abs(to_eigen(w).norm() - 1.0) > tolerance)
    throw std::domain_error(std::string(who) + " requires a unit direction");
}

using Matrix9d = Eigen::Matrix<double, 9, 9>;
using Vector9d = Eigen::Matrix<double, 9, 1>;

// Component (i, j) of the product space sits at index 3*i + j, so
// K(3i+j, 3m+l) = A(i, m) * B(j, l).
Matrix9d kron(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  Matrix9d k;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int m = 0; m < 3; ++m)
        for (int l = 0; l < 3; ++l) k(3 * i + j, 3 * m + l) = a(i, m) * b(j, l);
  return k;
}

Vector9d singlet_eigen() {
  Vector9d psi = Vector9d::Zero();
  psi(0) = psi(4) = psi(8) = 1.0 / std::sqrt(3.0);
  return psi;
}

}  // namespace

Matrix3d squared_spin(const Vector3d& direction) {
  require_unit(direction, 1e-12, "squared_spin");
  return from_eigen(complement_projector(direction));
}

SpinAxiomReport verify_spin_axiom(const std::array<Vector3d, 3>& triple) {
  require_orthonormal(triple, 1e-9, "verify_spin_axiom");

  std::array<Eigen::Matrix3d, 3> ops;
  for (int i = 0; i < 3; ++i) ops[i] = complement_projector(triple[i]);

  SpinAxiomReport report;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const Eigen::Matrix3d comm = ops[i] * ops[j] - ops[j] * ops[i];
      report.commutator_defect =
          std::max(report.commutator_defect, comm.cwiseAbs().maxCoeff());
    }
  }

  const Eigen::Matrix3d sum = ops[0] + ops[1] + ops[2];
  report.sum_defect =
      (sum - 2.0 * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();

  for (const auto& op : ops) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(op);
    const Eigen::Vector3d ev = solver.eigenvalues();  // ascending
    const double defect =
        std::max({std::abs(ev(0)), std::abs(ev(1) - 1.0), std::abs(ev(2) - 1.0)});
    report.spectrum_defect = std::max(report.spectrum_defect, defect);
  }
  return report;
}

TwinState singlet_state() {
  TwinState psi{};
  const Vector9d v = singlet_eigen();
  for (int i = 0; i < 9; ++i) psi[i] = v(i);
  return psi;
}

std::array<int, 3> OutcomeDistribution::pattern(int zero_index) {
  std::array<int, 3> p{1, 1, 1};
  p[zero_index] = 0;
  return p;
}

double OutcomeDistribution::a_marginal(int zero_index) const {
  return probability(zero_index, 0) + probability(zero_index, 1);
}

double OutcomeDistribution::b_marginal(int b_outcome) const {
  return probability(0, b_outcome) + probability(1, b_outcome) +
         probability(2, b_outcome);
}

double OutcomeDistribution::total() const {
  return b_marginal(0) + b_marginal(1);
}

double OutcomeDistribution::disagreement_probability(int member_index) const {
  // The a result's component at member_index is 0 exactly when its zero sits
  // there, so the disagreeing b outcome is 1 in that case and 0 otherwise.
  double p = 0.0;
  for (int k = 0; k < 3; ++k) p += probability(k, k == member_index ? 1 : 0);
  return p;
}

OutcomeDistribution joint_distribution(const std::array<Vector3d, 3>& triple_a,
                                       const Vector3d& w_b) {
  require_orthonormal(triple_a, 1e-9, "joint_distribution");
  require_unit(w_b, 1e-9, "joint_distribution");

  // Spectral projectors: member i contributes its eigenline t t^T for
  // eigenvalue 0 and the complement for eigenvalue 1; the joint projector of
  // an outcome triple is the product over the commuting family.
  std::array<Eigen::Matrix3d, 3> line;
  std::array<Eigen::Matrix3d, 3> comp;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d t = to_eigen(triple_a[i]);
    line[i] = t * t.transpose();
    comp[i] = Eigen::Matrix3d::Identity() - line[i];
  }

  const Eigen::Vector3d w = to_eigen(w_b);
  const Eigen::Matrix3d b_zero = w * w.transpose();
  const Eigen::Matrix3d b_one = Eigen::Matrix3d::Identity() - b_zero;

  const Vector9d psi = singlet_eigen();
  OutcomeDistribution dist;
  for (int k = 0; k < 3; ++k) {
    Eigen::Matrix3d joint = Eigen::Matrix3d::Identity();
    for (int i = 0; i < 3; ++i) joint *= (i == k) ? line[i] : comp[i];
    dist.cell[k][0] = psi.dot(kron(joint, b_zero) * psi);
    dist.cell[k][1] = psi.dot(kron(joint, b_one) * psi);
  }
  return dist;
}

double SampleReport::empirical(int zero_index, int b_outcome) const {
  if (runs == 0) return 0.0;
  return static_cast<double>(counts[zero_index][b_outcome]) /
         static_cast<double>(runs);
}

std::int64_t SampleReport::agreement_count(int member_index) const {
  std::int64_t total = 0;
  for (int k = 0; k < 3; ++k) total += counts[k][k == member_index ? 0 : 1];
  return total;
}

bool SampleReport::within_three_sigma() const {
  if (runs <= 0) return false;
  for (int k = 0; k < 3; ++k) {
    for (int b = 0; b < 2; ++b) {
      const double p = std::clamp(exact.probability(k, b), 0.0, 1.0);
      const double band =
          3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(runs));
      if (std::abs(empirical(k, b) - p) > band) return false;
    }
  }
  return true;
}

SampleReport sample_run(const std::array<Vector3d, 3>& triple_a,
                        const Vector3d& w_b, std::int64_t n,
                        std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_run requires n >= 1");

  SampleReport report;
  report.exact = joint_distribution(triple_a, w_b);
  report.runs = n;
  report.seed = seed;
  report.log.reserve(n);

  // Cells in a fixed order (zero index major, b outcome minor); tiny negative
  // rounding residue is clamped so it can never be drawn.
  std::array<double, 6> weight{};
  int last_positive = 0;
  for (int c = 0; c < 6; ++c) {
    weight[c] = std::max(report.exact.probability(c / 2, c % 2), 0.0);
    if (weight[c] > 0.0) last_positive = c;
  }

  DeterministicRng rng(seed);
  for (std::int64_t run = 0; run < n; ++run) {
    const double u = rng.next_unit();
    int chosen = last_positive;
    double cumulative = 0.0;
    for (int c = 0; c < 6; ++c) {
      cumulative += weight[c];
      if (u < cumulative) {
        chosen = c;
        break;
      }
    }
    const int k = chosen / 2;
    const int b = chosen % 2;
    ++report.counts[k][b];
    report.log.push_back(SampleRecord{run, k, b});
  }
  return report;
}

}  // namespace kscheck
