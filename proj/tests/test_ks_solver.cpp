#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "kscheck/exact.hpp"
#include "kscheck/peres.hpp"
#include "kscheck/rng.hpp"
#include "kscheck/solver.hpp"

using kscheck::build_peres_configuration;
using kscheck::ColoringConstraints;
using kscheck::configuration_from_rays;
using kscheck::constraints_from_configuration;
using kscheck::DeterministicRng;
using kscheck::expand_pruned_certificate;
using kscheck::PeresConfiguration;
using kscheck::PrunedCertificate;
using kscheck::Ray;
using kscheck::search_101;
using kscheck::search_101_wlog;
using kscheck::SearchOptions;
using kscheck::SearchResult;
using kscheck::StepKind;
using kscheck::symmetry_group;
using kscheck::UnsatCertificate;
using kscheck::verify_certificate;
using kscheck::verify_pruned_certificate;

namespace {

// Reference semantics, written independently of the solver: a labeling is
// valid when no edge carries two zeros and every triple carries exactly one.
bool labeling_valid(const ColoringConstraints& c, const std::vector<int>& labels) {
  for (const auto& e : c.edges) {
    if (labels[e[0]] == 0 && labels[e[1]] == 0) return false;
  }
  for (const auto& t : c.triples) {
    const int zeros = (labels[t[0]] == 0) + (labels[t[1]] == 0) + (labels[t[2]] == 0);
    if (zeros != 1) return false;
  }
  return true;
}

// Exhaustive truth: counts valid labelings by trying all 2^n.
std::int64_t count_by_enumeration(const ColoringConstraints& c) {
  REQUIRE(c.ray_count <= 24);
  std::int64_t count = 0;
  std::vector<int> labels(c.ray_count);
  for (std::uint64_t word = 0; word < (std::uint64_t{1} << c.ray_count); ++word) {
    for (int i = 0; i < c.ray_count; ++i) labels[i] = (word >> i) & 1;
    if (labeling_valid(c, labels)) ++count;
  }
  return count;
}

// A random sub-configuration of the full 33-ray set.
ColoringConstraints random_subsystem(DeterministicRng& rng, int size) {
  static const PeresConfiguration full = build_peres_configuration();
  std::vector<int> ids(full.ray_count());
  for (int i = 0; i < full.ray_count(); ++i) ids[i] = i;
  // partial shuffle
  for (int i = 0; i < size; ++i) {
    const int j = i + static_cast<int>(rng.next_below(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  std::vector<Ray> rays;
  for (int i = 0; i < size; ++i) rays.push_back(full.rays[ids[i]]);
  return constraints_from_configuration(configuration_from_rays(std::move(rays)));
}

ColoringConstraints peres_constraints() {
  return constraints_from_configuration(build_peres_configuration());
}

}  // namespace

TEST_CASE("constraints from the configuration carry the full structure") {
  const ColoringConstraints c = peres_constraints();
  CHECK(c.ray_count == 33);
  CHECK(c.edges.size() == 72);
  CHECK(c.triples.size() == 16);
  CHECK(c.constraint_count() == 88);
}

TEST_CASE("the constraint hash is stable and sensitive") {
  const ColoringConstraints a = peres_constraints();
  const ColoringConstraints b = peres_constraints();
  CHECK(a.hash() == b.hash());

  ColoringConstraints mutated = a;
  mutated.edges[0] = {0, 2};
  CHECK(mutated.hash() != a.hash());

  mutated = a;
  mutated.triples.pop_back();
  CHECK(mutated.hash() != a.hash());

  mutated = a;
  mutated.ray_count = 34;
  CHECK(mutated.hash() != a.hash());
}

TEST_CASE("malformed constraint systems are rejected") {
  ColoringConstraints bad;
  bad.ray_count = 3;
  bad.edges.push_back({2, 1});
  CHECK_THROWS_AS(search_101(bad), std::invalid_argument);

  bad.edges.clear();
  bad.edges.push_back({0, 3});
  CHECK_THROWS_AS(search_101(bad), std::invalid_argument);

  bad.edges.clear();
  bad.triples.push_back({0, 1, 1});
  CHECK_THROWS_AS(search_101(bad), std::invalid_argument);
}

TEST_CASE("a single triple is satisfiable with exactly one zero") {
  ColoringConstraints c;
  c.ray_count = 3;
  c.edges = {{0, 1}, {0, 2}, {1, 2}};
  c.triples = {{0, 1, 2}};
  CHECK(count_by_enumeration(c) == 3);

  const SearchResult result = search_101(c);
  REQUIRE(result.satisfiable);
  REQUIRE(result.model.size() == 3);
  CHECK(labeling_valid(c, result.model));
  // deterministic branching tries 1 first, so ray 0 keeps its 1
  CHECK(result.model == std::vector<int>{1, 1, 0});
}

TEST_CASE("an unconstrained system is satisfiable with the all ones labeling") {
  ColoringConstraints c;
  c.ray_count = 4;
  const SearchResult result = search_101(c);
  REQUIRE(result.satisfiable);
  CHECK(result.model == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("search agrees with exhaustive enumeration on random geometric subsystems") {
  DeterministicRng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const int size = 6 + static_cast<int>(rng.next_below(13));  // 6 .. 18 rays
    const ColoringConstraints c = random_subsystem(rng, size);
    const std::int64_t models = count_by_enumeration(c);
    const SearchResult result = search_101(c, SearchOptions{.certify = true});
    CAPTURE(trial);
    CAPTURE(c.ray_count);
    CHECK(result.satisfiable == (models > 0));
    if (result.satisfiable) {
      CHECK(labeling_valid(c, result.model));
      CHECK_FALSE(result.certificate.has_value());
    } else {
      REQUIRE(result.certificate.has_value());
      const auto verdict = verify_certificate(c, *result.certificate);
      CAPTURE(verdict.error);
      CHECK(verdict.valid);
    }
  }
}

TEST_CASE("search agrees with exhaustive enumeration on random synthetic systems") {
  DeterministicRng rng(6021);
  int unsat_seen = 0;
  int sat_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    ColoringConstraints c;
    c.ray_count = 5 + static_cast<int>(rng.next_below(4));  // 5 .. 8 rays
    const int triple_count = 3 + static_cast<int>(rng.next_below(6));
    std::set<std::array<int, 3>> triples;
    while (static_cast<int>(triples.size()) < triple_count) {
      int a = static_cast<int>(rng.next_below(c.ray_count));
      int b = static_cast<int>(rng.next_below(c.ray_count));
      int d = static_cast<int>(rng.next_below(c.ray_count));
      std::array<int, 3> t = {a, b, d};
      std::sort(t.begin(), t.end());
      if (t[0] == t[1] || t[1] == t[2]) continue;
      triples.insert(t);
    }
    c.triples.assign(triples.begin(), triples.end());
    std::set<std::array<int, 2>> edges;
    for (const auto& t : c.triples) {
      edges.insert({t[0], t[1]});
      edges.insert({t[0], t[2]});
      edges.insert({t[1], t[2]});
    }
    c.edges.assign(edges.begin(), edges.end());

    const std::int64_t models = count_by_enumeration(c);
    const SearchResult result = search_101(c, SearchOptions{.certify = true});
    CAPTURE(trial);
    CHECK(result.satisfiable == (models > 0));
    if (result.satisfiable) {
      ++sat_seen;
      CHECK(labeling_valid(c, result.model));
    } else {
      ++unsat_seen;
      REQUIRE(result.certificate.has_value());
      const auto verdict = verify_certificate(c, *result.certificate);
      CAPTURE(verdict.error);
      CHECK(verdict.valid);
    }
  }
  // the batch must exercise both outcomes to mean anything
  CHECK(sat_seen > 0);
  CHECK(unsat_seen > 0);
}

TEST_CASE("the verdict is invariant under constraint reordering") {
  // propagation runs in constraint id order, so shuffling the lists exercises
  // different deduction orders; the fixpoint reached must decide the same way
  DeterministicRng rng(7177);
  const PeresConfiguration config = build_peres_configuration();
  const ColoringConstraints base = constraints_from_configuration(config);

  for (int trial = 0; trial < 8; ++trial) {
    ColoringConstraints shuffled = base;
    for (std::size_t i = shuffled.edges.size(); i > 1; --i)
      std::swap(shuffled.edges[i - 1], shuffled.edges[rng.next_below(i)]);
    for (std::size_t i = shuffled.triples.size(); i > 1; --i)
      std::swap(shuffled.triples[i - 1], shuffled.triples[rng.next_below(i)]);

    const SearchResult result = search_101(shuffled, SearchOptions{.certify = true});
    CHECK(!result.satisfiable);
    REQUIRE(result.certificate.has_value());
    CHECK(verify_certificate(shuffled, *result.certificate).valid);
  }

  // and on a satisfiable system every ordering must yield a valid labeling
  ColoringConstraints sat;
  sat.ray_count = 6;
  sat.triples = {{0, 1, 2}, {1, 2, 3}, {2, 3, 4}, {3, 4, 5}};
  sat.edges = {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 5}};
  for (int trial = 0; trial < 8; ++trial) {
    ColoringConstraints shuffled = sat;
    for (std::size_t i = shuffled.edges.size(); i > 1; --i)
      std::swap(shuffled.edges[i - 1], shuffled.edges[rng.next_below(i)]);
    for (std::size_t i = shuffled.triples.size(); i > 1; --i)
      std::swap(shuffled.triples[i - 1], shuffled.triples[rng.next_below(i)]);

    const SearchResult result = search_101(shuffled);
    REQUIRE(result.satisfiable);
    CHECK(labeling_valid(shuffled, result.model));
  }
}

TEST_CASE("a seven point projective plane triple system is unsatisfiable") {
  // each of the 21 point pairs lies on exactly one of the 7 lines, so a
  // valid labeling would need exactly one zero per line: counting
  // line-zero incidences gives 7 = 3 * (number of zeros), impossible
  ColoringConstraints c;
  c.ray_count = 7;
  c.triples = {{0, 1, 2}, {0, 3, 4}, {0, 5, 6}, {1, 3, 5}, {1, 4, 6}, {2, 3, 6}, {2, 4, 5}};
  std::set<std::array<int, 2>> edges;
  for (const auto& t : c.triples) {
    edges.insert({t[0], t[1]});
    edges.insert({t[0], t[2]});
    edges.insert({t[1], t[2]});
  }
  c.edges.assign(edges.begin(), edges.end());
  CHECK(c.edges.size() == 21);

  CHECK(count_by_enumeration(c) == 0);
  const SearchResult result = search_101(c, SearchOptions{.certify = true});
  CHECK_FALSE(result.satisfiable);
  REQUIRE(result.certificate.has_value());
  const auto verdict = verify_certificate(c, *result.certificate);
  CAPTURE(verdict.error);
  CHECK(verdict.valid);
}

TEST_CASE("the 33 ray system admits no labeling") {
  const ColoringConstraints c = peres_constraints();
  const SearchResult result = search_101(c);
  CHECK_FALSE(result.satisfiable);
  CHECK(result.model.empty());
  CHECK(result.stats.branches > 0);
  CHECK(result.stats.conflicts > 0);
}

TEST_CASE("the 33 ray refutation certificate verifies") {
  const ColoringConstraints c = peres_constraints();
  const SearchResult result = search_101(c, SearchOptions{.certify = true});
  REQUIRE_FALSE(result.satisfiable);
  REQUIRE(result.certificate.has_value());
  CHECK(result.certificate->ray_count == 33);
  CHECK(result.certificate->constraints_hash == c.hash());

  const auto verdict = verify_certificate(c, *result.certificate);
  CAPTURE(verdict.error);
  CHECK(verdict.valid);
  CHECK(verdict.steps_checked == static_cast<std::int64_t>(result.certificate->steps.size()));
}

TEST_CASE("search and certificate are deterministic across runs") {
  const ColoringConstraints c = peres_constraints();
  const SearchResult a = search_101(c, SearchOptions{.certify = true});
  const SearchResult b = search_101(c, SearchOptions{.certify = true});
  REQUIRE(a.certificate.has_value());
  REQUIRE(b.certificate.has_value());
  CHECK(a.certificate->steps == b.certificate->steps);
  CHECK(a.stats.branches == b.stats.branches);
  CHECK(a.stats.propagations == b.stats.propagations);
  CHECK(a.stats.conflicts == b.stats.conflicts);
  CHECK(a.stats.max_depth == b.stats.max_depth);
}

TEST_CASE("tampered certificates are rejected with a located defect") {
  const ColoringConstraints c = peres_constraints();
  const UnsatCertificate good = *search_101(c, SearchOptions{.certify = true}).certificate;
  REQUIRE(verify_certificate(c, good).valid);

  SUBCASE("wrong hash") {
    UnsatCertificate bad = good;
    bad.constraints_hash ^= 1;
    const auto verdict = verify_certificate(c, bad);
    CHECK_FALSE(verdict.valid);
    CHECK_FALSE(verdict.error.empty());
  }
  SUBCASE("wrong ray count") {
    UnsatCertificate bad = good;
    bad.ray_count = 32;
    CHECK_FALSE(verify_certificate(c, bad).valid);
  }
  SUBCASE("truncated trace") {
    UnsatCertificate bad = good;
    bad.steps.pop_back();
    CHECK_FALSE(verify_certificate(c, bad).valid);
  }
  SUBCASE("flipped propagation value") {
    UnsatCertificate bad = good;
    for (auto& step : bad.steps) {
      if (step.kind == StepKind::Propagate) {
        step.value = 1 - step.value;
        break;
      }
    }
    const auto verdict = verify_certificate(c, bad);
    CHECK_FALSE(verdict.valid);
    CHECK(verdict.error.find("step") != std::string::npos);
  }
  SUBCASE("unforced propagation injected") {
    UnsatCertificate bad = good;
    bad.steps.insert(bad.steps.begin(), kscheck::propagate_step(5, 1, 0));
    CHECK_FALSE(verify_certificate(c, bad).valid);
  }
  SUBCASE("conflict on a satisfied constraint") {
    UnsatCertificate bad = good;
    bad.steps.insert(bad.steps.begin(), kscheck::conflict_step(0));
    CHECK_FALSE(verify_certificate(c, bad).valid);
  }
  SUBCASE("branch level skipped") {
    UnsatCertificate bad = good;
    for (auto& step : bad.steps) {
      if (step.kind == StepKind::Branch) {
        step.level += 1;
        break;
      }
    }
    CHECK_FALSE(verify_certificate(c, bad).valid);
  }
  SUBCASE("second phase branch dropped") {
    // removing the complement branch (and its subtree) leaves the machine
    // waiting for it, so the trace cannot be accepted
    UnsatCertificate bad = good;
    std::size_t second = 0;
    for (std::size_t i = 1; i < bad.steps.size(); ++i) {
      if (bad.steps[i].kind == StepKind::Branch && bad.steps[i].value == 0) {
        second = i;
        break;
      }
    }
    REQUIRE(second > 0);
    bad.steps.erase(bad.steps.begin() + second);
    CHECK_FALSE(verify_certificate(c, bad).valid);
  }
  SUBCASE("branch on an assigned ray") {
    UnsatCertificate bad = good;
    REQUIRE(bad.steps[0].kind == StepKind::Branch);
    bad.steps.insert(bad.steps.begin() + 1, kscheck::branch_step(bad.steps[0].ray, 1, 2));
    CHECK_FALSE(verify_certificate(c, bad).valid);
  }
}

TEST_CASE("a certificate does not transfer to a different system") {
  const ColoringConstraints full = peres_constraints();
  const UnsatCertificate cert = *search_101(full, SearchOptions{.certify = true}).certificate;

  ColoringConstraints other = full;
  other.edges.pop_back();
  const auto verdict = verify_certificate(other, cert);
  CHECK_FALSE(verdict.valid);
  CHECK(verdict.error.find("different constraint system") != std::string::npos);
}

TEST_CASE("symmetry pruned search fixes at least one ray and stays verifiable") {
  const PeresConfiguration config = build_peres_configuration();
  const ColoringConstraints c = constraints_from_configuration(config);
  const auto symmetries = symmetry_group(config);

  const PrunedCertificate pruned = search_101_wlog(c, symmetries);
  CHECK(pruned.ray_count == 33);
  CHECK(pruned.constraints_hash == c.hash());
  REQUIRE_FALSE(pruned.fixings.empty());

  for (const auto& fixing : pruned.fixings) {
    CHECK(fixing.triple_id >= static_cast<int>(c.edges.size()));
    CHECK(fixing.to_second.size() == 33);
    CHECK(fixing.to_third.size() == 33);
  }

  const auto direct = verify_pruned_certificate(c, pruned);
  CAPTURE(direct.error);
  CHECK(direct.valid);
}

TEST_CASE("the pruned trace is shorter than the plain certificate") {
  const PeresConfiguration config = build_peres_configuration();
  const ColoringConstraints c = constraints_from_configuration(config);
  const UnsatCertificate plain = *search_101(c, SearchOptions{.certify = true}).certificate;
  const PrunedCertificate pruned = search_101_wlog(c, symmetry_group(config));

  std::size_t pruned_steps = pruned.tail.size();
  for (const auto& fixing : pruned.fixings) pruned_steps += fixing.propagations.size() + 1;
  CAPTURE(plain.steps.size());
  CAPTURE(pruned_steps);
  CHECK(pruned_steps < plain.steps.size());
}

TEST_CASE("expanding the pruned certificate yields a plainly verifiable one") {
  const PeresConfiguration config = build_peres_configuration();
  const ColoringConstraints c = constraints_from_configuration(config);
  const PrunedCertificate pruned = search_101_wlog(c, symmetry_group(config));

  const UnsatCertificate expanded = expand_pruned_certificate(c, pruned);
  CHECK(expanded.constraints_hash == c.hash());
  const auto verdict = verify_certificate(c, expanded);
  CAPTURE(verdict.error);
  CHECK(verdict.valid);

  // expansion triples the work per fixing, so it must be strictly longer
  CHECK(expanded.steps.size() > pruned.tail.size());
}

TEST_CASE("pruned search refuses satisfiable systems") {
  ColoringConstraints c;
  c.ray_count = 3;
  c.edges = {{0, 1}, {0, 2}, {1, 2}};
  c.triples = {{0, 1, 2}};
  const PeresConfiguration axes = configuration_from_rays(
      {Ray::canonicalize({kscheck::ExactScalar::one(), {}, {}}),
       Ray::canonicalize({{}, kscheck::ExactScalar::one(), {}}),
       Ray::canonicalize({{}, {}, kscheck::ExactScalar::one()})});
  CHECK_THROWS_AS(search_101_wlog(c, symmetry_group(axes)), std::invalid_argument);
}

TEST_CASE("tampered pruned certificates are rejected") {
  const PeresConfiguration config = build_peres_configuration();
  const ColoringConstraints c = constraints_from_configuration(config);
  const PrunedCertificate good = search_101_wlog(c, symmetry_group(config));
  REQUIRE(verify_pruned_certificate(c, good).valid);

  SUBCASE("identity permutation cannot justify a fixing") {
    PrunedCertificate bad = good;
    std::vector<int> identity(33);
    for (int i = 0; i < 33; ++i) identity[i] = i;
    bad.fixings[0].to_second = identity;
    const auto verdict = verify_pruned_certificate(c, bad);
    CHECK_FALSE(verdict.valid);
    CHECK(verdict.error.find("fixing 1") != std::string::npos);
  }
  SUBCASE("a non automorphism permutation is rejected") {
    PrunedCertificate bad = good;
    std::swap(bad.fixings[0].to_second[0], bad.fixings[0].to_second[4]);
    CHECK_FALSE(verify_pruned_certificate(c, bad).valid);
  }
  SUBCASE("fixing an edge id is rejected") {
    PrunedCertificate bad = good;
    bad.fixings[0].triple_id = 0;
    CHECK_FALSE(verify_pruned_certificate(c, bad).valid);
  }
  SUBCASE("a foreign propagation in the fixing is rejected") {
    PrunedCertificate bad = good;
    bad.fixings[0].propagations.push_back(kscheck::branch_step(30, 1, 1));
    CHECK_FALSE(verify_pruned_certificate(c, bad).valid);
  }
  SUBCASE("truncated tail is rejected") {
    PrunedCertificate bad = good;
    bad.tail.pop_back();
    CHECK_FALSE(verify_pruned_certificate(c, bad).valid);
  }
}

TEST_CASE("pruned search on satisfiable subsystems throws like the plain verdict says") {
  DeterministicRng rng(77);
  for (int trial = 0; trial < 8; ++trial) {
    const int size = 8 + static_cast<int>(rng.next_below(9));
    static const PeresConfiguration full = build_peres_configuration();
    std::vector<int> ids(full.ray_count());
    for (int i = 0; i < full.ray_count(); ++i) ids[i] = i;
    for (int i = 0; i < size; ++i) {
      const int j = i + static_cast<int>(rng.next_below(ids.size() - i));
      std::swap(ids[i], ids[j]);
    }
    std::vector<Ray> rays;
    for (int i = 0; i < size; ++i) rays.push_back(full.rays[ids[i]]);
    const PeresConfiguration sub = configuration_from_rays(std::move(rays));
    const ColoringConstraints c = constraints_from_configuration(sub);

    if (search_101(c).satisfiable) {
      CHECK_THROWS_AS(search_101_wlog(c, symmetry_group(sub)), std::invalid_argument);
    } else {
      const PrunedCertificate pruned = search_101_wlog(c, symmetry_group(sub));
      const auto direct = verify_pruned_certificate(c, pruned);
      CAPTURE(direct.error);
      CHECK(direct.valid);
    }
  }
}

TEST_CASE("pruned search handles an enlarged unsatisfiable configuration") {
  // adding the cube's body diagonals keeps the set signed-permutation
  // invariant and only adds constraints, so it stays unsatisfiable
  const PeresConfiguration base = build_peres_configuration();
  std::vector<Ray> rays = base.rays;
  for (const Ray& axis : kscheck::white_cube_axes()) rays.push_back(axis);
  const PeresConfiguration enlarged = configuration_from_rays(std::move(rays));
  REQUIRE(enlarged.ray_count() == 37);

  const ColoringConstraints c = constraints_from_configuration(enlarged);
  REQUIRE_FALSE(search_101(c).satisfiable);

  const auto symmetries = symmetry_group(enlarged);
  CHECK(symmetries.size() == 48);
  const PrunedCertificate pruned = search_101_wlog(c, symmetries);
  CHECK_FALSE(pruned.fixings.empty());

  const auto direct = verify_pruned_certificate(c, pruned);
  CAPTURE(direct.error);
  CHECK(direct.valid);

  const auto expanded = expand_pruned_certificate(c, pruned);
  const auto plain = verify_certificate(c, expanded);
  CAPTURE(plain.error);
  CHECK(plain.valid);
}
