#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "kscheck/exact.hpp"

namespace kscheck {

// Raised when a freshly built configuration fails one of its structural
// count invariants; indicates an implementation bug, never bad input.
class self_check_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An orthogonal pair inside the ray set together with the unique third
// direction (outside the set) completing it to a full orthogonal triple.
struct CompletionTriple {
  std::array<int, 2> pair;
  Ray third;
};

// A signed coordinate permutation mapping the ray set to itself, with the
// permutation of ray indices it induces.
struct SymmetryElement {
  std::array<std::array<ExactScalar, 3>, 3> matrix;
  std::vector<int> permutation;
};

// A set of rays with its full orthogonality structure. Construction sorts
// rays canonically (component-value class, then lexicographic), so indices
// are stable across runs and platforms.
struct PeresConfiguration {
  std::vector<Ray> rays;
  std::vector<std::array<int, 2>> orthogonal_pairs;   // i < j, exact dot zero
  std::vector<std::array<int, 3>> internal_triples;   // 3-cliques inside the set
  std::vector<CompletionTriple> completion_triples;   // pairs in no internal triple

  int ray_count() const { return static_cast<int>(rays.size()); }
  int triple_count() const {
    return static_cast<int>(internal_triples.size() + completion_triples.size());
  }

  std::optional<int> index_of(const Ray& r) const;

  // Members of triple `id` in position order: internal triples list their
  // three ray indices; completion triples list the pair then -1 for the
  // third (which is not part of the set).
  std::array<int, 3> triple_member_ids(int triple_id) const;
};

// The 13 symmetry axes of the axis-aligned cube: 3 face axes, 6 edge axes,
// 4 body diagonals.
std::vector<Ray> white_cube_axes();

struct BuildOptions {
  bool with_completions = true;
};

// The 33 directions: union of the symmetry axes of the three cubes obtained
// by rotating the axis-aligned cube 45 degrees about each coordinate axis.
// Verifies the 33/72/16/24 structural counts and throws self_check_error on
// any mismatch.
PeresConfiguration build_peres_configuration(const BuildOptions& options = {});

// Derives the full orthogonality structure for an arbitrary ray set
// (deduplicated and canonically sorted). Used for imported configurations.
PeresConfiguration configuration_from_rays(std::vector<Ray> rays,
                                           const BuildOptions& options = {});

// Number of (triple, ray) quadruple contexts: triple_count * ray_count.
std::int64_t quadruple_count(const PeresConfiguration& config);

// All signed coordinate-permutation matrices (48 candidates) that map the
// ray set to itself. Antipodal matrices induce equal index permutations.
std::vector<SymmetryElement> symmetry_group(const PeresConfiguration& config);

// Floating-point frame of one of the triples: three orthonormal directions
// plus the defining ray ids (-1 for a completion third).
struct TripleDirections {
  std::array<std::array<double, 3>, 3> unit;
  std::array<int, 3> ray_ids;
};
TripleDirections triple_directions(const PeresConfiguration& config, int triple_id);

struct PerturbationReport {
  double epsilon = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  int trials_preserved = 0;
  int trials_violated = 0;
  int first_violation_trial = -1;  // -1 when structure held in every trial
  bool structure_preserved() const { return trials_violated == 0; }
};

// Perturbs each ray's floating-point image by an angle <= epsilon (seeded,
// deterministic per trial index), rebuilds the near-orthogonality graph with
// tolerance max(3*epsilon, 1e-9) and checks that the edge set and triangle
// count survive. Requires 0 <= epsilon < 0.01.
PerturbationReport perturbation_check(const PeresConfiguration& config, double epsilon,
                                      int trials, std::uint64_t seed);

}  // namespace kscheck
