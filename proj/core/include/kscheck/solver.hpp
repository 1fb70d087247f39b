#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kscheck/peres.hpp"

namespace kscheck {

// Constraint system for {0,1} labelings of a ray set:
//   edge (i, j):      the two rays are never both 0
//   triple (i, j, k): exactly one of the three rays is 0
// Orthogonal pairs whose completing third direction lies outside the set
// enter only as edges; the outside direction absorbs the zero, so the pair
// itself is merely forbidden from carrying two.
struct ColoringConstraints {
  int ray_count = 0;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triples;

  int constraint_count() const {
    return static_cast<int>(edges.size() + triples.size());
  }

  // Constraint ids: edges first in list order, then triples.
  bool is_edge_id(int id) const { return id >= 0 && id < static_cast<int>(edges.size()); }

  // FNV-1a over ray count, edge list and triple list. Two systems built by
  // the same deterministic pipeline hash equal; any structural difference
  // changes the digest.
  std::uint64_t hash() const;
};

ColoringConstraints constraints_from_configuration(const PeresConfiguration& config);

enum class StepKind { Branch, Propagate, Conflict, Backtrack };

// One line of a refutation trace.
//   Branch:    ray, value, level (stack depth after the branch, 1-based)
//   Propagate: ray, value, reason (constraint id that forces it)
//   Conflict:  reason (constraint id violated by the current assignment)
//   Backtrack: level (depth of the frame being popped)
struct CertificateStep {
  StepKind kind = StepKind::Branch;
  int ray = -1;
  int value = -1;
  int reason = -1;
  int level = -1;

  friend bool operator==(const CertificateStep&, const CertificateStep&) = default;
};

CertificateStep branch_step(int ray, int value, int level);
CertificateStep propagate_step(int ray, int value, int reason);
CertificateStep conflict_step(int reason);
CertificateStep backtrack_step(int level);

// Replayable proof that a constraint system admits no valid labeling. The
// steps spell out a complete two-phase branching tree; verification replays
// them against the constraints without trusting the solver.
struct UnsatCertificate {
  int ray_count = 0;
  std::uint64_t constraints_hash = 0;
  std::vector<CertificateStep> steps;
};

struct SearchStats {
  std::int64_t branches = 0;
  std::int64_t propagations = 0;
  std::int64_t conflicts = 0;
  int max_depth = 0;
};

struct SearchOptions {
  bool certify = false;  // record the refutation trace when unsatisfiable
};

struct SearchResult {
  bool satisfiable = false;
  std::vector<int> model;  // one 0/1 per ray when satisfiable, empty otherwise
  SearchStats stats;
  std::optional<UnsatCertificate> certificate;
};

// Exhaustive search for a valid labeling. Deterministic: branches on the
// lowest unassigned ray, value 1 before value 0, and propagates constraints
// in id order, so traces and stats are identical across runs and platforms.
// Throws std::invalid_argument on malformed constraints (indices out of
// range, unsorted or degenerate members).
SearchResult search_101(const ColoringConstraints& constraints, const SearchOptions& options = {});

struct VerificationResult {
  bool valid = false;
  std::string error;  // first defect found; empty when valid
  std::int64_t steps_checked = 0;
};

// Replays a certificate against the constraints: every propagation must be
// forced, every conflict real, every branch two-phase and well-leveled, and
// the trace must end with the root refuted. Shares no state or search code
// with search_101.
VerificationResult verify_certificate(const ColoringConstraints& constraints,
                                      const UnsatCertificate& certificate);

// One symmetry-justified prefix assignment: inside the triple with
// constraint id `triple_id`, the ray `ray` was pinned to 0 without
// branching, because the two recorded constraint automorphisms move `ray`
// onto the other two members while mapping the triple to itself and
// preserving every earlier assignment's label. Any labeling extending the
// prefix can thus be remapped to one with ray = 0.
struct WlogFixing {
  int triple_id = -1;  // constraint id (triples follow the edges)
  int ray = -1;
  std::vector<int> to_second;  // ray permutation with to_second[ray] = second member
  std::vector<int> to_third;
  std::vector<CertificateStep> propagations;  // forced consequences of ray = 0
};

struct PrunedCertificate {
  int ray_count = 0;
  std::uint64_t constraints_hash = 0;
  std::vector<WlogFixing> fixings;
  std::vector<CertificateStep> tail;  // plain refutation of the fixed prefix
};

// Search with symmetry pruning: greedily pins one ray of a fully unassigned
// triple to 0 whenever the candidate symmetries justify it, then refutes the
// remainder by plain search. Only permutations that are genuine constraint
// automorphisms are used. Throws std::invalid_argument if the system turns
// out to be satisfiable (a model exists, so there is nothing to certify).
PrunedCertificate search_101_wlog(const ColoringConstraints& constraints,
                                  const std::vector<SymmetryElement>& symmetries);

// Checks a pruned certificate directly: each fixing's permutations must be
// constraint automorphisms with the claimed mapping and stabilization
// properties, each recorded propagation must be forced, and the tail must
// refute the prefix.
VerificationResult verify_pruned_certificate(const ColoringConstraints& constraints,
                                             const PrunedCertificate& certificate);

// Rewrites a pruned certificate into a plain one by materializing, for each
// fixing, the branches on the other two triple members and replaying the
// recorded subtree through the justifying permutations. The result is
// checkable by verify_certificate with no symmetry reasoning at all.
UnsatCertificate expand_pruned_certificate(const ColoringConstraints& constraints,
                                           const PrunedCertificate& pruned);

}  // namespace kscheck
