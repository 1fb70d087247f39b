#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "kscheck/peres.hpp"
#include "kscheck/solver.hpp"

namespace kscheck {

// Deterministic response tables for the twinned experiment: one outcome
// triple per configuration triple and one bit per ray. Entries are plain
// ints so that a rule's raw output can be recorded and judged; a valid
// a-side response has exactly one 0 and two 1s.
struct ResponseTables {
  std::vector<std::array<int, 3>> triple_responses;  // indexed by triple id
  std::vector<int> ray_responses;                    // indexed by ray id
};

// Quadruples pair every triple with every ray and are numbered from 1 in
// row-major order, so quadruple k covers triple (k-1) / ray_count and ray
// (k-1) % ray_count.
struct QuadrupleContext {
  std::int64_t quadruple_index = 0;
  int triple_id = 0;
  int ray_id = 0;
  int member_index = -1;  // position of the ray inside the triple, -1 if none
  std::array<int, 3> member_ray_ids{-1, -1, -1};
};

QuadrupleContext quadruple_context(const PeresConfiguration& config,
                                   std::int64_t quadruple_index);

struct QuadrupleViolation {
  enum class Kind { Spin, Twin };
  std::int64_t quadruple_index = 0;
  int triple_id = 0;
  int ray_id = 0;
  Kind kind = Kind::Spin;
};

// Scans quadruples in index order. A quadruple is violated when its triple's
// response is not a permutation of (1,0,1) or, if its ray is a member of its
// triple, when the response component there differs from the ray's bit.
std::vector<QuadrupleViolation> all_violations(const PeresConfiguration& config,
                                               const ResponseTables& tables);
std::optional<QuadrupleViolation> first_violation(
    const PeresConfiguration& config, const ResponseTables& tables);

// Extends a coloring of the rays (1 bit per ray, exactly one 0 per internal
// triple, no orthogonal pair both 0) to full response tables: an internal
// triple answers with its members' bits; a completion triple answers with
// its pair's bits and the third component forced so exactly one 0 appears.
ResponseTables response_tables_from_coloring(const PeresConfiguration& config,
                                             const std::vector<int>& coloring);

// Outcome of reducing the response-table existence question to the 101
// coloring search: tables satisfying all quadruples exist exactly when the
// rays admit a 101 coloring, because the triple responses are determined by
// the ray bits wherever they overlap.
struct ReductionReport {
  int ray_count = 0;
  int triple_count = 0;
  std::int64_t quadruple_count = 0;
  std::int64_t binding_quadruple_count = 0;  // quadruples whose ray is a member
  std::uint64_t constraints_hash = 0;
  bool satisfiable = false;
  ResponseTables tables;  // a satisfying pair when satisfiable
  SearchStats stats;
};

ReductionReport fwt_reduction_check(const PeresConfiguration& config);

}  // namespace kscheck
