#include "kscheck/fwt.hpp"

#include <stdexcept>

namespace kscheck {

namespace {

bool spin_valid(const std::array<int, 3>& response) {
  int zeros = 0;
  for (int v : response) {
    if (v == 0)
      ++zeros;
    else if (v != 1)
      return false;
  }
  return zeros == 1;
}

}  // namespace

QuadrupleContext quadruple_context(const PeresConfiguration& config,
                                   std::int64_t quadruple_index) {
  if (quadruple_index < 1 || quadruple_index > quadruple_count(config))
    throw std::invalid_argument("quadruple index out of range");

  QuadrupleContext ctx;
  ctx.quadruple_index = quadruple_index;
  ctx.triple_id = static_cast<int>((quadruple_index - 1) / config.ray_count());
  ctx.ray_id = static_cast<int>((quadruple_index - 1) % config.ray_count());
  ctx.member_ray_ids = config.triple_member_ids(ctx.triple_id);
  for (int j = 0; j < 3; ++j)
    if (ctx.member_ray_ids[j] == ctx.ray_id) ctx.member_index = j;
  return ctx;
}

std::vector<QuadrupleViolation> all_violations(const PeresConfiguration& config,
                                               const ResponseTables& tables) {
  if (static_cast<int>(tables.triple_responses.size()) != config.triple_count() ||
      static_cast<int>(tables.ray_responses.size()) != config.ray_count())
    throw std::invalid_argument("response tables do not match the configuration");

  std::vector<QuadrupleViolation> violations;
  const std::int64_t total = quadruple_count(config);
  for (std::int64_t k = 1; k <= total; ++k) {
    const QuadrupleContext ctx = quadruple_context(config, k);
    const std::array<int, 3>& response = tables.triple_responses[ctx.triple_id];
    if (!spin_valid(response)) {
      violations.push_back(QuadrupleViolation{k, ctx.triple_id, ctx.ray_id,
                                              QuadrupleViolation::Kind::Spin});
      continue;
    }
    if (ctx.member_index >= 0 &&
        response[ctx.member_index] != tables.ray_responses[ctx.ray_id]) {
      violations.push_back(QuadrupleViolation{k, ctx.triple_id, ctx.ray_id,
                                              QuadrupleViolation::Kind::Twin});
    }
  }
  return violations;
}

std::optional<QuadrupleViolation> first_violation(
    const PeresConfiguration& config, const ResponseTables& tables) {
  const std::vector<QuadrupleViolation> violations =
      all_violations(config, tables);
  if (violations.empty()) return std::nullopt;
  return violations.front();
}

ResponseTables response_tables_from_coloring(const PeresConfiguration& config,
                                             const std::vector<int>& coloring) {
  if (static_cast<int>(coloring.size()) != config.ray_count())
    throw std::invalid_argument("coloring size does not match the ray count");
  for (int v : coloring)
    if (v != 0 && v != 1)
      throw std::invalid_argument("coloring values must be 0 or 1");

  ResponseTables tables;
  tables.ray_responses = coloring;
  tables.triple_responses.reserve(config.triple_count());
  for (int t = 0; t < config.triple_count(); ++t) {
    const std::array<int, 3> members = config.triple_member_ids(t);
    std::array<int, 3> response{1, 1, 1};
    bool has_zero = false;
    for (int j = 0; j < 3; ++j) {
      if (members[j] < 0) continue;
      response[j] = coloring[members[j]];
      if (response[j] == 0) has_zero = true;
    }
    // A completion triple whose pair is all 1s gets its 0 from the third
    // direction, which lies outside the ray set and is otherwise free.
    if (!has_zero) {
      for (int j = 0; j < 3; ++j)
        if (members[j] < 0) response[j] = 0;
    }
    tables.triple_responses.push_back(response);
  }
  return tables;
}

ReductionReport fwt_reduction_check(const PeresConfiguration& config) {
  ReductionReport report;
  report.ray_count = config.ray_count();
  report.triple_count = config.triple_count();
  report.quadruple_count = quadruple_count(config);
  for (int t = 0; t < config.triple_count(); ++t)
    for (int id : config.triple_member_ids(t))
      if (id >= 0) ++report.binding_quadruple_count;

  // Wherever a quadruple's ray sits inside its triple, the triple response
  // component is pinned to the ray bit; the codomain restriction then says
  // the ray bits place exactly one 0 on each internal triple and never two
  // 0s on an orthogonal pair. That is precisely the coloring search.
  const ColoringConstraints constraints = constraints_from_configuration(config);
  report.constraints_hash = constraints.hash();

  const SearchResult result = search_101(constraints);
  report.satisfiable = result.satisfiable;
  report.stats = result.stats;
  if (result.satisfiable)
    report.tables = response_tables_from_coloring(config, result.model);
  return report;
}

}  // namespace kscheck
