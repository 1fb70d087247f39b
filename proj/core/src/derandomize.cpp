#include "kscheck/derandomize.hpp"

#include <algorithm>
#include <stdexcept>

#include "kscheck/rng.hpp"

namespace kscheck {

namespace {

// Rules read their draws through this so any draw budget, including zero,
// is safe: missing bits read as 0.
int bit(const std::vector<int>& draws, std::size_t i) {
  return i < draws.size() && draws[i] != 0 ? 1 : 0;
}

int bit_sum(const std::vector<int>& draws) {
  int s = 0;
  for (std::size_t i = 0; i < draws.size(); ++i) s += bit(draws, i);
  return s;
}

std::array<int, 3> zero_at(int index) {
  std::array<int, 3> p{1, 1, 1};
  p[index] = 0;
  return p;
}

std::vector<Strategy> make_strategies() {
  std::vector<Strategy> list;

  list.push_back(Strategy{
      "constant", "always answers (1,0,1) and declares every ray 1",
      [](const QuadrupleContext&, const std::vector<int>&) {
        return StrategyResponse{{1, 0, 1}, 1};
      }});

  list.push_back(Strategy{
      "zero_first", "always answers (0,1,1) and declares every ray 0",
      [](const QuadrupleContext&, const std::vector<int>&) {
        return StrategyResponse{{0, 1, 1}, 0};
      }});

  list.push_back(Strategy{
      "tape_bit", "zero position and ray bit read straight off the tape",
      [](const QuadrupleContext&, const std::vector<int>& draws) {
        return StrategyResponse{
            zero_at((2 * bit(draws, 0) + bit(draws, 1)) % 3), bit(draws, 0)};
      }});

  list.push_back(Strategy{
      "tape_parity", "zero position and ray bit from the tape's bit sum",
      [](const QuadrupleContext&, const std::vector<int>& draws) {
        const int s = bit_sum(draws);
        return StrategyResponse{zero_at(s % 3), s % 2};
      }});

  list.push_back(Strategy{
      "tape_majority", "majority bit decides the ray, count places the zero",
      [](const QuadrupleContext&, const std::vector<int>& draws) {
        const int s = bit_sum(draws);
        const int majority = 2 * s >= static_cast<int>(draws.size()) ? 1 : 0;
        return StrategyResponse{zero_at(s % 3), majority};
      }});

  list.push_back(Strategy{
      "triple_cycle", "zero position cycles with the triple, ray bit with the ray",
      [](const QuadrupleContext& ctx, const std::vector<int>&) {
        return StrategyResponse{zero_at(ctx.triple_id % 3), ctx.ray_id % 2};
      }});

  list.push_back(Strategy{
      "quadruple_cycle", "everything cycles with the quadruple index",
      [](const QuadrupleContext& ctx, const std::vector<int>&) {
        return StrategyResponse{zero_at(static_cast<int>(ctx.quadruple_index % 3)),
                                static_cast<int>(ctx.quadruple_index % 2)};
      }});

  list.push_back(Strategy{
      "echo_member", "answers (0,1,1) and echoes the matching component when asked about a member",
      [](const QuadrupleContext& ctx, const std::vector<int>&) {
        const std::array<int, 3> a = zero_at(0);
        const int b = ctx.member_index >= 0 ? a[ctx.member_index] : 1;
        return StrategyResponse{a, b};
      }});

  list.push_back(Strategy{
      "lowest_member_zero", "puts the zero on the smallest member ray, zeroes only ray 0",
      [](const QuadrupleContext& ctx, const std::vector<int>&) {
        int best = 0;
        for (int j = 1; j < 3; ++j) {
          const int id = ctx.member_ray_ids[j];
          const int best_id = ctx.member_ray_ids[best];
          if (best_id < 0 || (id >= 0 && id < best_id)) best = j;
        }
        return StrategyResponse{zero_at(best), ctx.ray_id == 0 ? 0 : 1};
      }});

  list.push_back(Strategy{
      "tape_coloring", "a two-bit tape address picks the zero, the first bit the ray",
      [](const QuadrupleContext&, const std::vector<int>& draws) {
        return StrategyResponse{
            zero_at((bit(draws, 0) + 2 * bit(draws, 1)) % 3), bit(draws, 0)};
      }});

  return list;
}

}  // namespace

TapeSet constant_tapes(std::int64_t quadruple_count, int length, int bit) {
  if (quadruple_count < 0 || length < 0 || (bit != 0 && bit != 1))
    throw std::invalid_argument("constant_tapes: bad arguments");
  TapeSet tapes;
  tapes.bits.assign(static_cast<std::size_t>(quadruple_count),
                    std::vector<int>(static_cast<std::size_t>(length), bit));
  return tapes;
}

TapeSet seeded_tapes(std::int64_t quadruple_count, int length,
                     std::uint64_t seed) {
  if (quadruple_count < 0 || length < 0)
    throw std::invalid_argument("seeded_tapes: bad arguments");
  TapeSet tapes;
  tapes.bits.resize(static_cast<std::size_t>(quadruple_count));
  DeterministicRng rng(seed);
  for (auto& tape : tapes.bits) {
    tape.resize(static_cast<std::size_t>(length));
    for (int& b : tape) b = rng.next_bit() ? 1 : 0;
  }
  return tapes;
}

const std::vector<Strategy>& scripted_strategies() {
  static const std::vector<Strategy> strategies = make_strategies();
  return strategies;
}

const Strategy& strategy_by_name(std::string_view name) {
  for (const Strategy& s : scripted_strategies())
    if (s.name == name) return s;
  throw std::invalid_argument("unknown strategy: " + std::string(name));
}

ResponseTables derandomize(const PeresConfiguration& config,
                           const TapeSet& tapes, const Strategy& strategy,
                           int draw_budget) {
  if (draw_budget < 0)
    throw std::invalid_argument("derandomize: draw budget must be nonnegative");
  if (config.triple_count() == 0)
    throw std::invalid_argument("derandomize: configuration has no triples");
  const std::int64_t total = quadruple_count(config);
  if (static_cast<std::int64_t>(tapes.bits.size()) != total)
    throw std::invalid_argument("derandomize: one tape per quadruple required");
  for (const auto& tape : tapes.bits)
    if (static_cast<int>(tape.size()) < draw_budget)
      throw std::invalid_argument(
          "derandomize: tape shorter than the draw budget");

  const auto respond = [&](std::int64_t quadruple_index) {
    const QuadrupleContext ctx = quadruple_context(config, quadruple_index);
    const auto& tape = tapes.bits[static_cast<std::size_t>(quadruple_index - 1)];
    const std::vector<int> draws(tape.begin(), tape.begin() + draw_budget);
    return strategy.rule(ctx, draws);
  };

  ResponseTables tables;
  tables.triple_responses.reserve(config.triple_count());
  for (int t = 0; t < config.triple_count(); ++t) {
    const std::int64_t k =
        static_cast<std::int64_t>(t) * config.ray_count() + 1;
    tables.triple_responses.push_back(respond(k).a_response);
  }
  tables.ray_responses.reserve(config.ray_count());
  for (int w = 0; w < config.ray_count(); ++w)
    tables.ray_responses.push_back(respond(w + 1).b_response != 0 ? 1 : 0);
  return tables;
}

}  // namespace kscheck
