#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "kscheck/fwt.hpp"
#include "kscheck/peres.hpp"

namespace kscheck {

// Pre-drawn randomness: one bit sequence per quadruple, fixing in advance
// every coin a stochastic rule could flip during that experiment.
struct TapeSet {
  std::vector<std::vector<int>> bits;  // bits[k-1] belongs to quadruple k
};

TapeSet constant_tapes(std::int64_t quadruple_count, int length, int bit);
TapeSet seeded_tapes(std::int64_t quadruple_count, int length,
                     std::uint64_t seed);

struct StrategyResponse {
  std::array<int, 3> a_response{1, 1, 1};
  int b_response = 1;
};

// A stochastic response rule with its randomness abstracted into the tape
// prefix it may read: identical context and prefix, identical response.
using ResponseRule = std::function<StrategyResponse(
    const QuadrupleContext&, const std::vector<int>& draws)>;

struct Strategy {
  std::string name;
  std::string description;
  ResponseRule rule;
};

// Ten scripted strategies: constant answers, tape-driven answers,
// index-driven answers and deliberate coloring attempts.
const std::vector<Strategy>& scripted_strategies();

// Throws std::invalid_argument for an unknown name.
const Strategy& strategy_by_name(std::string_view name);

// Evaluates the rule with all randomness fixed in advance. Each triple's
// response is read at that triple's first quadruple and each ray's bit at
// the first triple's quadruple for that ray, so every table entry depends
// only on the tape of one named quadruple; the result is a pure function of
// (tapes, strategy, draw_budget). Every tape must hold at least draw_budget
// bits and cover every quadruple, otherwise std::invalid_argument.
ResponseTables derandomize(const PeresConfiguration& config,
                           const TapeSet& tapes, const Strategy& strategy,
                           int draw_budget);

}  // namespace kscheck
