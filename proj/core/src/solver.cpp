#include "kscheck/solver.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "solver_internal.hpp"

namespace kscheck {

std::uint64_t ColoringConstraints::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  const auto mix = [&h](std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      h ^= (word >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(ray_count));
  mix(edges.size());
  for (const auto& e : edges) {
    mix(static_cast<std::uint64_t>(e[0]));
    mix(static_cast<std::uint64_t>(e[1]));
  }
  mix(triples.size());
  for (const auto& t : triples) {
    mix(static_cast<std::uint64_t>(t[0]));
    mix(static_cast<std::uint64_t>(t[1]));
    mix(static_cast<std::uint64_t>(t[2]));
  }
  return h;
}

ColoringConstraints constraints_from_configuration(const PeresConfiguration& config) {
  ColoringConstraints constraints;
  constraints.ray_count = config.ray_count();
  constraints.edges = config.orthogonal_pairs;
  constraints.triples = config.internal_triples;
  return constraints;
}

CertificateStep branch_step(int ray, int value, int level) {
  return {StepKind::Branch, ray, value, -1, level};
}
CertificateStep propagate_step(int ray, int value, int reason) {
  return {StepKind::Propagate, ray, value, reason, -1};
}
CertificateStep conflict_step(int reason) { return {StepKind::Conflict, -1, -1, reason, -1}; }
CertificateStep backtrack_step(int level) { return {StepKind::Backtrack, -1, -1, -1, level}; }

namespace internal {

void validate_constraints(const ColoringConstraints& constraints) {
  if (constraints.ray_count < 0) {
    throw std::invalid_argument("negative ray count");
  }
  const int n = constraints.ray_count;
  for (const auto& e : constraints.edges) {
    if (!(0 <= e[0] && e[0] < e[1] && e[1] < n)) {
      throw std::invalid_argument("edge (" + std::to_string(e[0]) + ", " + std::to_string(e[1]) +
                                  ") is not strictly increasing within range");
    }
  }
  for (const auto& t : constraints.triples) {
    if (!(0 <= t[0] && t[0] < t[1] && t[1] < t[2] && t[2] < n)) {
      throw std::invalid_argument("triple (" + std::to_string(t[0]) + ", " +
                                  std::to_string(t[1]) + ", " + std::to_string(t[2]) +
                                  ") is not strictly increasing within range");
    }
  }
}

Engine::Engine(const ColoringConstraints& constraints)
    : constraints_(constraints), values_(constraints.ray_count, -1) {
  incident_.resize(constraints.ray_count);
  int id = 0;
  for (const auto& e : constraints.edges) {
    incident_[e[0]].push_back(id);
    incident_[e[1]].push_back(id);
    ++id;
  }
  for (const auto& t : constraints.triples) {
    for (int member : t) incident_[member].push_back(id);
    ++id;
  }
}

void Engine::assign(int ray, int value) {
  values_[ray] = static_cast<signed char>(value);
  trail_.push_back(ray);
}

void Engine::undo_to(std::size_t mark) {
  while (trail_.size() > mark) {
    values_[trail_.back()] = -1;
    trail_.pop_back();
  }
  queue_head_ = mark;
}

int Engine::lowest_unassigned() const {
  for (int r = 0; r < static_cast<int>(values_.size()); ++r) {
    if (values_[r] == -1) return r;
  }
  return -1;
}

std::optional<int> Engine::propagate(std::vector<CertificateStep>* sink, SearchStats* stats) {
  const int edge_count = static_cast<int>(constraints_.edges.size());
  while (queue_head_ < trail_.size()) {
    const int ray = trail_[queue_head_++];
    for (const int cid : incident_[ray]) {
      if (cid < edge_count) {
        if (values_[ray] != 0) continue;  // a 1 never forces across an edge
        const auto& e = constraints_.edges[cid];
        const int other = e[0] == ray ? e[1] : e[0];
        if (values_[other] == 0) return cid;
        if (values_[other] == -1) {
          assign(other, 1);
          if (sink) sink->push_back(propagate_step(other, 1, cid));
          if (stats) ++stats->propagations;
        }
      } else {
        const auto& t = constraints_.triples[cid - edge_count];
        int zeros = 0;
        int ones = 0;
        for (const int member : t) {
          zeros += values_[member] == 0;
          ones += values_[member] == 1;
        }
        if (zeros >= 2 || ones == 3) return cid;
        if (zeros == 1) {
          for (const int member : t) {
            if (values_[member] == -1) {
              assign(member, 1);
              if (sink) sink->push_back(propagate_step(member, 1, cid));
              if (stats) ++stats->propagations;
            }
          }
        } else if (ones == 2) {
          for (const int member : t) {
            if (values_[member] == -1) {
              assign(member, 0);
              if (sink) sink->push_back(propagate_step(member, 0, cid));
              if (stats) ++stats->propagations;
            }
          }
        }
      }
    }
  }
  return std::nullopt;
}

bool Engine::refute(int depth, std::vector<CertificateStep>* sink, SearchStats& stats) {
  if (const auto conflict = propagate(sink, &stats)) {
    ++stats.conflicts;
    if (sink) sink->push_back(conflict_step(*conflict));
    return true;
  }
  if (all_assigned()) return false;

  const int ray = lowest_unassigned();
  for (const int value : {1, 0}) {
    ++stats.branches;
    if (depth + 1 > stats.max_depth) stats.max_depth = depth + 1;
    if (sink) sink->push_back(branch_step(ray, value, depth + 1));
    const std::size_t saved = mark();
    assign(ray, value);
    if (!refute(depth + 1, sink, stats)) return false;
    if (sink) sink->push_back(backtrack_step(depth + 1));
    undo_to(saved);
  }
  return true;
}

std::vector<int> Engine::snapshot_model() const {
  std::vector<int> model(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) model[i] = values_[i];
  return model;
}

namespace {

// Does constraint `cid` force `ray` to `value` under the assignment?
bool constraint_forces(const ColoringConstraints& c, const std::vector<signed char>& values,
                       int cid, int ray, int value) {
  const int edge_count = static_cast<int>(c.edges.size());
  if (cid < edge_count) {
    const auto& e = c.edges[cid];
    if (ray != e[0] && ray != e[1]) return false;
    const int other = e[0] == ray ? e[1] : e[0];
    return value == 1 && values[other] == 0;
  }
  const auto& t = c.triples[cid - edge_count];
  if (ray != t[0] && ray != t[1] && ray != t[2]) return false;
  if (value == 0) {
    // both other members carry 1
    for (const int member : t) {
      if (member != ray && values[member] != 1) return false;
    }
    return true;
  }
  if (value == 1) {
    // some other member carries the 0
    for (const int member : t) {
      if (member != ray && values[member] == 0) return true;
    }
  }
  return false;
}

bool constraint_violated(const ColoringConstraints& c, const std::vector<signed char>& values,
                         int cid) {
  const int edge_count = static_cast<int>(c.edges.size());
  if (cid < edge_count) {
    const auto& e = c.edges[cid];
    return values[e[0]] == 0 && values[e[1]] == 0;
  }
  const auto& t = c.triples[cid - edge_count];
  int zeros = 0;
  int ones = 0;
  for (const int member : t) {
    zeros += values[member] == 0;
    ones += values[member] == 1;
  }
  return zeros >= 2 || ones == 3;
}

}  // namespace

Machine::Machine(const ColoringConstraints& constraints)
    : system(constraints), values(constraints.ray_count, -1) {}

std::string Machine::seed(int ray, int value) {
  if (!frames.empty() || refuted || awaiting_flip) return "seed below an active trace";
  if (ray < 0 || ray >= system.ray_count) return "seed ray out of range";
  if (value != 0 && value != 1) return "seed value must be 0 or 1";
  if (values[ray] != -1) return "seed on an assigned ray";
  values[ray] = static_cast<signed char>(value);
  trail.push_back(ray);
  return {};
}

std::string Machine::apply(const CertificateStep& step) {
  switch (step.kind) {
    case StepKind::Branch: {
      bool second_phase = false;
      if (awaiting_flip) {
        if (step.ray != flip_ray || step.value != flip_value || step.level != flip_level) {
          return "expected the complement branch on ray " + std::to_string(flip_ray);
        }
        awaiting_flip = false;
        second_phase = true;
      } else {
        if (refuted) return "branch after the node was refuted";
        if (step.level != static_cast<int>(frames.size()) + 1) {
          return "branch level " + std::to_string(step.level) + " does not extend depth " +
                 std::to_string(frames.size());
        }
      }
      if (step.value != 0 && step.value != 1) return "branch value must be 0 or 1";
      if (step.ray < 0 || step.ray >= system.ray_count) return "branch ray out of range";
      if (values[step.ray] != -1) return "branch on an assigned ray";
      frames.push_back({step.ray, step.value, step.level, trail.size(), second_phase});
      values[step.ray] = static_cast<signed char>(step.value);
      trail.push_back(step.ray);
      return {};
    }
    case StepKind::Propagate: {
      if (refuted) return "propagation after the node was refuted";
      if (awaiting_flip) return "propagation while the complement branch is due";
      if (step.ray < 0 || step.ray >= system.ray_count) return "propagation ray out of range";
      if (step.value != 0 && step.value != 1) return "propagation value must be 0 or 1";
      if (step.reason < 0 || step.reason >= system.constraint_count()) {
        return "propagation reason out of range";
      }
      if (!constraint_forces(system, values, step.reason, step.ray, step.value)) {
        return "propagation of ray " + std::to_string(step.ray) + " to " +
               std::to_string(step.value) + " is not forced by constraint " +
               std::to_string(step.reason);
      }
      if (values[step.ray] == -1) {
        values[step.ray] = static_cast<signed char>(step.value);
        trail.push_back(step.ray);
      } else if (values[step.ray] != step.value) {
        return "propagation contradicts the current assignment of ray " +
               std::to_string(step.ray);
      }
      return {};
    }
    case StepKind::Conflict: {
      if (refuted) return "conflict after the node was refuted";
      if (awaiting_flip) return "conflict while the complement branch is due";
      if (step.reason < 0 || step.reason >= system.constraint_count()) {
        return "conflict constraint out of range";
      }
      if (!constraint_violated(system, values, step.reason)) {
        return "constraint " + std::to_string(step.reason) + " is not violated";
      }
      refuted = true;
      return {};
    }
    case StepKind::Backtrack: {
      if (!refuted) return "backtrack without a refuted node";
      if (frames.empty()) return "backtrack below the root";
      if (step.level != static_cast<int>(frames.size())) {
        return "backtrack level " + std::to_string(step.level) + " does not match depth " +
               std::to_string(frames.size());
      }
      const MachineFrame frame = frames.back();
      frames.pop_back();
      while (trail.size() > frame.trail_mark) {
        values[trail.back()] = -1;
        trail.pop_back();
      }
      if (!frame.second_phase) {
        awaiting_flip = true;
        flip_ray = frame.ray;
        flip_value = 1 - frame.value;
        flip_level = frame.level;
        refuted = false;
      }
      return {};
    }
  }
  return "unknown step kind";
}

}  // namespace internal

SearchResult search_101(const ColoringConstraints& constraints, const SearchOptions& options) {
  internal::validate_constraints(constraints);

  internal::Engine engine(constraints);
  SearchResult result;
  std::vector<CertificateStep> steps;
  std::vector<CertificateStep>* sink = options.certify ? &steps : nullptr;

  const bool refuted = engine.refute(0, sink, result.stats);
  result.satisfiable = !refuted;
  if (!refuted) {
    result.model = engine.snapshot_model();
  } else if (options.certify) {
    result.certificate =
        UnsatCertificate{constraints.ray_count, constraints.hash(), std::move(steps)};
  }
  return result;
}

VerificationResult verify_certificate(const ColoringConstraints& constraints,
                                      const UnsatCertificate& certificate) {
  VerificationResult result;
  try {
    internal::validate_constraints(constraints);
  } catch (const std::invalid_argument& bad) {
    result.error = bad.what();
    return result;
  }
  if (certificate.ray_count != constraints.ray_count) {
    result.error = "certificate ray count does not match the constraint system";
    return result;
  }
  if (certificate.constraints_hash != constraints.hash()) {
    result.error = "certificate was produced for a different constraint system";
    return result;
  }

  internal::Machine machine(constraints);
  for (const CertificateStep& step : certificate.steps) {
    ++result.steps_checked;
    const std::string defect = machine.apply(step);
    if (!defect.empty()) {
      result.error = "step " + std::to_string(result.steps_checked) + ": " + defect;
      return result;
    }
  }
  if (!machine.accepted()) {
    result.error = "trace ends without refuting the root";
    return result;
  }
  result.valid = true;
  return result;
}

}  // namespace kscheck
