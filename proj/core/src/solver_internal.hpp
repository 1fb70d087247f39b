#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kscheck/solver.hpp"

namespace kscheck::internal {

// Throws std::invalid_argument when indices are out of range or constraint
// members are not strictly increasing.
void validate_constraints(const ColoringConstraints& constraints);

// Search-side state: assignment, trail and constraint propagation. The
// verifier below shares nothing with it.
class Engine {
 public:
  explicit Engine(const ColoringConstraints& constraints);

  int value(int ray) const { return values_[ray]; }
  bool all_assigned() const { return trail_.size() == values_.size(); }
  std::size_t mark() const { return trail_.size(); }

  void assign(int ray, int value);
  void undo_to(std::size_t mark);

  // Propagates to fixpoint from the unprocessed end of the trail. Records a
  // Propagate step per forced assignment when sink is non-null. Returns the
  // id of a violated constraint, if one is hit.
  std::optional<int> propagate(std::vector<CertificateStep>* sink, SearchStats* stats);

  // Exhaustively refutes the current state, emitting branch levels relative
  // to depth. Returns false when a model is found instead; the assignment
  // then holds it.
  bool refute(int depth, std::vector<CertificateStep>* sink, SearchStats& stats);

  std::vector<int> snapshot_model() const;

 private:
  int lowest_unassigned() const;

  const ColoringConstraints& constraints_;
  std::vector<std::vector<int>> incident_;  // ascending constraint ids per ray
  std::vector<signed char> values_;         // -1 unassigned, else the label
  std::vector<int> trail_;
  std::size_t queue_head_ = 0;
};

struct MachineFrame {
  int ray;
  int value;
  int level;
  std::size_t trail_mark;
  bool second_phase;
};

// Verifier-side replay machine. Every step is checked against the raw
// constraints: propagations must be forced, conflicts real, branches
// two-phase with exact levels. Accepts only a trace that ends with the root
// (or seeded prefix) refuted.
struct Machine {
  explicit Machine(const ColoringConstraints& constraints);

  const ColoringConstraints& system;
  std::vector<signed char> values;
  std::vector<int> trail;
  std::vector<MachineFrame> frames;
  bool refuted = false;
  bool awaiting_flip = false;
  int flip_ray = -1;
  int flip_value = -1;
  int flip_level = -1;

  // Applies one step; returns a defect description, empty on success.
  std::string apply(const CertificateStep& step);

  // Installs one prefix assignment below all branching (pruned replay).
  std::string seed(int ray, int value);

  bool accepted() const { return refuted && frames.empty() && !awaiting_flip; }
};

}  // namespace kscheck::internal
