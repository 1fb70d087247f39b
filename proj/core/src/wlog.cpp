#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "kscheck/solver.hpp"
#include "solver_internal.hpp"

namespace kscheck {

namespace {

struct AutomorphismMaps {
  std::vector<int> ray;         // bijection on ray indices
  std::vector<int> constraint;  // induced bijection on constraint ids
};

// Checks that perm is a bijection mapping the edge set and the triple set
// onto themselves, and derives the induced constraint id map.
std::optional<AutomorphismMaps> automorphism_maps(const ColoringConstraints& constraints,
                                                  const std::vector<int>& perm) {
  const int n = constraints.ray_count;
  if (static_cast<int>(perm.size()) != n) return std::nullopt;
  std::vector<char> seen(n, 0);
  for (const int image : perm) {
    if (image < 0 || image >= n || seen[image]) return std::nullopt;
    seen[image] = 1;
  }

  std::map<std::array<int, 2>, int> edge_ids;
  for (int i = 0; i < static_cast<int>(constraints.edges.size()); ++i) {
    edge_ids[constraints.edges[i]] = i;
  }
  std::map<std::array<int, 3>, int> triple_ids;
  for (int i = 0; i < static_cast<int>(constraints.triples.size()); ++i) {
    triple_ids[constraints.triples[i]] = i;
  }

  AutomorphismMaps maps;
  maps.ray = perm;
  maps.constraint.resize(constraints.constraint_count());
  const int edge_count = static_cast<int>(constraints.edges.size());
  for (int i = 0; i < edge_count; ++i) {
    std::array<int, 2> image = {perm[constraints.edges[i][0]], perm[constraints.edges[i][1]]};
    std::sort(image.begin(), image.end());
    const auto found = edge_ids.find(image);
    if (found == edge_ids.end()) return std::nullopt;
    maps.constraint[i] = found->second;
  }
  for (int i = 0; i < static_cast<int>(constraints.triples.size()); ++i) {
    std::array<int, 3> image = {perm[constraints.triples[i][0]], perm[constraints.triples[i][1]],
                                perm[constraints.triples[i][2]]};
    std::sort(image.begin(), image.end());
    const auto found = triple_ids.find(image);
    if (found == triple_ids.end()) return std::nullopt;
    maps.constraint[edge_count + i] = edge_count + found->second;
  }
  return maps;
}

bool maps_triple_to_itself(const std::vector<int>& perm, const std::array<int, 3>& triple) {
  std::array<int, 3> image = {perm[triple[0]], perm[triple[1]], perm[triple[2]]};
  std::sort(image.begin(), image.end());
  return image == triple;
}

void append_steps(std::vector<CertificateStep>& out, const std::vector<CertificateStep>& steps,
                  const AutomorphismMaps* maps, int level_shift) {
  for (const CertificateStep& step : steps) {
    CertificateStep mapped = step;
    if (maps) {
      if (mapped.ray >= 0) mapped.ray = maps->ray[mapped.ray];
      if (mapped.reason >= 0) mapped.reason = maps->constraint[mapped.reason];
    }
    if (mapped.level >= 0) mapped.level += level_shift;
    out.push_back(mapped);
  }
}

}  // namespace

PrunedCertificate search_101_wlog(const ColoringConstraints& constraints,
                                  const std::vector<SymmetryElement>& symmetries) {
  internal::validate_constraints(constraints);
  if (search_101(constraints).satisfiable) {
    throw std::invalid_argument("constraint system is satisfiable; there is no refutation");
  }

  std::vector<AutomorphismMaps> automorphisms;
  {
    std::set<std::vector<int>> distinct;
    for (const SymmetryElement& g : symmetries) {
      if (!distinct.insert(g.permutation).second) continue;
      if (auto maps = automorphism_maps(constraints, g.permutation)) {
        automorphisms.push_back(std::move(*maps));
      }
    }
  }

  internal::Engine engine(constraints);
  SearchStats stats;
  PrunedCertificate cert;
  cert.ray_count = constraints.ray_count;
  cert.constraints_hash = constraints.hash();

  const int edge_count = static_cast<int>(constraints.edges.size());
  bool prefix_conflicted = false;
  for (;;) {
    std::vector<const AutomorphismMaps*> stabilizer;
    for (const AutomorphismMaps& a : automorphisms) {
      bool preserves = true;
      for (int x = 0; x < constraints.ray_count && preserves; ++x) {
        if (engine.value(x) != -1 && engine.value(a.ray[x]) != engine.value(x)) {
          preserves = false;
        }
      }
      if (preserves) stabilizer.push_back(&a);
    }

    int chosen_triple = -1;
    const AutomorphismMaps* to_second = nullptr;
    const AutomorphismMaps* to_third = nullptr;
    for (int t = 0; t < static_cast<int>(constraints.triples.size()) && chosen_triple < 0; ++t) {
      const auto& tri = constraints.triples[t];
      if (engine.value(tri[0]) != -1 || engine.value(tri[1]) != -1 || engine.value(tri[2]) != -1) {
        continue;
      }
      const AutomorphismMaps* second = nullptr;
      const AutomorphismMaps* third = nullptr;
      for (const AutomorphismMaps* a : stabilizer) {
        if (!maps_triple_to_itself(a->ray, tri)) continue;
        if (a->ray[tri[0]] == tri[1] && !second) second = a;
        if (a->ray[tri[0]] == tri[2] && !third) third = a;
        if (second && third) break;
      }
      if (second && third) {
        chosen_triple = t;
        to_second = second;
        to_third = third;
      }
    }
    if (chosen_triple < 0) break;

    WlogFixing fixing;
    fixing.triple_id = edge_count + chosen_triple;
    fixing.ray = constraints.triples[chosen_triple][0];
    fixing.to_second = to_second->ray;
    fixing.to_third = to_third->ray;
    engine.assign(fixing.ray, 0);
    const auto conflict = engine.propagate(&fixing.propagations, &stats);
    cert.fixings.push_back(std::move(fixing));
    if (conflict) {
      cert.tail.push_back(conflict_step(*conflict));
      prefix_conflicted = true;
      break;
    }
  }

  if (!prefix_conflicted) {
    if (!engine.refute(0, &cert.tail, stats)) {
      throw std::logic_error("model found after the system was decided unsatisfiable");
    }
  }
  return cert;
}

VerificationResult verify_pruned_certificate(const ColoringConstraints& constraints,
                                             const PrunedCertificate& certificate) {
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

  const int edge_count = static_cast<int>(constraints.edges.size());
  internal::Machine machine(constraints);

  for (std::size_t i = 0; i < certificate.fixings.size(); ++i) {
    const WlogFixing& fixing = certificate.fixings[i];
    const std::string where = "fixing " + std::to_string(i + 1) + ": ";
    ++result.steps_checked;

    if (fixing.triple_id < edge_count || fixing.triple_id >= constraints.constraint_count()) {
      result.error = where + "id does not name a triple";
      return result;
    }
    const auto& tri = constraints.triples[fixing.triple_id - edge_count];
    for (const int member : tri) {
      if (machine.values[member] != -1) {
        result.error = where + "triple member " + std::to_string(member) + " already assigned";
        return result;
      }
    }
    if (fixing.ray != tri[0] && fixing.ray != tri[1] && fixing.ray != tri[2]) {
      result.error = where + "pinned ray is not a member of the triple";
      return result;
    }

    const auto second = automorphism_maps(constraints, fixing.to_second);
    const auto third = automorphism_maps(constraints, fixing.to_third);
    if (!second || !third) {
      result.error = where + "permutation is not a constraint automorphism";
      return result;
    }
    if (!maps_triple_to_itself(fixing.to_second, tri) ||
        !maps_triple_to_itself(fixing.to_third, tri)) {
      result.error = where + "permutation does not map the triple to itself";
      return result;
    }
    const int image_second = fixing.to_second[fixing.ray];
    const int image_third = fixing.to_third[fixing.ray];
    if (image_second == fixing.ray || image_third == fixing.ray || image_second == image_third) {
      result.error = where + "permutations do not move the pinned ray onto both other members";
      return result;
    }
    for (const std::vector<int>* perm : {&fixing.to_second, &fixing.to_third}) {
      for (int x = 0; x < constraints.ray_count; ++x) {
        if (machine.values[x] != -1 && machine.values[(*perm)[x]] != machine.values[x]) {
          result.error = where + "permutation does not preserve the assignment so far";
          return result;
        }
      }
    }

    std::string defect = machine.seed(fixing.ray, 0);
    if (!defect.empty()) {
      result.error = where + defect;
      return result;
    }
    for (const CertificateStep& step : fixing.propagations) {
      ++result.steps_checked;
      if (step.kind != StepKind::Propagate) {
        result.error = where + "recorded consequence is not a propagation";
        return result;
      }
      defect = machine.apply(step);
      if (!defect.empty()) {
        result.error = where + defect;
        return result;
      }
    }
  }

  for (const CertificateStep& step : certificate.tail) {
    ++result.steps_checked;
    const std::string defect = machine.apply(step);
    if (!defect.empty()) {
      result.error = "tail step " + std::to_string(result.steps_checked) + ": " + defect;
      return result;
    }
  }
  if (!machine.accepted()) {
    result.error = "trace ends without refuting the fixed prefix";
    return result;
  }
  result.valid = true;
  return result;
}

UnsatCertificate expand_pruned_certificate(const ColoringConstraints& constraints,
                                           const PrunedCertificate& pruned) {
  internal::validate_constraints(constraints);
  const int edge_count = static_cast<int>(constraints.edges.size());

  std::vector<CertificateStep> expanded = pruned.tail;
  for (auto it = pruned.fixings.rbegin(); it != pruned.fixings.rend(); ++it) {
    const WlogFixing& fixing = *it;
    if (fixing.triple_id < edge_count || fixing.triple_id >= constraints.constraint_count()) {
      throw std::invalid_argument("fixing id does not name a triple");
    }
    const auto& tri = constraints.triples[fixing.triple_id - edge_count];
    const auto second = automorphism_maps(constraints, fixing.to_second);
    const auto third = automorphism_maps(constraints, fixing.to_third);
    if (!second || !third) {
      throw std::invalid_argument("fixing permutation is not a constraint automorphism");
    }
    const int q = fixing.to_second[fixing.ray];
    const int r = fixing.to_third[fixing.ray];
    const bool members_covered =
        (fixing.ray == tri[0] || fixing.ray == tri[1] || fixing.ray == tri[2]) &&
        (q == tri[0] || q == tri[1] || q == tri[2]) &&
        (r == tri[0] || r == tri[1] || r == tri[2]) && fixing.ray != q && fixing.ray != r &&
        q != r;
    if (!members_covered) {
      throw std::invalid_argument("fixing permutations do not cover the triple members");
    }

    std::vector<CertificateStep> wrapped;
    wrapped.reserve(3 * (fixing.propagations.size() + expanded.size()) + 8);

    // subtree with the pinned ray itself carrying the 0
    wrapped.push_back(branch_step(fixing.ray, 0, 1));
    append_steps(wrapped, fixing.propagations, nullptr, 0);
    append_steps(wrapped, expanded, nullptr, 1);
    wrapped.push_back(backtrack_step(1));

    // otherwise the 0 sits on one of the other two members; each case is the
    // recorded subtree pushed through the justifying automorphism
    wrapped.push_back(branch_step(fixing.ray, 1, 1));

    wrapped.push_back(branch_step(q, 0, 2));
    append_steps(wrapped, fixing.propagations, &*second, 0);
    append_steps(wrapped, expanded, &*second, 2);
    wrapped.push_back(backtrack_step(2));

    wrapped.push_back(branch_step(q, 1, 2));
    wrapped.push_back(propagate_step(r, 0, fixing.triple_id));
    append_steps(wrapped, fixing.propagations, &*third, 0);
    append_steps(wrapped, expanded, &*third, 2);
    wrapped.push_back(backtrack_step(2));

    wrapped.push_back(backtrack_step(1));
    expanded = std::move(wrapped);
  }

  return UnsatCertificate{constraints.ray_count, constraints.hash(), std::move(expanded)};
}

}  // namespace kscheck
