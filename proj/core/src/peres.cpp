#include "kscheck/peres.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "kscheck/rng.hpp"

namespace kscheck {

namespace {

ExactScalar S(std::int64_t a, std::int64_t b = 0) { return ExactScalar{a, b}; }

// Sort key: ascending multiset of absolute component values. Groups rays by
// component-value class before any positional comparison.
std::array<ExactScalar, 3> class_key(const Ray& r) {
  std::array<ExactScalar, 3> key = {abs(r.rep().x), abs(r.rep().y), abs(r.rep().z)};
  std::sort(key.begin(), key.end(),
            [](const ExactScalar& u, const ExactScalar& v) { return u < v; });
  return key;
}

bool canonical_less(const Ray& lhs, const Ray& rhs) {
  const auto kl = class_key(lhs);
  const auto kr = class_key(rhs);
  for (int i = 0; i < 3; ++i) {
    if (kl[i] < kr[i]) return true;
    if (kr[i] < kl[i]) return false;
  }
  return lhs < rhs;
}

void require_count(std::size_t actual, std::size_t expected, const char* what) {
  if (actual != expected) {
    throw self_check_error(std::string(what) + ": expected " + std::to_string(expected) +
                           ", got " + std::to_string(actual));
  }
}

double dot3(const std::array<double, 3>& u, const std::array<double, 3>& v) {
  return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

}  // namespace

std::optional<int> PeresConfiguration::index_of(const Ray& r) const {
  for (int i = 0; i < ray_count(); ++i) {
    if (rays[i] == r) return i;
  }
  return std::nullopt;
}

std::array<int, 3> PeresConfiguration::triple_member_ids(int triple_id) const {
  if (triple_id < 0 || triple_id >= triple_count()) {
    throw std::out_of_range("triple id " + std::to_string(triple_id) + " out of range");
  }
  const int internal = static_cast<int>(internal_triples.size());
  if (triple_id < internal) return internal_triples[triple_id];
  const CompletionTriple& c = completion_triples[triple_id - internal];
  return {c.pair[0], c.pair[1], -1};
}

std::vector<Ray> white_cube_axes() {
  std::vector<Ray> axes;
  axes.reserve(13);
  auto add = [&axes](std::int64_t x, std::int64_t y, std::int64_t z) {
    axes.push_back(Ray::canonicalize({S(x), S(y), S(z)}));
  };
  add(1, 0, 0);
  add(0, 1, 0);
  add(0, 0, 1);
  add(1, 1, 0);
  add(1, -1, 0);
  add(1, 0, 1);
  add(1, 0, -1);
  add(0, 1, 1);
  add(0, 1, -1);
  add(1, 1, 1);
  add(1, 1, -1);
  add(1, -1, 1);
  add(1, -1, -1);
  return axes;
}

PeresConfiguration configuration_from_rays(std::vector<Ray> rays, const BuildOptions& options) {
  std::sort(rays.begin(), rays.end(), canonical_less);
  rays.erase(std::unique(rays.begin(), rays.end()), rays.end());

  PeresConfiguration config;
  config.rays = std::move(rays);
  const int n = config.ray_count();

  std::vector<std::vector<bool>> adjacent(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (dot(config.rays[i].rep(), config.rays[j].rep()).is_zero()) {
        adjacent[i][j] = adjacent[j][i] = true;
        config.orthogonal_pairs.push_back({i, j});
      }
    }
  }

  std::set<std::array<int, 2>> covered;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!adjacent[i][j]) continue;
      for (int k = j + 1; k < n; ++k) {
        if (adjacent[i][k] && adjacent[j][k]) {
          config.internal_triples.push_back({i, j, k});
          covered.insert({i, j});
          covered.insert({i, k});
          covered.insert({j, k});
        }
      }
    }
  }

  if (options.with_completions) {
    for (const auto& pair : config.orthogonal_pairs) {
      if (covered.count(pair) != 0) continue;
      Ray third = Ray::canonicalize(
          cross(config.rays[pair[0]].rep(), config.rays[pair[1]].rep()));
      config.completion_triples.push_back({pair, third});
    }
  }

  return config;
}

PeresConfiguration build_peres_configuration(const BuildOptions& options) {
  std::vector<Ray> images;
  images.reserve(13 * 3);
  for (const Ray& axis : white_cube_axes()) {
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
      images.push_back(Ray::canonicalize(rotate45(axis.rep(), a)));
    }
  }
  PeresConfiguration config = configuration_from_rays(std::move(images), options);

  require_count(config.rays.size(), 33, "ray count");
  require_count(config.orthogonal_pairs.size(), 72, "orthogonal pair count");
  require_count(config.internal_triples.size(), 16, "internal triple count");
  if (options.with_completions) {
    require_count(config.completion_triples.size(), 24, "completion triple count");
    for (const CompletionTriple& c : config.completion_triples) {
      if (config.index_of(c.third).has_value()) {
        throw self_check_error("completion third " + to_string(c.third) +
                               " unexpectedly inside the ray set");
      }
    }
  }
  return config;
}

std::int64_t quadruple_count(const PeresConfiguration& config) {
  return static_cast<std::int64_t>(config.triple_count()) * config.ray_count();
}

std::vector<SymmetryElement> symmetry_group(const PeresConfiguration& config) {
  std::vector<SymmetryElement> group;
  const int n = config.ray_count();

  std::array<int, 3> perm = {0, 1, 2};
  do {
    for (int mask = 0; mask < 8; ++mask) {
      std::array<std::int64_t, 3> sign;
      for (int i = 0; i < 3; ++i) sign[i] = ((mask >> i) & 1) != 0 ? -1 : 1;

      std::vector<int> induced(n, -1);
      bool closed = true;
      for (int r = 0; r < n && closed; ++r) {
        const ExactVector3& v = config.rays[r].rep();
        ExactVector3 image{S(sign[0]) * v[perm[0]], S(sign[1]) * v[perm[1]],
                           S(sign[2]) * v[perm[2]]};
        auto id = config.index_of(Ray::canonicalize(image));
        if (id.has_value()) {
          induced[r] = *id;
        } else {
          closed = false;
        }
      }
      if (!closed) continue;

      SymmetryElement elem;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          elem.matrix[i][j] = (perm[i] == j) ? S(sign[i]) : S(0);
        }
      }
      elem.permutation = std::move(induced);
      group.push_back(std::move(elem));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  return group;
}

TripleDirections triple_directions(const PeresConfiguration& config, int triple_id) {
  TripleDirections out;
  out.ray_ids = config.triple_member_ids(triple_id);
  const int internal = static_cast<int>(config.internal_triples.size());
  for (int s = 0; s < 3; ++s) {
    if (out.ray_ids[s] >= 0) {
      out.unit[s] = config.rays[out.ray_ids[s]].to_unit();
    } else {
      out.unit[s] = config.completion_triples[triple_id - internal].third.to_unit();
    }
  }
  return out;
}

namespace {

std::array<double, 3> perturb_direction(const std::array<double, 3>& v, double epsilon,
                                        DeterministicRng& rng) {
  std::array<double, 3> tangent{};
  for (;;) {
    const std::array<double, 3> w = rng.next_unit_vector();
    const double proj = dot3(w, v);
    tangent = {w[0] - proj * v[0], w[1] - proj * v[1], w[2] - proj * v[2]};
    const double norm2 = dot3(tangent, tangent);
    if (norm2 > 1e-8) {
      const double norm = std::sqrt(norm2);
      tangent = {tangent[0] / norm, tangent[1] / norm, tangent[2] / norm};
      break;
    }
  }
  const double u = epsilon * rng.next_unit();  // tan of the tilt angle, <= epsilon
  std::array<double, 3> moved = {v[0] + u * tangent[0], v[1] + u * tangent[1],
                                 v[2] + u * tangent[2]};
  const double norm = std::sqrt(dot3(moved, moved));
  return {moved[0] / norm, moved[1] / norm, moved[2] / norm};
}

}  // namespace

PerturbationReport perturbation_check(const PeresConfiguration& config, double epsilon,
                                      int trials, std::uint64_t seed) {
  if (!(epsilon >= 0.0 && epsilon < 0.01)) {
    throw std::invalid_argument("epsilon must lie in [0, 0.01)");
  }
  if (trials < 0) {
    throw std::invalid_argument("trials must be nonnegative");
  }

  const int n = config.ray_count();
  const double tolerance = std::max(3.0 * epsilon, 1e-9);
  const std::set<std::array<int, 2>> base_edges(config.orthogonal_pairs.begin(),
                                                config.orthogonal_pairs.end());
  const int base_triangles = static_cast<int>(config.internal_triples.size());

  PerturbationReport report;
  report.epsilon = epsilon;
  report.trials = trials;
  report.seed = seed;

  for (int t = 0; t < trials; ++t) {
    DeterministicRng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));

    std::vector<std::array<double, 3>> moved(n);
    for (int i = 0; i < n; ++i) {
      moved[i] = perturb_direction(config.rays[i].to_unit(), epsilon, rng);
    }

    std::set<std::array<int, 2>> edges;
    std::vector<std::vector<bool>> adjacent(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (std::fabs(dot3(moved[i], moved[j])) <= tolerance) {
          edges.insert({i, j});
          adjacent[i][j] = adjacent[j][i] = true;
        }
      }
    }
    int triangles = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!adjacent[i][j]) continue;
        for (int k = j + 1; k < n; ++k) {
          if (adjacent[i][k] && adjacent[j][k]) ++triangles;
        }
      }
    }

    if (edges == base_edges && triangles == base_triangles) {
      ++report.trials_preserved;
    } else {
      ++report.trials_violated;
      if (report.first_violation_trial < 0) report.first_violation_trial = t;
    }
  }

  return report;
}

}  // namespace kscheck
