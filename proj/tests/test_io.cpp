#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <string>
#include <vector>

#include "kscheck/derandomize.hpp"
#include "kscheck/exact.hpp"
#include "kscheck/json_io.hpp"
#include "kscheck/peres.hpp"
#include "kscheck/quantum.hpp"
#include "kscheck/solver.hpp"

using kscheck::build_peres_configuration;
using kscheck::certificate_from_jsonl;
using kscheck::certificate_to_jsonl;
using kscheck::ColoringConstraints;
using kscheck::configuration_from_json;
using kscheck::configuration_to_csv;
using kscheck::configuration_to_json;
using kscheck::constraints_from_configuration;
using kscheck::from_hex64;
using kscheck::io_error;
using kscheck::PeresConfiguration;
using kscheck::pruned_certificate_from_jsonl;
using kscheck::pruned_certificate_to_jsonl;
using kscheck::PrunedCertificate;
using kscheck::sample_run;
using kscheck::sampling_log_to_csv;
using kscheck::search_101;
using kscheck::search_101_wlog;
using kscheck::SearchOptions;
using kscheck::SearchResult;
using kscheck::seeded_tapes;
using kscheck::symmetry_group;
using kscheck::TapeSet;
using kscheck::tapes_from_json;
using kscheck::tapes_to_json;
using kscheck::to_hex64;
using kscheck::UnsatCertificate;
using kscheck::Vector3d;
using kscheck::verify_certificate;
using kscheck::verify_pruned_certificate;

namespace {

std::string replace_once(std::string text, const std::string& from,
                         const std::string& to) {
  const std::size_t at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("hashes travel as fixed width hex strings") {
  CHECK(to_hex64(0) == "0000000000000000");
  CHECK(to_hex64(0xdeadbeef01234567ull) == "deadbeef01234567");
  CHECK(from_hex64("deadbeef01234567") == 0xdeadbeef01234567ull);
  CHECK(from_hex64(to_hex64(0xffffffffffffffffull)) == 0xffffffffffffffffull);

  CHECK_THROWS_AS((void)from_hex64("abc"), io_error);
  CHECK_THROWS_AS((void)from_hex64("zzzzzzzzzzzzzzzz"), io_error);
  CHECK_THROWS_AS((void)from_hex64("deadbeef012345678"), io_error);
}

TEST_CASE("configuration survives a json round trip byte for byte") {
  const PeresConfiguration config = build_peres_configuration();
  const std::string text = configuration_to_json(config);

  const PeresConfiguration imported = configuration_from_json(text);
  CHECK(imported.rays == config.rays);
  CHECK(imported.orthogonal_pairs == config.orthogonal_pairs);
  CHECK(imported.internal_triples == config.internal_triples);
  REQUIRE(imported.completion_triples.size() ==
          config.completion_triples.size());
  for (std::size_t i = 0; i < config.completion_triples.size(); ++i) {
    CHECK(imported.completion_triples[i].pair ==
          config.completion_triples[i].pair);
    CHECK(imported.completion_triples[i].third ==
          config.completion_triples[i].third);
  }

  CHECK(configuration_to_json(imported) == text);
}

TEST_CASE("configuration import validates structure against the rays") {
  const PeresConfiguration config = build_peres_configuration();
  const std::string text = configuration_to_json(config);

  // a rays-only file is enough; the structure is rebuilt
  std::string rays_only = "{\"rays\":[";
  for (int i = 0; i < config.ray_count(); ++i) {
    const kscheck::ExactVector3 v = config.rays[i].rep();
    if (i > 0) rays_only += ',';
    rays_only += '[';
    for (int c = 0; c < 3; ++c) {
      const kscheck::ExactScalar s = c == 0 ? v.x : c == 1 ? v.y : v.z;
      if (c > 0) rays_only += ',';
      rays_only +=
          '[' + std::to_string(s.a) + ',' + std::to_string(s.b) + ']';
    }
    rays_only += ']';
  }
  rays_only += "]}";
  const PeresConfiguration rebuilt = configuration_from_json(rays_only);
  CHECK(rebuilt.orthogonal_pairs == config.orthogonal_pairs);
  CHECK(rebuilt.rays == config.rays);

  // hand written toy configuration
  const std::string toy =
      "{\"rays\":[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]}";
  const PeresConfiguration axes = configuration_from_json(toy);
  CHECK(axes.ray_count() == 3);
  CHECK(axes.internal_triples.size() == 1);

  CHECK_THROWS_AS((void)configuration_from_json("not json"), io_error);
  CHECK_THROWS_AS((void)configuration_from_json("{\"rays\":[[[0,0],[0,0],[0,0]]]}"),
                  io_error);
  CHECK_THROWS_AS((void)configuration_from_json("{\"rays\":[[[1,0],[0,0]]]}"),
                  io_error);

  // tampering with a listed pair must be caught
  const std::string tampered = replace_once(
      text, "\"orthogonal_pairs\": [\n    [\n      0,\n      1\n    ]",
      "\"orthogonal_pairs\": [\n    [\n      0,\n      2\n    ]");
  CHECK_THROWS_AS((void)configuration_from_json(tampered), io_error);
}

TEST_CASE("the csv ray table lists exact components and unit renderings") {
  const PeresConfiguration config = build_peres_configuration();
  const std::string csv = configuration_to_csv(config);

  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n' ? 1 : 0;
  CHECK(lines == 34);

  CHECK(csv.rfind(
            "index,x_int,x_sqrt2,y_int,y_sqrt2,z_int,z_sqrt2,unit_x,unit_y,unit_z\n",
            0) == 0);
  // rays are canonically sorted, so row 0 is the z axis
  CHECK(csv.find("\n0,0,0,0,0,1,0,0,0,1\n") != std::string::npos);
}

TEST_CASE("plain certificates survive the jsonl round trip") {
  const ColoringConstraints constraints =
      constraints_from_configuration(build_peres_configuration());
  const SearchResult result = search_101(constraints, SearchOptions{.certify = true});
  REQUIRE(result.certificate.has_value());

  const std::string text = certificate_to_jsonl(*result.certificate);
  CHECK(text.rfind("{\"constraints_hash\":\"", 0) == 0);
  CHECK(text.find("unsat-certificate") != std::string::npos);
  CHECK(text.find(to_hex64(constraints.hash())) != std::string::npos);

  const UnsatCertificate parsed = certificate_from_jsonl(text);
  CHECK(parsed.ray_count == result.certificate->ray_count);
  CHECK(parsed.constraints_hash == result.certificate->constraints_hash);
  CHECK(parsed.steps == result.certificate->steps);
  CHECK(verify_certificate(constraints, parsed).valid);
  CHECK(certificate_to_jsonl(parsed) == text);
}

TEST_CASE("malformed certificate text is rejected with a line number") {
  const ColoringConstraints constraints =
      constraints_from_configuration(build_peres_configuration());
  const SearchResult result = search_101(constraints, SearchOptions{.certify = true});
  const std::string text = certificate_to_jsonl(*result.certificate);

  CHECK_THROWS_AS((void)certificate_from_jsonl(""), io_error);
  CHECK_THROWS_AS((void)certificate_from_jsonl("{\"step\":\"branch\"}"), io_error);

  const std::string unknown_kind =
      replace_once(text, "\"step\":\"branch\"", "\"step\":\"guess\"");
  CHECK_THROWS_WITH_AS((void)certificate_from_jsonl(unknown_kind),
                       doctest::Contains("line 2"), io_error);

  // a forged value parses but fails verification
  const std::string forged =
      replace_once(text, "\"step\":\"propagate\",\"value\":1",
                   "\"step\":\"propagate\",\"value\":0");
  const UnsatCertificate parsed = certificate_from_jsonl(forged);
  CHECK(!verify_certificate(constraints, parsed).valid);
}

TEST_CASE("pruned certificates survive the jsonl round trip") {
  const PeresConfiguration config = build_peres_configuration();
  const ColoringConstraints constraints = constraints_from_configuration(config);
  const PrunedCertificate pruned =
      search_101_wlog(constraints, symmetry_group(config));
  REQUIRE(!pruned.fixings.empty());

  const std::string text = pruned_certificate_to_jsonl(pruned);
  CHECK(text.find("pruned-unsat-certificate") != std::string::npos);
  CHECK(text.find("\"type\":\"fixing\"") != std::string::npos);

  const PrunedCertificate parsed = pruned_certificate_from_jsonl(text);
  CHECK(parsed.ray_count == pruned.ray_count);
  CHECK(parsed.constraints_hash == pruned.constraints_hash);
  REQUIRE(parsed.fixings.size() == pruned.fixings.size());
  for (std::size_t i = 0; i < parsed.fixings.size(); ++i) {
    CHECK(parsed.fixings[i].triple_id == pruned.fixings[i].triple_id);
    CHECK(parsed.fixings[i].ray == pruned.fixings[i].ray);
    CHECK(parsed.fixings[i].to_second == pruned.fixings[i].to_second);
    CHECK(parsed.fixings[i].to_third == pruned.fixings[i].to_third);
    CHECK(parsed.fixings[i].propagations == pruned.fixings[i].propagations);
  }
  CHECK(parsed.tail == pruned.tail);
  CHECK(verify_pruned_certificate(constraints, parsed).valid);
  CHECK(pruned_certificate_to_jsonl(parsed) == text);
}

TEST_CASE("tapes survive a json round trip and reject bad bits") {
  const TapeSet tapes = seeded_tapes(10, 4, 3);
  const std::string text = tapes_to_json(tapes);
  const TapeSet parsed = tapes_from_json(text);
  CHECK(parsed.bits == tapes.bits);

  CHECK_THROWS_AS((void)tapes_from_json("{\"bits\":[[0]]}"), io_error);
  CHECK_THROWS_AS(
      (void)tapes_from_json("{\"format\":\"tapes\",\"bits\":[[0,2]]}"),
      io_error);
  CHECK_THROWS_AS((void)tapes_from_json("[]"), io_error);
}

TEST_CASE("the sampling log renders one csv row per run") {
  const std::array<Vector3d, 3> axes = {Vector3d{1.0, 0.0, 0.0},
                                        Vector3d{0.0, 1.0, 0.0},
                                        Vector3d{0.0, 0.0, 1.0}};
  const auto report = sample_run(axes, axes[0], 5, 11);
  const std::string csv = sampling_log_to_csv(report, 7, 0);

  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n' ? 1 : 0;
  CHECK(lines == 6);
  CHECK(csv.rfind("run_index,triple_id,w_id,a_outcome,b_outcome\n", 0) == 0);

  // row format: index, ids, three outcome bits, b bit
  const std::string first_pattern =
      std::string() +
      static_cast<char>('0' + (report.log[0].zero_index == 0 ? 0 : 1)) +
      static_cast<char>('0' + (report.log[0].zero_index == 1 ? 0 : 1)) +
      static_cast<char>('0' + (report.log[0].zero_index == 2 ? 0 : 1));
  CHECK(csv.find("\n0,7,0," + first_pattern + "," +
                 std::to_string(report.log[0].b_outcome) + "\n") !=
        std::string::npos);
}
