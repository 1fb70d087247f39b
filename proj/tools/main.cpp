#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kscheck/derandomize.hpp"
#include "kscheck/fwt.hpp"
#include "kscheck/json_io.hpp"
#include "kscheck/peres.hpp"
#include "kscheck/quantum.hpp"
#include "kscheck/solver.hpp"

namespace {

using json = nlohmann::json;
using namespace kscheck;

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string output;
  std::string format = "json";
  std::uint64_t seed = 42;
  bool no_timestamp = false;
  std::string config_path;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write file: " + path);
  out << content;
  if (!out.good()) throw io_error("cannot write file: " + path);
}

void emit(const GlobalOptions& g, const std::string& content) {
  if (g.output.empty()) {
    std::cout << content;
    return;
  }
  write_file(g.output, content);
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

PeresConfiguration load_configuration(const GlobalOptions& g) {
  if (g.config_path.empty()) return build_peres_configuration();
  return configuration_from_json(read_file(g.config_path));
}

json envelope(const GlobalOptions& g, const char* command,
              std::uint64_t constraints_hash, json parameters, json result) {
  json j;
  j["schema_version"] = "1";
  j["command"] = command;
  j["constraints_hash"] = to_hex64(constraints_hash);
  j["parameters"] = std::move(parameters);
  if (!g.no_timestamp) j["timestamp"] = timestamp_utc();
  j["result"] = std::move(result);
  return j;
}

std::string pattern_string(int zero_index) {
  std::string s = "111";
  s[zero_index] = '0';
  return s;
}

json stats_json(const SearchStats& stats) {
  json j;
  j["branches"] = stats.branches;
  j["propagations"] = stats.propagations;
  j["conflicts"] = stats.conflicts;
  j["max_depth"] = stats.max_depth;
  return j;
}

std::string config_source(const GlobalOptions& g) {
  return g.config_path.empty() ? std::string("built-in") : g.config_path;
}

int cmd_generate(const GlobalOptions& g) {
  const PeresConfiguration config = load_configuration(g);
  const std::uint64_t hash = constraints_from_configuration(config).hash();

  if (g.format == "json") {
    emit(g, configuration_to_json(config));
  } else if (g.format == "csv") {
    emit(g, configuration_to_csv(config));
  } else {
    std::string text;
    text += "command: generate\n";
    text += "configuration: " + config_source(g) + "\n";
    text += "rays: " + std::to_string(config.ray_count()) + "\n";
    text += "orthogonal pairs: " +
            std::to_string(config.orthogonal_pairs.size()) + "\n";
    text += "internal triples: " +
            std::to_string(config.internal_triples.size()) + "\n";
    text += "completion triples: " +
            std::to_string(config.completion_triples.size()) + "\n";
    text += "total triples: " + std::to_string(config.triple_count()) + "\n";
    text += "quadruples: " + std::to_string(quadruple_count(config)) + "\n";
    text += "constraints hash: " + to_hex64(hash) + "\n";
    emit(g, text);
  }
  return 0;
}

int cmd_verify(const GlobalOptions& g, bool certify, bool wlog,
               std::string certificate_path) {
  if (g.format == "csv")
    throw usage_error("verify reports support json and text formats only");

  const PeresConfiguration config = load_configuration(g);
  const ColoringConstraints constraints = constraints_from_configuration(config);
  const bool expect_unsat = g.config_path.empty();

  const SearchResult result =
      search_101(constraints, SearchOptions{.certify = certify});

  bool ok = true;
  json res;
  res["rays"] = config.ray_count();
  res["edge_constraints"] = constraints.edges.size();
  res["triple_constraints"] = constraints.triples.size();
  res["satisfiable"] = result.satisfiable;
  res["stats"] = stats_json(result.stats);
  if (result.satisfiable) {
    res["model"] = result.model;
    if (expect_unsat) ok = false;
  }

  if (certify && !result.satisfiable) {
    const std::string path =
        certificate_path.empty() ? "certificate.jsonl" : certificate_path;
    write_file(path, certificate_to_jsonl(*result.certificate));
    const UnsatCertificate reread = certificate_from_jsonl(read_file(path));
    const VerificationResult verdict = verify_certificate(constraints, reread);
    json cert;
    cert["path"] = path;
    cert["steps"] = reread.steps.size();
    cert["verified"] = verdict.valid;
    if (!verdict.valid) cert["error"] = verdict.error;
    res["certificate"] = cert;
    ok = ok && verdict.valid;
  } else if (!certify && !certificate_path.empty()) {
    const UnsatCertificate loaded =
        certificate_from_jsonl(read_file(certificate_path));
    const VerificationResult verdict = verify_certificate(constraints, loaded);
    json cert;
    cert["path"] = certificate_path;
    cert["steps"] = loaded.steps.size();
    cert["verified"] = verdict.valid;
    if (!verdict.valid) cert["error"] = verdict.error;
    res["certificate"] = cert;
    ok = ok && verdict.valid;
  }

  if (wlog && !result.satisfiable) {
    const PrunedCertificate pruned =
        search_101_wlog(constraints, symmetry_group(config));
    const VerificationResult direct = verify_pruned_certificate(constraints, pruned);
    const UnsatCertificate expanded = expand_pruned_certificate(constraints, pruned);
    const VerificationResult plain = verify_certificate(constraints, expanded);

    std::size_t pruned_records = pruned.tail.size();
    for (const WlogFixing& fixing : pruned.fixings)
      pruned_records += 1 + fixing.propagations.size();

    json w;
    w["fixings"] = pruned.fixings.size();
    w["tail_steps"] = pruned.tail.size();
    w["records"] = pruned_records;
    w["verified"] = direct.valid;
    if (!direct.valid) w["error"] = direct.error;
    w["expanded_steps"] = expanded.steps.size();
    w["expanded_verified"] = plain.valid;
    if (certify) {
      const std::string base =
          certificate_path.empty() ? "certificate.jsonl" : certificate_path;
      const std::string pruned_path = base + ".pruned";
      write_file(pruned_path, pruned_certificate_to_jsonl(pruned));
      w["path"] = pruned_path;
      if (result.certificate)
        w["shorter_than_plain"] =
            pruned_records < result.certificate->steps.size();
    }
    res["wlog"] = w;
    ok = ok && direct.valid && plain.valid;
  }

  json params;
  params["configuration"] = config_source(g);
  params["certify"] = certify;
  params["wlog"] = wlog;
  if (!certificate_path.empty()) params["certificate"] = certificate_path;

  if (g.format == "json") {
    emit(g, envelope(g, "verify", constraints.hash(), params, res).dump(2) + "\n");
  } else {
    std::string text;
    text += "command: verify\n";
    text += "configuration: " + config_source(g) + "\n";
    text += "constraints hash: " + to_hex64(constraints.hash()) + "\n";
    text += std::string("verdict: ") +
            (result.satisfiable ? "SAT" : "UNSAT") + "\n";
    if (res.contains("certificate")) {
      text += "certificate steps: " +
              std::to_string(res["certificate"]["steps"].get<std::size_t>()) +
              "\n";
      text += std::string("certificate verified: ") +
              (res["certificate"]["verified"].get<bool>() ? "yes" : "no") + "\n";
    }
    if (res.contains("wlog")) {
      text += "wlog fixings: " +
              std::to_string(res["wlog"]["fixings"].get<std::size_t>()) + "\n";
      text += std::string("wlog verified: ") +
              (res["wlog"]["verified"].get<bool>() ? "yes" : "no") + "\n";
      text += std::string("wlog expansion verified: ") +
              (res["wlog"]["expanded_verified"].get<bool>() ? "yes" : "no") +
              "\n";
    }
    text += std::string("status: ") + (ok ? "pass" : "fail") + "\n";
    emit(g, text);
  }
  return ok ? 0 : 1;
}

int cmd_fwt(const GlobalOptions& g, bool run_derandomize,
            const std::string& tapes_path, const std::string& strategy_name,
            int draws) {
  if (g.format == "csv")
    throw usage_error("fwt reports support json and text formats only");

  const PeresConfiguration config = load_configuration(g);
  const ReductionReport report = fwt_reduction_check(config);
  const bool expect_unsat = g.config_path.empty();
  bool ok = !(expect_unsat && report.satisfiable);

  json res;
  res["rays"] = report.ray_count;
  res["triples"] = report.triple_count;
  res["quadruples"] = report.quadruple_count;
  res["binding_quadruples"] = report.binding_quadruple_count;
  res["reduction"] = json::array(
      {"a twin equation pins each triple response component to its member's "
       "ray bit wherever the quadruple's ray sits in the triple",
       "the spin codomain then forces the ray bits to place exactly one 0 on "
       "each internal triple and never two 0s on an orthogonal pair",
       "such tables exist exactly when that 101 coloring search is "
       "satisfiable"});
  res["satisfiable"] = report.satisfiable;
  res["stats"] = stats_json(report.stats);
  if (report.satisfiable) {
    json tables;
    tables["theta0"] = report.tables.ray_responses;
    tables["theta1"] = report.tables.triple_responses;
    res["tables"] = tables;
  }

  if (run_derandomize) {
    const Strategy& strategy = strategy_by_name(strategy_name);
    const TapeSet tapes =
        tapes_path.empty()
            ? seeded_tapes(quadruple_count(config), draws, g.seed)
            : tapes_from_json(read_file(tapes_path));
    const ResponseTables tables = derandomize(config, tapes, strategy, draws);
    const std::vector<QuadrupleViolation> violations =
        all_violations(config, tables);

    json d;
    d["strategy"] = strategy.name;
    d["strategy_description"] = strategy.description;
    d["draws"] = draws;
    d["tapes"] = tapes_path.empty()
                     ? "seeded(" + std::to_string(g.seed) + ")"
                     : tapes_path;
    d["violation_count"] = violations.size();
    if (violations.empty()) {
      d["violation"] = nullptr;
    } else {
      const QuadrupleViolation& v = violations.front();
      json vj;
      vj["quadruple_index"] = v.quadruple_index;
      vj["triple_id"] = v.triple_id;
      vj["ray_id"] = v.ray_id;
      vj["kind"] = v.kind == QuadrupleViolation::Kind::Spin ? "spin" : "twin";
      d["violation"] = vj;
    }
    res["derandomization"] = d;
  }

  json params;
  params["configuration"] = config_source(g);
  params["derandomize"] = run_derandomize;
  if (run_derandomize) {
    params["strategy"] = strategy_name;
    params["draws"] = draws;
    if (!tapes_path.empty()) params["tapes"] = tapes_path;
  }

  if (g.format == "json") {
    emit(g, envelope(g, "fwt", report.constraints_hash, params, res).dump(2) +
                "\n");
  } else {
    std::string text;
    text += "command: fwt\n";
    text += "configuration: " + config_source(g) + "\n";
    text += "quadruples: " + std::to_string(report.quadruple_count) + " (" +
            std::to_string(report.triple_count) + " triples x " +
            std::to_string(report.ray_count) + " rays)\n";
    text += "reduction: response tables satisfying every quadruple exist "
            "exactly when the rays admit a 101 coloring\n";
    text += "constraints hash: " + to_hex64(report.constraints_hash) + "\n";
    text += std::string("coloring search: ") +
            (report.satisfiable ? "SAT" : "UNSAT") + "\n";
    if (!report.satisfiable)
      text += "conclusion: no response tables satisfy every quadruple\n";
    if (run_derandomize && res.contains("derandomization")) {
      const json& d = res["derandomization"];
      text += "derandomized strategy: " + d["strategy"].get<std::string>() +
              "\n";
      if (d["violation"].is_null()) {
        text += "violations: none\n";
      } else {
        text += "violations: " +
                std::to_string(d["violation_count"].get<std::size_t>()) +
                ", first at quadruple " +
                std::to_string(d["violation"]["quadruple_index"]
                                   .get<std::int64_t>()) +
                " (" + d["violation"]["kind"].get<std::string>() + ")\n";
      }
    }
    emit(g, text);
  }
  return ok ? 0 : 1;
}

int cmd_twin(const GlobalOptions& g, std::int64_t n, int triple_id, int w_id) {
  const PeresConfiguration config = load_configuration(g);
  const ColoringConstraints constraints = constraints_from_configuration(config);

  if (n < 1) throw usage_error("twin requires at least one run");
  if (triple_id < 0 || triple_id >= config.triple_count())
    throw usage_error("triple id out of range");
  const TripleDirections frame = triple_directions(config, triple_id);
  if (w_id < 0) w_id = frame.ray_ids[0];
  if (w_id < 0 || w_id >= config.ray_count())
    throw usage_error("ray id out of range");

  int member_index = -1;
  for (int j = 0; j < 3; ++j)
    if (frame.ray_ids[j] == w_id) member_index = j;

  const SampleReport report =
      sample_run(frame.unit, config.rays[w_id].to_unit(), n, g.seed);

  bool ok = report.within_three_sigma();
  if (member_index >= 0)
    ok = ok && report.agreement_count(member_index) == n;

  if (g.format == "csv") {
    emit(g, sampling_log_to_csv(report, triple_id, w_id));
    return ok ? 0 : 1;
  }

  json res;
  res["triple_id"] = triple_id;
  res["w_id"] = w_id;
  res["member_index"] = member_index;
  res["runs"] = n;
  res["seed"] = g.seed;
  json cells = json::array();
  for (int k = 0; k < 3; ++k) {
    for (int b = 0; b < 2; ++b) {
      const double p = report.exact.probability(k, b);
      const double clamped = std::min(std::max(p, 0.0), 1.0);
      const double freq = report.empirical(k, b);
      const double band =
          3.0 * std::sqrt(clamped * (1.0 - clamped) / static_cast<double>(n));
      json cell;
      cell["a_outcome"] = pattern_string(k);
      cell["b_outcome"] = b;
      cell["exact"] = p;
      cell["count"] = report.counts[k][b];
      cell["empirical"] = freq;
      cell["three_sigma_pass"] = std::abs(freq - clamped) <= band;
      cells.push_back(cell);
    }
  }
  res["cells"] = cells;
  res["b_marginal_zero_exact"] = report.exact.b_marginal(0);
  if (member_index >= 0) {
    res["disagreement_probability"] =
        report.exact.disagreement_probability(member_index);
    res["agreements"] = report.agreement_count(member_index);
  }
  res["within_three_sigma"] = report.within_three_sigma();

  json params;
  params["configuration"] = config_source(g);
  params["runs"] = n;
  params["seed"] = g.seed;
  params["triple"] = triple_id;
  params["w"] = w_id;

  if (g.format == "json") {
    emit(g, envelope(g, "twin", constraints.hash(), params, res).dump(2) + "\n");
  } else {
    std::string text;
    text += "command: twin\n";
    text += "triple: " + std::to_string(triple_id) + ", w: " +
            std::to_string(w_id) + ", runs: " + std::to_string(n) +
            ", seed: " + std::to_string(g.seed) + "\n";
    if (member_index >= 0) {
      text += "w is member " + std::to_string(member_index) +
              " of the triple\n";
      text += "agreements: " +
              std::to_string(report.agreement_count(member_index)) + "/" +
              std::to_string(n) + "\n";
    } else {
      text += "w is not a member of the triple\n";
    }
    text += std::string("three sigma bands: ") +
            (report.within_three_sigma() ? "pass" : "fail") + "\n";
    emit(g, text);
  }
  return ok ? 0 : 1;
}

int cmd_perturb(const GlobalOptions& g, double epsilon, int trials) {
  if (g.format == "csv")
    throw usage_error("perturb reports support json and text formats only");

  const PeresConfiguration config = load_configuration(g);
  const ColoringConstraints constraints = constraints_from_configuration(config);
  const PerturbationReport report =
      perturbation_check(config, epsilon, trials, g.seed);

  json res;
  res["epsilon"] = report.epsilon;
  res["trials"] = report.trials;
  res["seed"] = report.seed;
  res["trials_preserved"] = report.trials_preserved;
  res["trials_violated"] = report.trials_violated;
  res["first_violation_trial"] = report.first_violation_trial;
  res["structure_preserved"] = report.structure_preserved();

  json params;
  params["configuration"] = config_source(g);
  params["epsilon"] = epsilon;
  params["trials"] = trials;
  params["seed"] = g.seed;

  if (g.format == "json") {
    emit(g,
         envelope(g, "perturb", constraints.hash(), params, res).dump(2) + "\n");
  } else {
    std::string text;
    text += "command: perturb\n";
    text += "epsilon: " + std::to_string(epsilon) + ", trials: " +
            std::to_string(trials) + ", seed: " + std::to_string(g.seed) +
            "\n";
    text += "preserved: " + std::to_string(report.trials_preserved) + "/" +
            std::to_string(report.trials) + "\n";
    text += std::string("structure preserved: ") +
            (report.structure_preserved() ? "yes" : "no") + "\n";
    emit(g, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact verification toolkit for the Peres 33-ray configuration"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--output", g.output, "write the result to this file instead of stdout");
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--seed", g.seed, "seed for all randomized work (default 42)");
  app.add_flag("--no-timestamp", g.no_timestamp,
               "omit the timestamp so outputs are byte reproducible");
  app.add_option("--config", g.config_path,
                 "import a configuration JSON file instead of building the "
                 "33-ray set");

  int exit_code = 0;

  auto* generate = app.add_subcommand(
      "generate", "emit the ray configuration (json schema, csv table or text summary)");
  generate->callback([&] { exit_code = cmd_generate(g); });

  auto* verify = app.add_subcommand(
      "verify", "run the structural self-checks and the 101 coloring search");
  bool certify = false;
  bool wlog = false;
  std::string certificate_path;
  verify->add_flag("--certify", certify,
                   "write the refutation certificate and re-verify it");
  verify->add_flag("--wlog", wlog,
                   "also run the symmetry-pruned search and verify both forms");
  verify->add_option("--certificate", certificate_path,
                     "certificate file path (written with --certify, "
                     "verified standalone without it)");
  verify->callback(
      [&] { exit_code = cmd_verify(g, certify, wlog, certificate_path); });

  auto* fwt = app.add_subcommand(
      "fwt", "reduce response-table existence to the coloring search");
  bool run_derandomize = false;
  std::string tapes_path;
  std::string strategy_name = "constant";
  int draws = 4;
  fwt->add_flag("--derandomize", run_derandomize,
                "fix a strategy's randomness in advance and scan for violations");
  fwt->add_option("--tapes", tapes_path,
                  "tape file (default: tapes seeded from --seed)");
  fwt->add_option("--strategy", strategy_name, "scripted strategy name");
  fwt->add_option("--draws", draws, "tape bits each response may read")
      ->check(CLI::NonNegativeNumber);
  fwt->callback([&] {
    exit_code = cmd_fwt(g, run_derandomize, tapes_path, strategy_name, draws);
  });

  auto* twin = app.add_subcommand(
      "twin", "sample the twinned experiment against the exact distribution");
  std::int64_t runs = 100000;
  int triple_id = 0;
  int w_id = -1;
  twin->add_option("-n,--runs", runs, "number of sampled runs");
  twin->add_option("--triple", triple_id, "triple id (0-based)");
  twin->add_option("--w", w_id,
                   "ray id measured by the second experimenter (default: the "
                   "triple's first member)");
  twin->callback([&] { exit_code = cmd_twin(g, runs, triple_id, w_id); });

  auto* perturb = app.add_subcommand(
      "perturb", "check structural stability under angular perturbations");
  double epsilon = 1e-6;
  int trials = 100;
  perturb->add_option("--epsilon", epsilon, "maximum perturbation angle");
  perturb->add_option("--trials", trials, "number of perturbation trials")
      ->check(CLI::NonNegativeNumber);
  perturb->callback([&] { exit_code = cmd_perturb(g, epsilon, trials); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const self_check_error& e) {
    std::cerr << "self-check failed: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return exit_code;
}
