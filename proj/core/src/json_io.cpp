#include "kscheck/json_io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <sstream>
#include <utility>
#include <vector>

namespace kscheck {

namespace {

using nlohmann::json;

json scalar_to_json(const ExactScalar& s) { return json::array({s.a, s.b}); }

ExactScalar scalar_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer())
    throw io_error("exact scalar must be a pair of integers");
  return ExactScalar{j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
}

json ray_to_json(const Ray& r) {
  const ExactVector3 v = r.rep();
  return json::array(
      {scalar_to_json(v.x), scalar_to_json(v.y), scalar_to_json(v.z)});
}

Ray ray_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw io_error("ray must be a triple of exact scalars");
  return Ray::canonicalize({scalar_from_json(j[0]), scalar_from_json(j[1]),
                            scalar_from_json(j[2])});
}

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw io_error("malformed JSON");
  return j;
}

json parse_line(const std::string& line, std::size_t line_number) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded())
    throw io_error("line " + std::to_string(line_number) +
                   ": malformed JSON");
  return j;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  std::istringstream stream(text);
  while (std::getline(stream, current))
    if (!current.empty()) lines.push_back(current);
  return lines;
}

const char* step_name(StepKind kind) {
  switch (kind) {
    case StepKind::Branch:
      return "branch";
    case StepKind::Propagate:
      return "propagate";
    case StepKind::Conflict:
      return "conflict";
    case StepKind::Backtrack:
      return "backtrack";
  }
  return "";
}

json step_to_json(const CertificateStep& step) {
  json j;
  j["step"] = step_name(step.kind);
  switch (step.kind) {
    case StepKind::Branch:
      j["ray"] = step.ray;
      j["value"] = step.value;
      j["level"] = step.level;
      break;
    case StepKind::Propagate:
      j["ray"] = step.ray;
      j["value"] = step.value;
      j["reason"] = step.reason;
      break;
    case StepKind::Conflict:
      j["reason"] = step.reason;
      break;
    case StepKind::Backtrack:
      j["level"] = step.level;
      break;
  }
  return j;
}

int int_field(const json& j, const char* key, std::size_t line_number) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw io_error("line " + std::to_string(line_number) +
                   ": missing integer field " + key);
  return j[key].get<int>();
}

CertificateStep step_from_json(const json& j, std::size_t line_number) {
  if (!j.contains("step") || !j["step"].is_string())
    throw io_error("line " + std::to_string(line_number) +
                   ": missing step kind");
  const std::string kind = j["step"].get<std::string>();
  if (kind == "branch")
    return branch_step(int_field(j, "ray", line_number),
                       int_field(j, "value", line_number),
                       int_field(j, "level", line_number));
  if (kind == "propagate")
    return propagate_step(int_field(j, "ray", line_number),
                          int_field(j, "value", line_number),
                          int_field(j, "reason", line_number));
  if (kind == "conflict") return conflict_step(int_field(j, "reason", line_number));
  if (kind == "backtrack")
    return backtrack_step(int_field(j, "level", line_number));
  throw io_error("line " + std::to_string(line_number) + ": unknown step kind " +
                 kind);
}

json header_json(const char* format, int ray_count, std::uint64_t hash) {
  json j;
  j["type"] = "header";
  j["format"] = format;
  j["version"] = 1;
  j["ray_count"] = ray_count;
  j["constraints_hash"] = to_hex64(hash);
  return j;
}

std::pair<int, std::uint64_t> read_header(const json& j, const char* format) {
  if (!j.contains("type") || j["type"] != "header" || !j.contains("format") ||
      j["format"] != format)
    throw io_error(std::string("expected a ") + format + " header line");
  if (!j.contains("ray_count") || !j["ray_count"].is_number_integer() ||
      !j.contains("constraints_hash") || !j["constraints_hash"].is_string())
    throw io_error("header is missing ray_count or constraints_hash");
  return {j["ray_count"].get<int>(),
          from_hex64(j["constraints_hash"].get<std::string>())};
}

void append_float(std::string& out, double value) {
  char buffer[32];
  const auto result =
      std::to_chars(buffer, buffer + sizeof buffer, value);
  out.append(buffer, result.ptr);
}

}  // namespace

std::string to_hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx",
                static_cast<unsigned long long>(value));
  return std::string(buffer, 16);
}

std::uint64_t from_hex64(const std::string& text) {
  if (text.size() != 16) throw io_error("hash must be 16 hex digits");
  std::uint64_t value = 0;
  const auto result =
      std::from_chars(text.data(), text.data() + text.size(), value, 16);
  if (result.ec != std::errc{} || result.ptr != text.data() + text.size())
    throw io_error("hash must be 16 hex digits");
  return value;
}

std::string configuration_to_json(const PeresConfiguration& config) {
  json j;
  j["rays"] = json::array();
  for (const Ray& r : config.rays) j["rays"].push_back(ray_to_json(r));
  j["orthogonal_pairs"] = config.orthogonal_pairs;
  j["internal_triples"] = config.internal_triples;
  j["completion_triples"] = json::array();
  for (const CompletionTriple& c : config.completion_triples) {
    json entry;
    entry["pair"] = c.pair;
    entry["third"] = ray_to_json(c.third);
    j["completion_triples"].push_back(entry);
  }
  return j.dump(2) + "\n";
}

PeresConfiguration configuration_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object() || !j.contains("rays") || !j["rays"].is_array())
    throw io_error("configuration must be an object with a rays array");

  std::vector<Ray> rays;
  rays.reserve(j["rays"].size());
  try {
    for (const json& entry : j["rays"]) rays.push_back(ray_from_json(entry));
  } catch (const std::domain_error& e) {
    throw io_error(std::string("bad ray: ") + e.what());
  }

  PeresConfiguration config;
  try {
    config = configuration_from_rays(std::move(rays));
  } catch (const std::exception& e) {
    throw io_error(std::string("configuration rejected: ") + e.what());
  }

  if (j.contains("orthogonal_pairs") &&
      j["orthogonal_pairs"] != json(config.orthogonal_pairs))
    throw io_error("orthogonal_pairs do not match the rays");
  if (j.contains("internal_triples") &&
      j["internal_triples"] != json(config.internal_triples))
    throw io_error("internal_triples do not match the rays");
  if (j.contains("completion_triples")) {
    const json& listed = j["completion_triples"];
    if (!listed.is_array() ||
        listed.size() != config.completion_triples.size())
      throw io_error("completion_triples do not match the rays");
    for (std::size_t i = 0; i < listed.size(); ++i) {
      const CompletionTriple& built = config.completion_triples[i];
      const json& entry = listed[i];
      if (!entry.is_object() || entry["pair"] != json(built.pair) ||
          ray_from_json(entry["third"]) != built.third)
        throw io_error("completion_triples do not match the rays");
    }
  }
  return config;
}

std::string configuration_to_csv(const PeresConfiguration& config) {
  std::string out =
      "index,x_int,x_sqrt2,y_int,y_sqrt2,z_int,z_sqrt2,unit_x,unit_y,unit_z\n";
  for (int i = 0; i < config.ray_count(); ++i) {
    const ExactVector3 v = config.rays[i].rep();
    const std::array<double, 3> u = config.rays[i].to_unit();
    out += std::to_string(i);
    for (const ExactScalar& s : {v.x, v.y, v.z}) {
      out += ',';
      out += std::to_string(s.a);
      out += ',';
      out += std::to_string(s.b);
    }
    for (double c : u) {
      out += ',';
      append_float(out, c);
    }
    out += '\n';
  }
  return out;
}

std::string certificate_to_jsonl(const UnsatCertificate& certificate) {
  std::string out =
      header_json("unsat-certificate", certificate.ray_count,
                  certificate.constraints_hash)
          .dump() +
      "\n";
  for (const CertificateStep& step : certificate.steps)
    out += step_to_json(step).dump() + "\n";
  return out;
}

UnsatCertificate certificate_from_jsonl(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw io_error("empty certificate");

  UnsatCertificate certificate;
  const auto header = read_header(parse_line(lines[0], 1), "unsat-certificate");
  certificate.ray_count = header.first;
  certificate.constraints_hash = header.second;
  for (std::size_t i = 1; i < lines.size(); ++i)
    certificate.steps.push_back(
        step_from_json(parse_line(lines[i], i + 1), i + 1));
  return certificate;
}

std::string pruned_certificate_to_jsonl(const PrunedCertificate& certificate) {
  std::string out =
      header_json("pruned-unsat-certificate", certificate.ray_count,
                  certificate.constraints_hash)
          .dump() +
      "\n";
  for (const WlogFixing& fixing : certificate.fixings) {
    json j;
    j["type"] = "fixing";
    j["triple_id"] = fixing.triple_id;
    j["ray"] = fixing.ray;
    j["to_second"] = fixing.to_second;
    j["to_third"] = fixing.to_third;
    j["propagations"] = json::array();
    for (const CertificateStep& step : fixing.propagations)
      j["propagations"].push_back(step_to_json(step));
    out += j.dump() + "\n";
  }
  for (const CertificateStep& step : certificate.tail)
    out += step_to_json(step).dump() + "\n";
  return out;
}

PrunedCertificate pruned_certificate_from_jsonl(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw io_error("empty certificate");

  PrunedCertificate certificate;
  const auto header =
      read_header(parse_line(lines[0], 1), "pruned-unsat-certificate");
  certificate.ray_count = header.first;
  certificate.constraints_hash = header.second;

  std::size_t i = 1;
  for (; i < lines.size(); ++i) {
    const json j = parse_line(lines[i], i + 1);
    if (!j.contains("type") || j["type"] != "fixing") break;
    WlogFixing fixing;
    fixing.triple_id = int_field(j, "triple_id", i + 1);
    fixing.ray = int_field(j, "ray", i + 1);
    if (!j.contains("to_second") || !j["to_second"].is_array() ||
        !j.contains("to_third") || !j["to_third"].is_array() ||
        !j.contains("propagations") || !j["propagations"].is_array())
      throw io_error("line " + std::to_string(i + 1) +
                     ": fixing is missing its permutations or propagations");
    fixing.to_second = j["to_second"].get<std::vector<int>>();
    fixing.to_third = j["to_third"].get<std::vector<int>>();
    for (const json& step : j["propagations"])
      fixing.propagations.push_back(step_from_json(step, i + 1));
    certificate.fixings.push_back(std::move(fixing));
  }
  for (; i < lines.size(); ++i)
    certificate.tail.push_back(
        step_from_json(parse_line(lines[i], i + 1), i + 1));
  return certificate;
}

std::string tapes_to_json(const TapeSet& tapes) {
  json j;
  j["format"] = "tapes";
  j["version"] = 1;
  j["bits"] = tapes.bits;
  return j.dump() + "\n";
}

TapeSet tapes_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object() || !j.contains("format") || j["format"] != "tapes" ||
      !j.contains("bits") || !j["bits"].is_array())
    throw io_error("tape file must be a tapes object with a bits array");
  TapeSet tapes;
  for (const json& row : j["bits"]) {
    if (!row.is_array()) throw io_error("each tape must be an array of bits");
    std::vector<int> tape;
    tape.reserve(row.size());
    for (const json& b : row) {
      if (!b.is_number_integer() ||
          (b.get<int>() != 0 && b.get<int>() != 1))
        throw io_error("tape entries must be 0 or 1");
      tape.push_back(b.get<int>());
    }
    tapes.bits.push_back(std::move(tape));
  }
  return tapes;
}

std::string sampling_log_to_csv(const SampleReport& report, int triple_id,
                                int w_id) {
  std::string out = "run_index,triple_id,w_id,a_outcome,b_outcome\n";
  for (const SampleRecord& record : report.log) {
    const std::array<int, 3> pattern =
        OutcomeDistribution::pattern(record.zero_index);
    out += std::to_string(record.run_index);
    out += ',';
    out += std::to_string(triple_id);
    out += ',';
    out += std::to_string(w_id);
    out += ',';
    for (int bit : pattern) out += static_cast<char>('0' + bit);
    out += ',';
    out += std::to_string(record.b_outcome);
    out += '\n';
  }
  return out;
}

}  // namespace kscheck
