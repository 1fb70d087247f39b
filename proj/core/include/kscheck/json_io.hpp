#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "kscheck/derandomize.hpp"
#include "kscheck/peres.hpp"
#include "kscheck/quantum.hpp"
#include "kscheck/solver.hpp"

namespace kscheck {

// Malformed or inconsistent serialized artifacts.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 16 lowercase hex digits, zero padded; the wire form of constraint hashes
// (64-bit values do not survive JSON number parsing everywhere).
std::string to_hex64(std::uint64_t value);
std::uint64_t from_hex64(const std::string& text);

// Configuration schema: {"rays": [[[xa,xb],[ya,yb],[za,zb]], ...],
// "orthogonal_pairs": [[i,j],...], "internal_triples": [[i,j,k],...],
// "completion_triples": [{"pair":[i,j],"third":[[a,b],...]},...]} where each
// scalar [a,b] encodes a + b*sqrt(2) and indices are 0-based and canonical.
std::string configuration_to_json(const PeresConfiguration& config);

// Reads the rays, rebuilds the structure from scratch, and cross-checks any
// structure lists present in the text against the rebuilt ones. Throws
// io_error on malformed input or mismatched structure.
PeresConfiguration configuration_from_json(const std::string& text);

// Ray table with exact integer components and a floating-point rendering of
// the unit vector for plotting.
std::string configuration_to_csv(const PeresConfiguration& config);

// Certificates travel as JSON lines: a header object carrying the constraint
// hash, then one step object per line.
std::string certificate_to_jsonl(const UnsatCertificate& certificate);
UnsatCertificate certificate_from_jsonl(const std::string& text);

// Same layout with the fixings between header and tail steps, one fixing
// object (including its propagations) per line.
std::string pruned_certificate_to_jsonl(const PrunedCertificate& certificate);
PrunedCertificate pruned_certificate_from_jsonl(const std::string& text);

// Tape schema: {"format":"tapes","version":1,"bits":[[...],...]} with row i
// holding the tape of quadruple i+1.
std::string tapes_to_json(const TapeSet& tapes);
TapeSet tapes_from_json(const std::string& text);

// Per-run sampling log, one row per run: run_index, triple_id, w_id,
// a_outcome (three bits, e.g. 101), b_outcome.
std::string sampling_log_to_csv(const SampleReport& report, int triple_id,
                                int w_id);

}  // namespace kscheck
