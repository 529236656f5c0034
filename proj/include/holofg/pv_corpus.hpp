#pragma once

#include <optional>
#include <string>
#include <vector>

#include "holofg/pv.hpp"

namespace holofg {

/// One PV test case. `beta` in the file is either a builtin name or a table
/// of terms [re, im, [a...], [b...]] meaning (re + i im) z^a zbar^b.
struct PVCorpusCase {
  std::string name;
  PVIntegrand integrand;
  std::optional<cplx> expected;
  /// Free-form note on where the expected value comes from.
  std::string provenance;
};

/// Parses {"cases": [{name, m, n, i, k, beta, expected: [re, im], provenance}]}.
/// Throws std::runtime_error on malformed input.
std::vector<PVCorpusCase> parse_pv_corpus(const std::string& json_text);
std::vector<PVCorpusCase> load_pv_corpus(const std::string& path);

}  // namespace holofg
