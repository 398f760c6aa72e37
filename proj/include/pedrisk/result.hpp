#pragma once

#include <iosfwd>

#include <nlohmann/json_fwd.hpp>

#include "pedrisk/impute.hpp"

namespace pedrisk {

// Result document: posterior.prob and future.risk keyed by proband ID, plus
// the check report and model description. Byte-stable for identical inputs
// and seed.
nlohmann::json result_document(const ImputedResults& results,
                               const CheckReport& report,
                               const ModelSpec& spec);

// CSV flattening: one row per (proband, genotype) for posteriors and one per
// (proband, cancer, age) for risks.
void write_posterior_csv(const ImputedResults& results, std::ostream& out);
void write_risk_csv(const ImputedResults& results, std::ostream& out);

}  // namespace pedrisk
