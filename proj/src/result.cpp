#include "pedrisk/result.hpp"

#include <ostream>

#include <nlohmann/json.hpp>

namespace pedrisk {

nlohmann::json result_document(const ImputedResults& results,
                               const CheckReport& report,
                               const ModelSpec& spec) {
  nlohmann::json doc;
  doc["schema"] = "pedrisk-result/1";
  doc["model"] = {{"cancers", spec.cancers},
                  {"genes", spec.genes},
                  {"max_mut", spec.max_mut},
                  {"net_future_risk", spec.net_future_risk},
                  {"age_by", spec.age_by},
                  {"iterations", spec.impute_iterations},
                  {"seed", spec.seed},
                  {"replicates", results.replicates}};
  doc["check_report"] = report.to_json();

  nlohmann::json posterior = nlohmann::json::object();
  for (const auto& [proband, bands] : results.posteriors) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < (int)bands.labels.size(); ++i)
      rows.push_back({{"genes", bands.labels[i]},
                      {"estimate", bands.estimate[i]},
                      {"lower", bands.lower[i]},
                      {"upper", bands.upper[i]}});
    posterior[std::to_string(proband)] = std::move(rows);
  }
  doc["posterior.prob"] = std::move(posterior);

  nlohmann::json risk = nlohmann::json::object();
  for (const auto& [proband, curves] : results.risks) {
    nlohmann::json per_cancer = nlohmann::json::object();
    for (const auto& [cancer, curve] : curves) {
      nlohmann::json rows = nlohmann::json::array();
      for (int i = 0; i < (int)curve.by_age.size(); ++i)
        rows.push_back({{"ByAge", curve.by_age[i]},
                        {"estimate", curve.estimate[i]},
                        {"lower", curve.lower[i]},
                        {"upper", curve.upper[i]}});
      per_cancer[cancer] = std::move(rows);
    }
    risk[std::to_string(proband)] = std::move(per_cancer);
  }
  doc["future.risk"] = std::move(risk);

  nlohmann::json skipped = nlohmann::json::object();
  for (const auto& [proband, cancers] : results.skipped)
    skipped[std::to_string(proband)] = cancers;
  doc["skipped.cancers"] = std::move(skipped);
  return doc;
}

void write_posterior_csv(const ImputedResults& results, std::ostream& out) {
  out.precision(10);
  out << "proband,genes,estimate,lower,upper\n";
  for (const auto& [proband, bands] : results.posteriors)
    for (int i = 0; i < (int)bands.labels.size(); ++i)
      out << proband << ',' << bands.labels[i] << ',' << bands.estimate[i]
          << ',' << bands.lower[i] << ',' << bands.upper[i] << '\n';
}

void write_risk_csv(const ImputedResults& results, std::ostream& out) {
  out.precision(10);
  out << "proband,cancer,ByAge,estimate,lower,upper\n";
  for (const auto& [proband, curves] : results.risks)
    for (const auto& [cancer, curve] : curves)
      for (int i = 0; i < (int)curve.by_age.size(); ++i)
        out << proband << ',' << cancer << ',' << curve.by_age[i] << ','
            << curve.estimate[i] << ',' << curve.lower[i] << ','
            << curve.upper[i] << '\n';
}

}  // namespace pedrisk
