#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "pedrisk/risk.hpp"

namespace pedrisk {

// Missing-age fields to fill per imputation replicate.
struct ImputationPlan {
  struct Target {
    int member_id = 0;
    std::string cancer;  // empty -> cur_age, else age_dx for this cancer
  };
  std::vector<Target> targets;
  int iterations = 20;
  std::uint64_t seed = 0;
};

ImputationPlan make_plan(const Pedigree& ped, const ModelSpec& spec);

// One completed pedigree. Missing censoring ages are drawn from a
// generation-adjusted empirical distribution of relatives' known ages
// (28 years per generation gap); missing diagnosis ages are drawn from the
// member's prior-weighted diagnosis-age distribution truncated at the
// censoring age. Deterministic given (seed, replicate). Throws NoAgesAnywhere
// when the pedigree holds no known age at all.
Pedigree sample_missing_ages(const Pedigree& ped, const ModelDatabase& db,
                             const ImputationPlan& plan, int replicate);

struct PosteriorBands {
  int proband_id = 0;
  std::vector<std::string> labels;
  Eigen::VectorXd estimate;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct ImputedResults {
  std::map<int, PosteriorBands> posteriors;
  // proband id -> cancer tag -> curve; cancers the proband is already
  // affected with are listed in skipped instead.
  std::map<int, std::map<std::string, RiskCurve>> risks;
  std::map<int, std::vector<std::string>> skipped;
  int replicates = 1;
};

// Runs peel + future risk once per replicate and aggregates: estimate is the
// arithmetic mean, lower/upper the elementwise min/max. Collapses to a single
// replicate (degenerate bands) when no ages are missing. Replicates are
// keyed by (seed, replicate), so parallel and sequential execution produce
// bit-identical aggregates.
ImputedResults run_with_imputation(const Pedigree& ped, const ModelDatabase& db,
                                   const GenotypeSpace& space,
                                   const ModelSpec& spec);

}  // namespace pedrisk
