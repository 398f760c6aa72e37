#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pedrisk/engine.hpp"

namespace pedrisk {

// Cumulative future-risk values on an age grid, with imputation bands.
struct RiskCurve {
  int proband_id = 0;
  std::string cancer;
  std::vector<int> by_age;
  Eigen::VectorXd estimate;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

// Report ages cur_age + age_by, cur_age + 2*age_by, ... capped at age_max
// (the final partial interval is included). Throws GridEmpty when
// cur_age >= age_max.
std::vector<int> risk_grid(int cur_age, int age_by, int age_max);

// Posterior-weighted probability of developing the cancer by each grid age,
// for a member currently unaffected for it. Crude mode uses the crude
// penetrance increments; net mode uses net density sums. Both modes condition
// on being event-free for this cancer at the censoring age (dividing by the
// genotype-specific net survival); pass conditional=false for the
// unconditional value. Zero throughout when the cancer is impossible for the
// member's sex.
Eigen::VectorXd future_risk(const Eigen::VectorXd& posterior,
                            const GenotypeSpace& space,
                            const MemberRecord& member,
                            const ModelDatabase& db, const std::string& cancer,
                            PenetKind mode, const std::vector<int>& grid,
                            bool conditional = true);

}  // namespace pedrisk
