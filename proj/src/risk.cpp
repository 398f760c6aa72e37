#include "pedrisk/risk.hpp"

#include <algorithm>
#include <cmath>

namespace pedrisk {

std::vector<int> risk_grid(int cur_age, int age_by, int age_max) {
  if (age_by < 1) throw Error("MalformedInput", "age_by must be >= 1");
  if (cur_age >= age_max)
    throw Error("GridEmpty", "current age " + std::to_string(cur_age) +
                                 " leaves no future ages up to " +
                                 std::to_string(age_max));
  std::vector<int> grid;
  for (int age = cur_age + age_by; age < age_max; age += age_by)
    grid.push_back(age);
  grid.push_back(age_max);  // final partial interval capped at age_max
  return grid;
}

namespace {

Eigen::VectorXd sexed_risk(const GenotypeSpace& space,
                           const MemberRecord& member, const ModelDatabase& db,
                           int cancer, Sex sex, PenetKind mode,
                           const std::vector<int>& grid, int cur_age,
                           bool conditional) {
  Eigen::VectorXd curves(space.size() * grid.size());
  for (int g = 0; g < space.size(); ++g) {
    const Eigen::ArrayXd net = apply_risk_modifiers(
        db, member, cancer, space.vectors[g], sex, PenetKind::Net);
    const Eigen::ArrayXd use =
        mode == PenetKind::Net
            ? net
            : apply_risk_modifiers(db, member, cancer, space.vectors[g], sex,
                                   PenetKind::Crude);
    const double surv = 1.0 - net.head(cur_age).sum();
    const double denom = conditional ? surv : 1.0;
    for (int t = 0; t < (int)grid.size(); ++t) {
      const int horizon = std::min(grid[t], db.age_max);
      double mass = 0.0;
      if (horizon > cur_age)
        mass = use.segment(cur_age, horizon - cur_age).sum();
      curves[g * grid.size() + t] =
          denom > 1e-12 ? std::clamp(mass / denom, 0.0, 1.0) : 0.0;
    }
  }
  return curves;
}

}  // namespace

Eigen::VectorXd future_risk(const Eigen::VectorXd& posterior,
                            const GenotypeSpace& space,
                            const MemberRecord& member,
                            const ModelDatabase& db, const std::string& cancer,
                            PenetKind mode, const std::vector<int>& grid,
                            bool conditional) {
  const int c = db.cancer_index(cancer);
  if (c < 0) throw Error("UnknownTag", "cancer '" + cancer + "'");
  if (!member.cur_age)
    throw Error("MissingAge", "member " + std::to_string(member.id) +
                                  " has no censoring age");
  const int cur_age = std::clamp(*member.cur_age, 1, db.age_max);

  Eigen::VectorXd per_genotype;
  if (member.sex == Sex::Unknown) {
    per_genotype =
        0.5 * (sexed_risk(space, member, db, c, Sex::Female, mode, grid,
                          cur_age, conditional) +
               sexed_risk(space, member, db, c, Sex::Male, mode, grid, cur_age,
                          conditional));
  } else {
    per_genotype = sexed_risk(space, member, db, c, member.sex, mode, grid,
                              cur_age, conditional);
  }

  Eigen::VectorXd risk = Eigen::VectorXd::Zero(grid.size());
  for (int g = 0; g < space.size(); ++g)
    risk += posterior[g] *
            per_genotype.segment(g * grid.size(), grid.size());
  return risk;
}

}  // namespace pedrisk
