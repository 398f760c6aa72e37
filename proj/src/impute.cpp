#include "pedrisk/impute.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <random>

namespace pedrisk {

namespace {

constexpr int kGenerationYears = 28;

std::map<int, int> generation_depths(const Pedigree& ped) {
  std::map<int, int> depth;
  std::function<int(int)> of = [&](int id) -> int {
    auto it = depth.find(id);
    if (it != depth.end()) return it->second;
    depth[id] = 0;  // break accidental cycles; check_pedigree rejects them
    const MemberRecord* m = ped.find(id);
    int d = 0;
    if (m->mother_id) d = std::max(d, of(*m->mother_id) + 1);
    if (m->father_id) d = std::max(d, of(*m->father_id) + 1);
    depth[id] = d;
    return d;
  };
  for (const auto& m : ped.members) of(m.id);
  return depth;
}

// Prior-weighted yearly diagnosis-age weights for one member and cancer,
// mixing the noncarrier and single-gene carrier curves by Hardy-Weinberg
// carrier probabilities.
Eigen::ArrayXd marginal_diagnosis_weights(const MemberRecord& member,
                                          const ModelDatabase& db, int cancer) {
  const Eigen::VectorXd freqs = db.allele_freq_vector(member.ancestry);
  const int race = db.race_index(member.race);
  std::vector<Sex> sexes;
  if (member.sex == Sex::Unknown)
    sexes = {Sex::Female, Sex::Male};
  else
    sexes = {member.sex};

  Eigen::ArrayXd weights = Eigen::ArrayXd::Zero(db.age_max);
  for (Sex sex : sexes) {
    double noncarrier_w = 1.0;
    for (int g = 0; g < (int)db.gene_tags.size(); ++g) {
      const double p = 1.0 - std::pow(1.0 - freqs[g], 2.0);
      noncarrier_w *= 1.0 - p;
      weights += p * carrier_density_curve(db, cancer, 1u << g, race, sex,
                                           PenetKind::Net);
    }
    weights +=
        noncarrier_w * carrier_density_curve(db, cancer, 0, race, sex,
                                             PenetKind::Net);
  }
  return weights;
}

}  // namespace

ImputationPlan make_plan(const Pedigree& ped, const ModelSpec& spec) {
  ImputationPlan plan;
  plan.iterations = std::max(1, spec.impute_iterations);
  plan.seed = spec.seed;
  // Censoring ages first: diagnosis-age sampling is truncated at them.
  for (const auto& m : ped.members)
    if (!m.cur_age) plan.targets.push_back({m.id, ""});
  for (const auto& m : ped.members)
    for (const auto& [tag, aff] : m.affections) {
      if (!aff.affected || aff.age_dx) continue;
      if (!spec.cancers.empty() &&
          std::find(spec.cancers.begin(), spec.cancers.end(), tag) ==
              spec.cancers.end())
        continue;
      plan.targets.push_back({m.id, tag});
    }
  return plan;
}

Pedigree sample_missing_ages(const Pedigree& ped, const ModelDatabase& db,
                             const ImputationPlan& plan, int replicate) {
  if (plan.targets.empty()) return ped;

  Pedigree out = ped;
  std::seed_seq seq{static_cast<std::uint32_t>(plan.seed),
                    static_cast<std::uint32_t>(plan.seed >> 32),
                    static_cast<std::uint32_t>(replicate)};
  std::mt19937_64 rng(seq);

  const auto depth = generation_depths(ped);

  for (const auto& target : plan.targets) {
    MemberRecord* m = out.find(target.member_id);
    if (target.cancer.empty()) {
      // Censoring age from relatives' known ages, shifted by the generation
      // gap. Uses the pre-imputation ages only.
      std::vector<int> candidates;
      for (const auto& rel : ped.members) {
        if (rel.id == m->id || !rel.cur_age) continue;
        const int gap = depth.at(m->id) - depth.at(rel.id);
        candidates.push_back(std::clamp(
            *rel.cur_age + kGenerationYears * gap, 1, db.age_max));
      }
      if (candidates.empty())
        throw Error("NoAgesAnywhere",
                    "no member has a known age; nothing to anchor imputation");
      std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
      m->cur_age = candidates[pick(rng)];
    } else {
      const int cancer = db.cancer_index(target.cancer);
      const int cap = std::clamp(m->cur_age.value_or(db.age_max), 1, db.age_max);
      std::vector<double> w(cap, 1.0);  // uniform fallback
      if (cancer >= 0) {
        const Eigen::ArrayXd weights =
            marginal_diagnosis_weights(*m, db, cancer);
        if (weights.head(cap).sum() > 0)
          for (int s = 0; s < cap; ++s) w[s] = weights[s];
      }
      std::discrete_distribution<int> pick(w.begin(), w.end());
      m->affections[target.cancer].age_dx = pick(rng) + 1;
    }
  }
  return out;
}

namespace {

struct ReplicateResult {
  std::map<int, Eigen::VectorXd> posteriors;
  std::map<int, std::map<std::string, Eigen::VectorXd>> risks;
};

}  // namespace

ImputedResults run_with_imputation(const Pedigree& ped, const ModelDatabase& db,
                                   const GenotypeSpace& space,
                                   const ModelSpec& spec) {
  ImputationPlan plan = make_plan(ped, spec);
  const int reps = plan.targets.empty() ? 1 : plan.iterations;
  const PenetKind mode =
      spec.net_future_risk ? PenetKind::Net : PenetKind::Crude;

  std::vector<Pedigree> completed;
  completed.reserve(reps);
  for (int r = 0; r < reps; ++r)
    completed.push_back(sample_missing_ages(ped, db, plan, r));

  // Fix one risk grid per proband, anchored past every replicate's censoring
  // age so each horizon is in the future for all replicates.
  struct ProbandInfo {
    int id;
    int anchor_age;
    std::vector<std::string> cancers;
    std::vector<int> grid;
  };
  std::vector<ProbandInfo> probands;
  ImputedResults results;
  results.replicates = reps;
  for (const auto& m : ped.members) {
    if (!m.is_proband) continue;
    ProbandInfo info;
    info.id = m.id;
    info.anchor_age = 1;
    for (const auto& cped : completed)
      info.anchor_age =
          std::max(info.anchor_age, cped.find(m.id)->cur_age.value_or(1));
    for (const auto& cancer : db.cancer_tags) {
      auto it = m.affections.find(cancer);
      if (it != m.affections.end() && it->second.affected) {
        results.skipped[m.id].push_back(cancer);
        continue;
      }
      info.cancers.push_back(cancer);
    }
    if (!info.cancers.empty() && info.anchor_age < db.age_max)
      info.grid = risk_grid(info.anchor_age, spec.age_by, db.age_max);
    probands.push_back(std::move(info));
  }

  auto run_replicate = [&](int r) {
    ReplicateResult rep;
    rep.posteriors = peel(completed[r], db, space);
    for (const auto& info : probands) {
      if (info.grid.empty()) continue;
      const MemberRecord* member = completed[r].find(info.id);
      for (const auto& cancer : info.cancers)
        rep.risks[info.id][cancer] =
            future_risk(rep.posteriors.at(info.id), space, *member, db, cancer,
                        mode, info.grid, spec.conditional_risk);
    }
    return rep;
  };

  std::vector<ReplicateResult> reps_out(reps);
  if (spec.parallel && reps > 1) {
    std::vector<std::future<ReplicateResult>> futures;
    futures.reserve(reps);
    for (int r = 0; r < reps; ++r)
      futures.push_back(
          std::async(std::launch::async, [&, r] { return run_replicate(r); }));
    for (int r = 0; r < reps; ++r) reps_out[r] = futures[r].get();
  } else {
    for (int r = 0; r < reps; ++r) reps_out[r] = run_replicate(r);
  }

  // Aggregation in canonical replicate order: mean / min / max.
  std::vector<std::string> labels;
  for (const CarrierVector v : space.vectors)
    labels.push_back(genotype_label(v, db.gene_tags));

  for (const auto& info : probands) {
    PosteriorBands bands;
    bands.proband_id = info.id;
    bands.labels = labels;
    for (int r = 0; r < reps; ++r) {
      const Eigen::VectorXd& p = reps_out[r].posteriors.at(info.id);
      if (r == 0) {
        bands.estimate = p;
        bands.lower = p;
        bands.upper = p;
      } else {
        bands.estimate += p;
        bands.lower = bands.lower.cwiseMin(p);
        bands.upper = bands.upper.cwiseMax(p);
      }
    }
    if (reps > 1) bands.estimate /= reps;
    results.posteriors[info.id] = std::move(bands);

    if (info.grid.empty()) continue;
    for (const auto& cancer : info.cancers) {
      RiskCurve curve;
      curve.proband_id = info.id;
      curve.cancer = cancer;
      curve.by_age = info.grid;
      for (int r = 0; r < reps; ++r) {
        const Eigen::VectorXd& v = reps_out[r].risks.at(info.id).at(cancer);
        if (r == 0) {
          curve.estimate = v;
          curve.lower = v;
          curve.upper = v;
        } else {
          curve.estimate += v;
          curve.lower = curve.lower.cwiseMin(v);
          curve.upper = curve.upper.cwiseMax(v);
        }
      }
      if (reps > 1) curve.estimate /= reps;
      results.risks[info.id][cancer] = std::move(curve);
    }
  }
  return results;
}

}  // namespace pedrisk
