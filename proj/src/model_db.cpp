#include "pedrisk/model_db.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pedrisk/pedigree.hpp"

namespace pedrisk {

namespace {

int find_tag(const std::vector<std::string>& tags, const std::string& tag) {
  auto it = std::find(tags.begin(), tags.end(), tag);
  return it == tags.end() ? -1 : static_cast<int>(it - tags.begin());
}

// Rebuild a per-year density from a discrete hazard sequence.
Eigen::ArrayXd density_from_hazard(const Eigen::ArrayXd& hazard) {
  Eigen::ArrayXd density(hazard.size());
  double surv = 1.0;
  for (int t = 0; t < hazard.size(); ++t) {
    const double h = std::clamp(hazard[t], 0.0, 1.0);
    density[t] = h * surv;
    surv *= 1.0 - h;
  }
  return density;
}

// Discrete hazard of a (sub-)density; hazard is pinned to 0 once the
// remaining survival mass vanishes.
Eigen::ArrayXd hazard_from_density(const Eigen::ArrayXd& density) {
  Eigen::ArrayXd hazard(density.size());
  double surv = 1.0;
  for (int t = 0; t < density.size(); ++t) {
    hazard[t] = surv > 1e-300 ? std::clamp(density[t] / surv, 0.0, 1.0) : 0.0;
    surv -= density[t];
  }
  return hazard;
}

}  // namespace

std::size_t ModelDatabase::penet_index(int cancer, int config, int race,
                                       int sex, int age, int kind) const {
  const std::size_t nc = config_count();
  const std::size_t nr = races.size();
  return ((((static_cast<std::size_t>(cancer) * nc + config) * nr + race) * 2 +
           sex) *
              age_max +
          age) *
             2 +
         kind;
}

double& ModelDatabase::penet_at(int cancer, int config, int race, int sex,
                                int age, int kind) {
  return penetrance[penet_index(cancer, config, race, sex, age, kind)];
}

double ModelDatabase::penet_at(int cancer, int config, int race, int sex,
                               int age, int kind) const {
  return penetrance[penet_index(cancer, config, race, sex, age, kind)];
}

int ModelDatabase::cancer_index(const std::string& tag) const {
  return find_tag(cancer_tags, tag);
}

int ModelDatabase::gene_index(const std::string& tag) const {
  return find_tag(gene_tags, tag);
}

int ModelDatabase::race_index(const std::optional<std::string>& race) const {
  if (!race) return 0;
  const int i = find_tag(races, *race);
  return i < 0 ? 0 : i;
}

int ModelDatabase::ancestry_index(
    const std::optional<std::string>& ancestry) const {
  if (!ancestry) return 0;
  const int i = find_tag(ancestries, *ancestry);
  return i < 0 ? 0 : i;
}

int ModelDatabase::intervention_index(const std::string& kind) const {
  return find_tag(interventions, kind);
}

double ModelDatabase::allele_frequency(int gene, int ancestry) const {
  return allele_freq[static_cast<std::size_t>(gene) * ancestries.size() +
                     ancestry];
}

Eigen::VectorXd ModelDatabase::allele_freq_vector(
    const std::optional<std::string>& ancestry) const {
  const int a = ancestry_index(ancestry);
  Eigen::VectorXd f(gene_tags.size());
  for (int g = 0; g < (int)gene_tags.size(); ++g) f[g] = allele_frequency(g, a);
  return f;
}

double ModelDatabase::riskmod_ratio(int intervention, int cancer,
                                    int config) const {
  if (intervention < 0) return 1.0;
  return riskmod[(static_cast<std::size_t>(intervention) * cancer_tags.size() +
                  cancer) *
                     config_count() +
                 config];
}

SexRestriction ModelDatabase::restriction(const std::string& cancer) const {
  auto it = sex_restriction.find(cancer);
  return it == sex_restriction.end() ? SexRestriction::Any : it->second;
}

Eigen::ArrayXd ModelDatabase::density_slice(int cancer, int config, int race,
                                            Sex sex, PenetKind kind) const {
  Eigen::ArrayXd d(age_max);
  const int s = sex == Sex::Male ? 1 : 0;
  for (int t = 0; t < age_max; ++t)
    d[t] = penet_at(cancer, config, race, s, t, static_cast<int>(kind));
  return d;
}

ModelDatabase build_database(const ModelDatabase& full, const ModelSpec& spec) {
  std::vector<int> cidx, gidx;
  for (const auto& c : spec.cancers) {
    const int i = full.cancer_index(c);
    if (i < 0) throw Error("UnknownTag", "cancer '" + c + "' not in database");
    cidx.push_back(i);
  }
  for (const auto& g : spec.genes) {
    const int i = full.gene_index(g);
    if (i < 0) throw Error("UnknownTag", "gene '" + g + "' not in database");
    gidx.push_back(i);
  }

  ModelDatabase sub;
  sub.cancer_tags = spec.cancers;
  sub.gene_tags = spec.genes;
  sub.races = full.races;
  sub.ancestries = full.ancestries;
  sub.interventions = full.interventions;
  sub.age_max = full.age_max;
  for (const auto& c : spec.cancers)
    sub.sex_restriction[c] = full.restriction(c);

  const int nr = static_cast<int>(sub.races.size());
  sub.penetrance.resize(static_cast<std::size_t>(cidx.size()) *
                        sub.config_count() * nr * 2 * sub.age_max * 2);
  // Old config index: 0 = noncarrier, g+1 = gene g.
  for (int c = 0; c < (int)cidx.size(); ++c)
    for (int k = 0; k < sub.config_count(); ++k) {
      const int old_k = k == 0 ? 0 : gidx[k - 1] + 1;
      for (int r = 0; r < nr; ++r)
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < sub.age_max; ++t)
            for (int p = 0; p < 2; ++p)
              sub.penet_at(c, k, r, s, t, p) =
                  full.penet_at(cidx[c], old_k, r, s, t, p);
    }

  sub.allele_freq.resize(gidx.size() * sub.ancestries.size());
  for (int g = 0; g < (int)gidx.size(); ++g)
    for (int a = 0; a < (int)sub.ancestries.size(); ++a)
      sub.allele_freq[g * sub.ancestries.size() + a] =
          full.allele_frequency(gidx[g], a);

  sub.riskmod.resize(sub.interventions.size() * cidx.size() *
                     sub.config_count());
  for (int m = 0; m < (int)sub.interventions.size(); ++m)
    for (int c = 0; c < (int)cidx.size(); ++c)
      for (int k = 0; k < sub.config_count(); ++k) {
        const int old_k = k == 0 ? 0 : gidx[k - 1] + 1;
        sub.riskmod[(m * cidx.size() + c) * sub.config_count() + k] =
            full.riskmod_ratio(m, cidx[c], old_k);
      }
  return sub;
}

Eigen::ArrayXd carrier_density_curve(const ModelDatabase& db, int cancer,
                                     CarrierVector config, int race, Sex sex,
                                     PenetKind kind) {
  if (!sex_allows(db.restriction(db.cancer_tags[cancer]), sex))
    return Eigen::ArrayXd::Zero(db.age_max);
  if (config == 0) return db.density_slice(cancer, 0, race, sex, kind);
  if (carrier_count(config) == 1) {
    const int g = __builtin_ctz(config);
    return db.density_slice(cancer, g + 1, race, sex, kind);
  }
  // Dominant-gene rule: elementwise maximum hazard across carried genes.
  Eigen::ArrayXd hazard = Eigen::ArrayXd::Zero(db.age_max);
  for (int g = 0; g < (int)db.gene_tags.size(); ++g) {
    if (!((config >> g) & 1u)) continue;
    hazard = hazard.max(
        hazard_from_density(db.density_slice(cancer, g + 1, race, sex, kind)));
  }
  return density_from_hazard(hazard);
}

double penetrance_lookup(const ModelDatabase& db, const std::string& cancer,
                         CarrierVector config,
                         const std::optional<std::string>& race, Sex sex,
                         int age, PenetKind kind) {
  if (age < 1 || age > db.age_max)
    throw Error("OutOfRangeAge", "age " + std::to_string(age) +
                                     " outside [1, " +
                                     std::to_string(db.age_max) + "]");
  const int c = db.cancer_index(cancer);
  if (c < 0) throw Error("UnknownTag", "cancer '" + cancer + "'");
  return carrier_density_curve(db, c, config, db.race_index(race), sex,
                               kind)[age - 1];
}

Eigen::ArrayXd apply_risk_modifiers(const ModelDatabase& db,
                                    const MemberRecord& member, int cancer,
                                    CarrierVector config, Sex sex,
                                    PenetKind kind) {
  Eigen::ArrayXd density = carrier_density_curve(
      db, cancer, config, db.race_index(member.race), sex, kind);
  if (member.interventions.empty()) return density;

  // Riskmod ratios are indexed per single-gene config; for multi-gene
  // carriers use the smallest (strongest) ratio across carried genes.
  Eigen::ArrayXd ratio = Eigen::ArrayXd::Ones(db.age_max);
  bool any = false;
  for (const auto& iv : member.interventions) {
    const int m = db.intervention_index(iv.kind);
    if (m < 0) continue;  // unknown interventions pass through
    double r = 1.0;
    if (config == 0) {
      r = db.riskmod_ratio(m, cancer, 0);
    } else {
      r = std::numeric_limits<double>::infinity();
      for (int g = 0; g < (int)db.gene_tags.size(); ++g)
        if ((config >> g) & 1u)
          r = std::min(r, db.riskmod_ratio(m, cancer, g + 1));
    }
    if (r == 1.0) continue;
    any = true;
    for (int t = std::max(0, iv.age - 1); t < db.age_max; ++t) ratio[t] *= r;
  }
  if (!any) return density;
  return density_from_hazard(hazard_from_density(density) * ratio);
}

std::map<std::string, SexRestriction> default_sex_registry() {
  return {
      {"OC", SexRestriction::FemaleOnly},
      {"Ovarian", SexRestriction::FemaleOnly},
      {"CER", SexRestriction::FemaleOnly},
      {"Cervical", SexRestriction::FemaleOnly},
      {"ENDO", SexRestriction::FemaleOnly},
      {"Endometrial", SexRestriction::FemaleOnly},
      {"PROS", SexRestriction::MaleOnly},
      {"Prostate", SexRestriction::MaleOnly},
  };
}

ModelDatabase synthesize_database(const std::vector<std::string>& gene_tags,
                                  const std::vector<std::string>& cancer_tags,
                                  SynthProfile profile, std::uint64_t seed,
                                  double base_hazard,
                                  double other_death_hazard) {
  ModelDatabase db;
  db.gene_tags = gene_tags;
  db.cancer_tags = cancer_tags;
  db.races = {"All_Races", "AIAN",     "Asian", "Black",
              "White",     "Hispanic", "WH",    "WNH"};
  db.ancestries = {"AJ", "nonAJ", "Italian"};
  db.interventions = {"Mastectomy", "Hysterectomy", "Oophorectomy"};
  db.age_max = 94;
  const auto registry = default_sex_registry();
  for (const auto& c : cancer_tags) {
    auto it = registry.find(c);
    db.sex_restriction[c] =
        it == registry.end() ? SexRestriction::Any : it->second;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mult(2.0, 8.0);
  std::uniform_real_distribution<double> jitter(0.8, 1.2);
  std::uniform_real_distribution<double> freq(0.002, 0.05);

  const int nr = static_cast<int>(db.races.size());
  db.penetrance.assign(static_cast<std::size_t>(cancer_tags.size()) *
                           db.config_count() * nr * 2 * db.age_max * 2,
                       0.0);

  for (int c = 0; c < (int)cancer_tags.size(); ++c) {
    const SexRestriction restr = db.sex_restriction[cancer_tags[c]];
    // Per-config hazard scale; carriers strictly above noncarrier.
    std::vector<double> scale(db.config_count());
    scale[0] = base_hazard * jitter(rng);
    if (profile == SynthProfile::ConstantHazard) scale[0] = base_hazard;
    for (int k = 1; k < db.config_count(); ++k) scale[k] = scale[0] * mult(rng);

    for (int k = 0; k < db.config_count(); ++k) {
      Eigen::ArrayXd hazard(db.age_max);
      for (int t = 0; t < db.age_max; ++t) {
        const double age_frac = (t + 1) / static_cast<double>(db.age_max);
        double h = scale[k];
        if (profile == SynthProfile::Ramp) {
          h *= age_frac;
        } else if (profile == SynthProfile::Peaked) {
          const double z = (t + 1 - 50.0) / 15.0;
          h *= std::exp(-0.5 * z * z);
        }
        hazard[t] = std::min(h, 0.2);
      }
      const Eigen::ArrayXd net = density_from_hazard(hazard);
      // Crude increments: net density discounted by other-cause survival,
      // P{T* = s, J = 1} = net(s) * prod_{u<s} (1 - otherdeath(u)).
      Eigen::ArrayXd crude(db.age_max);
      double alive = 1.0;
      for (int t = 0; t < db.age_max; ++t) {
        crude[t] = net[t] * alive;
        alive *= 1.0 - other_death_hazard;
      }
      for (int r = 0; r < nr; ++r)
        for (int s = 0; s < 2; ++s) {
          const bool possible =
              sex_allows(restr, s == 1 ? Sex::Male : Sex::Female);
          for (int t = 0; t < db.age_max; ++t) {
            db.penet_at(c, k, r, s, t, 0) = possible ? net[t] : 0.0;
            db.penet_at(c, k, r, s, t, 1) = possible ? crude[t] : 0.0;
          }
        }
    }
  }

  db.allele_freq.resize(gene_tags.size() * db.ancestries.size());
  for (int g = 0; g < (int)gene_tags.size(); ++g) {
    const double f = freq(rng);
    for (int a = 0; a < (int)db.ancestries.size(); ++a)
      db.allele_freq[g * db.ancestries.size() + a] =
          std::min(0.49, f * (a == 0 ? 2.0 : 1.0));  // AJ enriched
  }

  db.riskmod.assign(
      db.interventions.size() * cancer_tags.size() * db.config_count(), 1.0);
  // Named intervention-cancer pairings get a protective ratio.
  const std::map<std::string, std::vector<std::string>> pairing = {
      {"Mastectomy", {"BC", "Breast"}},
      {"Hysterectomy", {"ENDO", "Endometrial"}},
      {"Oophorectomy", {"OC", "Ovarian"}},
  };
  std::uniform_real_distribution<double> protect(0.05, 0.4);
  for (int m = 0; m < (int)db.interventions.size(); ++m) {
    const auto& targets = pairing.at(db.interventions[m]);
    for (int c = 0; c < (int)cancer_tags.size(); ++c) {
      if (std::find(targets.begin(), targets.end(), cancer_tags[c]) ==
          targets.end())
        continue;
      const double r = protect(rng);
      for (int k = 0; k < db.config_count(); ++k)
        db.riskmod[(m * cancer_tags.size() + c) * db.config_count() + k] = r;
    }
  }
  return db;
}

ModelDatabase synthesize_database(int gene_count, int cancer_count,
                                  SynthProfile profile, std::uint64_t seed) {
  std::vector<std::string> genes, cancers;
  for (int g = 1; g <= gene_count; ++g) genes.push_back("G" + std::to_string(g));
  for (int c = 1; c <= cancer_count; ++c)
    cancers.push_back("C" + std::to_string(c));
  return synthesize_database(genes, cancers, profile, seed);
}

namespace {

const char* kDbSchema = "pedrisk-db/1";

nlohmann::json restriction_to_json(SexRestriction r) {
  switch (r) {
    case SexRestriction::FemaleOnly: return "female";
    case SexRestriction::MaleOnly: return "male";
    default: return "any";
  }
}

SexRestriction restriction_from_json(const std::string& s) {
  if (s == "female") return SexRestriction::FemaleOnly;
  if (s == "male") return SexRestriction::MaleOnly;
  return SexRestriction::Any;
}

}  // namespace

void save_database(const ModelDatabase& db, std::ostream& out) {
  nlohmann::json j;
  j["schema"] = kDbSchema;
  j["age_max"] = db.age_max;
  j["cancers"] = db.cancer_tags;
  j["genes"] = db.gene_tags;
  j["races"] = db.races;
  j["ancestries"] = db.ancestries;
  j["interventions"] = db.interventions;
  std::vector<std::string> configs = {"noncarrier"};
  configs.insert(configs.end(), db.gene_tags.begin(), db.gene_tags.end());
  j["configs"] = configs;
  nlohmann::json restr;
  for (const auto& [tag, r] : db.sex_restriction)
    restr[tag] = restriction_to_json(r);
  j["sex_restriction"] = restr;

  // Nested (cancer, config, race, sex, kind) with the age axis innermost.
  nlohmann::json pen = nlohmann::json::array();
  for (int c = 0; c < (int)db.cancer_tags.size(); ++c) {
    nlohmann::json jc = nlohmann::json::array();
    for (int k = 0; k < db.config_count(); ++k) {
      nlohmann::json jk = nlohmann::json::array();
      for (int r = 0; r < (int)db.races.size(); ++r) {
        nlohmann::json jr = nlohmann::json::array();
        for (int s = 0; s < 2; ++s) {
          nlohmann::json js = nlohmann::json::array();
          for (int p = 0; p < 2; ++p) {
            nlohmann::json ja = nlohmann::json::array();
            for (int t = 0; t < db.age_max; ++t)
              ja.push_back(db.penet_at(c, k, r, s, t, p));
            js.push_back(std::move(ja));
          }
          jr.push_back(std::move(js));
        }
        jk.push_back(std::move(jr));
      }
      jc.push_back(std::move(jk));
    }
    pen.push_back(std::move(jc));
  }
  j["penetrance"] = {
      {"axes", {"cancer", "config", "race", "sex", "kind", "age"}},
      {"values", std::move(pen)}};

  nlohmann::json af = nlohmann::json::array();
  for (int g = 0; g < (int)db.gene_tags.size(); ++g) {
    nlohmann::json row = nlohmann::json::array();
    for (int a = 0; a < (int)db.ancestries.size(); ++a)
      row.push_back(db.allele_frequency(g, a));
    af.push_back(std::move(row));
  }
  j["allele_freq"] = {{"axes", {"gene", "ancestry"}}, {"values", std::move(af)}};

  nlohmann::json rm = nlohmann::json::array();
  for (int m = 0; m < (int)db.interventions.size(); ++m) {
    nlohmann::json jm = nlohmann::json::array();
    for (int c = 0; c < (int)db.cancer_tags.size(); ++c) {
      nlohmann::json row = nlohmann::json::array();
      for (int k = 0; k < db.config_count(); ++k)
        row.push_back(db.riskmod_ratio(m, c, k));
      jm.push_back(std::move(row));
    }
    rm.push_back(std::move(jm));
  }
  j["riskmod"] = {{"axes", {"intervention", "cancer", "config"}},
                  {"values", std::move(rm)}};
  out << j.dump(0) << '\n';
}

ModelDatabase load_database(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("MalformedInput", std::string("database JSON: ") + e.what());
  }
  try {
    ModelDatabase db;
    db.age_max = j.at("age_max").get<int>();
    db.cancer_tags = j.at("cancers").get<std::vector<std::string>>();
    db.gene_tags = j.at("genes").get<std::vector<std::string>>();
    db.races = j.at("races").get<std::vector<std::string>>();
    db.ancestries = j.at("ancestries").get<std::vector<std::string>>();
    db.interventions = j.at("interventions").get<std::vector<std::string>>();
    if (j.contains("sex_restriction"))
      for (auto& [tag, r] : j["sex_restriction"].items())
        db.sex_restriction[tag] = restriction_from_json(r.get<std::string>());

    const auto& pen = j.at("penetrance").at("values");
    db.penetrance.resize(static_cast<std::size_t>(db.cancer_tags.size()) *
                         db.config_count() * db.races.size() * 2 * db.age_max *
                         2);
    for (int c = 0; c < (int)db.cancer_tags.size(); ++c)
      for (int k = 0; k < db.config_count(); ++k)
        for (int r = 0; r < (int)db.races.size(); ++r)
          for (int s = 0; s < 2; ++s)
            for (int p = 0; p < 2; ++p) {
              const auto& ages = pen.at(c).at(k).at(r).at(s).at(p);
              for (int t = 0; t < db.age_max; ++t)
                db.penet_at(c, k, r, s, t, p) = ages.at(t).get<double>();
            }

    const auto& af = j.at("allele_freq").at("values");
    db.allele_freq.resize(db.gene_tags.size() * db.ancestries.size());
    for (int g = 0; g < (int)db.gene_tags.size(); ++g)
      for (int a = 0; a < (int)db.ancestries.size(); ++a)
        db.allele_freq[g * db.ancestries.size() + a] =
            af.at(g).at(a).get<double>();

    const auto& rm = j.at("riskmod").at("values");
    db.riskmod.resize(db.interventions.size() * db.cancer_tags.size() *
                      db.config_count());
    for (int m = 0; m < (int)db.interventions.size(); ++m)
      for (int c = 0; c < (int)db.cancer_tags.size(); ++c)
        for (int k = 0; k < db.config_count(); ++k)
          db.riskmod[(m * db.cancer_tags.size() + c) * db.config_count() + k] =
              rm.at(m).at(c).at(k).get<double>();
    return db;
  } catch (const nlohmann::json::exception& e) {
    throw Error("MalformedInput", std::string("database JSON: ") + e.what());
  }
}

ModelDatabase load_database_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open database file: " + path);
  return load_database(in);
}

void save_database_file(const ModelDatabase& db, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("IoError", "cannot write database file: " + path);
  save_database(db, out);
}

}  // namespace pedrisk
