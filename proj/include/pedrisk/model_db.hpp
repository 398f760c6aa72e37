#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pedrisk/genotype.hpp"
#include "pedrisk/types.hpp"

namespace pedrisk {

struct MemberRecord;  // pedigree.hpp

// Penetrance hypercube (cancer x gene-configuration x race x sex x age x
// {net, crude}), allele frequencies (gene x ancestry), and risk-modifier
// hazard ratios (intervention x cancer x gene-configuration).
//
// The configuration axis is single-gene indexed: index 0 is the noncarrier
// curve, index g+1 is the curve for carriers of gene g. Multi-gene carrier
// configurations resolve through the dominant-gene rule (elementwise maximum
// hazard across carried genes; see carrier_density_curve).
//
// Penetrance values are per-year densities: the Net slice holds
// P{T = t | G, U} and the Crude slice holds the yearly increments of
// P{T* <= t, J = 1 | G, U}. Immutable after construction; lookups are
// read-only and safe to call concurrently.
struct ModelDatabase {
  std::vector<std::string> cancer_tags;
  std::vector<std::string> gene_tags;
  std::vector<std::string> races;        // first entry acts as All_Races fallback
  std::vector<std::string> ancestries;   // e.g. AJ, nonAJ, Italian
  std::vector<std::string> interventions;
  std::map<std::string, SexRestriction> sex_restriction;
  int age_max = 94;

  // Flat row-major storage, axis order (cancer, config, race, sex, age, kind).
  std::vector<double> penetrance;
  std::vector<double> allele_freq;  // (gene, ancestry)
  std::vector<double> riskmod;      // (intervention, cancer, config)

  int config_count() const { return static_cast<int>(gene_tags.size()) + 1; }

  std::size_t penet_index(int cancer, int config, int race, int sex, int age,
                          int kind) const;
  double& penet_at(int cancer, int config, int race, int sex, int age, int kind);
  double penet_at(int cancer, int config, int race, int sex, int age,
                  int kind) const;

  int cancer_index(const std::string& tag) const;  // -1 if absent
  int gene_index(const std::string& tag) const;

  // Race/ancestry lookups fall back to the first axis entry when the value is
  // missing or not present in the database.
  int race_index(const std::optional<std::string>& race) const;
  int ancestry_index(const std::optional<std::string>& ancestry) const;
  int intervention_index(const std::string& kind) const;  // -1 if unknown

  double allele_frequency(int gene, int ancestry) const;
  Eigen::VectorXd allele_freq_vector(const std::optional<std::string>& ancestry) const;
  double riskmod_ratio(int intervention, int cancer, int config) const;

  SexRestriction restriction(const std::string& cancer) const;

  // Per-year density over ages 1..age_max for one single-gene config slice.
  Eigen::ArrayXd density_slice(int cancer, int config, int race, Sex sex,
                               PenetKind kind) const;
};

struct ModelSpec {
  std::vector<std::string> cancers;
  std::vector<std::string> genes;
  int max_mut = 2;               // paring parameter T
  bool net_future_risk = false;  // report net instead of crude future risk
  bool conditional_risk = true;  // condition on being event-free at cur_age
  int age_by = 5;
  int impute_iterations = 20;
  bool parallel = true;
  std::uint64_t seed = 0;
};

// Subsets a database to the requested cancers and genes; the noncarrier
// configuration is always retained. Throws UnknownTag for absent tags.
ModelDatabase build_database(const ModelDatabase& full, const ModelSpec& spec);

// Density curve for an arbitrary carrier configuration over the database's
// genes (dominant-gene rule for multi-gene carriers). All-zero for cancers
// impossible for the given sex.
Eigen::ArrayXd carrier_density_curve(const ModelDatabase& db, int cancer,
                                     CarrierVector config, int race, Sex sex,
                                     PenetKind kind);

// Per-year penetrance at one age (1-based). Missing race falls back to the
// first race axis entry. Throws OutOfRangeAge.
double penetrance_lookup(const ModelDatabase& db, const std::string& cancer,
                         CarrierVector config,
                         const std::optional<std::string>& race, Sex sex,
                         int age, PenetKind kind);

// Density curve with the member's prophylactic interventions applied: the
// discrete hazard is multiplied by the configured ratio for all ages at or
// after the intervention age, then the density is rebuilt from the modified
// hazard so it stays a proper sub-distribution.
Eigen::ArrayXd apply_risk_modifiers(const ModelDatabase& db,
                                    const MemberRecord& member, int cancer,
                                    CarrierVector config, Sex sex,
                                    PenetKind kind);

enum class SynthProfile { ConstantHazard, Ramp, Peaked };

// Synthetic, internally consistent database for testing and benchmarking.
// Carrier configurations always have strictly higher hazards than noncarrier;
// crude slices are derived from net slices by composing with a synthetic
// other-cause death hazard. With the ConstantHazard profile the noncarrier
// hazard equals base_hazard for every cancer.
ModelDatabase synthesize_database(const std::vector<std::string>& gene_tags,
                                  const std::vector<std::string>& cancer_tags,
                                  SynthProfile profile, std::uint64_t seed,
                                  double base_hazard = 0.01,
                                  double other_death_hazard = 0.01);

ModelDatabase synthesize_database(int gene_count, int cancer_count,
                                  SynthProfile profile, std::uint64_t seed);

// JSON (de)serialization of the database file format.
ModelDatabase load_database(std::istream& in);
ModelDatabase load_database_file(const std::string& path);
void save_database(const ModelDatabase& db, std::ostream& out);
void save_database_file(const ModelDatabase& db, const std::string& path);

// Default sex restrictions keyed by cancer tag (short or long name).
std::map<std::string, SexRestriction> default_sex_registry();

}  // namespace pedrisk
