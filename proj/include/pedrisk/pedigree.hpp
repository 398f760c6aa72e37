#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pedrisk/types.hpp"

namespace pedrisk {

struct Affection {
  bool affected = false;
  std::optional<int> age_dx;
};

struct Intervention {
  std::string kind;  // Mastectomy, Hysterectomy, Oophorectomy
  int age = 0;
};

// One pedigree row: identity, parentage, phenotype history, modifiers and
// germline test results.
struct MemberRecord {
  int id = 0;
  std::optional<int> mother_id;
  std::optional<int> father_id;
  Sex sex = Sex::Unknown;
  bool is_proband = false;
  std::optional<int> cur_age;  // censoring age: current age or death age
  std::optional<bool> is_dead;
  std::map<std::string, Affection> affections;  // cancer tag -> status
  std::optional<std::string> race;
  std::optional<std::string> ancestry;
  int twin_group = 0;  // 0 = not an identical twin
  std::vector<Intervention> interventions;
  std::map<std::string, int> germline_results;  // gene tag -> 0/1

  bool is_founder() const { return !mother_id && !father_id; }
};

struct Pedigree {
  std::vector<MemberRecord> members;
  std::vector<std::string> cancer_tags;  // ordered as they appear in the input

  const MemberRecord* find(int id) const;
  MemberRecord* find(int id);
};

struct CheckIssue {
  std::string code;
  std::vector<int> member_ids;
  std::string message;
};

struct CheckReport {
  std::vector<CheckIssue> warnings;
  std::vector<CheckIssue> repairs;
  std::optional<CheckIssue> fatal;

  bool ok() const { return !fatal.has_value(); }
  nlohmann::json to_json() const;
};

enum class PedigreeFormat { Csv, Json };

// Parses the tabular pedigree schema. Required columns: ID, MotherID, FatherID,
// Sex, isProband, CurAge, isDead. Cancer history arrives as isAff*/Age* column
// pairs; known tumor-marker columns (CK14, CK5.6, ER, PR, HER2, MSI) are
// consumed but ignored with a warning; any remaining column is treated as a
// germline test result for a gene of that name. Interventions are encoded
// either inline as "Kind@Age;Kind@Age" in riskmod or as parallel riskmod /
// InterAge lists.
Pedigree parse_pedigree(std::istream& in, PedigreeFormat format,
                        CheckReport* report = nullptr);
Pedigree parse_pedigree_file(const std::string& path,
                             CheckReport* report = nullptr);

// Validation/repair pipeline, applied in a fixed order so repairs are
// deterministic:
//   1. duplicate/invalid IDs, dangling parent references, parent cycles (fatal)
//   2. parent sex repair (unknown -> inferred; contradictory -> fatal)
//   3. sex-specific cancer affections cleared with a repair entry
//   4. single-parent members gain a pseudo-parent founder (shared by siblings)
//   5. identical-twin consistency (fatal on violation)
//   6. dead members with missing censoring age flagged for imputation
//   7. diagnosis/intervention ages above the censoring age clamped
// Idempotent: a second application yields no further repairs.
std::pair<Pedigree, CheckReport> check_pedigree(
    const Pedigree& ped,
    const std::map<std::string, SexRestriction>& sex_registry);

// True iff the marriage graph (individuals plus one node per mating pair,
// with spouse and child edges into the mating node) contains a cycle.
bool detect_loops(const Pedigree& ped);

// Removes members with no path through parent/child/mating edges to any
// proband. Probands are never removed.
std::pair<Pedigree, CheckReport> prune_disconnected(const Pedigree& ped);

// Pedigree serialization (JSON mirror of the CSV schema).
nlohmann::json pedigree_to_json(const Pedigree& ped);
void write_pedigree_csv(const Pedigree& ped, std::ostream& out);

}  // namespace pedrisk
