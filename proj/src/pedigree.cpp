#include "pedrisk/pedigree.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pedrisk {

const MemberRecord* Pedigree::find(int id) const {
  for (const auto& m : members)
    if (m.id == id) return &m;
  return nullptr;
}

MemberRecord* Pedigree::find(int id) {
  for (auto& m : members)
    if (m.id == id) return &m;
  return nullptr;
}

nlohmann::json CheckReport::to_json() const {
  auto issue_json = [](const CheckIssue& i) {
    return nlohmann::json{
        {"code", i.code}, {"member_ids", i.member_ids}, {"message", i.message}};
  };
  nlohmann::json j;
  j["warnings"] = nlohmann::json::array();
  j["repairs"] = nlohmann::json::array();
  for (const auto& w : warnings) j["warnings"].push_back(issue_json(w));
  for (const auto& r : repairs) j["repairs"].push_back(issue_json(r));
  if (fatal) j["fatal"] = issue_json(*fatal);
  return j;
}

namespace {

const std::set<std::string> kMarkerColumns = {"CK14", "CK5.6", "ER",
                                              "PR",   "HER2",  "MSI"};
const std::vector<std::string> kRequiredColumns = {
    "ID", "MotherID", "FatherID", "Sex", "isProband", "CurAge", "isDead"};
const std::set<std::string> kFixedColumns = {
    "ID",     "MotherID", "FatherID", "Sex",     "isProband", "CurAge",
    "isDead", "race",     "Ancestry", "Twins",   "riskmod",   "InterAge"};
const std::set<std::string> kRaces = {"All_Races", "AIAN",     "Asian", "Black",
                                      "White",     "Hispanic", "WH",    "WNH"};
const std::set<std::string> kAncestries = {"AJ", "nonAJ", "Italian"};
const std::set<std::string> kInterventionKinds = {"Mastectomy", "Hysterectomy",
                                                  "Oophorectomy"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

int parse_int_cell(const std::string& cell, const std::string& column) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw Error("MalformedInput",
                "cannot parse '" + cell + "' in column " + column);
  }
}

std::optional<int> parse_opt_int(const std::string& cell,
                                 const std::string& column) {
  if (is_missing(cell)) return std::nullopt;
  return parse_int_cell(cell, column);
}

// Intervention parsing: either inline "Kind@Age" entries in riskmod, or
// bare kinds in riskmod paired positionally with ages in InterAge.
std::vector<Intervention> parse_interventions(const std::string& riskmod,
                                              const std::string& inter_age) {
  std::vector<Intervention> out;
  if (is_missing(riskmod)) return out;
  const auto kinds = split_on(riskmod, ';');
  const auto ages = is_missing(inter_age) ? std::vector<std::string>{}
                                          : split_on(inter_age, ';');
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    Intervention iv;
    const auto at = kinds[i].find('@');
    if (at != std::string::npos) {
      iv.kind = trim(kinds[i].substr(0, at));
      iv.age = parse_int_cell(trim(kinds[i].substr(at + 1)), "riskmod");
    } else {
      iv.kind = kinds[i];
      if (i >= ages.size())
        throw Error("MalformedInput",
                    "riskmod '" + iv.kind + "' has no matching InterAge");
      iv.age = parse_int_cell(ages[i], "InterAge");
    }
    if (!kInterventionKinds.count(iv.kind))
      throw Error("MalformedInput", "unknown intervention kind: " + iv.kind);
    if (iv.age < 1)
      throw Error("MalformedInput", "intervention age must be positive");
    out.push_back(iv);
  }
  return out;
}

struct ColumnLayout {
  std::map<std::string, int> fixed;            // fixed column name -> index
  std::vector<std::pair<std::string, int>> is_aff;  // cancer tag -> col
  std::map<std::string, int> age_dx;           // cancer tag -> col
  std::vector<std::pair<std::string, int>> genes;   // gene tag -> col
  std::vector<std::string> ignored;            // marker columns seen
};

ColumnLayout classify_columns(const std::vector<std::string>& header) {
  ColumnLayout layout;
  for (int i = 0; i < (int)header.size(); ++i) {
    const std::string& name = header[i];
    if (kFixedColumns.count(name)) {
      layout.fixed[name] = i;
    } else if (name.rfind("isAff", 0) == 0 && name.size() > 5) {
      layout.is_aff.emplace_back(name.substr(5), i);
    } else if (name.rfind("Age", 0) == 0 && name.size() > 3) {
      layout.age_dx[name.substr(3)] = i;
    } else if (kMarkerColumns.count(name)) {
      layout.ignored.push_back(name);
    } else if (!name.empty()) {
      layout.genes.emplace_back(name, i);
    }
  }
  for (const auto& req : kRequiredColumns)
    if (!layout.fixed.count(req))
      throw Error("MissingColumn", "required column '" + req + "' is absent");
  std::set<std::string> aff_tags;
  for (const auto& [tag, _] : layout.is_aff) aff_tags.insert(tag);
  for (const auto& [tag, _] : layout.age_dx)
    if (!aff_tags.count(tag))
      throw Error("OrphanAgeColumn",
                  "column Age" + tag + " has no matching isAff" + tag);
  return layout;
}

MemberRecord parse_row(const std::vector<std::string>& cells,
                       const ColumnLayout& layout) {
  auto cell = [&](int idx) -> std::string {
    return idx < (int)cells.size() ? cells[idx] : "";
  };
  auto fixed = [&](const std::string& name) -> std::string {
    auto it = layout.fixed.find(name);
    return it == layout.fixed.end() ? "" : cell(it->second);
  };

  MemberRecord m;
  m.id = parse_int_cell(fixed("ID"), "ID");
  m.mother_id = parse_opt_int(fixed("MotherID"), "MotherID");
  m.father_id = parse_opt_int(fixed("FatherID"), "FatherID");

  if (auto sex = parse_opt_int(fixed("Sex"), "Sex")) {
    if (*sex == 0)
      m.sex = Sex::Female;
    else if (*sex == 1)
      m.sex = Sex::Male;
    else
      throw Error("MalformedInput", "Sex must be 0, 1 or NA");
  }
  m.is_proband = parse_opt_int(fixed("isProband"), "isProband").value_or(0) == 1;
  m.cur_age = parse_opt_int(fixed("CurAge"), "CurAge");
  if (auto dead = parse_opt_int(fixed("isDead"), "isDead"))
    m.is_dead = *dead == 1;

  const std::string race = fixed("race");
  if (!is_missing(race)) {
    if (!kRaces.count(race))
      throw Error("MalformedInput", "unknown race: " + race);
    m.race = race;
  }
  const std::string anc = fixed("Ancestry");
  if (!is_missing(anc)) {
    if (!kAncestries.count(anc))
      throw Error("MalformedInput", "unknown ancestry: " + anc);
    m.ancestry = anc;
  }
  m.twin_group = parse_opt_int(fixed("Twins"), "Twins").value_or(0);
  m.interventions = parse_interventions(fixed("riskmod"), fixed("InterAge"));

  for (const auto& [tag, col] : layout.is_aff) {
    Affection aff;
    aff.affected = parse_opt_int(cell(col), "isAff" + tag).value_or(0) == 1;
    auto it = layout.age_dx.find(tag);
    if (it != layout.age_dx.end())
      aff.age_dx = parse_opt_int(cell(it->second), "Age" + tag);
    if (!aff.affected) aff.age_dx.reset();
    m.affections[tag] = aff;
  }
  for (const auto& [tag, col] : layout.genes) {
    const auto v = parse_opt_int(cell(col), tag);
    if (!v) continue;
    if (*v != 0 && *v != 1)
      throw Error("MalformedInput",
                  "germline result for " + tag + " must be 0, 1 or NA");
    m.germline_results[tag] = *v;
  }
  return m;
}

Pedigree parse_csv(std::istream& in, CheckReport* report) {
  std::string line;
  if (!std::getline(in, line))
    throw Error("MalformedInput", "empty pedigree input");
  const auto layout = classify_columns(split_csv_line(line));

  Pedigree ped;
  for (const auto& [tag, _] : layout.is_aff) ped.cancer_tags.push_back(tag);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ped.members.push_back(parse_row(split_csv_line(line), layout));
  }
  if (report && !layout.ignored.empty()) {
    std::string joined;
    for (const auto& c : layout.ignored)
      joined += (joined.empty() ? "" : ", ") + c;
    report->warnings.push_back(
        {"IgnoredColumns", {}, "tumor marker columns ignored: " + joined});
  }
  return ped;
}

Pedigree parse_json(std::istream& in, CheckReport* report) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("MalformedInput", std::string("pedigree JSON: ") + e.what());
  }
  const nlohmann::json& rows = j.is_array() ? j : j.at("members");
  if (!rows.is_array())
    throw Error("MalformedInput", "pedigree JSON must hold a member array");

  // Reuse the CSV row machinery by flattening each object into cells.
  std::set<std::string> columns;
  for (const auto& row : rows)
    for (auto& [key, _] : row.items()) columns.insert(key);
  std::vector<std::string> header(columns.begin(), columns.end());
  const auto layout = classify_columns(header);

  auto to_cell = [](const nlohmann::json& v) -> std::string {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) {
      const double d = v.get<double>();
      if (d == static_cast<long long>(d))
        return std::to_string(static_cast<long long>(d));
    }
    std::ostringstream os;
    os << v;
    return os.str();
  };

  Pedigree ped;
  for (const auto& [tag, _] : layout.is_aff) ped.cancer_tags.push_back(tag);
  for (const auto& row : rows) {
    std::vector<std::string> cells(header.size());
    for (int i = 0; i < (int)header.size(); ++i)
      if (row.contains(header[i])) cells[i] = to_cell(row[header[i]]);
    ped.members.push_back(parse_row(cells, layout));
  }
  if (report && !layout.ignored.empty())
    report->warnings.push_back(
        {"IgnoredColumns", {}, "tumor marker columns ignored"});
  return ped;
}

}  // namespace

Pedigree parse_pedigree(std::istream& in, PedigreeFormat format,
                        CheckReport* report) {
  return format == PedigreeFormat::Csv ? parse_csv(in, report)
                                       : parse_json(in, report);
}

Pedigree parse_pedigree_file(const std::string& path, CheckReport* report) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open pedigree file: " + path);
  const bool json = path.size() > 5 && path.rfind(".json") == path.size() - 5;
  return parse_pedigree(in, json ? PedigreeFormat::Json : PedigreeFormat::Csv,
                        report);
}

std::pair<Pedigree, CheckReport> check_pedigree(
    const Pedigree& input,
    const std::map<std::string, SexRestriction>& sex_registry) {
  Pedigree ped = input;
  CheckReport report;
  auto fatal = [&](const std::string& code, std::vector<int> ids,
                   const std::string& msg) {
    report.fatal = CheckIssue{code, std::move(ids), msg};
    return std::make_pair(ped, report);
  };

  if (ped.members.empty())
    return fatal("EmptyPedigree", {}, "pedigree has no members");

  // 1. IDs unique and positive; parent references resolvable; no member its
  // own ancestor.
  std::set<int> ids;
  for (const auto& m : ped.members) {
    if (m.id <= 0)
      return fatal("InvalidId", {m.id}, "member IDs must be strictly positive");
    if (!ids.insert(m.id).second)
      return fatal("DuplicateId", {m.id},
                   "duplicate member ID " + std::to_string(m.id));
  }
  for (const auto& m : ped.members) {
    for (const auto& pid : {m.mother_id, m.father_id}) {
      if (pid && !ids.count(*pid))
        return fatal("DanglingParent", {m.id, *pid},
                     "member " + std::to_string(m.id) +
                         " references nonexistent parent " +
                         std::to_string(*pid));
    }
    if ((m.mother_id && *m.mother_id == m.id) ||
        (m.father_id && *m.father_id == m.id))
      return fatal("ParentCycle", {m.id}, "member is its own parent");
  }
  {  // ancestor cycle detection over the directed parent graph
    std::map<int, int> state;  // 0 unvisited, 1 on stack, 2 done
    std::function<bool(int)> visit = [&](int id) {
      state[id] = 1;
      const MemberRecord* m = ped.find(id);
      for (const auto& pid : {m->mother_id, m->father_id}) {
        if (!pid) continue;
        if (state[*pid] == 1) return false;
        if (state[*pid] == 0 && !visit(*pid)) return false;
      }
      state[id] = 2;
      return true;
    };
    for (const auto& m : ped.members)
      if (state[m.id] == 0 && !visit(m.id))
        return fatal("ParentCycle", {m.id},
                     "a member is its own ancestor in the parent graph");
  }

  if (std::none_of(ped.members.begin(), ped.members.end(),
                   [](const MemberRecord& m) { return m.is_proband; }))
    return fatal("NoProband", {}, "no member has isProband=1");

  // 2. Parent sex: referenced mothers must be female, fathers male. Unknown
  // sex is repaired; contradictory sex is fatal.
  for (const auto& m : ped.members) {
    if (m.mother_id) {
      MemberRecord* mom = ped.find(*m.mother_id);
      if (mom->sex == Sex::Male)
        return fatal("ParentSexConflict", {mom->id},
                     "member " + std::to_string(mom->id) +
                         " is referenced as a mother but is male");
      if (mom->sex == Sex::Unknown) {
        mom->sex = Sex::Female;
        report.repairs.push_back({"ParentSexInferred",
                                  {mom->id},
                                  "sex set to female (referenced as mother)"});
      }
    }
    if (m.father_id) {
      MemberRecord* dad = ped.find(*m.father_id);
      if (dad->sex == Sex::Female)
        return fatal("ParentSexConflict", {dad->id},
                     "member " + std::to_string(dad->id) +
                         " is referenced as a father but is female");
      if (dad->sex == Sex::Unknown) {
        dad->sex = Sex::Male;
        report.repairs.push_back({"ParentSexInferred",
                                  {dad->id},
                                  "sex set to male (referenced as father)"});
      }
    }
  }

  // 3. Sex-specific cancers: impossible affections are cleared.
  for (auto& m : ped.members) {
    for (auto& [tag, aff] : m.affections) {
      if (!aff.affected) continue;
      auto it = sex_registry.find(tag);
      if (it == sex_registry.end()) continue;
      if (m.sex != Sex::Unknown && !sex_allows(it->second, m.sex)) {
        aff.affected = false;
        aff.age_dx.reset();
        report.repairs.push_back(
            {"SexImpossibleCancer",
             {m.id},
             "affection for " + tag + " cleared (impossible for member's sex)"});
      }
    }
  }

  // 4. Single-parent completion: pseudo-parent founders shared by siblings of
  // the same known parent.
  {
    int next_id = 0;
    for (const auto& m : ped.members) next_id = std::max(next_id, m.id);
    std::map<std::pair<int, bool>, int> pseudo;  // (known parent, father?) -> id
    std::vector<MemberRecord> added;
    for (auto& m : ped.members) {
      if (m.mother_id.has_value() == m.father_id.has_value()) continue;
      const bool missing_father = !m.father_id.has_value();
      const int known_id = missing_father ? *m.mother_id : *m.father_id;
      const auto key = std::make_pair(known_id, missing_father);
      auto it = pseudo.find(key);
      int pid;
      if (it != pseudo.end()) {
        pid = it->second;
      } else {
        MemberRecord p;
        p.id = ++next_id;
        p.sex = missing_father ? Sex::Male : Sex::Female;
        const MemberRecord* spouse = ped.find(known_id);
        p.race = spouse->race;
        p.ancestry = spouse->ancestry;
        added.push_back(p);
        pseudo[key] = p.id;
        pid = p.id;
        report.repairs.push_back(
            {"PseudoParentAdded",
             {m.id, p.id},
             "added pseudo-" + std::string(missing_father ? "father" : "mother") +
                 " " + std::to_string(p.id) + " with population priors"});
      }
      (missing_father ? m.father_id : m.mother_id) = pid;
    }
    for (auto& p : added) ped.members.push_back(std::move(p));
  }

  // 5. Twin consistency: each group needs >= 2 members with identical parents
  // and identical sex.
  {
    std::map<int, std::vector<const MemberRecord*>> groups;
    for (const auto& m : ped.members)
      if (m.twin_group > 0) groups[m.twin_group].push_back(&m);
    for (const auto& [group, twins] : groups) {
      std::vector<int> tids;
      for (const auto* t : twins) tids.push_back(t->id);
      if (twins.size() < 2)
        return fatal("TwinGroupTooSmall", tids,
                     "twin group " + std::to_string(group) +
                         " has fewer than two members");
      for (const auto* t : twins) {
        if (t->sex != twins[0]->sex)
          return fatal("TwinSexMismatch", tids,
                       "identical twins must share the same sex");
        if (t->mother_id != twins[0]->mother_id ||
            t->father_id != twins[0]->father_id)
          return fatal("TwinParentMismatch", tids,
                       "identical twins must share the same parents");
      }
    }
  }

  // 6. Dead members with missing censoring age will be imputed.
  for (const auto& m : ped.members)
    if (m.is_dead.value_or(false) && !m.cur_age)
      report.warnings.push_back(
          {"MissingDeathAge",
           {m.id},
           "dead member has no censoring age; it will be imputed"});

  // 7. Ages above the censoring age are clamped.
  for (auto& m : ped.members) {
    if (!m.cur_age) continue;
    for (auto& [tag, aff] : m.affections) {
      if (aff.affected && aff.age_dx && *aff.age_dx > *m.cur_age) {
        aff.age_dx = m.cur_age;
        report.repairs.push_back({"DiagnosisAgeClamped",
                                  {m.id},
                                  "Age" + tag + " clamped to CurAge"});
      }
    }
    for (auto& iv : m.interventions) {
      if (iv.age > *m.cur_age) {
        iv.age = *m.cur_age;
        report.repairs.push_back({"InterventionAgeClamped",
                                  {m.id},
                                  iv.kind + " age clamped to CurAge"});
      }
    }
  }

  // Ancestry consistency is warned about but never repaired.
  for (const auto& m : ped.members) {
    if (!m.ancestry || (!m.mother_id && !m.father_id)) continue;
    const MemberRecord* mom = m.mother_id ? ped.find(*m.mother_id) : nullptr;
    const MemberRecord* dad = m.father_id ? ped.find(*m.father_id) : nullptr;
    const bool mom_has = mom && mom->ancestry;
    const bool dad_has = dad && dad->ancestry;
    if (!mom_has && !dad_has) continue;
    const bool matches = (mom_has && *mom->ancestry == *m.ancestry) ||
                         (dad_has && *dad->ancestry == *m.ancestry);
    if (!matches)
      report.warnings.push_back(
          {"AncestryMismatch",
           {m.id},
           "member ancestry not present in either parent"});
  }

  return {ped, report};
}

bool detect_loops(const Pedigree& ped) {
  // Union-find over individuals plus one node per mating pair; a cycle
  // appears when an edge joins two already-connected nodes.
  std::map<int, int> node;  // member id -> node index
  int n = 0;
  for (const auto& m : ped.members) node[m.id] = n++;
  std::map<std::pair<int, int>, int> matings;
  for (const auto& m : ped.members) {
    if (!m.mother_id || !m.father_id) continue;
    const auto key = std::make_pair(*m.mother_id, *m.father_id);
    if (!matings.count(key)) matings[key] = n++;
  }

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto join = [&](int a, int b) {
    const int ra = root(a), rb = root(b);
    if (ra == rb) return false;  // closing edge: cycle
    parent[ra] = rb;
    return true;
  };

  std::set<std::pair<int, int>> seen;  // spouse edges added once
  for (const auto& m : ped.members) {
    if (!m.mother_id || !m.father_id) continue;
    const int mate = matings.at({*m.mother_id, *m.father_id});
    for (int pid : {*m.mother_id, *m.father_id}) {
      if (seen.insert({pid, mate}).second && !join(node.at(pid), mate))
        return true;
    }
    if (!join(node.at(m.id), mate)) return true;
  }
  return false;
}

std::pair<Pedigree, CheckReport> prune_disconnected(const Pedigree& input) {
  CheckReport report;
  // Undirected reachability over parent/child edges (spouses connect through
  // their common child's parent pair).
  std::map<int, std::set<int>> adj;
  for (const auto& m : input.members) {
    for (const auto& pid : {m.mother_id, m.father_id}) {
      if (!pid) continue;
      adj[m.id].insert(*pid);
      adj[*pid].insert(m.id);
    }
    if (m.mother_id && m.father_id) {
      adj[*m.mother_id].insert(*m.father_id);
      adj[*m.father_id].insert(*m.mother_id);
    }
  }

  std::set<int> reachable;
  std::vector<int> stack;
  for (const auto& m : input.members)
    if (m.is_proband) {
      stack.push_back(m.id);
      reachable.insert(m.id);
    }
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    for (int next : adj[id])
      if (reachable.insert(next).second) stack.push_back(next);
  }

  Pedigree pruned;
  pruned.cancer_tags = input.cancer_tags;
  std::vector<int> removed;
  for (const auto& m : input.members) {
    if (reachable.count(m.id))
      pruned.members.push_back(m);
    else
      removed.push_back(m.id);
  }
  if (!removed.empty()) {
    std::string msg = "removed members disconnected from every proband:";
    for (int id : removed) msg += ' ' + std::to_string(id);
    report.repairs.push_back({"DisconnectedRemoved", removed, msg});
  }
  return {pruned, report};
}

nlohmann::json pedigree_to_json(const Pedigree& ped) {
  auto opt_int = [](const std::optional<int>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : ped.members) {
    nlohmann::json row;
    row["ID"] = m.id;
    row["MotherID"] = opt_int(m.mother_id);
    row["FatherID"] = opt_int(m.father_id);
    row["Sex"] = m.sex == Sex::Unknown
                     ? nlohmann::json(nullptr)
                     : nlohmann::json(m.sex == Sex::Male ? 1 : 0);
    row["isProband"] = m.is_proband ? 1 : 0;
    row["CurAge"] = opt_int(m.cur_age);
    row["isDead"] =
        m.is_dead ? nlohmann::json(*m.is_dead ? 1 : 0) : nlohmann::json(nullptr);
    if (m.race) row["race"] = *m.race;
    if (m.ancestry) row["Ancestry"] = *m.ancestry;
    if (m.twin_group > 0) row["Twins"] = m.twin_group;
    for (const auto& [tag, aff] : m.affections) {
      row["isAff" + tag] = aff.affected ? 1 : 0;
      row["Age" + tag] = opt_int(aff.age_dx);
    }
    if (!m.interventions.empty()) {
      std::string riskmod;
      for (const auto& iv : m.interventions) {
        if (!riskmod.empty()) riskmod += ';';
        riskmod += iv.kind + '@' + std::to_string(iv.age);
      }
      row["riskmod"] = riskmod;
    }
    for (const auto& [gene, result] : m.germline_results) row[gene] = result;
    members.push_back(std::move(row));
  }
  return nlohmann::json{{"members", std::move(members)}};
}

void write_pedigree_csv(const Pedigree& ped, std::ostream& out) {
  std::set<std::string> genes;
  for (const auto& m : ped.members)
    for (const auto& [g, _] : m.germline_results) genes.insert(g);

  out << "ID,MotherID,FatherID,Sex,isProband,CurAge,isDead,race,Ancestry,"
         "Twins,riskmod,InterAge";
  for (const auto& tag : ped.cancer_tags)
    out << ",isAff" << tag << ",Age" << tag;
  for (const auto& g : genes) out << ',' << g;
  out << '\n';

  auto opt = [](const std::optional<int>& v) {
    return v ? std::to_string(*v) : "NA";
  };
  for (const auto& m : ped.members) {
    out << m.id << ',' << opt(m.mother_id) << ',' << opt(m.father_id) << ','
        << (m.sex == Sex::Unknown ? "NA" : m.sex == Sex::Male ? "1" : "0")
        << ',' << (m.is_proband ? 1 : 0) << ',' << opt(m.cur_age) << ','
        << (m.is_dead ? (*m.is_dead ? "1" : "0") : "NA") << ','
        << m.race.value_or("NA") << ',' << m.ancestry.value_or("NA") << ','
        << m.twin_group;
    std::string kinds, ages;
    for (const auto& iv : m.interventions) {
      if (!kinds.empty()) kinds += ';', ages += ';';
      kinds += iv.kind;
      ages += std::to_string(iv.age);
    }
    out << ',' << (kinds.empty() ? "NA" : kinds) << ','
        << (ages.empty() ? "NA" : ages);
    for (const auto& tag : ped.cancer_tags) {
      auto it = m.affections.find(tag);
      const bool aff = it != m.affections.end() && it->second.affected;
      out << ',' << (aff ? 1 : 0) << ','
          << (aff && it->second.age_dx ? std::to_string(*it->second.age_dx)
                                       : "NA");
    }
    for (const auto& g : genes) {
      auto it = m.germline_results.find(g);
      out << ',' << (it == m.germline_results.end() ? "NA"
                                                    : std::to_string(it->second));
    }
    out << '\n';
  }
}

}  // namespace pedrisk
