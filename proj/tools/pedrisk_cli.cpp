#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pedrisk/impute.hpp"
#include "pedrisk/result.hpp"
#include "pedrisk/synthetic.hpp"

namespace {

using namespace pedrisk;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(std::stoi(item));
  return out;
}

std::string default_database_path(const std::string& arg) {
  if (!arg.empty()) return arg;
  if (const char* env = std::getenv("PEDRISK_DATABASE")) return env;
  return "database.json";
}

int cmd_run(const std::string& pedigree_path, const std::string& db_path,
            ModelSpec spec, const std::string& format, const std::string& out) {
  const ModelDatabase full = load_database_file(default_database_path(db_path));
  if (spec.cancers.empty()) spec.cancers = full.cancer_tags;
  if (spec.genes.empty()) spec.genes = full.gene_tags;
  // The paring parameter never usefully exceeds the gene count.
  spec.max_mut = std::min(spec.max_mut, (int)spec.genes.size());
  const ModelDatabase db = build_database(full, spec);
  const GenotypeSpace space =
      enumerate_space((int)spec.genes.size(), spec.max_mut);

  CheckReport parse_report;
  const Pedigree raw = parse_pedigree_file(pedigree_path, &parse_report);
  auto [checked, check_report] = check_pedigree(raw, db.sex_restriction);
  check_report.warnings.insert(check_report.warnings.begin(),
                               parse_report.warnings.begin(),
                               parse_report.warnings.end());
  if (!check_report.ok()) {
    std::cerr << check_report.to_json().dump(2) << '\n';
    return 1;
  }
  if (detect_loops(checked)) {
    check_report.fatal =
        CheckIssue{"LoopDetected", {}, "pedigree contains a loop"};
    std::cerr << check_report.to_json().dump(2) << '\n';
    return 1;
  }
  auto [pruned, prune_report] = prune_disconnected(checked);
  check_report.repairs.insert(check_report.repairs.end(),
                              prune_report.repairs.begin(),
                              prune_report.repairs.end());

  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
  };
  std::cerr << "Your model has " << spec.cancers.size() << " cancers - "
            << join(spec.cancers) << " and " << spec.genes.size() << " genes - "
            << join(spec.genes) << '\n';

  ImputedResults results = run_with_imputation(pruned, db, space, spec);

  if (format == "csv") {
    if (out.empty()) {
      std::cout.precision(10);
      write_posterior_csv(results, std::cout);
      std::cout << '\n';
      write_risk_csv(results, std::cout);
    } else {
      std::ofstream pos(out + ".posterior.csv"), risk(out + ".risk.csv");
      if (!pos || !risk) throw Error("IoError", "cannot write " + out);
      pos.precision(10);
      risk.precision(10);
      write_posterior_csv(results, pos);
      write_risk_csv(results, risk);
    }
  } else {
    const nlohmann::json doc = result_document(results, check_report, spec);
    if (out.empty()) {
      std::cout << doc.dump(2) << '\n';
    } else {
      std::ofstream o(out);
      if (!o) throw Error("IoError", "cannot write " + out);
      o << doc.dump(2) << '\n';
    }
  }
  return 0;
}

double time_peel(const Pedigree& ped, const ModelDatabase& db,
                 const GenotypeSpace& space, int repeats) {
  // Complete missing ages once so the timed section is the algorithm itself.
  ModelSpec spec;
  spec.cancers = db.cancer_tags;
  const Pedigree completed =
      sample_missing_ages(ped, db, make_plan(ped, spec), 0);
  double total = 0.0;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    (void)peel(completed, db, space);
    total += std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                           start)
                 .count();
  }
  return total / repeats;
}

int cmd_bench(const std::string& genes_sweep, const std::string& paring_sweep,
              const std::string& members_sweep, int repeats,
              const std::string& out) {
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw Error("IoError", "cannot write " + out);
    os = &file;
  }
  *os << "K,T,members,mean_seconds,genotype_count\n";
  os->precision(8);

  for (const int k : split_ints(genes_sweep)) {
    const ModelDatabase db =
        synthesize_database(k, 2, SynthProfile::ConstantHazard, 11);
    const Pedigree family = make_sample_family();
    for (const int t : split_ints(paring_sweep)) {
      if (t > k) continue;
      const GenotypeSpace space = enumerate_space(k, t);
      const double sec = time_peel(family, db, space, repeats);
      *os << k << ',' << t << ',' << family.members.size() << ',' << sec << ','
          << space.size() << '\n';
    }
  }

  if (!members_sweep.empty()) {
    const int k = 6, t = 2;
    const ModelDatabase db =
        synthesize_database(k, 2, SynthProfile::ConstantHazard, 11);
    const GenotypeSpace space = enumerate_space(k, t);
    for (const int members : split_ints(members_sweep)) {
      const Pedigree chain = make_chain_pedigree(members);
      const double sec = time_peel(chain, db, space, repeats);
      *os << k << ',' << t << ',' << members << ',' << sec << ','
          << space.size() << '\n';
    }
  }
  return 0;
}

int cmd_synth(int genes, int cancers, const std::string& gene_list,
              const std::string& cancer_list, const std::string& profile,
              std::uint64_t seed, double base_hazard, const std::string& out) {
  SynthProfile p = SynthProfile::ConstantHazard;
  if (profile == "ramp")
    p = SynthProfile::Ramp;
  else if (profile == "peaked")
    p = SynthProfile::Peaked;
  else if (profile != "constant")
    throw Error("MalformedInput", "unknown profile: " + profile);

  ModelDatabase db;
  if (!gene_list.empty() || !cancer_list.empty()) {
    db = synthesize_database(split_list(gene_list), split_list(cancer_list), p,
                             seed, base_hazard);
  } else {
    std::vector<std::string> gtags, ctags;
    for (int g = 1; g <= genes; ++g) gtags.push_back("G" + std::to_string(g));
    for (int c = 1; c <= cancers; ++c) ctags.push_back("C" + std::to_string(c));
    db = synthesize_database(gtags, ctags, p, seed, base_hazard);
  }
  save_database_file(db, out);
  return 0;
}

int cmd_sample(const std::string& kind, int members, const std::string& out) {
  Pedigree ped;
  if (kind == "family")
    ped = make_sample_family();
  else if (kind == "loop")
    ped = make_loop_pedigree();
  else if (kind == "chain")
    ped = make_chain_pedigree(members);
  else
    throw Error("MalformedInput", "unknown sample kind: " + kind);
  if (out.empty()) {
    write_pedigree_csv(ped, std::cout);
  } else {
    std::ofstream o(out);
    if (!o) throw Error("IoError", "cannot write " + out);
    write_pedigree_csv(ped, o);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mendelian carrier-probability and cancer-risk engine"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run the full pipeline on a pedigree");
  std::string pedigree_path, db_path, cancers, genes, format = "json", out;
  ModelSpec spec;
  bool unconditional = false;
  run->add_option("pedigree", pedigree_path, "Pedigree CSV/JSON file")
      ->required();
  run->add_option("--database,-d", db_path,
                  "Model database JSON (default: $PEDRISK_DATABASE or "
                  "database.json)");
  run->add_option("--cancers", cancers, "Comma-separated cancer tags");
  run->add_option("--genes", genes, "Comma-separated gene tags");
  run->add_option("--max-mut", spec.max_mut, "Paring parameter T");
  run->add_option("--iterations", spec.impute_iterations,
                  "Imputation replicates for missing ages");
  run->add_flag("--net", spec.net_future_risk,
                "Report net instead of crude future risk");
  run->add_option("--age-by", spec.age_by, "Risk grid interval in years");
  run->add_flag("--parallel,!--sequential", spec.parallel,
                "Run imputation replicates concurrently");
  run->add_option("--seed", spec.seed, "Imputation RNG seed");
  run->add_option("--format", format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--out,-o", out, "Output path (stdout when omitted)");
  run->add_flag("--unconditional", unconditional,
                "Report risks without conditioning on being event-free now");

  // bench
  auto* bench = app.add_subcommand("bench", "Timing sweeps, CSV output");
  std::string genes_sweep = "2,6,10,14,18,22", paring_sweep = "2",
              members_sweep, bench_out;
  int repeats = 10;
  bench->add_option("--genes-sweep", genes_sweep, "Gene counts to sweep");
  bench->add_option("--paring-sweep", paring_sweep, "Paring values to sweep");
  bench->add_option("--members-sweep", members_sweep,
                    "Chain pedigree sizes to sweep (e.g. 50,100,200)");
  bench->add_option("--repeats", repeats, "Repeats per configuration");
  bench->add_option("--out,-o", bench_out, "CSV output path");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic database");
  int synth_genes = 4, synth_cancers = 2;
  std::string synth_gene_list, synth_cancer_list, profile = "constant",
              synth_out = "database.json";
  std::uint64_t synth_seed = 0;
  double base_hazard = 0.01;
  synth->add_option("--genes", synth_genes, "Number of genes (tags G1..GK)");
  synth->add_option("--cancers", synth_cancers,
                    "Number of cancers (tags C1..CR)");
  synth->add_option("--gene-tags", synth_gene_list,
                    "Explicit comma-separated gene tags");
  synth->add_option("--cancer-tags", synth_cancer_list,
                    "Explicit comma-separated cancer tags");
  synth->add_option("--profile", profile, "constant, ramp or peaked");
  synth->add_option("--seed", synth_seed, "RNG seed");
  synth->add_option("--base-hazard", base_hazard,
                    "Noncarrier yearly hazard for the constant profile");
  synth->add_option("--out,-o", synth_out, "Database output path");

  // sample
  auto* sample = app.add_subcommand("sample", "Write a bundled sample pedigree");
  std::string sample_kind = "family", sample_out;
  int sample_members = 19;
  sample->add_option("--kind", sample_kind, "family, loop or chain");
  sample->add_option("--members", sample_members, "Chain length");
  sample->add_option("--out,-o", sample_out, "Output path (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      spec.cancers = split_list(cancers);
      spec.genes = split_list(genes);
      spec.conditional_risk = !unconditional;
      return cmd_run(pedigree_path, db_path, spec, format, out);
    }
    if (bench->parsed())
      return cmd_bench(genes_sweep, paring_sweep, members_sweep, repeats,
                       bench_out);
    if (synth->parsed())
      return cmd_synth(synth_genes, synth_cancers, synth_gene_list,
                       synth_cancer_list, profile, synth_seed, base_hazard,
                       synth_out);
    if (sample->parsed())
      return cmd_sample(sample_kind, sample_members, sample_out);
  } catch (const pedrisk::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == "LoopDetected" ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
