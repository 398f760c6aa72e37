#include "pedrisk/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <unordered_map>

namespace pedrisk {

namespace {

Eigen::VectorXd sexed_likelihood(const MemberRecord& member,
                                 const ModelDatabase& db,
                                 const GenotypeSpace& space, Sex sex) {
  Eigen::VectorXd like = Eigen::VectorXd::Ones(space.size());
  for (int c = 0; c < (int)db.cancer_tags.size(); ++c) {
    auto it = member.affections.find(db.cancer_tags[c]);
    const bool affected = it != member.affections.end() && it->second.affected;
    for (int g = 0; g < space.size(); ++g) {
      const Eigen::ArrayXd density =
          apply_risk_modifiers(db, member, c, space.vectors[g], sex,
                               PenetKind::Net);
      double factor;
      if (affected) {
        if (!it->second.age_dx)
          throw Error("MissingAge",
                      "member " + std::to_string(member.id) +
                          " affected with unknown diagnosis age (impute first)");
        const int a = std::clamp(*it->second.age_dx, 1, db.age_max);
        factor = density[a - 1];
      } else {
        if (!member.cur_age)
          throw Error("MissingAge", "member " + std::to_string(member.id) +
                                        " has no censoring age (impute first)");
        const int cap = std::clamp(*member.cur_age, 1, db.age_max);
        factor = 1.0 - density.head(cap).sum();
      }
      like[g] *= std::max(factor, 0.0);
    }
  }
  return like;
}

}  // namespace

Eigen::VectorXd member_likelihood(const MemberRecord& member,
                                  const ModelDatabase& db,
                                  const GenotypeSpace& space) {
  Eigen::VectorXd like;
  if (member.sex == Sex::Unknown) {
    like = 0.5 * (sexed_likelihood(member, db, space, Sex::Female) +
                  sexed_likelihood(member, db, space, Sex::Male));
  } else {
    like = sexed_likelihood(member, db, space, member.sex);
  }
  if (!member.germline_results.empty()) {
    std::vector<int> results(space.gene_count, -1);
    for (const auto& [gene, r] : member.germline_results) {
      const int g = db.gene_index(gene);
      if (g >= 0) results[g] = r;
    }
    like = like.cwiseProduct(constrain_by_tests(space, results));
  }
  return like;
}

namespace {

// Genotype variables (identical-twin sets merged) and nuclear-family factors.
struct PeelGraph {
  struct Var {
    std::vector<int> member_ids;
    int mother = -1;  // variable indices; -1 for founders
    int father = -1;
    Eigen::VectorXd potential;
  };
  struct Fam {
    int mother = 0;
    int father = 0;
    std::vector<int> children;
  };
  std::vector<Var> vars;
  std::vector<Fam> fams;
  std::map<int, int> var_of_member;
};

PeelGraph build_graph(const Pedigree& ped, const ModelDatabase& db,
                      const GenotypeSpace& space) {
  PeelGraph g;
  std::map<int, int> twin_var;
  for (const auto& m : ped.members) {
    if (m.twin_group > 0) {
      auto it = twin_var.find(m.twin_group);
      if (it != twin_var.end()) {
        g.vars[it->second].member_ids.push_back(m.id);
        g.var_of_member[m.id] = it->second;
        continue;
      }
      twin_var[m.twin_group] = static_cast<int>(g.vars.size());
    }
    g.var_of_member[m.id] = static_cast<int>(g.vars.size());
    g.vars.push_back({{m.id}, -1, -1, {}});
  }

  for (auto& var : g.vars) {
    const MemberRecord* first = ped.find(var.member_ids.front());
    if (first->mother_id) var.mother = g.var_of_member.at(*first->mother_id);
    if (first->father_id) var.father = g.var_of_member.at(*first->father_id);
    var.potential = Eigen::VectorXd::Ones(space.size());
    for (int id : var.member_ids)
      var.potential =
          var.potential.cwiseProduct(member_likelihood(*ped.find(id), db, space));
    if (var.mother < 0 && var.father < 0) {
      // Founder prior from the member's ancestry (twins share one draw).
      var.potential = var.potential.cwiseProduct(
          founder_prior(space, db.allele_freq_vector(first->ancestry)));
    }
  }

  std::map<std::pair<int, int>, int> fam_of;
  for (int v = 0; v < (int)g.vars.size(); ++v) {
    const auto& var = g.vars[v];
    if (var.mother < 0 || var.father < 0) continue;
    const auto key = std::make_pair(var.mother, var.father);
    auto it = fam_of.find(key);
    if (it == fam_of.end()) {
      it = fam_of.emplace(key, (int)g.fams.size()).first;
      g.fams.push_back({var.mother, var.father, {}});
    }
    g.fams[it->second].children.push_back(v);
  }
  return g;
}

void max_normalize(Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (m > 0) v /= m;
}

// Message from a nuclear-family factor to one of its neighbors. The factor
// over (mother, father, children) is the product of the pared-renormalized
// transmission of each child given the parent pair.
Eigen::VectorXd family_message(const PeelGraph& g, const GenotypeSpace& space,
                               int fam_idx, int target,
                               const std::function<const Eigen::VectorXd&(
                                   int /*var*/, int /*fam*/)>& incoming) {
  const auto& fam = g.fams[fam_idx];
  const int n = space.size();
  const bool to_mother = target == fam.mother;
  const bool to_father = target == fam.father && !to_mother;

  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd raw(n);
  std::vector<double> sums(fam.children.size());

  for (int mi = 0; mi < n; ++mi) {
    const double wm = to_mother ? 1.0 : incoming(fam.mother, fam_idx)[mi];
    if (wm == 0.0) continue;
    for (int fi = 0; fi < n; ++fi) {
      const double wf = to_father ? 1.0 : incoming(fam.father, fam_idx)[fi];
      if (wf == 0.0) continue;
      const CarrierVector mv = space.vectors[mi];
      const CarrierVector fv = space.vectors[fi];
      double z = 0.0;
      for (int c = 0; c < n; ++c) {
        raw[c] = transmission_raw(space.vectors[c], mv, fv);
        z += raw[c];
      }
      // z > 0 always: the noncarrier child has positive probability.
      double prod = wm * wf;
      int target_child = -1;
      for (int j = 0; j < (int)fam.children.size(); ++j) {
        if (fam.children[j] == target && !to_mother && !to_father) {
          target_child = j;
          continue;
        }
        double s = 0.0;
        const Eigen::VectorXd& wc = incoming(fam.children[j], fam_idx);
        for (int c = 0; c < n; ++c) s += raw[c] * wc[c];
        sums[j] = s / z;
        prod *= sums[j];
        if (prod == 0.0) break;
      }
      if (prod == 0.0) continue;
      if (to_mother) {
        out[mi] += prod;
      } else if (to_father) {
        out[fi] += prod;
      } else {
        (void)target_child;
        for (int c = 0; c < n; ++c) out[c] += prod * raw[c] / z;
      }
    }
  }
  max_normalize(out);
  return out;
}

}  // namespace

std::map<int, Eigen::VectorXd> peel(const Pedigree& ped,
                                    const ModelDatabase& db,
                                    const GenotypeSpace& space) {
  if (detect_loops(ped))
    throw Error("LoopDetected", "pedigree contains a marriage-graph loop");

  const PeelGraph g = build_graph(ped, db, space);
  const int nv = static_cast<int>(g.vars.size());
  const int nf = static_cast<int>(g.fams.size());
  const int total = nv + nf;  // var nodes first, then family nodes

  std::vector<std::vector<int>> adj(total);
  for (int f = 0; f < nf; ++f) {
    const auto& fam = g.fams[f];
    const int fnode = nv + f;
    for (int v : {fam.mother, fam.father}) {
      adj[v].push_back(fnode);
      adj[fnode].push_back(v);
    }
    for (int c : fam.children) {
      adj[c].push_back(fnode);
      adj[fnode].push_back(c);
    }
  }

  std::unordered_map<long long, Eigen::VectorXd> messages;
  auto msg_key = [total](int from, int to) {
    return static_cast<long long>(from) * total + to;
  };
  const std::function<const Eigen::VectorXd&(int, int)> var_to_fam =
      [&](int var, int fam) -> const Eigen::VectorXd& {
    return messages.at(msg_key(var, nv + fam));
  };

  auto compute_message = [&](int from, int to) {
    Eigen::VectorXd m;
    if (from < nv) {
      m = g.vars[from].potential;
      for (int nb : adj[from])
        if (nb != to) m = m.cwiseProduct(messages.at(msg_key(nb, from)));
      max_normalize(m);
    } else {
      m = family_message(g, space, from - nv, to, var_to_fam);
    }
    messages[msg_key(from, to)] = std::move(m);
  };

  // Two-pass sum-product per connected component.
  std::vector<int> bfs_parent(total, -2);
  for (int root = 0; root < total; ++root) {
    if (bfs_parent[root] != -2) continue;
    std::vector<int> order;
    std::deque<int> queue{root};
    bfs_parent[root] = -1;
    while (!queue.empty()) {
      const int node = queue.front();
      queue.pop_front();
      order.push_back(node);
      for (int nb : adj[node])
        if (bfs_parent[nb] == -2) {
          bfs_parent[nb] = node;
          queue.push_back(nb);
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it)
      if (bfs_parent[*it] >= 0) compute_message(*it, bfs_parent[*it]);
    for (int node : order)
      for (int nb : adj[node])
        if (bfs_parent[nb] == node) compute_message(node, nb);
  }

  std::map<int, Eigen::VectorXd> result;
  for (const auto& m : ped.members) {
    if (!m.is_proband) continue;
    const int v = g.var_of_member.at(m.id);
    Eigen::VectorXd marginal = g.vars[v].potential;
    for (int nb : adj[v])
      marginal = marginal.cwiseProduct(messages.at(msg_key(nb, v)));
    const double z = marginal.sum();
    if (!(z > 0))
      throw Error("NumericalUnderflow",
                  "posterior normalization failed for proband " +
                      std::to_string(m.id));
    result[m.id] = marginal / z;
  }
  return result;
}

std::map<int, Eigen::VectorXd> brute_force_posterior(const Pedigree& ped,
                                                     const ModelDatabase& db,
                                                     const GenotypeSpace& space) {
  const PeelGraph g = build_graph(ped, db, space);
  const int nv = static_cast<int>(g.vars.size());
  const int n = space.size();

  double combos = 1.0;
  for (int v = 0; v < nv; ++v) combos *= n;
  if (combos > 1e8)
    throw Error("TooLarge", "joint genotype space too large to enumerate");

  // Normalized transmission rows cached per parent-pair ordinal.
  std::map<std::pair<int, int>, Eigen::VectorXd> trans;
  auto trans_row = [&](int mi, int fi) -> const Eigen::VectorXd& {
    auto it = trans.find({mi, fi});
    if (it == trans.end())
      it = trans
               .emplace(std::make_pair(mi, fi),
                        transmission_row(space, space.vectors[mi],
                                         space.vectors[fi]))
               .first;
    return it->second;
  };

  // Enumerate with parents before children so each variable's transmission
  // factor can be applied as soon as it is assigned.
  std::vector<int> topo;
  {
    std::vector<int> state(nv, 0);
    std::function<void(int)> visit = [&](int v) {
      if (state[v]) return;
      state[v] = 1;
      if (g.vars[v].mother >= 0) visit(g.vars[v].mother);
      if (g.vars[v].father >= 0) visit(g.vars[v].father);
      topo.push_back(v);
    };
    for (int v = 0; v < nv; ++v) visit(v);
  }
  std::vector<int> new_index(nv);
  for (int i = 0; i < nv; ++i) new_index[topo[i]] = i;
  std::vector<PeelGraph::Var> vars(nv);
  for (int i = 0; i < nv; ++i) {
    vars[i] = g.vars[topo[i]];
    if (vars[i].mother >= 0) vars[i].mother = new_index[vars[i].mother];
    if (vars[i].father >= 0) vars[i].father = new_index[vars[i].father];
  }

  std::vector<Eigen::VectorXd> marginal(nv, Eigen::VectorXd::Zero(n));
  std::vector<int> assign(nv, 0);
  std::function<void(int, double)> enumerate = [&](int v, double weight) {
    if (weight == 0.0) return;
    if (v == nv) {
      for (int i = 0; i < nv; ++i) marginal[i][assign[i]] += weight;
      return;
    }
    const auto& var = vars[v];
    for (int a = 0; a < n; ++a) {
      double w = weight * var.potential[a];
      if (var.mother >= 0)
        w *= trans_row(assign[var.mother], assign[var.father])[a];
      assign[v] = a;
      enumerate(v + 1, w);
    }
  };
  enumerate(0, 1.0);

  std::map<int, Eigen::VectorXd> result;
  for (const auto& m : ped.members) {
    if (!m.is_proband) continue;
    const int v = new_index[g.var_of_member.at(m.id)];
    Eigen::VectorXd post = marginal[v];
    const double z = post.sum();
    if (!(z > 0))
      throw Error("NumericalUnderflow",
                  "posterior normalization failed for proband " +
                      std::to_string(m.id));
    result[m.id] = post / z;
  }
  return result;
}

}  // namespace pedrisk
