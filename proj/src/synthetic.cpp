#include "pedrisk/synthetic.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>

namespace pedrisk {

namespace {

std::vector<std::string> cancer_names(int count) {
  std::vector<std::string> tags;
  for (int c = 1; c <= count; ++c) tags.push_back("C" + std::to_string(c));
  return tags;
}

MemberRecord make_member(int id, Sex sex, int age) {
  MemberRecord m;
  m.id = id;
  m.sex = sex;
  m.cur_age = age;
  return m;
}

}  // namespace

Pedigree make_chain_pedigree(int members, int cancer_count) {
  Pedigree ped;
  ped.cancer_tags = cancer_names(cancer_count);

  ped.members.push_back(make_member(1, Sex::Female, 88));
  ped.members.push_back(make_member(2, Sex::Male, 90));
  int mother = 1, father = 2;
  int next_id = 3;
  while ((int)ped.members.size() < members) {
    MemberRecord child =
        make_member(next_id++, ped.members.size() % 2 ? Sex::Female : Sex::Male,
                    55);
    child.mother_id = mother;
    child.father_id = father;
    if (ped.members.size() % 3 == 0) {
      child.affections["C1"] = {true, 45};
    }
    ped.members.push_back(child);
    if ((int)ped.members.size() >= members) break;
    if ((int)ped.members.size() + 1 >= members) {
      // A trailing spouse would be disconnected; add a sibling instead.
      MemberRecord sib = make_member(next_id++, Sex::Female, 52);
      sib.mother_id = child.mother_id;
      sib.father_id = child.father_id;
      ped.members.push_back(sib);
      break;
    }
    MemberRecord spouse = make_member(
        next_id++, child.sex == Sex::Female ? Sex::Male : Sex::Female, 57);
    ped.members.push_back(spouse);
    if (child.sex == Sex::Female) {
      mother = child.id;
      father = spouse.id;
    } else {
      mother = spouse.id;
      father = child.id;
    }
  }
  ped.members.back().is_proband = true;
  return ped;
}

Pedigree make_sample_family() {
  Pedigree ped;
  ped.cancer_tags = {"BC", "OC"};
  auto add = [&](int id, Sex sex, std::optional<int> age, int mom, int dad) {
    MemberRecord m;
    m.id = id;
    m.sex = sex;
    m.cur_age = age;
    if (mom > 0) m.mother_id = mom;
    if (dad > 0) m.father_id = dad;
    ped.members.push_back(m);
    return &ped.members.back();
  };

  add(1, Sex::Female, 93, 0, 0);
  auto* m2 = add(2, Sex::Male, 80, 0, 0);
  m2->germline_results["BRCA1"] = 1;
  auto* m3 = add(3, Sex::Female, 72, 1, 2);
  m3->affections["BC"] = {true, 40};
  m3->interventions.push_back({"Mastectomy", 45});
  auto* m4 = add(4, Sex::Male, 65, 1, 2);
  m4->germline_results["BRCA1"] = 0;
  auto* m5 = add(5, Sex::Male, 65, 1, 2);
  m5->is_proband = true;
  add(6, Sex::Male, std::nullopt, 1, 2);  // missing censoring age
  add(7, Sex::Female, 68, 0, 0);
  add(8, Sex::Female, 66, 0, 0);
  add(9, Sex::Female, 60, 0, 0);
  add(10, Sex::Female, 40, 7, 4);
  add(11, Sex::Male, 38, 7, 4);
  auto* m12 = add(12, Sex::Female, 42, 8, 5);
  m12->affections["OC"] = {true, 39};
  add(13, Sex::Male, 40, 8, 5);
  auto* m14 = add(14, Sex::Female, 38, 8, 5);
  m14->twin_group = 1;
  auto* m15 = add(15, Sex::Female, 38, 8, 5);
  m15->twin_group = 1;
  add(16, Sex::Male, 35, 9, 6);
  add(17, Sex::Female, 33, 9, 6);
  add(18, Sex::Male, 30, 7, 4);
  add(19, Sex::Female, 28, 9, 6);
  return ped;
}

Pedigree make_loop_pedigree() {
  // Two sibling pairs from two unrelated families intermarried.
  Pedigree ped;
  ped.cancer_tags = {"C1"};
  auto add = [&](int id, Sex sex, int age, int mom, int dad) {
    MemberRecord m;
    m.id = id;
    m.sex = sex;
    m.cur_age = age;
    if (mom > 0) m.mother_id = mom;
    if (dad > 0) m.father_id = dad;
    ped.members.push_back(m);
  };
  add(1, Sex::Male, 85, 0, 0);
  add(2, Sex::Female, 83, 0, 0);
  add(3, Sex::Male, 84, 0, 0);
  add(4, Sex::Female, 82, 0, 0);
  add(5, Sex::Male, 55, 2, 1);
  add(6, Sex::Female, 53, 2, 1);
  add(7, Sex::Female, 54, 4, 3);
  add(8, Sex::Male, 52, 4, 3);
  add(9, Sex::Male, 25, 7, 5);
  add(10, Sex::Female, 23, 6, 8);
  ped.members[8].is_proband = true;
  return ped;
}

Pedigree make_random_pedigree(std::uint64_t seed, int max_members,
                              int gene_count, int cancer_count) {
  std::mt19937_64 rng(seed);
  auto chance = [&](double p) {
    return std::uniform_real_distribution<double>(0, 1)(rng) < p;
  };
  auto pick_int = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  Pedigree ped;
  ped.cancer_tags = cancer_names(cancer_count);
  int next_id = 1;
  auto add = [&](Sex sex) {
    MemberRecord m;
    m.id = next_id++;
    m.sex = sex;
    m.cur_age = pick_int(25, 85);
    ped.members.push_back(m);
    return m.id;
  };

  const int mom0 = add(Sex::Female);
  const int dad0 = add(Sex::Male);
  std::deque<std::pair<int, int>> families{{mom0, dad0}};
  while (!families.empty() && (int)ped.members.size() < max_members) {
    const auto [mom, dad] = families.front();
    families.pop_front();
    const int n_children =
        std::min(pick_int(1, 3), max_members - (int)ped.members.size());
    std::vector<int> children;
    for (int c = 0; c < n_children; ++c) {
      const Sex sex = chance(0.5) ? Sex::Female : Sex::Male;
      const int id = add(sex);
      ped.find(id)->mother_id = mom;
      ped.find(id)->father_id = dad;
      children.push_back(id);
      if ((int)ped.members.size() + 1 < max_members && chance(0.35)) {
        const int spouse = add(sex == Sex::Female ? Sex::Male : Sex::Female);
        families.emplace_back(sex == Sex::Female ? id : spouse,
                              sex == Sex::Female ? spouse : id);
      }
    }
    // Occasionally turn two same-sex childless siblings into identical twins.
    if (children.size() >= 2 && chance(0.3)) {
      for (std::size_t i = 0; i + 1 < children.size() && chance(0.8); ++i) {
        MemberRecord* a = ped.find(children[i]);
        MemberRecord* b = ped.find(children[i + 1]);
        const bool a_parent = std::any_of(
            families.begin(), families.end(), [&](const auto& f) {
              return f.first == a->id || f.second == a->id ||
                     f.first == b->id || f.second == b->id;
            });
        if (a_parent) continue;
        b->sex = a->sex;
        a->twin_group = b->twin_group = 1;
        break;
      }
    }
  }

  std::set<int> parent_ids;
  for (const auto& m : ped.members) {
    if (m.mother_id) parent_ids.insert(*m.mother_id);
    if (m.father_id) parent_ids.insert(*m.father_id);
  }
  for (auto& m : ped.members) {
    if (!parent_ids.count(m.id) && m.twin_group == 0 && chance(0.2))
      m.sex = Sex::Unknown;
    for (const auto& tag : ped.cancer_tags) {
      if (chance(0.3)) {
        const int age = pick_int(20, std::min(*m.cur_age, 70));
        m.affections[tag] = {true, age};
      }
    }
    if (chance(0.25)) {
      const int gene = pick_int(0, gene_count - 1);
      m.germline_results["G" + std::to_string(gene + 1)] = chance(0.5) ? 1 : 0;
    }
    if (chance(0.15)) m.ancestry = chance(0.5) ? "AJ" : "nonAJ";
  }
  ped.members[pick_int(0, (int)ped.members.size() - 1)].is_proband = true;
  return ped;
}

}  // namespace pedrisk
