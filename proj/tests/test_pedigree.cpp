#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "pedrisk/model_db.hpp"
#include "pedrisk/pedigree.hpp"
#include "pedrisk/synthetic.hpp"

using namespace pedrisk;

namespace {

const char* kBasicCsv =
    "ID,MotherID,FatherID,Sex,isProband,CurAge,isDead,isAffBC,AgeBC,BRCA1\n"
    "1,NA,NA,0,0,70,0,1,45,NA\n"
    "2,NA,NA,1,0,72,0,0,NA,1\n"
    "3,1,2,0,1,40,0,0,NA,NA\n";

Pedigree parse_str(const std::string& text, CheckReport* report = nullptr) {
  std::istringstream in(text);
  return parse_pedigree(in, PedigreeFormat::Csv, report);
}

}  // namespace

TEST_CASE("CSV parsing basics") {
  const Pedigree ped = parse_str(kBasicCsv);
  REQUIRE(ped.members.size() == 3);
  CHECK(ped.cancer_tags == std::vector<std::string>{"BC"});

  const MemberRecord* m1 = ped.find(1);
  CHECK(m1->sex == Sex::Female);
  CHECK(m1->is_founder());
  CHECK(m1->affections.at("BC").affected);
  CHECK(m1->affections.at("BC").age_dx == 45);

  const MemberRecord* m2 = ped.find(2);
  CHECK(!m2->affections.at("BC").affected);
  CHECK(m2->germline_results.at("BRCA1") == 1);

  const MemberRecord* m3 = ped.find(3);
  CHECK(m3->is_proband);
  CHECK(m3->mother_id == 1);
  CHECK(m3->father_id == 2);
  CHECK(m3->germline_results.empty());
}

TEST_CASE("CSV schema errors") {
  SUBCASE("missing required column") {
    try {
      parse_str("ID,MotherID,FatherID,Sex,isProband,CurAge\n1,NA,NA,0,1,40\n");
      FAIL("expected MissingColumn");
    } catch (const Error& e) {
      CHECK(e.code() == "MissingColumn");
    }
  }
  SUBCASE("age column without its affection column") {
    try {
      parse_str(
          "ID,MotherID,FatherID,Sex,isProband,CurAge,isDead,AgeBC\n"
          "1,NA,NA,0,1,40,0,NA\n");
      FAIL("expected OrphanAgeColumn");
    } catch (const Error& e) {
      CHECK(e.code() == "OrphanAgeColumn");
    }
  }
  SUBCASE("malformed cells") {
    CHECK_THROWS_AS(
        parse_str("ID,MotherID,FatherID,Sex,isProband,CurAge,isDead\n"
                  "x,NA,NA,0,1,40,0\n"),
        Error);
    CHECK_THROWS_AS(
        parse_str("ID,MotherID,FatherID,Sex,isProband,CurAge,isDead\n"
                  "1,NA,NA,7,1,40,0\n"),
        Error);
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(parse_str(""), Error);
  }
}

TEST_CASE("tumor marker columns are consumed with a warning") {
  CheckReport report;
  const Pedigree ped = parse_str(
      "ID,MotherID,FatherID,Sex,isProband,CurAge,isDead,ER,HER2\n"
      "1,NA,NA,0,1,40,0,1,0\n",
      &report);
  CHECK(ped.members.size() == 1);
  CHECK(ped.find(1)->germline_results.empty());
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].code == "IgnoredColumns");
}

TEST_CASE("intervention parsing") {
  SUBCASE("inline Kind@Age entries") {
    const Pedigree ped = parse_str(
        "ID,MotherID,FatherID,Sex,isProband,CurAge,isDead,riskmod,InterAge\n"
        "1,NA,NA,0,1,60,0,Mastectomy@45;Oophorectomy@50,NA\n");
    const auto& ivs = ped.find(1)->interventions;
    REQUIRE(ivs.size() == 2);
    CHECK(ivs[0].kind == "Mastectomy");
    CHECK(ivs[0].age == 45);
    CHECK(ivs[1].kind == "Oophorectomy");
    CHECK(ivs[1].age == 50);
  }
  SUBCASE("positional riskmod and InterAge lists") {
    const Pedigree ped = parse_str(
        "ID,MotherID,FatherID,Sex,isProband,CurAge,isDead,riskmod,InterAge\n"
        "1,NA,NA,0,1,60,0,Hysterectomy,38\n");
    REQUIRE(ped.find(1)->interventions.size() == 1);
    CHECK(ped.find(1)->interventions[0].kind == "Hysterectomy");
    CHECK(ped.find(1)->interventions[0].age == 38);
  }
  SUBCASE("unknown kind or missing age is rejected") {
    CHECK_THROWS_AS(
        parse_str("ID,MotherID,FatherID,Sex,isProband,CurAge,isDead,riskmod\n"
                  "1,NA,NA,0,1,60,0,Appendectomy@30\n"),
        Error);
    CHECK_THROWS_AS(
        parse_str("ID,MotherID,FatherID,Sex,isProband,CurAge,isDead,riskmod\n"
                  "1,NA,NA,0,1,60,0,Mastectomy\n"),
        Error);
  }
}

TEST_CASE("JSON parsing mirrors the CSV schema") {
  std::istringstream in(R"({"members": [
    {"ID": 1, "Sex": 0, "isProband": 0, "CurAge": 70, "isDead": 0,
     "isAffBC": 1, "AgeBC": 45},
    {"ID": 2, "Sex": 1, "isProband": 0, "CurAge": 72, "isDead": 0,
     "isAffBC": 0, "BRCA1": 1},
    {"ID": 3, "MotherID": 1, "FatherID": 2, "Sex": 0, "isProband": 1,
     "CurAge": 40, "isDead": 0, "isAffBC": 0}
  ]})");
  const Pedigree ped = parse_pedigree(in, PedigreeFormat::Json);
  REQUIRE(ped.members.size() == 3);
  CHECK(ped.find(1)->affections.at("BC").age_dx == 45);
  CHECK(ped.find(2)->germline_results.at("BRCA1") == 1);
  CHECK(ped.find(3)->is_proband);
}

TEST_CASE("check_pedigree fatal conditions") {
  const auto registry = default_sex_registry();
  auto code_of = [&](Pedigree ped) {
    const auto [_, report] = check_pedigree(ped, registry);
    REQUIRE(report.fatal.has_value());
    return report.fatal->code;
  };

  SUBCASE("empty") {
    CHECK(code_of(Pedigree{}) == "EmptyPedigree");
  }
  SUBCASE("duplicate and invalid IDs") {
    Pedigree ped = make_sample_family();
    ped.members[1].id = 1;
    CHECK(code_of(ped) == "DuplicateId");
    ped = make_sample_family();
    ped.members[0].id = -4;
    CHECK(code_of(ped) == "InvalidId");
  }
  SUBCASE("dangling parent reference") {
    Pedigree ped = make_sample_family();
    ped.find(10)->mother_id = 999;
    CHECK(code_of(ped) == "DanglingParent");
  }
  SUBCASE("self-parent and ancestor cycles") {
    Pedigree ped = make_sample_family();
    ped.find(3)->mother_id = 3;
    CHECK(code_of(ped) == "ParentCycle");
    ped = make_sample_family();
    // 1 is an ancestor of 10; closing the arc makes 1 its own ancestor.
    ped.find(1)->mother_id = 10;
    ped.find(1)->father_id = 4;
    CHECK(code_of(ped) == "ParentCycle");
  }
  SUBCASE("no proband") {
    Pedigree ped = make_sample_family();
    ped.find(5)->is_proband = false;
    CHECK(code_of(ped) == "NoProband");
  }
  SUBCASE("parent sex conflict") {
    Pedigree ped = make_sample_family();
    ped.find(1)->sex = Sex::Male;
    CHECK(code_of(ped) == "ParentSexConflict");
  }
  SUBCASE("twin violations") {
    Pedigree ped = make_sample_family();
    ped.find(15)->twin_group = 0;
    CHECK(code_of(ped) == "TwinGroupTooSmall");
    ped = make_sample_family();
    ped.find(15)->sex = Sex::Male;
    CHECK(code_of(ped) == "TwinSexMismatch");
    ped = make_sample_family();
    ped.find(15)->mother_id = 7;
    CHECK(code_of(ped) == "TwinParentMismatch");
  }
}

TEST_CASE("check_pedigree repairs") {
  const auto registry = default_sex_registry();
  auto has_repair = [](const CheckReport& r, const std::string& code) {
    for (const auto& issue : r.repairs)
      if (issue.code == code) return true;
    return false;
  };

  SUBCASE("unknown parent sex is inferred from the reference role") {
    Pedigree ped = make_sample_family();
    ped.find(2)->sex = Sex::Unknown;
    const auto [fixed, report] = check_pedigree(ped, registry);
    REQUIRE(report.ok());
    CHECK(has_repair(report, "ParentSexInferred"));
    CHECK(fixed.find(2)->sex == Sex::Male);
  }
  SUBCASE("sex-impossible affection is cleared") {
    Pedigree ped = make_sample_family();
    ped.find(13)->affections["OC"] = {true, 35};
    const auto [fixed, report] = check_pedigree(ped, registry);
    REQUIRE(report.ok());
    CHECK(has_repair(report, "SexImpossibleCancer"));
    CHECK(!fixed.find(13)->affections.at("OC").affected);
    CHECK(!fixed.find(13)->affections.at("OC").age_dx);
  }
  SUBCASE("single-parent members get a shared pseudo-parent") {
    Pedigree ped = make_sample_family();
    ped.find(16)->father_id.reset();
    ped.find(17)->father_id.reset();
    const auto [fixed, report] = check_pedigree(ped, registry);
    REQUIRE(report.ok());
    CHECK(has_repair(report, "PseudoParentAdded"));
    CHECK(fixed.members.size() == ped.members.size() + 1);
    // Siblings of the same known mother share the new father.
    REQUIRE(fixed.find(16)->father_id.has_value());
    CHECK(fixed.find(16)->father_id == fixed.find(17)->father_id);
    CHECK(fixed.find(*fixed.find(16)->father_id)->sex == Sex::Male);
    CHECK(fixed.find(*fixed.find(16)->father_id)->is_founder());
  }
  SUBCASE("diagnosis and intervention ages are clamped to CurAge") {
    Pedigree ped = make_sample_family();
    ped.find(3)->affections["BC"].age_dx = 90;
    ped.find(3)->interventions[0].age = 91;
    const auto [fixed, report] = check_pedigree(ped, registry);
    REQUIRE(report.ok());
    CHECK(has_repair(report, "DiagnosisAgeClamped"));
    CHECK(has_repair(report, "InterventionAgeClamped"));
    CHECK(fixed.find(3)->affections.at("BC").age_dx == 72);
    CHECK(fixed.find(3)->interventions[0].age == 72);
  }
  SUBCASE("dead member without a censoring age is flagged, not repaired") {
    Pedigree ped = make_sample_family();
    ped.find(6)->is_dead = true;
    const auto [fixed, report] = check_pedigree(ped, registry);
    REQUIRE(report.ok());
    bool flagged = false;
    for (const auto& w : report.warnings)
      if (w.code == "MissingDeathAge") flagged = true;
    CHECK(flagged);
    CHECK(!fixed.find(6)->cur_age);
  }
  SUBCASE("checking is idempotent") {
    Pedigree ped = make_sample_family();
    ped.find(2)->sex = Sex::Unknown;
    ped.find(16)->father_id.reset();
    ped.find(3)->affections["BC"].age_dx = 90;
    const auto [once, r1] = check_pedigree(ped, registry);
    REQUIRE(r1.ok());
    CHECK(!r1.repairs.empty());
    const auto [twice, r2] = check_pedigree(once, registry);
    REQUIRE(r2.ok());
    CHECK(r2.repairs.empty());
    CHECK(twice.members.size() == once.members.size());
  }
}

TEST_CASE("loop detection") {
  CHECK(!detect_loops(make_sample_family()));
  CHECK(!detect_loops(make_chain_pedigree(40)));
  CHECK(detect_loops(make_loop_pedigree()));

  SUBCASE("a cousin mating closes a loop") {
    Pedigree ped = make_sample_family();
    // 10 and 13 are cousins; marrying them adds a cycle through 1 and 2.
    MemberRecord child;
    child.id = 50;
    child.sex = Sex::Female;
    child.cur_age = 10;
    child.mother_id = 10;
    child.father_id = 13;
    ped.members.push_back(child);
    CHECK(detect_loops(ped));
  }
}

TEST_CASE("prune_disconnected") {
  Pedigree ped = make_sample_family();
  MemberRecord stray;
  stray.id = 60;
  stray.sex = Sex::Male;
  stray.cur_age = 44;
  ped.members.push_back(stray);
  MemberRecord stray2 = stray;
  stray2.id = 61;
  stray2.sex = Sex::Female;
  ped.members.push_back(stray2);

  const auto [pruned, report] = prune_disconnected(ped);
  CHECK(pruned.members.size() == 19);
  CHECK(!pruned.find(60));
  CHECK(!pruned.find(61));
  REQUIRE(report.repairs.size() == 1);
  CHECK(report.repairs[0].code == "DisconnectedRemoved");
  CHECK(report.repairs[0].member_ids == std::vector<int>{60, 61});

  SUBCASE("a fully connected pedigree is untouched") {
    const auto [same, r2] = prune_disconnected(pruned);
    CHECK(same.members.size() == pruned.members.size());
    CHECK(r2.repairs.empty());
  }
}

TEST_CASE("pedigree serialization round trips") {
  const Pedigree ped = make_sample_family();
  SUBCASE("CSV") {
    std::stringstream buf;
    write_pedigree_csv(ped, buf);
    const Pedigree back = parse_pedigree(buf, PedigreeFormat::Csv);
    REQUIRE(back.members.size() == ped.members.size());
    for (const auto& m : ped.members) {
      const MemberRecord* b = back.find(m.id);
      REQUIRE(b);
      CHECK(b->mother_id == m.mother_id);
      CHECK(b->father_id == m.father_id);
      CHECK(b->sex == m.sex);
      CHECK(b->is_proband == m.is_proband);
      CHECK(b->cur_age == m.cur_age);
      CHECK(b->twin_group == m.twin_group);
      CHECK(b->germline_results == m.germline_results);
      for (const auto& [tag, aff] : m.affections) {
        CHECK(b->affections.at(tag).affected == aff.affected);
        CHECK(b->affections.at(tag).age_dx == aff.age_dx);
      }
      CHECK(b->interventions.size() == m.interventions.size());
    }
  }
  SUBCASE("JSON") {
    std::stringstream buf;
    buf << pedigree_to_json(ped);
    const Pedigree back = parse_pedigree(buf, PedigreeFormat::Json);
    REQUIRE(back.members.size() == ped.members.size());
    for (const auto& m : ped.members) {
      const MemberRecord* b = back.find(m.id);
      REQUIRE(b);
      CHECK(b->cur_age == m.cur_age);
      CHECK(b->germline_results == m.germline_results);
    }
  }
}
