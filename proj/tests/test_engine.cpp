#include <doctest.h>

#include <cmath>

#include "pedrisk/engine.hpp"
#include "pedrisk/synthetic.hpp"

using namespace pedrisk;

namespace {

ModelDatabase tiny_db() {
  return synthesize_database(1, 1, SynthProfile::ConstantHazard, 11);
}

Pedigree checked(const Pedigree& ped) {
  const auto [fixed, report] = check_pedigree(ped, default_sex_registry());
  REQUIRE(report.ok());
  return fixed;
}

double max_diff(const std::map<int, Eigen::VectorXd>& a,
                const std::map<int, Eigen::VectorXd>& b) {
  REQUIRE(a.size() == b.size());
  double d = 0;
  for (const auto& [id, va] : a) {
    REQUIRE(b.count(id));
    d = std::max(d, (va - b.at(id)).cwiseAbs().maxCoeff());
  }
  return d;
}

}  // namespace

TEST_CASE("member_likelihood against the geometric survival closed form") {
  const ModelDatabase db = tiny_db();
  const GenotypeSpace space = enumerate_space(1, 1);
  const double h0 =
      db.density_slice(0, 0, 0, Sex::Female, PenetKind::Net)[0];
  const double h1 =
      db.density_slice(0, 1, 0, Sex::Female, PenetKind::Net)[0];

  MemberRecord m;
  m.id = 1;
  m.sex = Sex::Female;
  m.cur_age = 50;

  SUBCASE("unaffected survival term") {
    const Eigen::VectorXd like = member_likelihood(m, db, space);
    CHECK(like[0] == doctest::Approx(std::pow(1 - h0, 50)).epsilon(1e-12));
    CHECK(like[1] == doctest::Approx(std::pow(1 - h1, 50)).epsilon(1e-12));
  }
  SUBCASE("affected density term") {
    m.affections["C1"] = {true, 40};
    const Eigen::VectorXd like = member_likelihood(m, db, space);
    CHECK(like[0] ==
          doctest::Approx(h0 * std::pow(1 - h0, 39)).epsilon(1e-12));
    CHECK(like[1] ==
          doctest::Approx(h1 * std::pow(1 - h1, 39)).epsilon(1e-12));
  }
  SUBCASE("unknown sex averages the two sexed likelihoods") {
    m.sex = Sex::Unknown;
    const Eigen::VectorXd avg = member_likelihood(m, db, space);
    m.sex = Sex::Female;
    const Eigen::VectorXd f = member_likelihood(m, db, space);
    m.sex = Sex::Male;
    const Eigen::VectorXd male = member_likelihood(m, db, space);
    CHECK((avg - 0.5 * (f + male)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("germline results zero out the excluded genotypes") {
    m.germline_results["G1"] = 0;
    const Eigen::VectorXd like = member_likelihood(m, db, space);
    CHECK(like[1] == 0.0);
    CHECK(like[0] > 0.0);
  }
  SUBCASE("missing ages are rejected") {
    m.cur_age.reset();
    CHECK_THROWS_AS(member_likelihood(m, db, space), Error);
    m.cur_age = 50;
    m.affections["C1"] = {true, std::nullopt};
    CHECK_THROWS_AS(member_likelihood(m, db, space), Error);
  }
}

TEST_CASE("single founder posterior is the one-line Bayes update") {
  const ModelDatabase db = tiny_db();
  const GenotypeSpace space = enumerate_space(1, 1);
  const double f = db.allele_frequency(0, 0);
  const double p = 1.0 - std::pow(1.0 - f, 2.0);
  const double h0 = db.density_slice(0, 0, 0, Sex::Male, PenetKind::Net)[0];
  const double h1 = db.density_slice(0, 1, 0, Sex::Male, PenetKind::Net)[0];

  Pedigree ped;
  ped.cancer_tags = {"C1"};
  MemberRecord m;
  m.id = 1;
  m.sex = Sex::Male;
  m.cur_age = 60;
  m.is_proband = true;
  ped.members.push_back(m);

  const double l0 = std::pow(1 - h0, 60), l1 = std::pow(1 - h1, 60);
  const double expected = p * l1 / (p * l1 + (1 - p) * l0);
  const auto post = peel(ped, db, space);
  REQUIRE(post.count(1));
  CHECK(post.at(1)[1] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(post.at(1).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("trio with fully tested parents has a closed-form child posterior") {
  const ModelDatabase db = tiny_db();
  const GenotypeSpace space = enumerate_space(1, 1);
  const double h0 = db.density_slice(0, 0, 0, Sex::Female, PenetKind::Net)[0];
  const double h1 = db.density_slice(0, 1, 0, Sex::Female, PenetKind::Net)[0];

  Pedigree ped;
  ped.cancer_tags = {"C1"};
  auto add = [&](int id, Sex sex, int age) {
    MemberRecord m;
    m.id = id;
    m.sex = sex;
    m.cur_age = age;
    ped.members.push_back(m);
    return &ped.members.back();
  };
  add(1, Sex::Female, 70)->germline_results["G1"] = 1;
  add(2, Sex::Male, 72)->germline_results["G1"] = 0;
  auto* child = add(3, Sex::Female, 45);
  child->mother_id = 1;
  child->father_id = 2;
  child->is_proband = true;

  // Carrier mother, noncarrier father: the child inherits with probability
  // 1/2, then its own survival reweights the two genotypes.
  const double l0 = std::pow(1 - h0, 45), l1 = std::pow(1 - h1, 45);
  const double expected = l1 / (l0 + l1);
  const auto post = peel(ped, db, space);
  CHECK(post.at(3)[1] == doctest::Approx(expected).epsilon(1e-12));

  const auto brute = brute_force_posterior(ped, db, space);
  CHECK(max_diff(post, brute) < 1e-12);
}

TEST_CASE("peel matches exhaustive enumeration on the sample family") {
  // One gene keeps the joint space below the enumeration guard (2^18).
  const ModelDatabase db =
      synthesize_database({"BRCA1"}, {"BC", "OC"}, SynthProfile::Ramp, 4);
  const GenotypeSpace space = enumerate_space(1, 1);
  const Pedigree ped = checked(make_sample_family());
  Pedigree complete = ped;
  complete.find(6)->cur_age = 62;  // enumeration needs every age filled

  const auto post = peel(complete, db, space);
  const auto brute = brute_force_posterior(complete, db, space);
  CHECK(max_diff(post, brute) < 1e-10);
  for (const auto& [id, p] : post) {
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.minCoeff() >= 0.0);
  }
}

TEST_CASE("peel matches exhaustive enumeration on random pedigrees") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const int genes = 1 + seed % 3;
    const ModelDatabase db = synthesize_database(
        genes, 2, seed % 2 ? SynthProfile::Ramp : SynthProfile::ConstantHazard,
        seed);
    const GenotypeSpace space = enumerate_space(genes, 1 + seed % genes);
    const Pedigree ped =
        checked(make_random_pedigree(seed, 6, genes, 2));
    CAPTURE(seed);
    try {
      const auto post = peel(ped, db, space);
      const auto brute = brute_force_posterior(ped, db, space);
      CHECK(max_diff(post, brute) < 1e-10);
    } catch (const Error& e) {
      // Random germline results can contradict each other across relatives,
      // leaving no feasible joint genotype.
      const bool infeasible =
          e.code() == "AllZeroMask" || e.code() == "NumericalUnderflow";
      CHECK(infeasible);
    }
  }
}

TEST_CASE("identical twins share one genotype variable") {
  const ModelDatabase db = synthesize_database({"BRCA1"}, {"BC", "OC"},
                                               SynthProfile::Ramp, 8);
  const GenotypeSpace space = enumerate_space(1, 1);
  Pedigree ped = make_sample_family();
  ped.find(14)->is_proband = true;
  ped.find(15)->is_proband = true;
  ped.find(6)->cur_age = 62;
  const Pedigree fixed = checked(ped);

  const auto post = peel(fixed, db, space);
  REQUIRE(post.count(14));
  REQUIRE(post.count(15));
  CHECK((post.at(14) - post.at(15)).cwiseAbs().maxCoeff() == 0.0);

  // A positive test on one twin pins the other.
  Pedigree tested = fixed;
  tested.find(14)->germline_results["BRCA1"] = 1;
  const auto pinned = peel(tested, db, space);
  CHECK(pinned.at(15)[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("peel refuses looped pedigrees") {
  const ModelDatabase db = tiny_db();
  const GenotypeSpace space = enumerate_space(1, 1);
  try {
    peel(make_loop_pedigree(), db, space);
    FAIL("expected LoopDetected");
  } catch (const Error& e) {
    CHECK(e.code() == "LoopDetected");
  }
}

TEST_CASE("disconnected members do not influence the posterior") {
  const ModelDatabase db = synthesize_database({"BRCA1"}, {"BC", "OC"},
                                               SynthProfile::Peaked, 6);
  const GenotypeSpace space = enumerate_space(1, 1);
  Pedigree ped = checked(make_sample_family());
  ped.find(6)->cur_age = 62;

  MemberRecord stray;
  stray.id = 99;
  stray.sex = Sex::Female;
  stray.cur_age = 50;
  stray.affections["BC"] = {true, 30};
  Pedigree with_stray = ped;
  with_stray.members.push_back(stray);

  const auto base = peel(ped, db, space);
  const auto noisy = peel(with_stray, db, space);
  const auto pruned = peel(prune_disconnected(with_stray).first, db, space);
  CHECK(max_diff(base, noisy) < 1e-12);
  CHECK(max_diff(base, pruned) < 1e-12);
}

TEST_CASE("brute force guard rejects oversized joint spaces") {
  const ModelDatabase db = synthesize_database(6, 1, SynthProfile::Ramp, 2);
  const GenotypeSpace space = enumerate_space(6, 3);  // 42 states
  const Pedigree ped = make_chain_pedigree(30, 1);
  try {
    brute_force_posterior(ped, db, space);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == "TooLarge");
  }
}
