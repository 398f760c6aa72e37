#include <doctest.h>

#include <numeric>
#include <random>

#include "pedrisk/genotype.hpp"

using namespace pedrisk;

namespace {

// Independent cardinality oracle: sum of binomial coefficients C(K, j), j<=T.
long long pared_cardinality(int k, int t) {
  long long total = 0;
  for (int j = 0; j <= t; ++j) {
    long long c = 1;
    for (int i = 0; i < j; ++i) c = c * (k - i) / (i + 1);
    total += c;
  }
  return total;
}

}  // namespace

TEST_CASE("enumerate_space cardinalities for large panels") {
  CHECK(enumerate_space(11, 2).size() == 67);
  CHECK(enumerate_space(11, 3).size() == 232);
  CHECK(enumerate_space(25, 2).size() == 326);
  CHECK(enumerate_space(25, 3).size() == 2626);
}

TEST_CASE("enumerate_space cardinality sweep") {
  for (int k = 1; k <= 20; ++k)
    for (int t = 1; t <= k; ++t)
      CHECK(enumerate_space(k, t).size() == pared_cardinality(k, t));
}

TEST_CASE("enumerate_space canonical order and full space") {
  const GenotypeSpace space = enumerate_space(3, 3);
  CHECK(space.size() == 8);
  CHECK(space.vectors[0] == 0u);
  for (int i = 1; i < space.size(); ++i)
    CHECK(carrier_count(space.vectors[i]) >=
          carrier_count(space.vectors[i - 1]));
  // Ordinals round-trip.
  for (int i = 0; i < space.size(); ++i)
    CHECK(space.ordinal(space.vectors[i]) == i);
  CHECK(enumerate_space(4, 2).ordinal(0b1111) == -1);
}

TEST_CASE("enumerate_space rejects invalid paring") {
  CHECK_THROWS_AS(enumerate_space(4, 0), Error);
  CHECK_THROWS_AS(enumerate_space(4, 5), Error);
}

TEST_CASE("founder_prior Hardy-Weinberg cases") {
  SUBCASE("zero frequency puts all mass on noncarrier") {
    const GenotypeSpace space = enumerate_space(2, 2);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2);
    const Eigen::VectorXd prior = founder_prior(space, f);
    CHECK(prior[0] == doctest::Approx(1.0));
    CHECK(prior.sum() == doctest::Approx(1.0));
  }
  SUBCASE("single gene carrier probability is 1-(1-f)^2") {
    const GenotypeSpace space = enumerate_space(1, 1);
    Eigen::VectorXd f(1);
    f << 0.1;
    const Eigen::VectorXd prior = founder_prior(space, f);
    CHECK(prior[1] == doctest::Approx(0.19).epsilon(1e-12));
  }
  SUBCASE("paring renormalizes over the admissible vectors") {
    // K=2, T=1, f1=f2=0.1: condition the full product on popcount <= 1.
    const GenotypeSpace space = enumerate_space(2, 1);
    Eigen::VectorXd f(2);
    f << 0.1, 0.1;
    const Eigen::VectorXd prior = founder_prior(space, f);
    const double p = 0.19, q = 0.81;
    const double z = q * q + 2 * p * q;
    CHECK(prior[0] == doctest::Approx(q * q / z).epsilon(1e-12));
    CHECK(prior[1] == doctest::Approx(p * q / z).epsilon(1e-12));
    CHECK(prior[2] == doctest::Approx(p * q / z).epsilon(1e-12));
  }
}

TEST_CASE("founder_prior sums to one for random frequencies") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.001, 0.4);
  for (int k = 1; k <= 6; ++k)
    for (int t = 1; t <= k; ++t) {
      const GenotypeSpace space = enumerate_space(k, t);
      Eigen::VectorXd f(k);
      for (int g = 0; g < k; ++g) f[g] = dist(rng);
      CHECK(founder_prior(space, f).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("transmission kernel basics") {
  SUBCASE("noncarrier parents produce noncarrier children") {
    const GenotypeSpace space = enumerate_space(2, 2);
    CHECK(transmission(space, 0, 0, 0) == doctest::Approx(1.0));
    CHECK(transmission(space, 1, 0, 0) == 0.0);
  }
  SUBCASE("one heterozygous carrier parent transmits with probability 1/2") {
    const GenotypeSpace space = enumerate_space(1, 1);
    CHECK(transmission(space, 1, 1, 0) == doctest::Approx(0.5));
  }
  SUBCASE("two carrier parents give 3/4, absent gene gives 0") {
    const GenotypeSpace space = enumerate_space(2, 2);
    CHECK(transmission(space, 0b01, 0b01, 0b01) == doctest::Approx(0.75));
    CHECK(transmission(space, 0b11, 0b01, 0b01) == 0.0);
  }
}

TEST_CASE("transmission rows sum to one over the pared space") {
  for (int t : {1, 2, 3}) {
    const GenotypeSpace space = enumerate_space(3, t);
    for (CarrierVector m : space.vectors)
      for (CarrierVector f : space.vectors)
        CHECK(transmission_row(space, m, f).sum() ==
              doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("with T=K transmission equals the unrestricted product form") {
  const GenotypeSpace space = enumerate_space(3, 3);
  for (CarrierVector m : space.vectors)
    for (CarrierVector f : space.vectors)
      for (CarrierVector c : space.vectors)
        CHECK(transmission(space, c, m, f) ==
              doctest::Approx(transmission_raw(c, m, f)).epsilon(1e-14));
}

TEST_CASE("constrain_by_tests") {
  const GenotypeSpace space = enumerate_space(3, 2);
  SUBCASE("no results -> all ones") {
    const Eigen::VectorXd mask = constrain_by_tests(space, {-1, -1, -1});
    CHECK(mask.sum() == space.size());
  }
  SUBCASE("positive test keeps exactly the matching vectors") {
    const Eigen::VectorXd mask = constrain_by_tests(space, {1, -1, -1});
    for (int i = 0; i < space.size(); ++i)
      CHECK(mask[i] == ((space.vectors[i] & 1u) ? 1.0 : 0.0));
  }
  SUBCASE("more positives than the paring bound is infeasible") {
    CHECK_THROWS_AS(constrain_by_tests(space, {1, 1, 1}), Error);
  }
}

TEST_CASE("genotype labels") {
  const std::vector<std::string> genes = {"BRCA1", "BRCA2", "ATM"};
  CHECK(genotype_label(0, genes) == "noncarrier");
  CHECK(genotype_label(0b001, genes) == "BRCA1");
  CHECK(genotype_label(0b101, genes) == "BRCA1.ATM");
}
