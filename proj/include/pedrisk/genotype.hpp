#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "pedrisk/types.hpp"

namespace pedrisk {

// Carrier configuration over up to 32 genes; bit k set means a deleterious
// mutation is carried in gene k.
using CarrierVector = std::uint32_t;

inline int carrier_count(CarrierVector v) { return __builtin_popcount(v); }

// The pared genotype space: all carrier vectors over gene_count genes with at
// most max_mut simultaneous mutations. Canonical order is noncarrier first,
// then by carrier count, then lexicographically by the set gene indices, so
// outputs are byte-stable across runs.
struct GenotypeSpace {
  int gene_count = 0;  // K
  int max_mut = 0;     // paring parameter T
  std::vector<CarrierVector> vectors;
  std::unordered_map<CarrierVector, int> index;

  int size() const { return static_cast<int>(vectors.size()); }

  // Ordinal of v within the space, or -1 if pared away.
  int ordinal(CarrierVector v) const {
    auto it = index.find(v);
    return it == index.end() ? -1 : it->second;
  }
  bool contains(CarrierVector v) const { return index.count(v) != 0; }
};

GenotypeSpace enumerate_space(int gene_count, int max_mut);

// Founder genotype prior from per-gene allele frequencies. Carrier probability
// per gene is 1 - (1 - f)^2 (Hardy-Weinberg, carrier = at least one allele);
// the independent product is restricted to the pared space and renormalized.
Eigen::VectorXd founder_prior(const GenotypeSpace& space,
                              const Eigen::VectorXd& allele_freqs);

// Mendelian transmission probability of a child carrier vector given the
// parents', restricted-renormalized over the pared child space. The per-gene
// kernel is the rare-allele heterozygous-carrier approximation: no carrier
// parent -> 0, one carrier parent -> 1/2, two carrier parents -> 3/4.
double transmission(const GenotypeSpace& space, CarrierVector child,
                    CarrierVector mother, CarrierVector father);

// Unnormalized product kernel (sums to 1 over the full 2^K child space).
double transmission_raw(CarrierVector child, CarrierVector mother,
                        CarrierVector father);

// Full normalized child distribution for one parent pair, indexed by ordinal.
Eigen::VectorXd transmission_row(const GenotypeSpace& space,
                                 CarrierVector mother, CarrierVector father);

// 0/1 mask over the space from error-free germline test results: results[k]
// is 0 or 1 to constrain gene k, -1 when untested. Throws AllZeroMask when
// the results are incompatible with the pared space.
Eigen::VectorXd constrain_by_tests(const GenotypeSpace& space,
                                   const std::vector<int>& results);

// Output label: "noncarrier" for the zero vector, else dot-joined gene names.
std::string genotype_label(CarrierVector v,
                           const std::vector<std::string>& gene_tags);

}  // namespace pedrisk
