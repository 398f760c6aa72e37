#include "pedrisk/genotype.hpp"

#include <cmath>

namespace pedrisk {

GenotypeSpace enumerate_space(int gene_count, int max_mut) {
  if (gene_count < 1 || gene_count > 31)
    throw Error("InvalidParing", "gene count must be in [1, 31], got " +
                                     std::to_string(gene_count));
  if (max_mut < 1 || max_mut > gene_count)
    throw Error("InvalidParing",
                "paring parameter must be in [1, K], got " +
                    std::to_string(max_mut) + " with K=" +
                    std::to_string(gene_count));

  GenotypeSpace space;
  space.gene_count = gene_count;
  space.max_mut = max_mut;
  space.vectors.push_back(0u);

  // Enumerate index combinations of each size in lexicographic order.
  for (int j = 1; j <= max_mut; ++j) {
    std::vector<int> idx(j);
    for (int i = 0; i < j; ++i) idx[i] = i;
    while (true) {
      CarrierVector v = 0;
      for (int i : idx) v |= (1u << i);
      space.vectors.push_back(v);
      int pos = j - 1;
      while (pos >= 0 && idx[pos] == gene_count - j + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < j; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  space.index.reserve(space.vectors.size());
  for (int i = 0; i < space.size(); ++i) space.index[space.vectors[i]] = i;
  return space;
}

Eigen::VectorXd founder_prior(const GenotypeSpace& space,
                              const Eigen::VectorXd& allele_freqs) {
  const int k = space.gene_count;
  Eigen::VectorXd carrier_p(k);
  for (int g = 0; g < k; ++g) {
    const double f = allele_freqs[g];
    carrier_p[g] = 1.0 - (1.0 - f) * (1.0 - f);
  }
  Eigen::VectorXd prior(space.size());
  for (int i = 0; i < space.size(); ++i) {
    const CarrierVector v = space.vectors[i];
    double p = 1.0;
    for (int g = 0; g < k; ++g)
      p *= (v >> g) & 1u ? carrier_p[g] : 1.0 - carrier_p[g];
    prior[i] = p;
  }
  const double z = prior.sum();
  if (z > 0) prior /= z;
  return prior;
}

double transmission_raw(CarrierVector child, CarrierVector mother,
                        CarrierVector father) {
  const CarrierVector any = mother | father;
  const CarrierVector both = mother & father;
  if (child & ~any) return 0.0;  // no de novo mutations
  const int one_parent = carrier_count(any & ~both);
  const int both_hit = carrier_count(child & both);
  const int both_miss = carrier_count(both & ~child);
  return std::pow(0.5, one_parent) * std::pow(0.75, both_hit) *
         std::pow(0.25, both_miss);
}

Eigen::VectorXd transmission_row(const GenotypeSpace& space,
                                 CarrierVector mother, CarrierVector father) {
  Eigen::VectorXd row(space.size());
  for (int i = 0; i < space.size(); ++i)
    row[i] = transmission_raw(space.vectors[i], mother, father);
  const double z = row.sum();
  if (z > 0) row /= z;
  return row;
}

double transmission(const GenotypeSpace& space, CarrierVector child,
                    CarrierVector mother, CarrierVector father) {
  const int ord = space.ordinal(child);
  if (ord < 0) return 0.0;
  double z = 0.0;
  for (CarrierVector c : space.vectors) z += transmission_raw(c, mother, father);
  if (z <= 0) return 0.0;
  return transmission_raw(child, mother, father) / z;
}

Eigen::VectorXd constrain_by_tests(const GenotypeSpace& space,
                                   const std::vector<int>& results) {
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(space.size());
  for (int i = 0; i < space.size(); ++i) {
    const CarrierVector v = space.vectors[i];
    for (int g = 0; g < space.gene_count && g < (int)results.size(); ++g) {
      const int r = results[g];
      if (r < 0) continue;
      const int bit = (v >> g) & 1u;
      if (bit != r) {
        mask[i] = 0.0;
        break;
      }
    }
  }
  if (mask.sum() == 0.0)
    throw Error("AllZeroMask",
                "germline test results are incompatible with the pared "
                "genotype space");
  return mask;
}

std::string genotype_label(CarrierVector v,
                           const std::vector<std::string>& gene_tags) {
  if (v == 0) return "noncarrier";
  std::string label;
  for (int g = 0; g < (int)gene_tags.size(); ++g) {
    if (!((v >> g) & 1u)) continue;
    if (!label.empty()) label += '.';
    label += gene_tags[g];
  }
  return label;
}

}  // namespace pedrisk
