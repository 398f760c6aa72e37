#pragma once

#include <cstdint>

#include "pedrisk/pedigree.hpp"

namespace pedrisk {

// Synthetic pedigrees for tests and benchmarks.

// Inter-generational chain: founder couple, one child per generation who
// marries a new founder spouse, last member is the proband. Size n >= 3.
Pedigree make_chain_pedigree(int members, int cancer_count = 2);

// Three-generation sample family (19 members) with a mix of affections,
// germline results, risk modifiers and one missing age; the proband is a
// middle-generation member.
Pedigree make_sample_family();

// The sibling-exchange mating pattern (two sibling pairs from two unrelated
// families intermarried), which closes a marriage-graph loop.
Pedigree make_loop_pedigree();

// Randomized small pedigree for oracle comparisons: up to max_members across
// up to three generations, with seeded random affections, test results,
// twins and unknown sexes.
Pedigree make_random_pedigree(std::uint64_t seed, int max_members,
                              int gene_count, int cancer_count);

}  // namespace pedrisk
