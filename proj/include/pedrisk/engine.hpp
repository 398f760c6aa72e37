#pragma once

#include <Eigen/Dense>
#include <map>

#include "pedrisk/genotype.hpp"
#include "pedrisk/model_db.hpp"
#include "pedrisk/pedigree.hpp"

namespace pedrisk {

// Observed-history likelihood vector over the genotype space for one member:
// per genotype, the product over model cancers of the piecewise likelihood
// (density at the diagnosis age when affected; survival past the censoring
// age when not), times the germline-test mask. Net penetrances with the
// member's risk modifiers applied. Unknown sex averages the two sex-specific
// likelihoods with weight 1/2.
Eigen::VectorXd member_likelihood(const MemberRecord& member,
                                  const ModelDatabase& db,
                                  const GenotypeSpace& space);

// Posterior genotype distribution for every proband, by anterior/posterior
// message passing over the nuclear-family graph (Elston-Stewart peeling with
// genotype-space paring). Identical-twin sets share a single genotype
// variable. Requires a checked, loop-free pedigree with no missing ages.
std::map<int, Eigen::VectorXd> peel(const Pedigree& ped,
                                    const ModelDatabase& db,
                                    const GenotypeSpace& space);

// Exhaustive enumeration of the joint pared genotype space; exact up to float
// error. Test oracle for peel. Throws TooLarge when |space|^variables exceeds
// the enumeration guard.
std::map<int, Eigen::VectorXd> brute_force_posterior(const Pedigree& ped,
                                                     const ModelDatabase& db,
                                                     const GenotypeSpace& space);

}  // namespace pedrisk
