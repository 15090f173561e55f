#pragma once

#include <random>
#include <vector>

#include "stochorder/couplings.hpp"
#include "stochorder/lattice.hpp"

namespace stochorder::gen {

using Rng = std::mt19937_64;

/// Uniform draw from the probability simplex of dimension n.
std::vector<double> dirichlet(Rng& rng, int n);

/// 1..max_atoms distinct integer atoms in [-range, range], Dirichlet weights.
Distribution random_discrete(Rng& rng, int max_atoms = 8, int range = 10);

/// Discrete law whose smallest atom carries all but `tail_mass`.
Distribution random_discrete_low_tail(Rng& rng, int max_atoms, int range, double tail_mass);

/// Moves half of a random fraction of one atom's mass `delta` down and half up.
Distribution mean_preserving_spread(const Distribution& d, Rng& rng, int steps = 1, int max_delta = 3);

/// Greedy (northwest-corner) coupling along the given atom orders.
DiscreteJoint monotone_path_joint(const std::vector<Distribution>& marginals,
                                  const std::vector<std::vector<int>>& orders);

/// Mixture of up to `max_paths` greedy couplings along random atom orders.
DiscreteJoint random_joint(const std::vector<Distribution>& marginals, Rng& rng, int max_paths = 3);

/// Dirichlet pmf on the given axes.
LatticeDist random_lattice(Rng& rng, Axes axes);

/// Applies `moves` transfers of mass on random axis-aligned 2x2 rectangles:
/// +delta on the concordant corners, -delta on the discordant ones (delta may
/// be negative with probability 1 - p_concordant). Marginals are preserved.
LatticeDist marginal_preserving_moves(const LatticeDist& d, Rng& rng, int moves, double p_concordant = 0.5);

}  // namespace stochorder::gen
