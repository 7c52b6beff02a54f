#pragma once

// DMRG cross interpolation: build a tensor train from a black-box element
// oracle by sampling crosses of fibers, two cores at a time. Includes the
// maxvol dominant-submatrix routine. The join (lcm) tensors are produced
// here; the meet tensors never need it (they have exact sparse cores).

#include "ttlat/lattice.hpp"
#include "ttlat/tt.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace ttlat::cross {

/// Pure function from a multi-index to the tensor element.
using ElementOracle = std::function<Scalar(const std::vector<Index>&)>;

struct CrossConfig {
    double eps = 1e-14;       // relative truncation threshold for supercore SVDs
    int max_sweeps = 20;      // one sweep = left-to-right plus right-to-left
    Index initial_rank = 2;   // size of the random starting index sets
    Index max_rank = 0;       // 0 = uncapped
    std::uint64_t seed = 0;   // drives index-set init and the validation sample
    Index samples = 10'000;   // held-out sample size for the error estimate
    // extra random indices mixed into the interface sets between half-sweeps;
    // they widen the sampled subspaces so ranks can keep growing (the SVD of a
    // supercore can never reveal more rank than the interfaces expose), and
    // they never enter the cores themselves
    Index kick = 2;
};

struct CrossResult {
    tt::TTTensor tensor;
    bool converged = false;
    int sweeps = 0;           // full sweeps executed
    Scalar sample_error = 0;  // relative Frobenius proxy on the held-out sample
    Scalar symmetry_error = 0; // sampled |t(idx) - t(sorted idx)| deviation, reported only
    bool rank_capped = false; // max_rank truncated below the eps-rank somewhere
    std::int64_t evals = 0;   // oracle calls issued
};

/// Row indices (length = cols) of a quasi-dominant square submatrix of m:
/// at return every entry of m * inv(m[rows]) has magnitude at most 1 + delta.
/// Requires rows >= cols and full column rank.
std::vector<Index> maxvol(const Matrix& m, double delta = 1e-2, int max_swaps = 200);

/// Interpolate the oracle over a dims[0] x ... x dims[d-1] array. Ranks are
/// discovered adaptively from SVDs of two-core supercores; the result matches
/// the oracle on a held-out random sample within about 10 * eps relative
/// error when converged. Never materializes the full array.
CrossResult dmrg_cross(const std::vector<Index>& dims, const ElementOracle& oracle,
                       const CrossConfig& cfg);

/// Join tensor over S = {1..n}: element(i_1..i_d) = f(lcm(i_1+1, ..., i_d+1)),
/// built through dmrg_cross. Throws on lcm overflow.
CrossResult lcm_tt(Int n, Index d, const lattice::ScalarFunction& f, const CrossConfig& cfg);

} // namespace ttlat::cross
