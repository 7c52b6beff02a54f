#pragma once

// Number-theoretic groundwork: gcd/lcm, Mobius and totient functions, the
// divisor poset, and meet-semilattice structure of finite sets of positive
// integers ordered by divisibility.

#include "ttlat/common.hpp"

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace ttlat::lattice {

Int gcd(Int a, Int b);

/// lcm with overflow-checked multiplication; throws std::overflow_error.
Int lcm(Int a, Int b);

Int gcd_of(const std::vector<Int>& v);
Int lcm_of(const std::vector<Int>& v);

/// Classical Mobius function mu(k), trial-division factorization.
int mobius(Int k);

/// Euler totient phi(k).
Int totient(Int k);

/// All divisors of k, ascending.
std::vector<Int> divisors(Int k);

/// Mobius function of the divisor poset interval [x, y]:
/// mu(y/x) when x | y, otherwise 0.
Int poset_mobius(Int x, Int y);

// Linear sieves; index i holds the value for i (index 0 unused).
std::vector<Int> totients_up_to(Int n);
std::vector<int> mobius_up_to(Int n);

/// Smallest-prime-factor sieve for batch factorization up to a limit.
/// Built once, read-only afterwards (concurrent reads are fine).
class SpfSieve {
public:
    explicit SpfSieve(Int limit);
    Int limit() const { return static_cast<Int>(spf_.size()) - 1; }
    int mobius(Int k) const;
    Int totient(Int k) const;
    std::vector<Int> divisors(Int k) const;

private:
    std::vector<Int> spf_;
};

/// Finite set of distinct positive integers ordered by divisibility.
/// Elements are kept sorted ascending, which is compatible with the
/// partial order: x_i | x_j implies i <= j.
class LatticeSet {
public:
    explicit LatticeSet(std::vector<Int> elements);
    static LatticeSet contiguous(Int n); // {1, 2, ..., n}

    Index size() const { return static_cast<Index>(elems_.size()); }
    Int operator[](Index i) const { return elems_[static_cast<size_t>(i)]; }
    const std::vector<Int>& elements() const { return elems_; }

    /// True when gcd(x, y) is a member for every pair of members.
    bool meet_closed() const;

    /// True for S = {1, ..., n}, the common benchmark shape.
    bool contiguous_from_one() const;

private:
    std::vector<Int> elems_;
    mutable int closed_ = -1; // lazy: -1 unknown, else 0/1
};

/// Lower-triangular 0/1 incidence matrix of the divisibility order:
/// E(i, j) = 1 iff x_j | x_i. Compressed sparse rows, columns ascending.
struct IncidenceMatrix {
    Index n = 0;
    std::vector<Index> row_ptr; // size n+1
    std::vector<Index> col;

    Index nnz() const { return static_cast<Index>(col.size()); }
    bool contains(Index i, Index j) const;
};

IncidenceMatrix incidence_matrix(const LatticeSet& s);

/// Scalar function applied to lattice elements, carrying a stable name for
/// CSV output and cache keys.
struct ScalarFunction {
    std::string name;
    std::function<Scalar(Int)> fn;

    Scalar operator()(Int v) const { return fn(v); }

    static ScalarFunction identity();
    static ScalarFunction power(double alpha);
    static ScalarFunction reciprocal();
    /// Parse "identity", "power:<alpha>", "reciprocal".
    static ScalarFunction parse(const std::string& text);
};

/// Coefficients D_k of the meet-tensor factorization: for each element x_k,
/// the sum of f*mu Mobius inversions over the divisors z of x_k that divide
/// no earlier element of S. Requires a meet-closed S (throws otherwise).
/// For S = {1..n} and f = identity this is the totient vector.
std::vector<Scalar> meet_coefficients(const LatticeSet& s, const ScalarFunction& f);

/// Products of k pairwise-coprime factors drawn from [1, n], deduplicated.
std::set<Int> coprime_products(Int n, int k);
Index coprime_product_count(Int n, int k);

/// Distinct values of lcm(i_1, ..., i_k) over [1, n]^k.
std::set<Int> lcm_value_set(Int n, int k);

} // namespace ttlat::lattice
