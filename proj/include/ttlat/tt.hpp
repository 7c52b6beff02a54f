#pragma once

// Tensor-train representation with per-core sparse or dense storage, the
// three contraction kernels (full, all-but-one, all-but-two), exact TT
// construction for meet (gcd) tensors, and dense reference conversions.

#include "ttlat/common.hpp"
#include "ttlat/lattice.hpp"

#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace ttlat::tt {

/// One TT core of shape rows x dim x cols, stored as a list of mode-2
/// slices: slice(i) is the rows x cols matrix G(i). Sparse cores keep
/// entries grouped by slice and sorted by (row, col) within a slice.
class TTCore {
public:
    struct Entry {
        Index slice, row, col;
        Scalar value;
    };

    static TTCore dense(Index rows, Index dim, Index cols, std::vector<Scalar> data);
    static TTCore sparse(Index rows, Index dim, Index cols, std::vector<Entry> entries);

    Index rows() const { return rows_; }
    Index dim() const { return dim_; }
    Index cols() const { return cols_; }
    bool is_sparse() const { return sparse_; }

    /// Stored entries for sparse cores, count of nonzero values for dense.
    Index nnz() const;
    size_t storage_bytes() const;

    Matrix slice(Index i) const;

    /// out += G(i) * w
    void slice_apply(Index i, const Vector& w, Vector& out) const;
    /// out += G(i)^T * v
    void slice_apply_transposed(Index i, const Vector& v, Vector& out) const;

    /// Iterate stored entries in deterministic order.
    void visit(const std::function<void(Index, Index, Index, Scalar)>& fn) const;

    /// Weighted slice sum M(x) = sum_i x_i G(i), kept sparse or dense to
    /// match the core. This is the workhorse of every contraction.
    struct SliceSum {
        bool sparse = false;
        Eigen::SparseMatrix<Scalar> sp;
        Matrix dn;
        Vector apply(const Vector& w) const;            // M * w
        Vector apply_transposed(const Vector& v) const; // M^T * v
    };
    SliceSum weighted_sum(const Vector& x) const;

private:
    TTCore() = default;
    bool sparse_ = false;
    Index rows_ = 0, dim_ = 0, cols_ = 0;
    // dense: data_[(i * rows + r) * cols + c]
    std::vector<Scalar> data_;
    // sparse: per-slice compressed layout
    std::vector<Index> slice_ptr_;
    std::vector<Index> row_, col_;
    std::vector<Scalar> val_;
};

using CorePtr = std::shared_ptr<const TTCore>;

/// Tensor train: element(i_1..i_d) = G_1(i_1) * ... * G_d(i_d) with
/// boundary ranks 1. Cores may be shared (aliased) between positions.
class TTTensor {
public:
    explicit TTTensor(std::vector<CorePtr> cores);

    Index order() const { return static_cast<Index>(cores_.size()); }
    const TTCore& core(Index k) const { return *cores_[static_cast<size_t>(k)]; }
    const CorePtr& core_ptr(Index k) const { return cores_[static_cast<size_t>(k)]; }
    std::vector<Index> dims() const;
    /// r_0..r_d (r_0 = r_d = 1).
    std::vector<Index> ranks() const;
    Index max_interior_rank() const;

    Scalar element(const std::vector<Index>& idx) const;

    /// Bytes across distinct cores only, so aliased cores count once.
    size_t storage_bytes() const;

private:
    std::vector<CorePtr> cores_;
};

// Contraction kernels. x must have the size of every contracted mode.
// Weighted slice sums are cached per distinct core, so trains with an
// aliased middle core pay for it once.
Scalar contract_scalar(const TTTensor& t, const Vector& x);  // A x^d
Vector contract_vector(const TTTensor& t, const Vector& x);  // A x^{d-1}, mode 1 free
Matrix contract_matrix(const TTTensor& t, const Vector& x);  // A x^{d-2}, modes 1,2 free

/// Contract mode k (0-based) only; the mode is kept with size 1.
TTTensor contract_mode(const TTTensor& t, Index k, const Vector& x);

/// Exact TT of the meet tensor f(gcd(x_{i_1}, ..., x_{i_d})) over a
/// meet-closed set: first core carries the coefficients D, the shared
/// middle core holds diagonal slices of the incidence matrix, the last
/// core its rows. Storage is independent of d apart from bookkeeping.
TTTensor meet_tt(const lattice::LatticeSet& s, const lattice::ScalarFunction& f, Index d);

/// Meet tensor of {1..n} with f = identity (GCD tensor).
TTTensor smith_tt(Int n, Index d);

/// Dense reference tensor, row-major values.
struct DenseTensor {
    std::vector<Index> dims;
    std::vector<Scalar> values;

    static DenseTensor zeros(std::vector<Index> dims);
    Index order() const { return static_cast<Index>(dims.size()); }
    Index size() const { return static_cast<Index>(values.size()); }
    Scalar& at(const std::vector<Index>& idx);
    Scalar at(const std::vector<Index>& idx) const;
};

/// Odometer over a multi-index; returns false after the last one.
bool next_index(std::vector<Index>& idx, const std::vector<Index>& dims);

/// Expand a TT to dense; throws std::length_error above the element cap.
DenseTensor to_dense(const TTTensor& t, Index cap = 10'000'000);

/// Rank of the k-th unfolding (first k modes vs the rest, 1 <= k < d),
/// counting singular values above tol * sigma_max.
Index unfolding_rank(const DenseTensor& a, Index k, double tol = 1e-10);

/// Max unfolding rank over all k (the TT rank of the dense tensor).
Index max_tt_rank(const DenseTensor& a, double tol = 1e-10);

// Text serialization: header "tt <d> <n> <r_0> ... <r_d>", then one line
// "k i row col value" per stored entry, 0-based, in deterministic order.
// Values use shortest round-trip decimals, so integer cores reload exactly.
void write_tt(std::ostream& os, const TTTensor& t);
TTTensor read_tt(std::istream& is);
void save_tt(const std::string& path, const TTTensor& t);
TTTensor load_tt(const std::string& path);

} // namespace ttlat::tt
