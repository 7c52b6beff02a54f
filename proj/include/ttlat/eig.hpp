#pragma once

// Power-type eigensolvers on tensor trains: symmetric higher-order power
// method (H- and Z-eigenvalues) and the adaptively shifted generalized
// method (B-eigenvalues), plus the localization bound and Gershgorin
// disks for meet tensors.

#include "ttlat/tt.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace ttlat::eig {

enum class Mode { H, Z };

struct SolverConfig {
    Mode mode = Mode::H;  // shopm eigenvalue type
    double tol = 1e-14;   // on |lambda_k - lambda_{k-1}|, scaled by max(1, |lambda|)
    int max_iters = 20;
    double tau = 10.0;    // geap: convexity threshold
    double beta = 1.0;    // geap: +1 maximizes, -1 minimizes
    bool gershgorin_shift = false; // geap: Gershgorin bound instead of an eigensolve
};

struct Eigenpair {
    Scalar lambda = 0;
    Vector x;
    int iterations = 0;
    bool converged = false;
    Scalar residual = 0; // ||A x^{d-1} - lambda B x^{d-1}||
};

struct TraceRow {
    int iter = 0;
    Scalar lambda = 0;
    Scalar alpha = 0;
    Scalar residual = 0;
    // lambda_min(beta H + beta alpha d I), recorded by geap when tracing;
    // the shift is chosen to keep this at or above tau.
    Scalar shift_floor = 0;
};
using Trace = std::vector<TraceRow>;

/// The three symmetric contractions of an order-d form B against x:
/// B x^d (scalar), B x^{d-1} (gradient / d), B x^{d-2} (Hessian / d(d-1)).
class ContractionProvider {
public:
    virtual ~ContractionProvider() = default;
    virtual Index dimension() const = 0;
    virtual Index order() const = 0;
    virtual Scalar scalar(const Vector& x) const = 0;
    virtual Vector vector(const Vector& x) const = 0;
    virtual Matrix matrix(const Vector& x) const = 0;
};

class TTProvider : public ContractionProvider {
public:
    explicit TTProvider(tt::TTTensor t);
    Index dimension() const override { return n_; }
    Index order() const override { return t_.order(); }
    Scalar scalar(const Vector& x) const override;
    Vector vector(const Vector& x) const override;
    Matrix matrix(const Vector& x) const override;
    const tt::TTTensor& tensor() const { return t_; }

private:
    tt::TTTensor t_;
    Index n_;
};

/// Kronecker delta tensor (ones on the diagonal): pairs with H-eigenvalues.
class KroneckerProvider : public ContractionProvider {
public:
    KroneckerProvider(Index n, Index d);
    Index dimension() const override { return n_; }
    Index order() const override { return d_; }
    Scalar scalar(const Vector& x) const override;  // sum x_i^d
    Vector vector(const Vector& x) const override;  // x^{[d-1]}
    Matrix matrix(const Vector& x) const override;  // diag(x^{[d-2]})

private:
    Index n_, d_;
};

/// Identity tensor: E x^{d-1} = ||x||^{d-2} x. Pairs with Z-eigenvalues.
class IdentityProvider : public ContractionProvider {
public:
    IdentityProvider(Index n, Index d);
    Index dimension() const override { return n_; }
    Index order() const override { return d_; }
    Scalar scalar(const Vector& x) const override;
    Vector vector(const Vector& x) const override;
    Matrix matrix(const Vector& x) const override;

private:
    Index n_, d_;
};

/// Sign-flipped view of another provider (the pair (A, -B)).
class NegatedProvider : public ContractionProvider {
public:
    explicit NegatedProvider(std::shared_ptr<const ContractionProvider> inner);
    Index dimension() const override { return inner_->dimension(); }
    Index order() const override { return inner_->order(); }
    Scalar scalar(const Vector& x) const override { return -inner_->scalar(x); }
    Vector vector(const Vector& x) const override { return -inner_->vector(x); }
    Matrix matrix(const Vector& x) const override { return -inner_->matrix(x); }

private:
    std::shared_ptr<const ContractionProvider> inner_;
};

/// Symmetric higher-order power method. H mode takes the (d-1)-th root of
/// the contraction, Z mode is the plain normalized iteration. Nonnegative
/// iterates are required in H mode; mixed signs raise std::domain_error
/// (use geap for such problems).
Eigenpair shopm(const tt::TTTensor& a, const SolverConfig& cfg, const Vector& x0,
                Trace* trace = nullptr);

/// Hessian of f(x) = (A x^d / B x^d) ||x||^d at a unit-norm point.
Matrix hessian(const ContractionProvider& a, const ContractionProvider& b, const Vector& x);

/// Smallest shift alpha with |alpha| = max(0, (tau - lambda_min(beta H)) / d),
/// signed by beta, which makes the shifted iteration's effective Hessian
/// definite enough: lambda_min(beta H + beta alpha d I) >= tau.
Scalar shift_alpha(const Matrix& h, double tau, double beta, Index d, bool gershgorin = false);

/// Adaptively shifted generalized eigenpair iteration for A x^{d-1} =
/// lambda B x^{d-1}. Requires B x^d > 0 along the path (std::domain_error
/// otherwise). beta = +1 climbs, beta = -1 descends, monotonically.
Eigenpair geap(const ContractionProvider& a, const ContractionProvider& b,
               const SolverConfig& cfg, const Vector& x0, Trace* trace = nullptr);

/// Upper bound max_k (A 1^{d-1})_k for eigenvalues of a nonnegative meet
/// tensor; one vector contraction against the all-ones vector.
Scalar eigen_bound(const tt::TTTensor& a);

/// Gershgorin-style disks (center, radius) for the meet tensor of (s, f, d):
/// center f(x_k), radius = sum of |entries| over the rest of row k. For
/// nonnegative f this reduces to the same contraction as eigen_bound; a
/// signed f falls back to dense row enumeration capped at n^{d-1} elements.
std::vector<std::pair<Scalar, Scalar>> gershgorin_disks(const lattice::LatticeSet& s,
                                                        const lattice::ScalarFunction& f, Index d,
                                                        Index cap = 10'000'000);

/// Run num_guesses seeded random starts (uniform on [-1,1]^n, normalized),
/// geap-iterate each for exactly pre_iters steps, and return the starting
/// guess whose final |lambda| is smallest. Trials that abort (B x^d <= 0)
/// are skipped. Trial t draws from a generator seeded with seed + t.
Vector prescreen(const ContractionProvider& a, const ContractionProvider& b,
                 const SolverConfig& cfg, int num_guesses, int pre_iters, std::uint64_t seed);

Scalar residual(const ContractionProvider& a, const ContractionProvider& b, const Eigenpair& p);

} // namespace ttlat::eig
