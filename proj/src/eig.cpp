#include "ttlat/eig.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ttlat::eig {

namespace {

Vector unit(const Vector& x) {
    Scalar nrm = x.norm();
    if (!(nrm > 0)) throw std::invalid_argument("starting vector must be nonzero");
    return x / nrm;
}

bool close(Scalar lam, Scalar prev, double tol) {
    return std::abs(lam - prev) < tol * std::max<Scalar>(1, std::abs(lam));
}

} // namespace

TTProvider::TTProvider(tt::TTTensor t) : t_(std::move(t)), n_(t_.core(0).dim()) {
    for (Index k = 0; k < t_.order(); ++k)
        if (t_.core(k).dim() != n_)
            throw std::invalid_argument("TTProvider: modes must have equal size");
}

Scalar TTProvider::scalar(const Vector& x) const { return tt::contract_scalar(t_, x); }
Vector TTProvider::vector(const Vector& x) const { return tt::contract_vector(t_, x); }
Matrix TTProvider::matrix(const Vector& x) const { return tt::contract_matrix(t_, x); }

KroneckerProvider::KroneckerProvider(Index n, Index d) : n_(n), d_(d) {
    if (n < 1 || d < 2) throw std::invalid_argument("KroneckerProvider: bad shape");
}

Scalar KroneckerProvider::scalar(const Vector& x) const {
    Scalar s = 0;
    for (Index i = 0; i < n_; ++i) s += std::pow(x[i], static_cast<int>(d_));
    return s;
}

Vector KroneckerProvider::vector(const Vector& x) const {
    Vector v(n_);
    for (Index i = 0; i < n_; ++i) v[i] = std::pow(x[i], static_cast<int>(d_ - 1));
    return v;
}

Matrix KroneckerProvider::matrix(const Vector& x) const {
    Matrix m = Matrix::Zero(n_, n_);
    for (Index i = 0; i < n_; ++i) m(i, i) = std::pow(x[i], static_cast<int>(d_ - 2));
    return m;
}

IdentityProvider::IdentityProvider(Index n, Index d) : n_(n), d_(d) {
    if (n < 1 || d < 2) throw std::invalid_argument("IdentityProvider: bad shape");
}

Scalar IdentityProvider::scalar(const Vector& x) const {
    return std::pow(x.norm(), static_cast<int>(d_));
}

Vector IdentityProvider::vector(const Vector& x) const {
    return std::pow(x.norm(), static_cast<int>(d_ - 2)) * x;
}

Matrix IdentityProvider::matrix(const Vector& x) const {
    // normalized second derivative of ||x||^d:
    // (||x||^{d-2} I + (d-2) ||x||^{d-4} x x^T) / (d-1)
    Scalar nrm = x.norm();
    Matrix m = std::pow(nrm, static_cast<int>(d_ - 2)) * Matrix::Identity(n_, n_);
    if (d_ != 2)
        m += static_cast<Scalar>(d_ - 2) * std::pow(nrm, static_cast<int>(d_ - 4)) * (x * x.transpose());
    return m / static_cast<Scalar>(d_ - 1);
}

NegatedProvider::NegatedProvider(std::shared_ptr<const ContractionProvider> inner)
    : inner_(std::move(inner)) {
    if (!inner_) throw std::invalid_argument("NegatedProvider: null inner provider");
}

Eigenpair shopm(const tt::TTTensor& a, const SolverConfig& cfg, const Vector& x0, Trace* trace) {
    const Index d = a.order();
    const Index n = a.core(0).dim();
    if (x0.size() != n) throw std::invalid_argument("shopm: x0 size mismatch");
    const int m = cfg.mode == Mode::H ? static_cast<int>(d) : 2;

    Eigenpair out;
    out.x = unit(x0);
    Scalar prev = std::numeric_limits<Scalar>::quiet_NaN();
    for (int it = 1; it <= cfg.max_iters; ++it) {
        Vector y = tt::contract_vector(a, out.x);
        Vector z(n);
        if (m == 2) {
            z = y;
        } else {
            for (Index i = 0; i < n; ++i) {
                if (y[i] < 0)
                    throw std::domain_error(
                        "shopm: negative entry under fractional power; use geap instead");
                z[i] = std::pow(y[i], Scalar{1} / static_cast<Scalar>(m - 1));
            }
        }
        Scalar znrm = z.norm();
        if (!(znrm > 0)) { out.iterations = it; break; } // degenerate (zero tensor)
        out.x = z / znrm;
        Scalar mnorm = 0;
        for (Index i = 0; i < n; ++i) mnorm += std::pow(std::abs(out.x[i]), m);
        out.lambda = tt::contract_scalar(a, out.x) / mnorm;
        out.iterations = it;
        if (trace) trace->push_back({it, out.lambda, 0, 0, 0});
        if (close(out.lambda, prev, cfg.tol)) { out.converged = true; break; }
        prev = out.lambda;
    }
    if (cfg.mode == Mode::H) {
        KroneckerProvider b(n, d);
        out.residual = (tt::contract_vector(a, out.x) - out.lambda * b.vector(out.x)).norm();
    } else {
        IdentityProvider b(n, d);
        out.residual = (tt::contract_vector(a, out.x) - out.lambda * b.vector(out.x)).norm();
    }
    return out;
}

namespace {

Matrix hessian_from_parts(Scalar a0, const Vector& a1, const Matrix& a2, Scalar b0,
                          const Vector& b1, const Matrix& b2, const Vector& x, Index order) {
    if (b0 == Scalar{0}) throw std::domain_error("hessian: B x^d vanishes");
    const Scalar d = static_cast<Scalar>(order);
    const Index n = x.size();
    Matrix h = (2 * d * d * a0 / (b0 * b0 * b0)) * (b1 * b1.transpose());
    h += (d / b0) * ((d - 1) * a2 + a0 * (Matrix::Identity(n, n) + (d - 2) * (x * x.transpose())) +
                     d * (a1 * x.transpose() + x * a1.transpose()));
    h -= (d / (b0 * b0)) * ((d - 1) * a0 * b2 + d * (a1 * b1.transpose() + b1 * a1.transpose()) +
                            d * a0 * (x * b1.transpose() + b1 * x.transpose()));
    return h;
}

Scalar min_eig(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Scalar gershgorin_min(const Matrix& m) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < m.rows(); ++i) {
        Scalar center = m(i, i), radius = 0;
        for (Index j = 0; j < m.cols(); ++j)
            if (j != i) radius += std::abs(m(i, j));
        best = std::min(best, center - radius);
    }
    return best;
}

} // namespace

Matrix hessian(const ContractionProvider& a, const ContractionProvider& b, const Vector& x) {
    if (a.order() != b.order() || a.dimension() != b.dimension())
        throw std::invalid_argument("hessian: provider shape mismatch");
    return hessian_from_parts(a.scalar(x), a.vector(x), a.matrix(x), b.scalar(x), b.vector(x),
                              b.matrix(x), x, a.order());
}

Scalar shift_alpha(const Matrix& h, double tau, double beta, Index d, bool gershgorin) {
    Matrix bh = static_cast<Scalar>(beta) * h;
    Scalar lmin = gershgorin ? gershgorin_min(bh) : min_eig(bh);
    Scalar mag = std::max<Scalar>(0, (static_cast<Scalar>(tau) - lmin) / static_cast<Scalar>(d));
    return static_cast<Scalar>(beta) * mag;
}

Eigenpair geap(const ContractionProvider& a, const ContractionProvider& b,
               const SolverConfig& cfg, const Vector& x0, Trace* trace) {
    if (a.order() != b.order() || a.dimension() != b.dimension())
        throw std::invalid_argument("geap: provider shape mismatch");
    if (std::abs(cfg.beta) != 1.0) throw std::invalid_argument("geap: beta must be +1 or -1");
    const Scalar beta = static_cast<Scalar>(cfg.beta);
    const Index d = a.order();

    Eigenpair out;
    out.x = unit(x0);
    Scalar prev = std::numeric_limits<Scalar>::quiet_NaN();
    for (int it = 1; it <= cfg.max_iters; ++it) {
        const Scalar a0 = a.scalar(out.x);
        const Scalar b0 = b.scalar(out.x);
        if (!(b0 > 0)) throw std::domain_error("geap: B x^d must stay positive");
        const Vector a1 = a.vector(out.x);
        const Vector b1 = b.vector(out.x);
        out.lambda = a0 / b0;
        out.iterations = it;
        out.residual = (a1 - out.lambda * b1).norm();
        if (close(out.lambda, prev, cfg.tol)) { out.converged = true; break; }
        prev = out.lambda;

        const Matrix h =
            hessian_from_parts(a0, a1, a.matrix(out.x), b0, b1, b.matrix(out.x), out.x, d);
        const Scalar alpha = shift_alpha(h, cfg.tau, cfg.beta, d, cfg.gershgorin_shift);
        if (trace) {
            Scalar floor = min_eig(beta * h + beta * alpha * static_cast<Scalar>(d) *
                                                  Matrix::Identity(h.rows(), h.cols()));
            trace->push_back({it, out.lambda, alpha, out.residual, floor});
        }
        Vector xhat = beta * (a1 - out.lambda * b1 + (alpha + out.lambda) * b0 * out.x);
        Scalar nrm = xhat.norm();
        if (!(nrm > 0)) break; // stalled at a critical point of the shift
        out.x = xhat / nrm;
    }
    return out;
}

Scalar eigen_bound(const tt::TTTensor& a) {
    Vector ones = Vector::Ones(a.core(0).dim());
    return tt::contract_vector(a, ones).maxCoeff();
}

std::vector<std::pair<Scalar, Scalar>> gershgorin_disks(const lattice::LatticeSet& s,
                                                        const lattice::ScalarFunction& f, Index d,
                                                        Index cap) {
    const Index n = s.size();
    if (d < 2) throw std::invalid_argument("gershgorin_disks: order must be >= 2");

    bool nonneg = true;
    for (Index k = 0; k < n && nonneg; ++k)
        for (Int y : lattice::divisors(s[k]))
            if (f(y) < 0) { nonneg = false; break; }

    std::vector<std::pair<Scalar, Scalar>> disks(static_cast<size_t>(n));
    if (nonneg) {
        auto t = tt::meet_tt(s, f, d);
        Vector rowsum = tt::contract_vector(t, Vector::Ones(n));
        for (Index k = 0; k < n; ++k) {
            Scalar center = f(s[k]);
            disks[static_cast<size_t>(k)] = {center, rowsum[k] - center};
        }
        return disks;
    }

    // Signed f: dense enumeration of each row's tail.
    double tail = std::pow(static_cast<double>(n), static_cast<double>(d - 1));
    if (tail > static_cast<double>(cap))
        throw std::length_error("gershgorin_disks: dense enumeration exceeds cap");
    std::vector<Scalar> abs_rowsum(static_cast<size_t>(n), 0);
    std::vector<Index> idx(static_cast<size_t>(d - 1), 0);
    std::vector<Index> dims(static_cast<size_t>(d - 1), n);
    do {
        Int g = 0;
        for (Index v : idx) g = g == 0 ? s[v] : std::gcd(g, s[v]);
        for (Index k = 0; k < n; ++k)
            abs_rowsum[static_cast<size_t>(k)] += std::abs(f(std::gcd(g, s[k])));
    } while (tt::next_index(idx, dims));
    for (Index k = 0; k < n; ++k) {
        Scalar center = f(s[k]);
        disks[static_cast<size_t>(k)] = {center, abs_rowsum[static_cast<size_t>(k)] - std::abs(center)};
    }
    return disks;
}

Vector prescreen(const ContractionProvider& a, const ContractionProvider& b,
                 const SolverConfig& cfg, int num_guesses, int pre_iters, std::uint64_t seed) {
    if (num_guesses < 1 || pre_iters < 1) throw std::invalid_argument("prescreen: bad counts");
    const Index n = a.dimension();
    SolverConfig probe = cfg;
    probe.max_iters = pre_iters;
    probe.tol = 0; // run all pre_iters steps

    Vector best_guess;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (int t = 0; t < num_guesses; ++t) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t));
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Vector g(n);
        for (Index i = 0; i < n; ++i) g[i] = static_cast<Scalar>(u(rng));
        if (!(g.norm() > 0)) continue;
        g.normalize();
        try {
            Eigenpair p = geap(a, b, probe, g);
            if (std::isfinite(static_cast<double>(p.lambda)) && std::abs(p.lambda) < best) {
                best = std::abs(p.lambda);
                best_guess = g;
            }
        } catch (const std::domain_error&) {
            // trial wandered into B x^d <= 0; skip it
        }
    }
    if (best_guess.size() == 0) throw std::runtime_error("prescreen: no usable starting guess");
    return best_guess;
}

Scalar residual(const ContractionProvider& a, const ContractionProvider& b, const Eigenpair& p) {
    return (a.vector(p.x) - p.lambda * b.vector(p.x)).norm();
}

} // namespace ttlat::eig
