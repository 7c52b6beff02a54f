#include "ttlat/oracle.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ttlat::oracle {

namespace {

tt::DenseTensor dense_lattice_tensor(const lattice::LatticeSet& s, const lattice::ScalarFunction& f,
                                     Index d, Index cap, bool join) {
    if (d < 1) throw std::invalid_argument("order must be >= 1");
    const Index n = s.size();
    double total = std::pow(static_cast<double>(n), static_cast<double>(d));
    if (total > static_cast<double>(cap)) throw std::length_error("dense tensor exceeds cap");
    auto out = tt::DenseTensor::zeros(std::vector<Index>(static_cast<size_t>(d), n));
    std::vector<Index> idx(static_cast<size_t>(d), 0);
    size_t flat = 0;
    do {
        Int v = s[idx[0]];
        for (size_t k = 1; k < idx.size(); ++k)
            v = join ? lattice::lcm(v, s[idx[k]]) : std::gcd(v, s[idx[k]]);
        out.values[flat++] = f(v);
    } while (tt::next_index(idx, out.dims));
    return out;
}

} // namespace

tt::DenseTensor dense_meet(const lattice::LatticeSet& s, const lattice::ScalarFunction& f, Index d,
                           Index cap) {
    return dense_lattice_tensor(s, f, d, cap, false);
}

tt::DenseTensor dense_join(const lattice::LatticeSet& s, const lattice::ScalarFunction& f, Index d,
                           Index cap) {
    return dense_lattice_tensor(s, f, d, cap, true);
}

tt::DenseTensor dense_contract(const tt::DenseTensor& a, const Vector& x, Index times) {
    if (times < 0 || times > a.order()) throw std::invalid_argument("dense_contract: bad times");
    tt::DenseTensor cur = a;
    for (Index t = 0; t < times; ++t) {
        const Index n = cur.dims.back();
        if (x.size() != n) throw std::invalid_argument("dense_contract: size mismatch");
        std::vector<Index> dims(cur.dims.begin(), cur.dims.end() - 1);
        auto next = tt::DenseTensor::zeros(dims);
        const size_t outer = next.values.size();
        for (size_t p = 0; p < outer; ++p) {
            Scalar acc = 0;
            for (Index j = 0; j < n; ++j) acc += cur.values[p * static_cast<size_t>(n) + j] * x[j];
            next.values[p] = acc;
        }
        cur = std::move(next);
    }
    return cur;
}

tt::DenseTensor dense_contract_mode(const tt::DenseTensor& a, Index k, const Vector& x) {
    const Index d = a.order();
    if (k < 0 || k >= d) throw std::out_of_range("dense_contract_mode");
    if (x.size() != a.dims[static_cast<size_t>(k)])
        throw std::invalid_argument("dense_contract_mode: size mismatch");
    std::vector<Index> dims;
    for (Index i = 0; i < d; ++i)
        if (i != k) dims.push_back(a.dims[static_cast<size_t>(i)]);
    auto out = tt::DenseTensor::zeros(dims.empty() ? std::vector<Index>{} : dims);
    std::vector<Index> idx(static_cast<size_t>(d), 0);
    do {
        std::vector<Index> ridx;
        for (Index i = 0; i < d; ++i)
            if (i != k) ridx.push_back(idx[static_cast<size_t>(i)]);
        out.at(ridx) += a.at(idx) * x[idx[static_cast<size_t>(k)]];
    } while (tt::next_index(idx, a.dims));
    return out;
}

eig::Eigenpair dense_shopm(const tt::DenseTensor& a, const eig::SolverConfig& cfg,
                           const Vector& x0) {
    const Index d = a.order();
    const Index n = a.dims.at(0);
    if (x0.size() != n) throw std::invalid_argument("dense_shopm: x0 size mismatch");
    const int m = cfg.mode == eig::Mode::H ? static_cast<int>(d) : 2;

    eig::Eigenpair out;
    Scalar nrm0 = x0.norm();
    if (!(nrm0 > 0)) throw std::invalid_argument("dense_shopm: zero start");
    out.x = x0 / nrm0;
    Scalar prev = std::numeric_limits<Scalar>::quiet_NaN();
    for (int it = 1; it <= cfg.max_iters; ++it) {
        auto yd = dense_contract(a, out.x, d - 1);
        Vector y = Eigen::Map<const Vector>(yd.values.data(), n);
        Vector z(n);
        if (m == 2) {
            z = y;
        } else {
            for (Index i = 0; i < n; ++i) {
                if (y[i] < 0) throw std::domain_error("dense_shopm: negative entry under fractional power");
                z[i] = std::pow(y[i], Scalar{1} / static_cast<Scalar>(m - 1));
            }
        }
        Scalar znrm = z.norm();
        if (!(znrm > 0)) { out.iterations = it; break; }
        out.x = z / znrm;
        Scalar mnorm = 0;
        for (Index i = 0; i < n; ++i) mnorm += std::pow(std::abs(out.x[i]), m);
        out.lambda = dense_contract(a, out.x, d).values[0] / mnorm;
        out.iterations = it;
        if (std::abs(out.lambda - prev) < cfg.tol * std::max<Scalar>(1, std::abs(out.lambda))) {
            out.converged = true;
            break;
        }
        prev = out.lambda;
    }
    auto yd = dense_contract(a, out.x, d - 1);
    Vector y = Eigen::Map<const Vector>(yd.values.data(), n);
    Vector bx(n);
    if (cfg.mode == eig::Mode::H)
        for (Index i = 0; i < n; ++i) bx[i] = std::pow(out.x[i], static_cast<int>(d - 1));
    else
        bx = std::pow(out.x.norm(), static_cast<int>(d - 2)) * out.x;
    out.residual = (y - out.lambda * bx).norm();
    return out;
}

DenseProvider::DenseProvider(tt::DenseTensor a) : a_(std::move(a)) {
    if (a_.order() < 2) throw std::invalid_argument("DenseProvider: order must be >= 2");
    for (Index dd : a_.dims)
        if (dd != a_.dims[0]) throw std::invalid_argument("DenseProvider: modes must match");
}

Index DenseProvider::dimension() const { return a_.dims[0]; }

Scalar DenseProvider::scalar(const Vector& x) const {
    return dense_contract(a_, x, a_.order()).values[0];
}

Vector DenseProvider::vector(const Vector& x) const {
    auto v = dense_contract(a_, x, a_.order() - 1);
    return Eigen::Map<const Vector>(v.values.data(), dimension());
}

Matrix DenseProvider::matrix(const Vector& x) const {
    auto m = dense_contract(a_, x, a_.order() - 2);
    const Index n = dimension();
    return Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        m.values.data(), n, n);
}

} // namespace ttlat::oracle
