#pragma once

// Intentionally naive dense references. Everything here enumerates full
// index spaces and is only meant to validate the structured paths at
// desk scale.

#include "ttlat/eig.hpp"
#include "ttlat/tt.hpp"

namespace ttlat::oracle {

/// Dense meet tensor: entry (i_1..i_d) = f(gcd(x_{i_1}, ..., x_{i_d})).
tt::DenseTensor dense_meet(const lattice::LatticeSet& s, const lattice::ScalarFunction& f, Index d,
                           Index cap = 10'000'000);

/// Dense join tensor: entry = f(lcm(...)); lcm overflow propagates as
/// std::overflow_error.
tt::DenseTensor dense_join(const lattice::LatticeSet& s, const lattice::ScalarFunction& f, Index d,
                           Index cap = 10'000'000);

/// Contract the trailing `times` modes against x by direct summation.
/// times = d gives an order-0 tensor holding the full contraction.
tt::DenseTensor dense_contract(const tt::DenseTensor& a, const Vector& x, Index times);

/// Contract mode k only; the mode is dropped from the result.
tt::DenseTensor dense_contract_mode(const tt::DenseTensor& a, Index k, const Vector& x);

/// Same power iteration as the TT solver, on dense data.
eig::Eigenpair dense_shopm(const tt::DenseTensor& a, const eig::SolverConfig& cfg, const Vector& x0);

/// Contraction provider over a dense symmetric tensor.
class DenseProvider : public eig::ContractionProvider {
public:
    explicit DenseProvider(tt::DenseTensor a);
    Index dimension() const override;
    Index order() const override { return a_.order(); }
    Scalar scalar(const Vector& x) const override;
    Vector vector(const Vector& x) const override;
    Matrix matrix(const Vector& x) const override;

private:
    tt::DenseTensor a_;
};

} // namespace ttlat::oracle
