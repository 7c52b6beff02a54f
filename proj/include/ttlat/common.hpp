#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace ttlat {

// Floating scalar for all tensor values. The extended tier exists for
// experiments that want a few extra digits; everything is tested at double.
#ifdef TTLAT_EXTENDED_PRECISION
using Scalar = long double;
#else
using Scalar = double;
#endif

using Int = std::int64_t;   // lattice elements, exact arithmetic
using Index = Eigen::Index; // sizes, ranks, multi-indices

using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

} // namespace ttlat
