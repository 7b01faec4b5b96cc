#pragma once

// Scalar type used by every numerical routine. Moment matrices of Laurent
// systems reach condition numbers near 1e20 at level 8, so double precision
// cannot deliver orthonormality at the 1e-9 level; quad precision can.

#include <boost/multiprecision/float128.hpp>
#include <Eigen/Core>

#include <limits>
#include <string>

namespace Eigen {

template <>
struct NumTraits<boost::multiprecision::float128>
    : GenericNumTraits<boost::multiprecision::float128> {
  using R = boost::multiprecision::float128;
  using Real = R;
  using NonInteger = R;
  using Literal = R;
  using Nested = R;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 8
  };
  static inline R epsilon() { return std::numeric_limits<R>::epsilon(); }
  static inline R dummy_precision() { return R(1e-28); }
  static inline R highest() { return (std::numeric_limits<R>::max)(); }
  static inline R lowest() { return std::numeric_limits<R>::lowest(); }
  static inline int digits10() { return 33; }
  static inline R infinity() { return std::numeric_limits<R>::infinity(); }
  static inline R quiet_NaN() { return std::numeric_limits<R>::quiet_NaN(); }
};

}  // namespace Eigen

namespace lorpl2 {

using Real = boost::multiprecision::float128;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Enough digits for an exact quad round trip.
inline constexpr int kExactDigits = 36;
// Report precision for CSV and console output.
inline constexpr int kReportDigits = 17;

inline std::string to_decimal(const Real& v, int digits = kExactDigits) {
  return v.str(digits, std::ios_base::fmtflags(0));
}

Real parse_real(const std::string& s);

inline double to_double(const Real& v) { return v.convert_to<double>(); }

inline Real rabs(const Real& v) { return v < 0 ? Real(-v) : v; }

// Largest absolute entry, zero for empty matrices.
inline Real max_abs(const Mat& m) {
  Real r = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r = std::max(r, rabs(m(i, j)));
  return r;
}

}  // namespace lorpl2
