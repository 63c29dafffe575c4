#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>

#include "dslab/error.hpp"
#include "dslab/powers.hpp"

namespace dslab {

cplx flat_diag_F_oracle_n2(cplx beta, cplx z, double tol) {
  if (z.imag() == 0.0) fail(ErrorCode::BadParams, "oracle needs Im z != 0");
  if (beta.real() <= 0.0) fail(ErrorCode::BadParams, "oracle integral converges only for Re beta > 0");
  const double s = z.imag() > 0.0 ? 1.0 : -1.0;
  const cplx rot = std::polar(1.0, s * 0.25 * kPi);
  const cplx power = -beta - 1.0;
  // xi0 = rot * tau keeps Im(-xi0^2 + xi1^2 - z) of one sign along the rotation.
  auto g = [&](double tau, double xi) { return std::pow(cplx(xi * xi, -s * tau * tau) - z, power); };

  boost::math::quadrature::exp_sinh<double> outer, inner;
  auto part = [&](bool imag) {
    auto row = [&](double tau) {
      auto h = [&](double xi) {
        const cplx v = g(tau, xi);
        return imag ? v.imag() : v.real();
      };
      return inner.integrate(h, tol);
    };
    return outer.integrate(row, tol);
  };
  const cplx integral(part(false), part(true));
  return complex_gamma(beta + 1.0) / (4.0 * kPi * kPi) * rot * 4.0 * integral;
}

}  // namespace dslab
