#pragma once

// Complex special functions used by the connection formulas and the elliptic
// representation: gamma, digamma, the hypergeometric F(1/2,1/2,1;x) and its
// logarithmic companion, half-periods, and the Fourier form of the
// Weierstrass p-function.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "errors.hpp"

namespace pvi {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

// Series stop rule used throughout: stop once two consecutive terms fall
// below 1e-15 * |partial sum|, hard cap on the term count.
inline constexpr double series_eps = 1e-15;
inline constexpr std::size_t series_cap = 10000;

namespace detail {

// Lanczos approximation, g = 7, 9 coefficients. Valid for Re z >= 0.5,
// ~13 correct significant digits in double precision.
inline const double lanczos_g = 7.0;
inline const double lanczos_c[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

inline cplx gamma_lanczos_half_plane(cplx z) {
  // expects Re z >= 0.5
  z -= 1.0;
  cplx a = lanczos_c[0];
  for (int k = 1; k < 9; ++k) a += lanczos_c[k] / (z + static_cast<double>(k));
  cplx t = z + lanczos_g + 0.5;
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

inline bool near_nonpositive_integer(cplx z, double tol) {
  if (z.real() > 0.5) return false;
  double n = std::round(z.real());
  return n <= 0.0 && std::abs(z.real() - n) < tol && std::abs(z.imag()) < tol;
}

}  // namespace detail

inline cplx complex_gamma(cplx z) {
  if (detail::near_nonpositive_integer(z, 1e-9))
    fail(errc::pole_at_nonpositive_integer,
         "gamma pole at z = " + std::to_string(z.real()));
  if (z.real() < 0.5) {
    // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return pi / (std::sin(pi * z) * detail::gamma_lanczos_half_plane(1.0 - z));
  }
  return detail::gamma_lanczos_half_plane(z);
}

inline cplx digamma(cplx z) {
  if (detail::near_nonpositive_integer(z, 1e-9))
    fail(errc::pole_at_nonpositive_integer,
         "digamma pole at z = " + std::to_string(z.real()));
  cplx acc = 0.0;
  if (z.real() < 0.5) {
    // psi(z) = psi(1-z) - pi cot(pi z)
    acc -= pi * std::cos(pi * z) / std::sin(pi * z);
    z = 1.0 - z;
  }
  while (z.real() < 16.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  // asymptotic expansion, B_2..B_14
  static const double bern[7] = {1.0 / 6,  -1.0 / 30, 1.0 / 42,     -1.0 / 30,
                                 5.0 / 66, -691.0 / 2730, 7.0 / 6};
  cplx inv2 = 1.0 / (z * z);
  cplx term = inv2;
  cplx sum = std::log(z) - 0.5 / z;
  for (int n = 0; n < 7; ++n) {
    sum -= bern[n] / (2.0 * (n + 1)) * term;
    term *= inv2;
  }
  return acc + sum;
}

// F(1/2, 1/2, 1; x), |x| < 1.
inline cplx hyper_F(cplx x) {
  if (std::abs(x) >= 1.0)
    fail(errc::outside_disk, "hypergeometric series needs |x| < 1");
  cplx sum = 1.0, term = 1.0;
  int below = 0;
  for (std::size_t n = 0; n < series_cap; ++n) {
    double nn = static_cast<double>(n);
    double ratio = (nn + 0.5) / (nn + 1.0);
    term *= ratio * ratio * x;
    sum += term;
    if (std::abs(term) < series_eps * std::abs(sum)) {
      if (++below >= 2) return sum;
    } else {
      below = 0;
    }
  }
  fail(errc::outside_disk, "hypergeometric series did not converge");
}

// F1(x) = sum_n [(1/2)_n / n!]^2 * 2[psi(n+1/2) - psi(n+1)] x^n.
// F(x) ln x + F1(x) is the second Frobenius solution at x = 0.
inline cplx hyper_F1(cplx x) {
  if (std::abs(x) >= 1.0)
    fail(errc::outside_disk, "hypergeometric series needs |x| < 1");
  double d = -4.0 * std::log(2.0);  // 2[psi(1/2) - psi(1)]
  cplx a = 1.0;                     // [(1/2)_n / n!]^2 x^n
  cplx sum = d;
  int below = 0;
  for (std::size_t n = 0; n < series_cap; ++n) {
    double nn = static_cast<double>(n);
    double ratio = (nn + 0.5) / (nn + 1.0);
    a *= ratio * ratio * x;
    d += 2.0 * (1.0 / (nn + 0.5) - 1.0 / (nn + 1.0));
    cplx term = a * d;
    sum += term;
    if (std::abs(term) < series_eps * std::abs(sum)) {
      if (++below >= 2) return sum;
    } else {
      below = 0;
    }
  }
  fail(errc::outside_disk, "hypergeometric series did not converge");
}

struct HalfPeriods {
  cplx omega1;
  cplx omega2;
  cplx tau;  // omega2 / omega1
};

// omega1 = (pi/2) F(x), omega2 = -(i/2)[F(x) ln x + F1(x)]; principal log.
inline HalfPeriods half_periods(cplx x) {
  if (x == 0.0) fail(errc::bad_input, "half_periods needs x != 0");
  cplx F = hyper_F(x);
  cplx F1 = hyper_F1(x);
  HalfPeriods hp;
  hp.omega1 = 0.5 * pi * F;
  hp.omega2 = cplx(0.0, -0.5) * (F * std::log(x) + F1);
  hp.tau = hp.omega2 / hp.omega1;
  return hp;
}

// Weierstrass p-function with half-periods (omega1, omega2) as the Fourier
// series in q = exp(i pi tau):
//   p(u) = (pi/(2 omega1))^2 [ -1/3 + sin^-2(f/2)
//          + 8 sum_{n>=1} n q^{2n}/(1-q^{2n}) (1 - cos(n f)) ],  f = pi u / omega1.
// Converges for Im tau >= |Im(u / (2 omega1))|.
inline cplx weierstrass_p_fourier(cplx u, const HalfPeriods& hp) {
  cplx tau = hp.tau;
  if (tau.imag() <= 0.0)
    fail(errc::outside_fourier_domain, "needs Im tau > 0");
  if (tau.imag() < std::abs((u / (2.0 * hp.omega1)).imag()))
    fail(errc::outside_fourier_domain,
         "needs Im tau >= |Im(u / (2 omega1))|");
  cplx f = pi * u / hp.omega1;
  cplx sh = std::sin(0.5 * f);
  if (std::abs(sh) < 1e-10)
    fail(errc::near_pole, "u within 1e-10 of a lattice point");
  cplx q2 = std::exp(cplx(0.0, 2.0 * pi) * tau);
  cplx sum = -1.0 / 3.0 + 1.0 / (sh * sh);
  cplx q2n = 1.0;
  int below = 0;
  for (std::size_t n = 1; n < series_cap; ++n) {
    q2n *= q2;
    double nn = static_cast<double>(n);
    cplx term = 8.0 * nn * q2n / (1.0 - q2n) * (1.0 - std::cos(nn * f));
    sum += term;
    if (std::abs(term) < series_eps * std::abs(sum)) {
      if (++below >= 2) break;
    } else {
      below = 0;
    }
    if (n + 1 == series_cap)
      fail(errc::outside_fourier_domain, "Fourier series did not converge");
  }
  cplx scale = pi / (2.0 * hp.omega1);
  return scale * scale * sum;
}

}  // namespace pvi
