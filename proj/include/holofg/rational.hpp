#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

namespace holofg {

/// Exact complex number with rational real and imaginary parts.
struct QComplex {
  mpq_class re;
  mpq_class im;

  QComplex() : re(0), im(0) {}
  QComplex(long r) : re(r), im(0) {}
  QComplex(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {}

  /// Parses "a", "a/b", or a pair given separately.
  static QComplex parse(const std::string& re, const std::string& im = "0");

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  QComplex conj() const { return {re, -im}; }
  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
  double abs() const { return std::abs(to_complex()); }
  std::string str() const;

  QComplex& operator+=(const QComplex& o) { re += o.re; im += o.im; return *this; }
  QComplex& operator-=(const QComplex& o) { re -= o.re; im -= o.im; return *this; }
  QComplex& operator*=(const QComplex& o) {
    mpq_class r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  QComplex& operator/=(const QComplex& o);

  friend QComplex operator+(QComplex a, const QComplex& b) { return a += b; }
  friend QComplex operator-(QComplex a, const QComplex& b) { return a -= b; }
  friend QComplex operator*(QComplex a, const QComplex& b) { return a *= b; }
  friend QComplex operator/(QComplex a, const QComplex& b) { return a /= b; }
  friend QComplex operator-(const QComplex& a) { return {-a.re, -a.im}; }
  friend bool operator==(const QComplex& a, const QComplex& b) { return a.re == b.re && a.im == b.im; }
};

inline const QComplex kQI{0, 1};

}  // namespace holofg
