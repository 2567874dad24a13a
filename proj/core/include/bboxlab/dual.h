#ifndef BBOXLAB_DUAL_H_
#define BBOXLAB_DUAL_H_

// Forward-mode dual numbers carrying N directional derivatives at once.
//
// Non-smooth primitives use fixed conventions so that derivatives at kinks
// are deterministic: abs'(0) = 0 and sqrt'(0) = 0. Branching helpers such as
// min/max live with the callers, which decide how ties are broken.

#include <array>
#include <cmath>
#include <cstddef>

namespace bboxlab {

template <std::size_t N>
class Dual {
 public:
  using Grad = std::array<double, N>;

  constexpr Dual() : value_(0.0), grad_{} {}
  constexpr Dual(double value) : value_(value), grad_{} {}  // NOLINT: implicit lift
  constexpr Dual(double value, const Grad& grad) : value_(value), grad_(grad) {}

  // Independent variable number `index` of N.
  static constexpr Dual variable(double value, std::size_t index) {
    Dual d(value);
    d.grad_[index] = 1.0;
    return d;
  }

  constexpr double value() const { return value_; }
  constexpr const Grad& grad() const { return grad_; }
  constexpr double grad(std::size_t i) const { return grad_[i]; }

  Dual& operator+=(const Dual& o) {
    value_ += o.value_;
    for (std::size_t i = 0; i < N; ++i) grad_[i] += o.grad_[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value_ -= o.value_;
    for (std::size_t i = 0; i < N; ++i) grad_[i] -= o.grad_[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (std::size_t i = 0; i < N; ++i) grad_[i] = grad_[i] * o.value_ + value_ * o.grad_[i];
    value_ *= o.value_;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.value_;
    const double q = value_ * inv;
    for (std::size_t i = 0; i < N; ++i) grad_[i] = (grad_[i] - q * o.grad_[i]) * inv;
    value_ = q;
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }
  friend Dual operator-(Dual a) {
    a.value_ = -a.value_;
    for (auto& g : a.grad_) g = -g;
    return a;
  }

  friend bool operator<(const Dual& a, const Dual& b) { return a.value_ < b.value_; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.value_ > b.value_; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.value_ <= b.value_; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.value_ >= b.value_; }

  // Chain rule for a scalar function with value f and derivative df at value().
  Dual apply(double f, double df) const {
    Dual r(f);
    for (std::size_t i = 0; i < N; ++i) r.grad_[i] = df * grad_[i];
    return r;
  }

 private:
  double value_;
  Grad grad_;
};

template <std::size_t N>
Dual<N> exp(const Dual<N>& x) {
  const double e = std::exp(x.value());
  return x.apply(e, e);
}

template <std::size_t N>
Dual<N> sqrt(const Dual<N>& x) {
  const double s = std::sqrt(x.value());
  return x.apply(s, s > 0.0 ? 0.5 / s : 0.0);
}

template <std::size_t N>
Dual<N> abs(const Dual<N>& x) {
  const double v = x.value();
  return x.apply(std::abs(v), v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0));
}

template <std::size_t N>
Dual<N> sin(const Dual<N>& x) {
  return x.apply(std::sin(x.value()), std::cos(x.value()));
}

template <std::size_t N>
Dual<N> asin(const Dual<N>& x) {
  const double v = x.value();
  return x.apply(std::asin(v), 1.0 / std::sqrt(1.0 - v * v));
}

template <std::size_t N>
Dual<N> atan(const Dual<N>& x) {
  const double v = x.value();
  return x.apply(std::atan(v), 1.0 / (1.0 + v * v));
}

template <std::size_t N>
Dual<N> pow(const Dual<N>& x, double p) {
  const double v = x.value();
  if (p == 0.0) return Dual<N>(1.0);
  return x.apply(std::pow(v, p), p * std::pow(v, p - 1.0));
}

}  // namespace bboxlab

#endif  // BBOXLAB_DUAL_H_
