#pragma once

#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "qeuclid/errors.hpp"
#include "qeuclid/gauss_rational.hpp"
#include "qeuclid/qscalar.hpp"

namespace qeuclid {

// Resolution of the duplicated h/k display: `standard` is h = q^(1/2) - q^(-1/2),
// k = q - q^(-1); `h_equals_k` forces k = h (negative-control convention).
enum class KConvention { standard, h_equals_k };

// Per-field construction of scalars. QScalar is the exact symbolic field;
// GaussRational is the fast path with s pinned to a concrete rational value.
template <class F>
struct FieldMaker;

template <>
struct FieldMaker<QScalar> {
  struct State {};
  static QScalar q_half(const State&, int m2) { return QScalar::s_power(m2); }
  static QScalar constant(const State&, const GaussRational& c) { return QScalar(c); }
};

template <>
struct FieldMaker<GaussRational> {
  struct State {
    GaussRational s;
  };
  static GaussRational q_half(const State& st, int m2) { return pow(st.s, m2); }
  static GaussRational constant(const State&, const GaussRational& c) { return c; }
};

// Dimension-dependent constants of R^N_q: the index alphabet, rho, omega, h, k
// and the trace normalizer kappa = g^{sm} g_{sm}. Immutable after construction.
template <class F>
class ScalarContext {
 public:
  using Field = F;
  using State = typename FieldMaker<F>::State;

  ScalarContext(int N, KConvention kc, State state) : N_(N), kc_(kc), state_(std::move(state)) {
    if (N < 3) throw ConfigError("N must be at least 3");
    n_ = N / 2;
    odd_ = (N % 2 != 0);
    for (int i = -n_; i <= n_; ++i) {
      if (i == 0 && !odd_) continue;
      alphabet_.push_back(i);
    }
    h_ = q_half(1) - q_half(-1);
    k_ = (kc == KConvention::standard) ? q_half(2) - q_half(-2) : h_;
    for (int i : alphabet_) omega_[i] = q_half(rho2(i)) + q_half(-rho2(i));
    kappa_ = zero();
    for (int i : alphabet_) kappa_ += q_half(-2 * rho2(i));
  }

  int N() const { return N_; }
  int n() const { return n_; }
  bool odd() const { return odd_; }
  KConvention k_convention() const { return kc_; }

  const std::vector<int>& alphabet() const { return alphabet_; }
  bool is_index(int i) const {
    return i >= -n_ && i <= n_ && (i != 0 || odd_);
  }
  void require_index(int i) const {
    if (!is_index(i))
      throw ConfigError("index " + std::to_string(i) + " out of range for N = " +
                        std::to_string(N_));
  }
  // x^0 (N odd) and x^(+-1) (N even) are the coordinates adjoined with inverses.
  bool is_invertible_coord(int i) const {
    return odd_ ? (i == 0) : (i == 1 || i == -1);
  }

  // 2*rho_i (rho is half-integral for odd N).
  int rho2(int i) const {
    require_index(i);
    if (i == 0) return 0;
    if (i > 0) return odd_ ? 1 - 2 * i : 2 - 2 * i;
    return -rho2(-i);
  }

  F q_half(int m2) const { return FieldMaker<F>::q_half(state_, m2); }  // q^(m2/2)
  F q_power(int m) const { return q_half(2 * m); }
  F constant(const GaussRational& c) const { return FieldMaker<F>::constant(state_, c); }
  F integer(long v) const { return constant(GaussRational(v)); }
  F rational(long num, long den) const { return constant(GaussRational::from_ratio(num, den)); }
  F imag_unit() const { return constant(GaussRational::imaginary_unit()); }
  F zero() const { return integer(0); }
  F one() const { return integer(1); }

  const F& h() const { return h_; }
  const F& k() const { return k_; }
  const F& omega(int i) const {
    require_index(i);
    return omega_.at(i);
  }
  const F& kappa() const { return kappa_; }
  // Metric value g_{i,-i} = q^(-rho_i); the raised metric has identical components.
  F metric(int i) const { return q_half(-rho2(i)); }

 private:
  int N_;
  int n_;
  bool odd_;
  KConvention kc_;
  State state_;
  std::vector<int> alphabet_;
  F h_, k_, kappa_;
  std::map<int, F> omega_;
};

using ExactContext = ScalarContext<QScalar>;
using SampledContext = ScalarContext<GaussRational>;

inline ExactContext make_exact_context(int N, KConvention kc = KConvention::standard) {
  return ExactContext(N, kc, {});
}

// The sample point must be a real rational with s not in {0, 1, -1}, which keeps
// every constant of the theory (h, k, omega_i, kappa, the projector spectrum)
// away from poles and degeneracies.
inline SampledContext make_sampled_context(int N, const GaussRational& s,
                                           KConvention kc = KConvention::standard) {
  if (!s.is_real() || s.is_zero() || s == GaussRational(1) || s == GaussRational(-1))
    throw ConfigError("sample point must be a real rational with s != 0, +1, -1");
  return SampledContext(N, kc, {s});
}

}  // namespace qeuclid
