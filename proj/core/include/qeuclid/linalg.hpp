#pragma once

#include <vector>

#include "qeuclid/errors.hpp"
#include "qeuclid/gauss_rational.hpp"
#include "qeuclid/qscalar.hpp"
#include "qeuclid/sparse_tensor.hpp"

namespace qeuclid {

// Dense exact matrix used for the independent oracles (rank of classical
// projectors, direct inversion of the braid matrix).
template <class F>
class DenseMatrix {
 public:
  explicit DenseMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {}

  int dim() const { return dim_; }
  F& at(int r, int c) { return a_[static_cast<std::size_t>(r) * dim_ + c]; }
  const F& at(int r, int c) const { return a_[static_cast<std::size_t>(r) * dim_ + c]; }

  static DenseMatrix from_tensor4(const SparseTensor4<F>& t, const std::vector<int>& alphabet) {
    const int n = static_cast<int>(alphabet.size());
    DenseMatrix m(n * n);
    auto pos = [&](int idx) {
      for (int p = 0; p < n; ++p)
        if (alphabet[p] == idx) return p;
      throw ConfigError("tensor index outside alphabet");
    };
    for (const auto& [k, v] : t.entries())
      m.at(pos(k[0]) * n + pos(k[1]), pos(k[2]) * n + pos(k[3])) = v;
    return m;
  }

  SparseTensor4<F> to_tensor4(const std::vector<int>& alphabet) const {
    const int n = static_cast<int>(alphabet.size());
    SparseTensor4<F> t;
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c)
        if (!at(r, c).is_zero())
          t.add({alphabet[r / n], alphabet[r % n], alphabet[c / n], alphabet[c % n]}, at(r, c));
    return t;
  }

  int rank() const {
    DenseMatrix m = *this;
    int rank = 0;
    for (int col = 0; col < dim_ && rank < dim_; ++col) {
      int pivot = -1;
      for (int r = rank; r < dim_; ++r)
        if (!m.at(r, col).is_zero()) {
          pivot = r;
          break;
        }
      if (pivot < 0) continue;
      for (int c = 0; c < dim_; ++c) std::swap(m.at(pivot, c), m.at(rank, c));
      F inv = m.at(rank, col).inverse();
      for (int r = rank + 1; r < dim_; ++r) {
        if (m.at(r, col).is_zero()) continue;
        F factor = m.at(r, col) * inv;
        for (int c = col; c < dim_; ++c) m.at(r, c) -= factor * m.at(rank, c);
      }
      ++rank;
    }
    return rank;
  }

  DenseMatrix inverse() const {
    DenseMatrix m = *this;
    DenseMatrix inv(dim_);
    for (int r = 0; r < dim_; ++r) inv.at(r, r) = F(1);
    for (int col = 0; col < dim_; ++col) {
      int pivot = -1;
      for (int r = col; r < dim_; ++r)
        if (!m.at(r, col).is_zero()) {
          pivot = r;
          break;
        }
      if (pivot < 0) throw ScalarError("singular matrix");
      for (int c = 0; c < dim_; ++c) {
        std::swap(m.at(pivot, c), m.at(col, c));
        std::swap(inv.at(pivot, c), inv.at(col, c));
      }
      F piv_inv = m.at(col, col).inverse();
      for (int c = 0; c < dim_; ++c) {
        m.at(col, c) *= piv_inv;
        inv.at(col, c) *= piv_inv;
      }
      for (int r = 0; r < dim_; ++r) {
        if (r == col || m.at(r, col).is_zero()) continue;
        F factor = m.at(r, col);
        for (int c = 0; c < dim_; ++c) {
          m.at(r, c) -= factor * m.at(col, c);
          inv.at(r, c) -= factor * inv.at(col, c);
        }
      }
    }
    return inv;
  }

 private:
  int dim_;
  std::vector<F> a_;
};

// Exact evaluation of a symbolic tensor at a rational point of s.
template <int Legs>
SparseTensor<GaussRational, Legs> eval_tensor(const SparseTensor<QScalar, Legs>& t,
                                              const GaussRational& point) {
  SparseTensor<GaussRational, Legs> out;
  for (const auto& [k, v] : t.entries()) out.add(k, v.eval(point));
  return out;
}

// q -> 1 specialization (throws ScalarError if any entry has a pole there).
template <int Legs>
SparseTensor<GaussRational, Legs> classical_tensor(const SparseTensor<QScalar, Legs>& t) {
  return eval_tensor(t, GaussRational(1));
}

}  // namespace qeuclid
