#pragma once

#include <array>
#include <climits>
#include <map>
#include <vector>

#include "qeuclid/errors.hpp"

namespace qeuclid {

// Sparse tensor with `Legs` upper and `Legs` lower indices over the coordinate
// alphabet, viewed as a linear map on the `Legs`-fold tensor power (upper pair
// of index groups = row, lower = column). No zero entries are stored, so
// equality is structural.
template <class F, int Legs>
class SparseTensor {
 public:
  static constexpr int Rank = 2 * Legs;
  using Key = std::array<int, Rank>;
  using Map = std::map<Key, F>;

  const Map& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  void add(const Key& k, const F& v) {
    if (v.is_zero()) return;
    auto [it, inserted] = entries_.try_emplace(k, v);
    if (!inserted) {
      it->second += v;
      if (it->second.is_zero()) entries_.erase(it);
    }
  }

  F at(const Key& k) const {
    auto it = entries_.find(k);
    return it == entries_.end() ? F{} : it->second;
  }

  bool operator==(const SparseTensor& o) const { return entries_ == o.entries_; }
  bool operator!=(const SparseTensor& o) const { return !(*this == o); }

  SparseTensor operator+(const SparseTensor& o) const {
    SparseTensor out = *this;
    for (const auto& [k, v] : o.entries_) out.add(k, v);
    return out;
  }

  SparseTensor operator-(const SparseTensor& o) const {
    SparseTensor out = *this;
    for (const auto& [k, v] : o.entries_) out.add(k, -v);
    return out;
  }

  SparseTensor scaled(const F& c) const {
    SparseTensor out;
    if (c.is_zero()) return out;
    for (const auto& [k, v] : entries_) out.entries_.emplace(k, v * c);
    return out;
  }

  // Swap upper and lower index groups.
  SparseTensor transposed() const {
    SparseTensor out;
    for (const auto& [k, v] : entries_) {
      Key t;
      for (int p = 0; p < Legs; ++p) {
        t[p] = k[Legs + p];
        t[Legs + p] = k[p];
      }
      out.entries_.emplace(t, v);
    }
    return out;
  }

  static SparseTensor identity(const std::vector<int>& alphabet, const F& one) {
    SparseTensor out;
    Key k{};
    build_identity(out, alphabet, one, k, 0);
    return out;
  }

  // Matrix product on the tensor power: (A B)^U_L = sum_M A^U_M B^M_L.
  friend SparseTensor compose(const SparseTensor& a, const SparseTensor& b) {
    SparseTensor out;
    for (const auto& [ka, va] : a.entries_) {
      Key lo, hi;
      for (int p = 0; p < Legs; ++p) {
        lo[p] = ka[Legs + p];
        hi[p] = ka[Legs + p];
      }
      for (int p = Legs; p < Rank; ++p) {
        lo[p] = INT_MIN;
        hi[p] = INT_MAX;
      }
      auto first = b.entries_.lower_bound(lo);
      auto last = b.entries_.upper_bound(hi);
      for (auto it = first; it != last; ++it) {
        Key k;
        for (int p = 0; p < Legs; ++p) {
          k[p] = ka[p];
          k[Legs + p] = it->first[Legs + p];
        }
        out.add(k, va * it->second);
      }
    }
    return out;
  }

 private:
  static void build_identity(SparseTensor& out, const std::vector<int>& alphabet, const F& one,
                             Key& k, int leg) {
    if (leg == Legs) {
      out.entries_.emplace(k, one);
      return;
    }
    for (int i : alphabet) {
      k[leg] = i;
      k[Legs + leg] = i;
      build_identity(out, alphabet, one, k, leg + 1);
    }
  }

  Map entries_;
};

template <class F>
using SparseTensor2 = SparseTensor<F, 1>;
template <class F>
using SparseTensor4 = SparseTensor<F, 2>;

// Tensor (Kronecker) product: upper groups concatenate, lower groups concatenate.
template <class F, int La, int Lb>
SparseTensor<F, La + Lb> kron(const SparseTensor<F, La>& a, const SparseTensor<F, Lb>& b) {
  SparseTensor<F, La + Lb> out;
  for (const auto& [ka, va] : a.entries())
    for (const auto& [kb, vb] : b.entries()) {
      typename SparseTensor<F, La + Lb>::Key k;
      for (int p = 0; p < La; ++p) {
        k[p] = ka[p];
        k[La + Lb + p] = ka[La + p];
      }
      for (int p = 0; p < Lb; ++p) {
        k[La + p] = kb[p];
        k[La + Lb + La + p] = kb[Lb + p];
      }
      out.add(k, va * vb);
    }
  return out;
}

}  // namespace qeuclid
