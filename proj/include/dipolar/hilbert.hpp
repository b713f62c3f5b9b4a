#pragma once

// Tensor-product Hilbert spaces of N identical d-level sites, sparse operator
// embedding and sector (subspace) bookkeeping.
//
// Basis order: site 0 is the most significant digit.

#include <cstdint>
#include <functional>
#include <vector>

#include "dipolar/core.hpp"

namespace dipolar {

class ProductSpace {
 public:
  ProductSpace() = default;
  ProductSpace(int n_sites, int local_dim) : n_sites_(n_sites), local_dim_(local_dim) {
    if (n_sites < 1 || local_dim < 1) throw InvalidInput("product space needs n_sites, local_dim >= 1");
    dim_ = 1;
    stride_.assign(static_cast<std::size_t>(n_sites), 1);
    for (int s = n_sites - 1; s >= 0; --s) {
      stride_[static_cast<std::size_t>(s)] = dim_;
      if (dim_ > (std::int64_t{1} << 40) / local_dim) throw InvalidInput("product space too large");
      dim_ *= local_dim;
    }
  }

  [[nodiscard]] int n_sites() const { return n_sites_; }
  [[nodiscard]] int local_dim() const { return local_dim_; }
  [[nodiscard]] std::int64_t dim() const { return dim_; }
  [[nodiscard]] std::int64_t stride(int site) const { return stride_[static_cast<std::size_t>(site)]; }

  [[nodiscard]] int digit(std::int64_t state, int site) const {
    return static_cast<int>((state / stride(site)) % local_dim_);
  }
  [[nodiscard]] std::int64_t with_digit(std::int64_t state, int site, int value) const {
    return state + (value - digit(state, site)) * stride(site);
  }

  /// Index of the product state with the given per-site digits.
  [[nodiscard]] std::int64_t index(const std::vector<int>& digits) const {
    std::int64_t s = 0;
    for (int i = 0; i < n_sites_; ++i) s += digits[static_cast<std::size_t>(i)] * stride(i);
    return s;
  }

 private:
  int n_sites_ = 0;
  int local_dim_ = 0;
  std::int64_t dim_ = 0;
  std::vector<std::int64_t> stride_;
};

/// A local operator acting on one site.
struct SiteOp {
  int site;
  const CMatrix* op;
};

/// Product of local operators O_1 O_2 ... (applied right to left, so the last
/// factor acts first), embedded in the full space and scaled by coeff.
/// Factors may act on the same site.
inline void add_product(const ProductSpace& space, const std::vector<SiteOp>& factors, Complex coeff,
                        std::vector<Eigen::Triplet<Complex>>& out) {
  if (coeff == Complex(0.0)) return;
  const int d = space.local_dim();
  // Column-state loop; each factor maps a basis state to a combination of
  // basis states, tracked as a small list of (state, amplitude).
  std::vector<std::pair<std::int64_t, Complex>> cur;
  std::vector<std::pair<std::int64_t, Complex>> next;
  for (std::int64_t col = 0; col < space.dim(); ++col) {
    cur.assign(1, {col, coeff});
    for (auto it = factors.rbegin(); it != factors.rend() && !cur.empty(); ++it) {
      next.clear();
      const CMatrix& m = *it->op;
      for (const auto& [state, amp] : cur) {
        const int from = space.digit(state, it->site);
        for (int to = 0; to < d; ++to) {
          const Complex v = m(to, from);
          if (v != Complex(0.0)) next.emplace_back(space.with_digit(state, it->site, to), amp * v);
        }
      }
      cur.swap(next);
    }
    for (const auto& [row, amp] : cur) out.emplace_back(static_cast<int>(row), static_cast<int>(col), amp);
  }
}

inline SpMatrix from_triplets(std::int64_t rows, std::int64_t cols, const std::vector<Eigen::Triplet<Complex>>& trips) {
  SpMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  m.setFromTriplets(trips.begin(), trips.end());
  m.prune(Complex(0.0));
  m.makeCompressed();
  return m;
}

/// Single-site operator embedded in the product space.
inline SpMatrix site_operator(const ProductSpace& space, int site, const CMatrix& local) {
  std::vector<Eigen::Triplet<Complex>> trips;
  add_product(space, {{site, &local}}, 1.0, trips);
  return from_triplets(space.dim(), space.dim(), trips);
}

/// Ordered list of basis states of a subspace selected by a predicate on
/// product-state indices, plus the reverse lookup.
class Sector {
 public:
  Sector() = default;
  Sector(const ProductSpace& space, const std::function<bool(std::int64_t)>& keep) {
    lookup_.assign(static_cast<std::size_t>(space.dim()), -1);
    for (std::int64_t s = 0; s < space.dim(); ++s) {
      if (keep(s)) {
        lookup_[static_cast<std::size_t>(s)] = static_cast<std::int64_t>(states_.size());
        states_.push_back(s);
      }
    }
  }

  [[nodiscard]] std::int64_t size() const { return static_cast<std::int64_t>(states_.size()); }
  [[nodiscard]] const std::vector<std::int64_t>& states() const { return states_; }
  /// Position of a full-space state in the sector, or -1.
  [[nodiscard]] std::int64_t position(std::int64_t state) const { return lookup_[static_cast<std::size_t>(state)]; }

 private:
  std::vector<std::int64_t> states_;
  std::vector<std::int64_t> lookup_;
};

/// Block of a full-space operator between two sectors (rows x cols).
inline SpMatrix restrict_operator(const SpMatrix& op, const Sector& rows, const Sector& cols) {
  std::vector<Eigen::Triplet<Complex>> trips;
  for (Eigen::Index r = 0; r < rows.size(); ++r) {
    const auto full_row = static_cast<Eigen::Index>(rows.states()[static_cast<std::size_t>(r)]);
    for (SpMatrix::InnerIterator it(op, full_row); it; ++it) {
      const std::int64_t c = cols.position(it.col());
      if (c >= 0) trips.emplace_back(static_cast<int>(r), static_cast<int>(c), it.value());
    }
  }
  return from_triplets(rows.size(), cols.size(), trips);
}

/// Normalized product state from per-site local vectors.
inline CVector product_state(const ProductSpace& space, const std::vector<CVector>& locals) {
  if (static_cast<int>(locals.size()) != space.n_sites()) throw InvalidInput("product_state: wrong number of sites");
  CVector psi(static_cast<Eigen::Index>(space.dim()));
  for (std::int64_t s = 0; s < space.dim(); ++s) {
    Complex amp = 1.0;
    for (int i = 0; i < space.n_sites(); ++i) amp *= locals[static_cast<std::size_t>(i)](space.digit(s, i));
    psi(static_cast<Eigen::Index>(s)) = amp;
  }
  const Real nrm = psi.norm();
  if (!(nrm > 0.0)) throw InvalidInput("product_state: zero vector");
  return psi / nrm;
}

}  // namespace dipolar
