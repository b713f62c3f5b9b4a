#pragma once

// Second-order cumulant equations for spin-1/2 master equations whose
// Hamiltonian has at most two-body Pauli terms and whose jumps act on single
// sites. The Heisenberg equations for <sigma^a_i> and <sigma^a_i sigma^b_j>
// are derived once by Pauli-string algebra; three-site expectations are then
// closed as <ABC> = <AB><C> + <AC><B> + <BC><A> - 2<A><B><C>.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "dipolar/core.hpp"
#include "dipolar/observables.hpp"
#include "dipolar/ode.hpp"
#include "dipolar/xy_model.hpp"

namespace dipolar {

/// Product of single-site Paulis (a = 0, 1, 2 for x, y, z) on distinct sites, sorted by site.
struct PauliString {
  Complex coeff{1.0, 0.0};
  std::vector<std::pair<int, int>> ops;
};
using PauliSum = std::vector<PauliString>;

namespace pauli_algebra {

inline PauliString multiply(const PauliString& x, const PauliString& y) {
  PauliString r;
  r.coeff = x.coeff * y.coeff;
  std::size_t i = 0, j = 0;
  while (i < x.ops.size() || j < y.ops.size()) {
    if (j == y.ops.size() || (i < x.ops.size() && x.ops[i].first < y.ops[j].first)) {
      r.ops.push_back(x.ops[i++]);
    } else if (i == x.ops.size() || y.ops[j].first < x.ops[i].first) {
      r.ops.push_back(y.ops[j++]);
    } else {
      const int a = x.ops[i].second, b = y.ops[j].second, site = x.ops[i].first;
      ++i;
      ++j;
      if (a == b) continue;  // sigma^a sigma^a = 1
      const int c = 3 - a - b;
      // sigma^a sigma^b = i eps_abc sigma^c
      const bool cyclic = (b - a + 3) % 3 == 1;
      r.coeff *= cyclic ? kI : -kI;
      r.ops.emplace_back(site, c);
    }
  }
  return r;
}

inline PauliSum multiply(const PauliSum& x, const PauliSum& y) {
  PauliSum r;
  r.reserve(x.size() * y.size());
  for (const auto& a : x)
    for (const auto& b : y) r.push_back(multiply(a, b));
  return r;
}

inline PauliSum commutator(const PauliSum& x, const PauliSum& y) {
  PauliSum r = multiply(x, y);
  for (auto t : multiply(y, x)) {
    t.coeff = -t.coeff;
    r.push_back(std::move(t));
  }
  return r;
}

inline PauliSum adjoint(PauliSum x) {
  for (auto& t : x) t.coeff = std::conj(t.coeff);
  return x;
}

inline void scale(PauliSum& x, Complex c) {
  for (auto& t : x) t.coeff *= c;
}

inline void append(PauliSum& into, const PauliSum& x) { into.insert(into.end(), x.begin(), x.end()); }

/// Merges equal strings and drops vanishing ones.
inline PauliSum simplify(const PauliSum& x, Real tol = 1e-15) {
  std::map<std::vector<std::pair<int, int>>, Complex> acc;
  for (const auto& t : x) acc[t.ops] += t.coeff;
  Real scale_max = 0.0;
  for (const auto& [k, v] : acc) scale_max = std::max(scale_max, std::abs(v));
  PauliSum r;
  for (const auto& [k, v] : acc) {
    if (std::abs(v) > tol * scale_max) r.push_back({v, k});
  }
  return r;
}

/// Pauli expansion of a 2x2 local operator: identity part plus sigma^a parts.
inline PauliSum local_operator(int site, const CMatrix& m) {
  PauliSum r;
  const Complex id = 0.5 * m.trace();
  if (id != Complex(0.0)) r.push_back({id, {}});
  for (int a = 0; a < 3; ++a) {
    const Complex c = 0.5 * (pauli(a) * m).trace();
    if (c != Complex(0.0)) r.push_back({c, {{site, a}}});
  }
  return r;
}

}  // namespace pauli_algebra

/// Spin-1/2 master equation in Pauli form: H = sum of strings with at most two
/// sites, dissipator sum_ab Gamma_ab (2 L_b rho L_a^+ - {L_a^+ L_b, rho}).
struct PauliLindblad {
  int n = 0;
  PauliSum hamiltonian;
  std::vector<PauliSum> jumps;  ///< each acting on a single site
  std::vector<int> jump_site;
  CMatrix rates;
};

/// XY model with the same jump content as xy_lindblad().
inline PauliLindblad pauli_form(const XYModel& m, bool with_dissipation = true) {
  using namespace pauli_algebra;
  PauliLindblad p;
  p.n = m.n();
  for (int i = 0; i < p.n; ++i) {
    for (int j = i + 1; j < p.n; ++j) {
      // H sums over ordered pairs
      const Real cx = m.cx(i, j) + m.cx(j, i);
      const Real cy = m.cy(i, j) + m.cy(j, i);
      if (cx != 0.0) p.hamiltonian.push_back({cx, {{i, 0}, {j, 0}}});
      if (cy != 0.0) p.hamiltonian.push_back({cy, {{i, 1}, {j, 1}}});
    }
  }
  if (!with_dissipation) {
    p.rates = CMatrix(0, 0);
    return p;
  }
  const CMatrix sp = sigma_plus();
  const CMatrix sm = sp.adjoint();
  const Real a0 = m.jump_amplitude(0);
  for (int i = 0; i < p.n; ++i) {
    for (int j = 0; j < p.n; ++j) {
      for (int qp : {-1, 1}) {
        const Complex g = m.rates(3 * i + 1, 3 * j + qp + 1);
        if (g == Complex(0.0)) continue;
        PauliSum l = local_operator(j, qp == 1 ? sm : sp);
        scale(l, kI * a0 * g * m.jump_amplitude(qp));
        append(p.hamiltonian, l);
        append(p.hamiltonian, adjoint(l));
      }
    }
  }
  p.hamiltonian = simplify(p.hamiltonian);
  std::vector<int> idx;
  for (int i = 0; i < p.n; ++i) {
    for (int q : {-1, 1}) {
      PauliSum l = local_operator(i, q == 1 ? sm : sp);
      scale(l, m.jump_amplitude(q));
      p.jumps.push_back(std::move(l));
      p.jump_site.push_back(i);
      idx.push_back(3 * i + q + 1);
    }
  }
  const auto nj = static_cast<Eigen::Index>(idx.size());
  p.rates = CMatrix(nj, nj);
  for (Eigen::Index a = 0; a < nj; ++a)
    for (Eigen::Index b = 0; b < nj; ++b)
      p.rates(a, b) = m.rates(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  return p;
}

/// First moments and full second moments, one entry per unordered pair.
class CumulantState {
 public:
  CumulantState() = default;
  explicit CumulantState(int n) : n_(n), data_(RVector::Zero(size_for(n))) {}

  static Eigen::Index size_for(int n) { return 3 * n + 9 * n * (n - 1) / 2; }

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] Eigen::Index mean_index(int i, int a) const { return 3 * i + a; }
  /// Index of <sigma^a_i sigma^b_j> for i != j (stored for i < j).
  [[nodiscard]] Eigen::Index pair_index(int i, int a, int j, int b) const {
    if (i > j) {
      std::swap(i, j);
      std::swap(a, b);
    }
    const int p = i * n_ - i * (i + 1) / 2 + (j - i - 1);
    return 3 * n_ + 9 * p + 3 * a + b;
  }
  [[nodiscard]] Real mean(int i, int a) const { return data_(mean_index(i, a)); }
  [[nodiscard]] Real pair(int i, int a, int j, int b) const { return data_(pair_index(i, a, j, b)); }
  [[nodiscard]] Real connected(int i, int a, int j, int b) const { return pair(i, a, j, b) - mean(i, a) * mean(j, b); }

  RVector& data() { return data_; }
  [[nodiscard]] const RVector& data() const { return data_; }

  /// Product state with Bloch vectors s_i.
  static CumulantState product(const std::vector<Eigen::Vector3d>& bloch) {
    const int n = static_cast<int>(bloch.size());
    CumulantState st(n);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < 3; ++a) st.data_(st.mean_index(i, a)) = bloch[static_cast<std::size_t>(i)](a);
      for (int j = i + 1; j < n; ++j)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            st.data_(st.pair_index(i, a, j, b)) = bloch[static_cast<std::size_t>(i)](a) * bloch[static_cast<std::size_t>(j)](b);
    }
    return st;
  }

  [[nodiscard]] SpinMoments moments() const {
    SpinMoments m;
    m.n = n_;
    m.mean.resize(static_cast<std::size_t>(n_));
    m.pair.assign(static_cast<std::size_t>(n_ * n_), Eigen::Matrix3d::Zero());
    for (int i = 0; i < n_; ++i) {
      for (int a = 0; a < 3; ++a) m.mean[static_cast<std::size_t>(i)](a) = mean(i, a);
      for (int j = 0; j < n_; ++j) {
        if (i == j) continue;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) m.pair[static_cast<std::size_t>(i * n_ + j)](a, b) = pair(i, a, j, b);
      }
    }
    return m;
  }

  /// Largest violation of |<sigma^a_i>| <= 1.
  [[nodiscard]] Real max_bloch_excess() const {
    Real e = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int a = 0; a < 3; ++a) e = std::max(e, std::abs(mean(i, a)) - 1.0);
    return e;
  }

 private:
  int n_ = 0;
  RVector data_;
};

/// Compiled cumulant right-hand side.
class CumulantRhs {
 public:
  explicit CumulantRhs(const PauliLindblad& model) : n_(model.n), layout_(model.n) {
    using namespace pauli_algebra;
    if (!model.jumps.empty()) {
      const auto nj = static_cast<Eigen::Index>(model.jumps.size());
      if (model.rates.rows() != nj || model.rates.cols() != nj) throw InvalidInput("cumulant: rate matrix size mismatch");
    }
    for (const auto& t : model.hamiltonian) {
      if (t.ops.size() > 2) throw InvalidInput("cumulant: Hamiltonian terms must act on at most two sites");
    }
    for (std::size_t a = 0; a < model.jumps.size(); ++a) {
      for (const auto& t : model.jumps[a]) {
        if (t.ops.size() > 1 || (t.ops.size() == 1 && t.ops[0].first != model.jump_site[a])) {
          throw InvalidInput("cumulant: jump operators must be single-site");
        }
      }
    }
    auto hamiltonian_touching = [&](const std::vector<int>& sites) {
      PauliSum h;
      for (const auto& t : model.hamiltonian) {
        const bool touches = std::any_of(t.ops.begin(), t.ops.end(), [&](const auto& op) {
          return std::find(sites.begin(), sites.end(), op.first) != sites.end();
        });
        if (touches) h.push_back(t);
      }
      return h;
    };

    auto derivative = [&](const PauliSum& o, const std::vector<int>& sites) {
      PauliSum d = commutator(hamiltonian_touching(sites), o);
      scale(d, kI);
      const auto nj = model.jumps.size();
      for (std::size_t a = 0; a < nj; ++a) {
        const bool a_on = std::find(sites.begin(), sites.end(), model.jump_site[a]) != sites.end();
        const PauliSum la_dag = adjoint(model.jumps[a]);
        for (std::size_t b = 0; b < nj; ++b) {
          const Complex g = model.rates(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
          if (g == Complex(0.0)) continue;
          const bool b_on = std::find(sites.begin(), sites.end(), model.jump_site[b]) != sites.end();
          // L_a^+ [O, L_b] + [L_a^+, O] L_b
          if (b_on) {
            PauliSum t = multiply(la_dag, commutator(o, model.jumps[b]));
            scale(t, g);
            append(d, t);
          }
          if (a_on) {
            PauliSum t = multiply(commutator(la_dag, o), model.jumps[b]);
            scale(t, g);
            append(d, t);
          }
        }
      }
      return compile(simplify(d));
    };

    equations_.resize(static_cast<std::size_t>(CumulantState::size_for(n_)));
    for (int i = 0; i < n_; ++i) {
      for (int a = 0; a < 3; ++a) {
        equations_[static_cast<std::size_t>(layout_.mean_index(i, a))] = derivative({{1.0, {{i, a}}}}, {i});
      }
    }
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            equations_[static_cast<std::size_t>(layout_.pair_index(i, a, j, b))] =
                derivative({{1.0, {{i, a}, {j, b}}}}, {i, j});
          }
        }
      }
    }
  }

  void operator()(Real, const RVector& y, RVector& dy) const {
    dy.resize(y.size());
    for (std::size_t e = 0; e < equations_.size(); ++e) {
      Real acc = 0.0;
      for (const Term& t : equations_[e]) acc += t.coeff * evaluate(t, y);
      dy(static_cast<Eigen::Index>(e)) = acc;
    }
  }

  [[nodiscard]] std::size_t n_terms() const {
    std::size_t s = 0;
    for (const auto& e : equations_) s += e.size();
    return s;
  }

 private:
  struct Term {
    Real coeff = 0.0;
    int n_ops = 0;
    std::array<Eigen::Index, 3> single{};  ///< indices of <sigma> factors
    std::array<Eigen::Index, 3> pairs{};   ///< indices of <sigma sigma> for (01), (02), (12)
  };

  std::vector<Term> compile(const PauliSum& d) const {
    std::vector<Term> out;
    for (const auto& s : d) {
      if (std::abs(s.coeff.imag()) > 1e-12 * (1.0 + std::abs(s.coeff))) {
        throw NumericalError("cumulant: derivative of a Hermitian observable is not Hermitian");
      }
      Term t;
      t.coeff = s.coeff.real();
      t.n_ops = static_cast<int>(s.ops.size());
      if (t.n_ops > 3) throw NumericalError("cumulant: four-site term in a pair equation");
      for (int k = 0; k < t.n_ops; ++k) t.single[static_cast<std::size_t>(k)] = layout_.mean_index(s.ops[static_cast<std::size_t>(k)].first, s.ops[static_cast<std::size_t>(k)].second);
      if (t.n_ops >= 2) {
        const auto& o = s.ops;
        t.pairs[0] = layout_.pair_index(o[0].first, o[0].second, o[1].first, o[1].second);
        if (t.n_ops == 3) {
          t.pairs[1] = layout_.pair_index(o[0].first, o[0].second, o[2].first, o[2].second);
          t.pairs[2] = layout_.pair_index(o[1].first, o[1].second, o[2].first, o[2].second);
        }
      }
      out.push_back(t);
    }
    return out;
  }

  static Real evaluate(const Term& t, const RVector& y) {
    switch (t.n_ops) {
      case 0:
        return 1.0;
      case 1:
        return y(t.single[0]);
      case 2:
        return y(t.pairs[0]);
      default: {
        const Real a = y(t.single[0]), b = y(t.single[1]), c = y(t.single[2]);
        return y(t.pairs[0]) * c + y(t.pairs[1]) * b + y(t.pairs[2]) * a - 2.0 * a * b * c;
      }
    }
  }

  int n_;
  CumulantState layout_;
  std::vector<std::vector<Term>> equations_;
};

struct CumulantReport {
  OdeStats stats;
  Real max_bloch_excess = 0.0;
  CumulantState final_state;
};

/// Integrates the cumulant equations, calling observe(t, state) on the grid.
template <class Observer>
CumulantReport propagate_cumulant(const PauliLindblad& model, const CumulantState& init, const std::vector<Real>& t_grid,
                                  Observer&& observe, const OdeOptions& opt = {1e-10, 1e-12}) {
  if (init.n() != model.n) throw InvalidInput("cumulant: initial state size does not match the model");
  const CumulantRhs rhs(model);
  CumulantReport rep;
  CumulantState st(model.n);
  auto obs = [&](Real t, const RVector& y) {
    st.data() = y;
    rep.max_bloch_excess = std::max(rep.max_bloch_excess, st.max_bloch_excess());
    observe(t, static_cast<const CumulantState&>(st));
  };
  rep.stats = integrate_dopri5([&rhs](Real t, const RVector& y, RVector& dy) { rhs(t, y, dy); }, RVector(init.data()),
                               t_grid, {}, obs, opt);
  rep.final_state = st;
  return rep;
}

}  // namespace dipolar
