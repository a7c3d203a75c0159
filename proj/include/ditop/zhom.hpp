#pragma once

// Integer homology of the underlying undirected complex, and the discrete
// dicontractibility criteria built on it.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ditop/cubecore.hpp"
#include "ditop/error.hpp"
#include "ditop/traceclass.hpp"

namespace ditop {

using BigInt = boost::multiprecision::cpp_int;

namespace detail {

template <typename T>
T checked_add(const T& a, const T& b) {
  if constexpr (std::is_integral_v<T>) {
    T r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer overflow in addition");
    return r;
  } else {
    return a + b;
  }
}

template <typename T>
T checked_sub(const T& a, const T& b) {
  if constexpr (std::is_integral_v<T>) {
    T r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("integer overflow in subtraction");
    return r;
  } else {
    return a - b;
  }
}

template <typename T>
T checked_mul(const T& a, const T& b) {
  if constexpr (std::is_integral_v<T>) {
    T r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer overflow in multiplication");
    return r;
  } else {
    return a * b;
  }
}

template <typename T>
T checked_neg(const T& a) {
  if constexpr (std::is_integral_v<T>) {
    if (a == std::numeric_limits<T>::min()) throw OverflowError("integer overflow in negation");
  }
  return -a;
}

template <typename T>
T magnitude(const T& a) {
  return a < 0 ? checked_neg(a) : a;
}

}  // namespace detail

/// Dense row-major integer matrix.
template <typename T>
class IntegerMatrix {
 public:
  IntegerMatrix() = default;
  IntegerMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  IntegerMatrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    for (const auto& row : init) {
      if (row.size() != cols_) throw ModelError("ragged matrix literal");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static IntegerMatrix identity(std::size_t n) {
    IntegerMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const IntegerMatrix&) const = default;

  IntegerMatrix operator*(const IntegerMatrix& o) const {
    if (cols_ != o.rows_) throw ModelError("matrix shapes do not match for multiplication");
    IntegerMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const T& a = (*this)(i, k);
        if (a == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j)
          r(i, j) = detail::checked_add(r(i, j), detail::checked_mul(a, o(k, j)));
      }
    return r;
  }

  std::vector<T> operator*(const std::vector<T>& v) const {
    if (cols_ != v.size()) throw ModelError("matrix and vector shapes do not match");
    std::vector<T> r(rows_, T(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k)
        if (v[k] != 0) r[i] = detail::checked_add(r[i], detail::checked_mul((*this)(i, k), v[k]));
    return r;
  }

  bool is_zero() const {
    for (const auto& x : data_)
      if (x != 0) return false;
    return true;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  // row_dst += q * row_src
  void add_row(std::size_t dst, std::size_t src, const T& q) {
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(src, j) != 0)
        (*this)(dst, j) = detail::checked_add((*this)(dst, j), detail::checked_mul(q, (*this)(src, j)));
  }
  // col_dst += q * col_src
  void add_col(std::size_t dst, std::size_t src, const T& q) {
    for (std::size_t i = 0; i < rows_; ++i)
      if ((*this)(i, src) != 0)
        (*this)(i, dst) = detail::checked_add((*this)(i, dst), detail::checked_mul(q, (*this)(i, src)));
  }
  void negate_row(std::size_t r) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = detail::checked_neg((*this)(r, j));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// U·M·V = D with U, V unimodular and D diagonal, d_0 | d_1 | … | d_{r-1}.
template <typename T>
struct SNFResult {
  IntegerMatrix<T> U;
  IntegerMatrix<T> D;
  IntegerMatrix<T> V;
  std::size_t rank = 0;

  std::vector<T> invariant_factors() const {
    std::vector<T> out;
    for (std::size_t i = 0; i < rank; ++i) out.push_back(D(i, i));
    return out;
  }
};

/// Smith normal form by elementary reduction, pivoting on the entry of
/// least magnitude.
template <typename T>
SNFResult<T> smith_normal_form(const IntegerMatrix<T>& m) {
  SNFResult<T> r{IntegerMatrix<T>::identity(m.rows()), m, IntegerMatrix<T>::identity(m.cols()), 0};
  auto& a = r.D;
  auto& u = r.U;
  auto& v = r.V;
  const std::size_t rows = a.rows(), cols = a.cols();

  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    // Least nonzero magnitude in the trailing block.
    auto find_pivot = [&](std::size_t& pi, std::size_t& pj) {
      bool found = false;
      T best{};
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j) {
          if (a(i, j) == 0) continue;
          T mag = detail::magnitude(a(i, j));
          if (!found || mag < best) {
            best = mag;
            pi = i;
            pj = j;
            found = true;
          }
        }
      return found;
    };
    std::size_t pi = t, pj = t;
    if (!find_pivot(pi, pj)) break;
    a.swap_rows(t, pi);
    u.swap_rows(t, pi);
    a.swap_cols(t, pj);
    v.swap_cols(t, pj);

    while (true) {
      bool dirty = false;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (a(i, t) == 0) continue;
        T q = a(i, t) / a(t, t);
        a.add_row(i, t, detail::checked_neg(q));
        u.add_row(i, t, detail::checked_neg(q));
        if (a(i, t) != 0) dirty = true;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (a(t, j) == 0) continue;
        T q = a(t, j) / a(t, t);
        a.add_col(j, t, detail::checked_neg(q));
        v.add_col(j, t, detail::checked_neg(q));
        if (a(t, j) != 0) dirty = true;
      }
      if (dirty) {
        // A remainder is smaller than the pivot; move the least one in.
        std::size_t bi = t, bj = t;
        T best = detail::magnitude(a(t, t));
        for (std::size_t i = t + 1; i < rows; ++i)
          if (a(i, t) != 0 && detail::magnitude(a(i, t)) < best) {
            best = detail::magnitude(a(i, t));
            bi = i;
            bj = t;
          }
        for (std::size_t j = t + 1; j < cols; ++j)
          if (a(t, j) != 0 && detail::magnitude(a(t, j)) < best) {
            best = detail::magnitude(a(t, j));
            bi = t;
            bj = j;
          }
        a.swap_rows(t, bi);
        u.swap_rows(t, bi);
        a.swap_cols(t, bj);
        v.swap_cols(t, bj);
        continue;
      }
      // Row and column are clear; enforce divisibility of the rest.
      std::optional<std::size_t> bad_row;
      for (std::size_t i = t + 1; i < rows && !bad_row; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (a(i, j) % a(t, t) != 0) {
            bad_row = i;
            break;
          }
      if (!bad_row) break;
      a.add_row(t, *bad_row, T(1));
      u.add_row(t, *bad_row, T(1));
    }
    if (a(t, t) < 0) {
      a.negate_row(t);
      u.negate_row(t);
    }
    ++r.rank;
  }
  return r;
}

/// ∂1: edges → vertices, ∂e = target − source.
inline IntegerMatrix<BigInt> boundary_1(const PrecubicalSet& x) {
  IntegerMatrix<BigInt> d(x.vertex_count(), x.edge_count());
  for (EdgeId e = 0; e < x.edge_count(); ++e) {
    d(x.edges()[e].target, e) += 1;
    d(x.edges()[e].source, e) -= 1;
  }
  return d;
}

/// ∂2: squares → edges, ∂s = bottom + right − left − top.
inline IntegerMatrix<BigInt> boundary_2(const PrecubicalSet& x) {
  IntegerMatrix<BigInt> d(x.edge_count(), x.square_count());
  for (SquareId s = 0; s < x.square_count(); ++s) {
    const auto& q = x.squares()[s];
    d(q.bottom, s) += 1;
    d(q.right, s) += 1;
    d(q.left, s) -= 1;
    d(q.top, s) -= 1;
  }
  return d;
}

struct HomologyRanks {
  std::size_t betti0 = 0;
  std::size_t betti1 = 0;
  std::size_t betti2 = 0;
  std::vector<BigInt> torsion;  // torsion coefficients of H1

  bool operator==(const HomologyRanks&) const = default;
};

inline HomologyRanks homology_ranks(const PrecubicalSet& x) {
  auto s1 = smith_normal_form(boundary_1(x));
  auto s2 = smith_normal_form(boundary_2(x));
  HomologyRanks h;
  h.betti0 = x.vertex_count() - s1.rank;
  h.betti1 = x.edge_count() - s1.rank - s2.rank;
  h.betti2 = x.square_count() - s2.rank;
  for (const auto& d : s2.invariant_factors())
    if (d > 1) h.torsion.push_back(d);
  return h;
}

/// Connected, with vanishing H1 and no torsion.
inline bool is_contractible_surrogate(const PrecubicalSet& x) {
  auto h = homology_ranks(x);
  return h.betti0 == 1 && h.betti1 == 0 && h.torsion.empty();
}

/// A basis of the integer 1-cycles ker ∂1: columns of V past the rank.
inline std::vector<std::vector<BigInt>> cycle_basis(const PrecubicalSet& x) {
  auto s = smith_normal_form(boundary_1(x));
  std::vector<std::vector<BigInt>> out;
  for (std::size_t j = s.rank; j < x.edge_count(); ++j) {
    std::vector<BigInt> z(x.edge_count());
    for (std::size_t i = 0; i < x.edge_count(); ++i) z[i] = s.V(i, j);
    out.push_back(std::move(z));
  }
  return out;
}

/// Membership in the image of a matrix, decided from its Smith form:
/// M y = w is solvable iff (U w)_i is divisible by d_i for i < rank and
/// vanishes beyond.
class ImageTest {
 public:
  explicit ImageTest(const IntegerMatrix<BigInt>& m) : snf_(smith_normal_form(m)) {}

  bool contains(const std::vector<BigInt>& w) const {
    auto uw = snf_.U * w;
    for (std::size_t i = 0; i < uw.size(); ++i) {
      if (i < snf_.rank) {
        if (uw[i] % snf_.D(i, i) != 0) return false;
      } else if (uw[i] != 0) {
        return false;
      }
    }
    return true;
  }

 private:
  SNFResult<BigInt> snf_;
};

struct SectionResult {
  bool exists = false;
  /// The unique class of every pair, when a section exists.
  std::vector<std::pair<VertexPair, ClassId>> witness;
  /// Otherwise a pair with more than one class: the first met when sources
  /// ascend and, per source, targets descend (widest pairs first).
  std::optional<VertexPair> obstruction;
  std::size_t obstruction_classes = 0;
};

/// A section of the dipath space map exists on the discrete model iff every
/// reachable pair has a single class.
inline SectionResult section_exists(const TraceSpace& t) {
  auto pairs = gamma(t.complex()).pairs();
  precompute(t, pairs);
  SectionResult r;
  std::vector<VertexPair> order = pairs;
  std::sort(order.begin(), order.end(), [](VertexPair a, VertexPair b) {
    return a.first != b.first ? a.first < b.first : a.second > b.second;
  });
  for (const auto& p : order) {
    auto k = t.class_count(p);
    if (k != 1) {
      r.obstruction = p;
      r.obstruction_classes = k;
      return r;
    }
  }
  for (const auto& p : pairs) {
    r.witness.emplace_back(p, 0);
  }
  r.exists = true;
  return r;
}

inline SectionResult section_exists(const PrecubicalSet& x) { return section_exists(TraceSpace(x)); }

inline bool is_dicontractible(const PrecubicalSet& x) {
  return is_contractible_surrogate(x) && section_exists(x).exists;
}

/// A vertex from which every vertex is reachable, if any.
inline std::optional<VertexId> initial_state(const PrecubicalSet& x) {
  for (VertexId v = 0; v < x.vertex_count(); ++v)
    if (x.reachable_from(v).all()) return v;
  return std::nullopt;
}

/// With an initial state, a section alone already gives dicontractibility.
inline bool initial_state_upgrade(const PrecubicalSet& x) {
  return initial_state(x).has_value() && section_exists(x).exists;
}

}  // namespace ditop
