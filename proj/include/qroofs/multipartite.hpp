#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qroofs/hermitian.hpp"

namespace qroofs {

// N parties with equal local dimension d; party 0 is the leftmost tensor
// factor (most significant digit of the composite index).
struct MultipartiteLayout {
  int parties;
  int local_dim;

  MultipartiteLayout(int n, int d) : parties(n), local_dim(d) {
    if (n < 1 || d < 2) {
      std::ostringstream msg;
      msg << "MultipartiteLayout: need parties >= 1 and local_dim >= 2, got "
          << n << ", " << d;
      throw std::invalid_argument(msg.str());
    }
    std::int64_t total = 1;
    for (int i = 0; i < n; ++i) {
      total *= d;
      if (total > (1 << 20)) {
        throw std::invalid_argument("MultipartiteLayout: total dimension too large");
      }
    }
  }

  int total_dim() const {
    int t = 1;
    for (int i = 0; i < parties; ++i) t *= local_dim;
    return t;
  }

  // Stride of a party's digit inside the composite index.
  int stride(int party) const {
    int s = 1;
    for (int i = party + 1; i < parties; ++i) s *= local_dim;
    return s;
  }
};

namespace detail {

inline void require_layout(const Matrix& x, const MultipartiteLayout& layout,
                           const char* who) {
  if (x.rows() != layout.total_dim() || x.cols() != layout.total_dim()) {
    std::ostringstream msg;
    msg << who << ": matrix dimension " << x.rows() << " does not match layout ("
        << layout.parties << " parties of dimension " << layout.local_dim
        << " -> " << layout.total_dim() << ")";
    throw std::invalid_argument(msg.str());
  }
}

inline void require_party_subset(const std::vector<int>& parties,
                                 const MultipartiteLayout& layout, const char* who) {
  std::vector<bool> seen(layout.parties, false);
  for (int p : parties) {
    if (p < 0 || p >= layout.parties) {
      std::ostringstream msg;
      msg << who << ": party index " << p << " outside [0, " << layout.parties << ")";
      throw std::invalid_argument(msg.str());
    }
    if (seen[p]) {
      std::ostringstream msg;
      msg << who << ": duplicate party index " << p;
      throw std::invalid_argument(msg.str());
    }
    seen[p] = true;
  }
}

inline std::vector<int> digits_of(int index, const MultipartiteLayout& layout) {
  std::vector<int> d(layout.parties);
  for (int p = layout.parties - 1; p >= 0; --p) {
    d[p] = index % layout.local_dim;
    index /= layout.local_dim;
  }
  return d;
}

inline int index_of(const std::vector<int>& digits, const MultipartiteLayout& layout) {
  int idx = 0;
  for (int p = 0; p < layout.parties; ++p) idx = idx * layout.local_dim + digits[p];
  return idx;
}

}  // namespace detail

// Kronecker product; a is the leading (party 0) factor.
inline Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Reduced matrix on the parties listed in `keep` (ascending party order);
// all other parties are traced out. Keeping every party returns X itself.
inline Matrix partial_trace(const Matrix& x, const MultipartiteLayout& layout,
                            std::vector<int> keep) {
  detail::require_layout(x, layout, "partial_trace");
  detail::require_party_subset(keep, layout, "partial_trace");
  std::sort(keep.begin(), keep.end());

  std::vector<int> traced;
  {
    std::vector<bool> kept(layout.parties, false);
    for (int p : keep) kept[p] = true;
    for (int p = 0; p < layout.parties; ++p) {
      if (!kept[p]) traced.push_back(p);
    }
  }

  const int d = layout.local_dim;
  int keep_dim = 1;
  for (size_t i = 0; i < keep.size(); ++i) keep_dim *= d;
  int traced_dim = 1;
  for (size_t i = 0; i < traced.size(); ++i) traced_dim *= d;

  Matrix out = Matrix::Zero(keep_dim, keep_dim);
  std::vector<int> row_digits(layout.parties), col_digits(layout.parties);
  for (int r = 0; r < keep_dim; ++r) {
    for (int c = 0; c < keep_dim; ++c) {
      Complex acc = 0;
      for (int t = 0; t < traced_dim; ++t) {
        int rr = r, cc = c, tt = t;
        for (int p = static_cast<int>(keep.size()) - 1; p >= 0; --p) {
          row_digits[keep[p]] = rr % d;
          col_digits[keep[p]] = cc % d;
          rr /= d;
          cc /= d;
        }
        for (int p = static_cast<int>(traced.size()) - 1; p >= 0; --p) {
          row_digits[traced[p]] = tt % d;
          col_digits[traced[p]] = tt % d;
          tt /= d;
        }
        acc += x(detail::index_of(row_digits, layout),
                 detail::index_of(col_digits, layout));
      }
      out(r, c) = acc;
    }
  }
  return out;
}

// Transpose the listed parties in place; applying the same list twice gives
// back the original matrix.
inline Matrix partial_transpose(const Matrix& x, const MultipartiteLayout& layout,
                                const std::vector<int>& parties) {
  detail::require_layout(x, layout, "partial_transpose");
  detail::require_party_subset(parties, layout, "partial_transpose");

  const int dim = layout.total_dim();
  Matrix out(dim, dim);
  for (int r = 0; r < dim; ++r) {
    std::vector<int> rd = detail::digits_of(r, layout);
    for (int c = 0; c < dim; ++c) {
      std::vector<int> cd = detail::digits_of(c, layout);
      std::vector<int> nr = rd, nc = cd;
      for (int p : parties) {
        std::swap(nr[p], nc[p]);
      }
      out(detail::index_of(nr, layout), detail::index_of(nc, layout)) = x(r, c);
    }
  }
  return out;
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 0; i < std::min(k, n - k); ++i) {
    r = r * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
  }
  return r;
}

// Orthonormal basis of the permutation-symmetric subspace, returned as the
// columns of a d^N x C(N+d-1, N) isometry. Column m is the normalized sum of
// all distinct arrangements of the m-th multiset of local levels, with
// multisets enumerated as nondecreasing words in lexicographic order
// (so for two qubits: |00>, (|01>+|10>)/sqrt(2), |11>).
inline Matrix symmetric_basis(const MultipartiteLayout& layout) {
  const int n = layout.parties;
  const int d = layout.local_dim;
  const int total = layout.total_dim();
  const auto count = binomial(n + d - 1, n);

  Matrix basis = Matrix::Zero(total, static_cast<int>(count));
  std::vector<int> word(n, 0);
  int col = 0;
  while (true) {
    // Sum over the distinct permutations of the current word.
    std::vector<int> perm = word;
    int arrangements = 0;
    do {
      basis(detail::index_of(perm, layout), col) += 1.0;
      ++arrangements;
    } while (std::next_permutation(perm.begin(), perm.end()));
    basis.col(col) /= std::sqrt(static_cast<double>(arrangements));
    ++col;

    // Next nondecreasing word.
    int i = n - 1;
    while (i >= 0 && word[i] == d - 1) --i;
    if (i < 0) break;
    ++word[i];
    for (int j = i + 1; j < n; ++j) word[j] = word[i];
  }
  if (col != static_cast<int>(count)) {
    throw std::logic_error("symmetric_basis: enumeration mismatch");
  }
  return basis;
}

}  // namespace qroofs
