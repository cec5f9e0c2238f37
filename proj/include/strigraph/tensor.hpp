// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "strigraph/error.hpp"

namespace strigraph {

/// A typed tensor index: object name plus its dimension.
struct IndexType {
  std::string name;
  int dim = 1;

  friend bool operator==(const IndexType&, const IndexType&) = default;
  friend auto operator<=>(const IndexType&, const IndexType&) = default;
};

using IndexTypes = std::vector<IndexType>;

inline std::size_t volume(const IndexTypes& types) {
  std::size_t n = 1;
  for (const auto& t : types) n *= static_cast<std::size_t>(t.dim);
  return n;
}

/// Dense tensor with upper (output) and lower (input) indices. Entries are
/// row-major over all upper indices followed by all lower indices, so the
/// entry vector reshapes directly into a (upper volume) x (lower volume)
/// row-major matrix.
template <typename Scalar>
class BasicTensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  BasicTensor() : entries_(Vector::Ones(1)) {}
  BasicTensor(IndexTypes upper, IndexTypes lower)
      : upper_(std::move(upper)), lower_(std::move(lower)), entries_(Vector::Zero(volume(upper_) * volume(lower_))) {}
  BasicTensor(IndexTypes upper, IndexTypes lower, Vector entries)
      : upper_(std::move(upper)), lower_(std::move(lower)), entries_(std::move(entries)) {
    if (static_cast<std::size_t>(entries_.size()) != volume(upper_) * volume(lower_)) {
      throw Error(ErrorCode::kShapeMismatch, "entry count does not match index dimensions");
    }
  }

  static BasicTensor scalar(Scalar s) {
    BasicTensor t;
    t.entries_(0) = s;
    return t;
  }

  static BasicTensor from_matrix(IndexTypes upper, IndexTypes lower, const Matrix& m) {
    if (static_cast<std::size_t>(m.rows()) != volume(upper) || static_cast<std::size_t>(m.cols()) != volume(lower)) {
      throw Error(ErrorCode::kShapeMismatch, "matrix shape does not match index dimensions");
    }
    Vector v(m.size());
    Eigen::Map<Matrix>(v.data(), m.rows(), m.cols()) = m;
    return BasicTensor(std::move(upper), std::move(lower), std::move(v));
  }

  const IndexTypes& upper() const { return upper_; }
  const IndexTypes& lower() const { return lower_; }
  std::size_t rank() const { return upper_.size() + lower_.size(); }
  std::size_t rows() const { return volume(upper_); }
  std::size_t cols() const { return volume(lower_); }

  const Vector& entries() const { return entries_; }
  Vector& entries() { return entries_; }
  Scalar& operator[](std::size_t k) { return entries_(static_cast<Eigen::Index>(k)); }
  const Scalar& operator[](std::size_t k) const { return entries_(static_cast<Eigen::Index>(k)); }

  Eigen::Map<const Matrix> matrix() const {
    return Eigen::Map<const Matrix>(entries_.data(), static_cast<Eigen::Index>(rows()),
                                    static_cast<Eigen::Index>(cols()));
  }

  /// Entry at the given multi-index (upper digits, then lower digits).
  Scalar at(const std::vector<int>& upper_idx, const std::vector<int>& lower_idx) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < upper_.size(); ++i) k = k * upper_[i].dim + upper_idx.at(i);
    for (std::size_t i = 0; i < lower_.size(); ++i) k = k * lower_[i].dim + lower_idx.at(i);
    return entries_(static_cast<Eigen::Index>(k));
  }

  friend BasicTensor operator*(Scalar s, const BasicTensor& t) {
    BasicTensor out = t;
    out.entries_ *= s;
    return out;
  }

 private:
  IndexTypes upper_;
  IndexTypes lower_;
  Vector entries_;
};

using Complex = std::complex<double>;
using Tensor = BasicTensor<Complex>;

namespace detail {

/// Row-major strides for a digit layout.
inline std::vector<std::size_t> strides_of(const std::vector<int>& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * static_cast<std::size_t>(dims[i]);
  return s;
}

inline std::vector<int> dims_of(const IndexTypes& upper, const IndexTypes& lower) {
  std::vector<int> d;
  for (const auto& t : upper) d.push_back(t.dim);
  for (const auto& t : lower) d.push_back(t.dim);
  return d;
}

/// Advances a multi-index odometer; returns false after the last element.
inline bool next_index(std::vector<int>& idx, const std::vector<int>& dims) {
  for (std::size_t i = idx.size(); i-- > 0;) {
    if (++idx[i] < dims[i]) return true;
    idx[i] = 0;
  }
  return false;
}

template <typename Scalar>
double max_abs(const BasicTensor<Scalar>& t) {
  return t.entries().size() == 0 ? 0.0 : static_cast<double>(t.entries().cwiseAbs().maxCoeff());
}

}  // namespace detail

/// Identity matrix 1_X as a tensor with one upper and one lower index.
template <typename Scalar = Complex>
BasicTensor<Scalar> identity_tensor(const IndexType& x) {
  using M = typename BasicTensor<Scalar>::Matrix;
  return BasicTensor<Scalar>::from_matrix({x}, {x}, M::Identity(x.dim, x.dim));
}

/// C_i^j: sums over lower index i paired with upper index j.
template <typename Scalar>
BasicTensor<Scalar> contract(const BasicTensor<Scalar>& t, std::size_t lower_i, std::size_t upper_j) {
  if (lower_i >= t.lower().size() || upper_j >= t.upper().size()) {
    throw Error(ErrorCode::kShapeMismatch, "contraction index out of range");
  }
  if (t.lower()[lower_i].dim != t.upper()[upper_j].dim) {
    throw Error(ErrorCode::kDimMismatch, "contracted indices have different dimensions");
  }
  IndexTypes up = t.upper();
  IndexTypes lo = t.lower();
  up.erase(up.begin() + static_cast<std::ptrdiff_t>(upper_j));
  lo.erase(lo.begin() + static_cast<std::ptrdiff_t>(lower_i));
  BasicTensor<Scalar> out(up, lo);

  const auto src_dims = detail::dims_of(t.upper(), t.lower());
  const auto src_strides = detail::strides_of(src_dims);
  const auto dst_dims = detail::dims_of(up, lo);
  const std::size_t pos_j = upper_j;
  const std::size_t pos_i = t.upper().size() + lower_i;
  std::vector<std::size_t> dst_to_src;
  for (std::size_t p = 0; p < src_dims.size(); ++p) {
    if (p != pos_j && p != pos_i) dst_to_src.push_back(src_strides[p]);
  }
  const int d = t.lower()[lower_i].dim;
  std::vector<int> idx(dst_dims.size(), 0);
  std::size_t k = 0;
  do {
    std::size_t base = 0;
    for (std::size_t p = 0; p < idx.size(); ++p) base += static_cast<std::size_t>(idx[p]) * dst_to_src[p];
    Scalar sum{};
    for (int a = 0; a < d; ++a) sum += t[base + static_cast<std::size_t>(a) * (src_strides[pos_i] + src_strides[pos_j])];
    out[k++] = sum;
  } while (detail::next_index(idx, dst_dims));
  return out;
}

/// Tensor product: upper = a.upper ++ b.upper, lower = a.lower ++ b.lower.
template <typename Scalar>
BasicTensor<Scalar> kron(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  IndexTypes up = a.upper();
  up.insert(up.end(), b.upper().begin(), b.upper().end());
  IndexTypes lo = a.lower();
  lo.insert(lo.end(), b.lower().begin(), b.lower().end());
  using M = typename BasicTensor<Scalar>::Matrix;
  const auto ma = a.matrix();
  const auto mb = b.matrix();
  M out(ma.rows() * mb.rows(), ma.cols() * mb.cols());
  for (Eigen::Index r = 0; r < ma.rows(); ++r) {
    for (Eigen::Index c = 0; c < ma.cols(); ++c) {
      out.block(r * mb.rows(), c * mb.cols(), mb.rows(), mb.cols()) = ma(r, c) * mb;
    }
  }
  return BasicTensor<Scalar>::from_matrix(std::move(up), std::move(lo), out);
}

/// Reorders indices: new upper k is old upper upper_perm[k], likewise lower.
template <typename Scalar>
BasicTensor<Scalar> permute(const BasicTensor<Scalar>& t, const std::vector<std::size_t>& upper_perm,
                            const std::vector<std::size_t>& lower_perm) {
  if (upper_perm.size() != t.upper().size() || lower_perm.size() != t.lower().size()) {
    throw Error(ErrorCode::kShapeMismatch, "permutation length mismatch");
  }
  IndexTypes up, lo;
  std::vector<std::size_t> src_pos;
  for (std::size_t k : upper_perm) {
    up.push_back(t.upper().at(k));
    src_pos.push_back(k);
  }
  for (std::size_t k : lower_perm) {
    lo.push_back(t.lower().at(k));
    src_pos.push_back(t.upper().size() + k);
  }
  BasicTensor<Scalar> out(up, lo);
  const auto src_strides = detail::strides_of(detail::dims_of(t.upper(), t.lower()));
  const auto dst_dims = detail::dims_of(up, lo);
  std::vector<int> idx(dst_dims.size(), 0);
  std::size_t k = 0;
  do {
    std::size_t s = 0;
    for (std::size_t p = 0; p < idx.size(); ++p) s += static_cast<std::size_t>(idx[p]) * src_strides[src_pos[p]];
    out[k++] = t[s];
  } while (detail::next_index(idx, dst_dims));
  return out;
}

/// Sequential composition: f first, then g (the matrix product g * f).
template <typename Scalar>
BasicTensor<Scalar> compose(const BasicTensor<Scalar>& f, const BasicTensor<Scalar>& g) {
  if (f.upper() != g.lower()) throw Error(ErrorCode::kShapeMismatch, "composed tensors disagree on the middle types");
  typename BasicTensor<Scalar>::Matrix m = g.matrix() * f.matrix();
  return BasicTensor<Scalar>::from_matrix(g.upper(), f.lower(), m);
}

/// Moves every index to the other side, keeping positions (the matrix
/// transpose of the entry layout).
template <typename Scalar>
BasicTensor<Scalar> transpose(const BasicTensor<Scalar>& t) {
  typename BasicTensor<Scalar>::Matrix m = t.matrix().transpose();
  return BasicTensor<Scalar>::from_matrix(t.lower(), t.upper(), m);
}

template <typename Scalar>
BasicTensor<Scalar> adjoint(const BasicTensor<Scalar>& t) {
  typename BasicTensor<Scalar>::Matrix m = t.matrix().adjoint();
  return BasicTensor<Scalar>::from_matrix(t.lower(), t.upper(), m);
}

/// Some(lambda) with a ~= lambda * b, lambda taken from b's entry of largest
/// modulus. Two zero tensors compare equal with lambda = 1.
template <typename Scalar>
std::optional<Scalar> equal_up_to_scalar(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b,
                                         double tol = 1e-9) {
  if (a.upper() != b.upper() || a.lower() != b.lower()) {
    throw Error(ErrorCode::kShapeMismatch, "compared tensors have different index types");
  }
  const double na = detail::max_abs(a);
  const double nb = detail::max_abs(b);
  if (nb == 0.0) {
    if (na == 0.0) return Scalar(1);
    return std::nullopt;
  }
  Eigen::Index k = 0;
  b.entries().cwiseAbs().maxCoeff(&k);
  const Scalar lambda = a.entries()(k) / b.entries()(k);
  if (std::abs(lambda) == 0.0) return std::nullopt;
  const double err = (a.entries() - lambda * b.entries()).cwiseAbs().maxCoeff();
  if (err > tol * std::max(na, nb)) return std::nullopt;
  return lambda;
}

/// Exact equality within tol relative to the larger sup-norm.
template <typename Scalar>
bool approx_equal(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b, double tol = 1e-9) {
  if (a.upper() != b.upper() || a.lower() != b.lower()) return false;
  const double scale = std::max({detail::max_abs(a), detail::max_abs(b), 1e-300});
  return (a.entries() - b.entries()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// Key equal for tensors related by an input permutation, an output
/// permutation and a nonzero scalar. Entries are normalized by the first
/// maximal-modulus entry and rounded to `resolution` before comparison.
std::string boundary_permutation_class(const Tensor& t, double resolution = 1e-6);

}  // namespace strigraph
