// SPDX-License-Identifier: Apache-2.0
#include "strigraph/tensor.hpp"

#include <cmath>
#include <sstream>

namespace strigraph {

namespace {

std::string serialize_normalized(const Tensor& t, double resolution) {
  std::ostringstream os;
  for (const auto& x : t.upper()) os << x.name << ':' << x.dim << ',';
  os << '|';
  for (const auto& x : t.lower()) os << x.name << ':' << x.dim << ',';
  os << '|';
  const double m = detail::max_abs(t);
  if (m == 0.0) {
    os << "zero";
    return os.str();
  }
  std::size_t pivot = 0;
  while (std::abs(t[pivot]) < m * (1.0 - 1e-7)) ++pivot;
  const Complex scale = t[pivot];
  for (Eigen::Index k = 0; k < t.entries().size(); ++k) {
    const Complex z = t.entries()(k) / scale;
    os << std::llround(z.real() / resolution) << ' ' << std::llround(z.imag() / resolution) << ';';
  }
  return os.str();
}

}  // namespace

std::string boundary_permutation_class(const Tensor& t, double resolution) {
  std::vector<std::size_t> up(t.upper().size());
  std::vector<std::size_t> lo(t.lower().size());
  std::iota(up.begin(), up.end(), 0);
  std::optional<std::string> best;
  do {
    std::iota(lo.begin(), lo.end(), 0);
    do {
      std::string key = serialize_normalized(permute(t, up, lo), resolution);
      if (!best || key < *best) best = std::move(key);
    } while (std::next_permutation(lo.begin(), lo.end()));
  } while (std::next_permutation(up.begin(), up.end()));
  return *best;
}

}  // namespace strigraph
