#include "aedmd/basis.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace aedmd {

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  if (exponents_.empty()) throw InvalidArgument("MultiIndex: dimension must be >= 1");
  for (int e : exponents_)
    if (e < 0) throw InvalidArgument("MultiIndex: negative exponent");
  total_degree_ = std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int e : exponents_) f *= std::tgamma(static_cast<double>(e) + 1.0);
  return f;
}

namespace {

// Exponent vectors of exactly `remaining` total degree over positions [pos, n),
// first coordinate descending.
void enumerate_degree(int n, int pos, int remaining, std::vector<int>& prefix,
                      std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    prefix[static_cast<std::size_t>(pos)] = remaining;
    out.emplace_back(prefix);
    return;
  }
  for (int a = remaining; a >= 0; --a) {
    prefix[static_cast<std::size_t>(pos)] = a;
    enumerate_degree(n, pos + 1, remaining - a, prefix, out);
  }
}

} // namespace

std::vector<MultiIndex> enumerate_multiindices(int dimension, int max_degree) {
  if (dimension < 1) throw InvalidArgument("enumerate_multiindices: dimension must be >= 1");
  if (max_degree < 0) throw InvalidArgument("enumerate_multiindices: degree must be >= 0");
  std::vector<MultiIndex> out;
  out.reserve(monomial_count(dimension, max_degree));
  std::vector<int> prefix(static_cast<std::size_t>(dimension), 0);
  for (int r = 0; r <= max_degree; ++r) enumerate_degree(dimension, 0, r, prefix, out);
  return out;
}

std::size_t monomial_count(int dimension, int max_degree) {
  // C(n + d, d) via the multiplicative formula; every partial product is an integer.
  std::size_t c = 1;
  for (int k = 1; k <= max_degree; ++k)
    c = c * static_cast<std::size_t>(dimension + k) / static_cast<std::size_t>(k);
  return c;
}

MonomialBasis::MonomialBasis(int dimension, int max_degree, WeightScheme scheme)
    : dimension_(dimension), max_degree_(max_degree), scheme_(scheme),
      indices_(enumerate_multiindices(dimension, max_degree)) {
  weights_.reserve(indices_.size());
  for (const auto& alpha : indices_) {
    switch (scheme_) {
    case WeightScheme::Unit: weights_.push_back(1.0); break;
    case WeightScheme::InverseSqrtFactorial:
      weights_.push_back(1.0 / std::sqrt(alpha.factorial()));
      break;
    }
  }
}

std::size_t MonomialBasis::find(const MultiIndex& alpha) const {
  for (std::size_t i = 0; i < indices_.size(); ++i)
    if (indices_[i] == alpha) return i;
  return indices_.size();
}

std::vector<DegreeBlock> degree_offsets(const MonomialBasis& basis) {
  std::vector<DegreeBlock> blocks;
  std::size_t start = 0;
  for (int r = 0; r <= basis.max_degree(); ++r) {
    std::size_t size = 0;
    while (start + size < basis.size() && basis.index(start + size).total_degree() == r) ++size;
    blocks.push_back({r, start, size});
    start += size;
  }
  return blocks;
}

} // namespace aedmd
