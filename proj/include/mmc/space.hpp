#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mmc/errors.hpp"
#include "mmc/tol.hpp"
#include "mmc/rng.hpp"

namespace mmc {

/// A finite metric measure space: points with a dense symmetric distance
/// matrix and nonnegative weights. Total mass is whatever the weights sum to,
/// it is not normalized. Instances are immutable after construction.
class FiniteMMSpace {
 public:
  // Validation is cubic in the point count, so beyond this size the triangle
  // inequality is checked on a seeded sample of triples instead of all of them.
  static constexpr std::size_t kFullValidationLimit = 128;
  static constexpr std::size_t kSampledTriples = 200000;

  FiniteMMSpace(std::vector<std::string> labels, std::vector<double> dist,
                std::vector<double> weights)
      : labels_(std::move(labels)), d_(std::move(dist)), w_(std::move(weights)) {
    n_ = labels_.size();
    if (n_ == 0) throw EmptyMeasure("space has no points");
    if (d_.size() != n_ * n_) throw BadSpec("distance matrix size mismatch");
    if (w_.size() != n_) throw BadSpec("weight vector size mismatch");
    validate();
    finalize();
  }

  std::size_t size() const { return n_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& weights() const { return w_; }
  double weight(std::size_t i) const { return w_[i]; }
  double dist(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  double total_mass() const { return mass_; }
  double diameter() const { return diam_; }

  // Indices of points with positive weight, ascending.
  const std::vector<std::size_t>& support() const { return support_; }

  std::vector<double> row(std::size_t i) const {
    return std::vector<double>(d_.begin() + i * n_, d_.begin() + (i + 1) * n_);
  }

 private:
  void validate() {
    for (std::size_t i = 0; i < n_; ++i) {
      if (w_[i] < 0.0) throw NegativeWeight("negative weight at point " + labels_[i]);
      if (d_[i * n_ + i] != 0.0) throw BadSpec("nonzero diagonal at " + labels_[i]);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double a = d_[i * n_ + j], b = d_[j * n_ + i];
        if (a < 0.0) throw BadSpec("negative distance");
        if (std::abs(a - b) > 1e-12) throw AsymmetricMatrix("d(" + labels_[i] + "," + labels_[j] + ") != transposed entry");
      }
    }
    if (n_ <= kFullValidationLimit) {
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
          for (std::size_t k = 0; k < n_; ++k) check_triangle(i, j, k);
    } else {
      Rng rng(0x5eedu ^ static_cast<std::uint64_t>(n_));
      for (std::size_t t = 0; t < kSampledTriples; ++t)
        check_triangle(rng.index(n_), rng.index(n_), rng.index(n_));
    }
  }

  void check_triangle(std::size_t i, std::size_t j, std::size_t k) const {
    if (d_[i * n_ + k] > d_[i * n_ + j] + d_[j * n_ + k] + tol::kTriangle)
      throw TriangleViolation("triangle inequality fails at (" + labels_[i] + "," +
                              labels_[j] + "," + labels_[k] + ")");
  }

  void finalize() {
    mass_ = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (w_[i] > 0.0) support_.push_back(i);
      mass_ += w_[i];
    }
    if (support_.empty()) throw EmptyMeasure("all weights are zero");
    diam_ = 0.0;
    for (std::size_t a : support_)
      for (std::size_t b : support_)
        diam_ = std::max(diam_, dist(a, b));
  }

  std::size_t n_ = 0;
  std::vector<std::string> labels_;
  std::vector<double> d_;
  std::vector<double> w_;
  std::vector<std::size_t> support_;
  double mass_ = 0.0;
  double diam_ = 0.0;
};

/// Point subset of a space, kept as a membership vector over point indices.
struct SubsetMask {
  std::vector<char> member;

  static SubsetMask of(std::size_t n) { return SubsetMask{std::vector<char>(n, 0)}; }

  std::size_t size() const { return member.size(); }
  bool empty() const {
    return std::none_of(member.begin(), member.end(), [](char c) { return c != 0; });
  }
  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < member.size(); ++i)
      if (member[i]) out.push_back(i);
    return out;
  }
};

inline double subset_mass(const FiniteMMSpace& X, const SubsetMask& A) {
  double m = 0.0;
  for (std::size_t i = 0; i < A.member.size(); ++i)
    if (A.member[i]) m += X.weight(i);
  return m;
}

// min over a in A of d(y, a). A must be nonempty.
inline double distance_to_subset(const FiniteMMSpace& X, std::size_t y, const SubsetMask& A) {
  if (A.size() != X.size()) throw BadSpec("subset mask size mismatch");
  double best = -1.0;
  for (std::size_t a = 0; a < A.member.size(); ++a)
    if (A.member[a]) {
      const double d = X.dist(y, a);
      if (best < 0.0 || d < best) best = d;
    }
  if (best < 0.0) throw EmptySubset("distance to empty subset");
  return best;
}

// r-neighborhood of A. The open variant takes d(y,A) < r, which is the one the
// concentration function is defined with; closed takes d(y,A) <= r.
inline SubsetMask neighborhood(const FiniteMMSpace& X, const SubsetMask& A, double r,
                               bool closed = false) {
  if (A.empty()) throw EmptySubset("neighborhood of empty subset");
  SubsetMask out = SubsetMask::of(X.size());
  for (std::size_t y = 0; y < X.size(); ++y) {
    const double d = distance_to_subset(X, y, A);
    out.member[y] = closed ? (d <= r) : (d < r);
  }
  return out;
}

}  // namespace mmc
