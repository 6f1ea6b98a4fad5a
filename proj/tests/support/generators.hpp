#pragma once

// Small hand-rolled generators for property tests.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "robucb/distributions.hpp"
#include "robucb/estimators.hpp"

namespace gen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t size(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::uint64_t seed() { return rng_(); }

  double delta() {
    switch (size(0, 2)) {
      case 0: return uniform(0.01, 0.99);
      case 1: return std::exp(-uniform(0.1, 12.0));
      default: return 1.0 / std::pow(static_cast<double>(size(2, 500)), 2.0);
    }
  }

  double epsilon() { return coin(0.3) ? 1.0 : uniform(0.05, 1.0); }

  /// A single value: continuous, heavy-tailed, or from a small integer
  /// alphabet so that ties and repeated values occur.
  double value() {
    switch (size(0, 3)) {
      case 0: return uniform(-5.0, 5.0);
      case 1: return std::normal_distribution<double>(0.0, 2.0)(rng_);
      case 2: return (coin() ? 1.0 : -1.0) * std::pow(uniform(1e-3, 1.0), -1.0 / 1.5);
      default: return static_cast<double>(size(0, 4)) - 1.0;
    }
  }

  std::vector<double> sample(std::size_t lo, std::size_t hi) {
    std::vector<double> x(size(lo, hi));
    for (auto& v : x) v = value();
    return x;
  }

  robucb::Distribution distribution() {
    switch (size(0, 5)) {
      case 0: return robucb::Distribution::bernoulli(uniform(0.0, 1.0));
      case 1: return robucb::Distribution::two_point(uniform(0.0, 1.0), uniform(-3.0, 8.0));
      case 2: return robucb::Distribution::pareto(uniform(2.1, 4.0), uniform(0.5, 2.0));
      case 3: return robucb::Distribution::student_t(uniform(2.5, 8.0));
      case 4: return robucb::Distribution::gaussian(uniform(-2.0, 2.0), uniform(0.1, 3.0));
      default: return robucb::Distribution::shifted(robucb::Distribution::gaussian(0.0, 1.0), uniform(-5.0, 5.0));
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gen
