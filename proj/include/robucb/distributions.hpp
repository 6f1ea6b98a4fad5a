#pragma once

// Reward laws with analytically known means and (1+eps)-moments, and the
// two-point constructions used for lower bounds and tightness checks.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "robucb/random.hpp"

namespace robucb {

class Distribution;

struct Bernoulli {
  double p;
};

/// Mass p_hi at hi, the rest at 0.
struct TwoPoint {
  double p_hi;
  double hi;
};

/// Density shape * scale^shape / x^{shape+1} on [scale, inf).
struct Pareto {
  double shape;
  double scale;
};

/// Standard Student t with dof degrees of freedom.
struct StudentT {
  double dof;
};

struct Gaussian {
  double mean;
  double variance;
};

struct Shifted {
  std::shared_ptr<const Distribution> inner;
  double offset;
};

using Law = std::variant<Bernoulli, TwoPoint, Pareto, StudentT, Gaussian, Shifted>;

/// Mean together with E|X|^{1+eps} and E|X-mu|^{1+eps}; a divergent moment is +inf.
struct Moments {
  double mean;
  double raw;
  double central;
};

/// Immutable reward distribution. Construct through the named factories,
/// which validate parameters and throw InvalidInput.
class Distribution {
 public:
  static Distribution bernoulli(double p);
  static Distribution two_point(double p_hi, double hi);
  static Distribution pareto(double shape, double scale = 1.0);
  static Distribution student_t(double dof);
  static Distribution gaussian(double mean, double variance);
  static Distribution shifted(Distribution inner, double offset);

  const Law& law() const noexcept { return law_; }

  double mean() const;

  /// One draw. Inverse CDF for Bernoulli, TwoPoint and Pareto, Box-Muller for
  /// Gaussian, Bailey's polar method for Student t; Shifted adds its offset
  /// to the inner draw, so shifted and unshifted laws couple exactly.
  double sample(RandomStream& stream) const;

  /// E|X - center|^{order}, +inf when divergent.
  double abs_moment(double center, double order) const;

  Moments moments(double epsilon) const;

  std::string describe() const;

  friend bool operator==(const Distribution& a, const Distribution& b);

 private:
  explicit Distribution(Law law) : law_(std::move(law)) {}
  Law law_;
};

/// K >= 2 arms with cached means, gaps and the best mean.
class BanditInstance {
 public:
  explicit BanditInstance(std::vector<Distribution> arms);

  std::size_t size() const noexcept { return arms_.size(); }
  const std::vector<Distribution>& arms() const noexcept { return arms_; }
  const Distribution& arm(std::size_t i) const { return arms_.at(i); }
  std::span<const double> means() const noexcept { return means_; }
  std::span<const double> gaps() const noexcept { return gaps_; }
  double mu_star() const noexcept { return mu_star_; }

  /// Every arm wrapped in Shifted(arm, offset).
  BanditInstance shifted(double offset) const;

  friend bool operator==(const BanditInstance& a, const BanditInstance& b) { return a.arms_ == b.arms_; }

 private:
  std::vector<Distribution> arms_;
  std::vector<double> means_;
  std::vector<double> gaps_;
  double mu_star_;
};

/// The pair used for the gap-dependent lower bound: gamma = (2 gap)^{1/eps},
/// first law TwoPoint(gamma^{1+eps}, 1/gamma), second law
/// TwoPoint(gamma^{1+eps} - gap*gamma, 1/gamma). Means differ by gap and both
/// raw (1+eps)-moments are at most 1. Requires gap in (0, 1/4).
std::pair<Distribution, Distribution> lower_bound_pair(double gap, double epsilon);

/// One copy of the first law and k-1 copies of the second, with
/// gap = (K/n)^{eps/(1+eps)}. Throws InvalidInput when that gap is not in (0, 1/4).
BanditInstance lower_bound_instance(std::size_t arms, std::size_t horizon, double epsilon);

/// TwoPoint(gamma^{1+eps}, 1/gamma) with gamma = 1/(2 n eta), on which the
/// empirical mean's polynomial tail is attained up to a constant.
/// Requires eta > n^{-eps/(1+eps)}.
Distribution lemma1_tightness_instance(std::size_t n, double eta, double epsilon);

}  // namespace robucb
