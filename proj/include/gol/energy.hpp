#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gol/classifier.hpp"
#include "gol/core.hpp"
#include "gol/error.hpp"

namespace gol {

struct EnergyMode {
  enum class Kind { Bhattacharyya, QNorm, LogLikelihood };
  enum class Aggregation { Mean, Sum };

  Kind kind = Kind::Bhattacharyya;
  double q = 2.0;  // norm order, QNorm only
  Aggregation aggregation = Aggregation::Mean;
  int bins = 64;  // histogram bins per channel for feature-based modes

  void validate() const {
    if (kind == Kind::QNorm && !(q >= 1.0)) throw ConfigError("q-norm order must be >= 1");
    if (bins < 2) throw ConfigError("histogram needs at least 2 bins");
  }
};

/// Objectives for one candidate: J_1..J_K followed by the accuracy.
struct ObjectiveVector {
  std::vector<double> energies;
  double accuracy = 0.0;

  std::size_t size() const noexcept { return energies.size() + 1; }

  std::vector<double> values() const {
    std::vector<double> v = energies;
    v.push_back(accuracy);
    return v;
  }

  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

/// One Bhattacharyya term between a regularization vector s and a synthetic
/// vector x: sqrt(1 - sum_v sqrt(s_v x_v) / sqrt(mean(s) mean(x) N^2)).
inline double bhattacharyya_term(const FeatureVector& s, const FeatureVector& x) {
  if (s.size() != x.size())
    throw ParameterError("feature length mismatch: " + std::to_string(s.size()) + " vs " + std::to_string(x.size()));
  if (s.size() == 0) throw ParameterError("empty feature vector");
  const double ms = s.mean(), mx = x.mean();
  if (!(ms > 0.0)) throw ParameterError("regularization feature vector has zero mean");
  if (!(mx > 0.0)) throw ParameterError("synthetic feature vector has zero mean");
  double acc = 0.0, sum_s = 0.0, sum_x = 0.0;
  for (std::size_t v = 0; v < s.size(); ++v) {
    acc += std::sqrt(s.values[v] * x.values[v]);
    sum_s += s.values[v];
    sum_x += x.values[v];
  }
  // mean(s) mean(x) N^2 == sum(s) sum(x); the sum form makes s == x cancel exactly.
  const double radicand = 1.0 - acc / std::sqrt(sum_s * sum_x);
  return std::sqrt(std::clamp(radicand, 0.0, 1.0));
}

namespace detail {

inline void check_pair_sets(std::span<const FeatureVector> synthetic, std::span<const FeatureVector> regularization) {
  if (synthetic.empty()) throw DataError("no synthetic feature vectors for this class");
  if (regularization.empty()) throw DataError("no regularization feature vectors for this class");
  const std::size_t n = regularization.front().size();
  for (const auto& f : synthetic)
    if (f.size() != n) throw ParameterError("feature length mismatch within energy evaluation");
  for (const auto& f : regularization)
    if (f.size() != n) throw ParameterError("feature length mismatch within energy evaluation");
}

inline double aggregate(double sum, std::size_t pairs, EnergyMode::Aggregation agg) {
  return agg == EnergyMode::Aggregation::Mean ? sum / static_cast<double>(pairs) : sum;
}

}  // namespace detail

inline double bhattacharyya_energy(std::span<const FeatureVector> synthetic,
                                   std::span<const FeatureVector> regularization,
                                   EnergyMode::Aggregation agg = EnergyMode::Aggregation::Mean) {
  detail::check_pair_sets(synthetic, regularization);
  for (std::size_t i = 0; i < regularization.size(); ++i)
    if (!(regularization[i].mean() > 0.0))
      throw ParameterError("regularization feature vector " + std::to_string(i) + " is all zero");
  for (std::size_t j = 0; j < synthetic.size(); ++j)
    if (!(synthetic[j].mean() > 0.0)) throw ParameterError("synthetic feature vector " + std::to_string(j) + " is all zero");
  double sum = 0.0;
  for (const auto& s : regularization)
    for (const auto& x : synthetic) sum += bhattacharyya_term(s, x);
  return detail::aggregate(sum, synthetic.size() * regularization.size(), agg);
}

inline double qnorm_distance(const FeatureVector& a, const FeatureVector& b, double q) {
  if (a.size() != b.size()) throw ParameterError("feature length mismatch");
  double acc = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v) acc += std::pow(std::abs(a.values[v] - b.values[v]), q);
  return std::pow(acc, 1.0 / q);
}

// Pairwise q-norm distance; the additive constant is taken as 0.
inline double qnorm_energy(std::span<const FeatureVector> synthetic, std::span<const FeatureVector> regularization,
                           double q, EnergyMode::Aggregation agg = EnergyMode::Aggregation::Mean) {
  if (!(q >= 1.0)) throw ConfigError("q-norm order must be >= 1, got " + std::to_string(q));
  detail::check_pair_sets(synthetic, regularization);
  double sum = 0.0;
  for (const auto& e : regularization)
    for (const auto& x : synthetic) sum += qnorm_distance(e, x, q);
  return detail::aggregate(sum, synthetic.size() * regularization.size(), agg);
}

/// Mean over the given samples of log p(k | sample) under the classifier.
template <typename T>
double loglik_energy(const BasicClassifier<T>& classifier, std::span<const LabeledSample> regularization_k, int k) {
  classifier.require_trained();
  if (k < 0 || k >= classifier.classes()) throw ParameterError("class index " + std::to_string(k) + " out of range");
  if (regularization_k.empty()) throw DataError("no regularization samples for class " + std::to_string(k));
  double sum = 0.0;
  for (const auto& s : regularization_k) {
    const auto p = classifier.predict_proba(s.image);
    sum += std::log(std::max(p[static_cast<std::size_t>(k)], std::numeric_limits<double>::min()));
  }
  return sum / static_cast<double>(regularization_k.size());
}

inline std::vector<std::vector<FeatureVector>> features_by_class(std::span<const LabeledSample> samples, int classes,
                                                                 int bins) {
  std::vector<std::vector<FeatureVector>> out(static_cast<std::size_t>(classes));
  for (const auto& s : samples) out.at(static_cast<std::size_t>(s.label)).push_back(featurize(s.image, bins));
  return out;
}

/// (J_1..J_K, a): J_k compares class-k synthetic samples against class-k
/// regularization samples; a is the classifier's accuracy on `eval_set`.
template <typename T>
ObjectiveVector evaluate_objectives(const SyntheticDataset& synthetic, const RegularizationSet& regularization,
                                    const BasicClassifier<T>& classifier, std::span<const LabeledSample> eval_set,
                                    const EnergyMode& mode) {
  mode.validate();
  synthetic.require_coverage();
  const int k = synthetic.classes;
  if (regularization.classes() != k)
    throw DataError("regularization set has " + std::to_string(regularization.classes()) + " classes, expected " +
                    std::to_string(k));
  ObjectiveVector z;
  z.energies.resize(static_cast<std::size_t>(k));
  if (mode.kind == EnergyMode::Kind::LogLikelihood) {
    std::vector<std::vector<LabeledSample>> by(static_cast<std::size_t>(k));
    for (const auto& s : regularization.samples()) by[static_cast<std::size_t>(s.label)].push_back(s);
    for (int c = 0; c < k; ++c) z.energies[static_cast<std::size_t>(c)] = loglik_energy(classifier, by[static_cast<std::size_t>(c)], c);
  } else {
    const auto syn = features_by_class(synthetic.samples, k, mode.bins);
    const auto reg = features_by_class(regularization.samples(), k, mode.bins);
    for (int c = 0; c < k; ++c) {
      const auto i = static_cast<std::size_t>(c);
      if (reg[i].empty()) throw DataError("regularization set has no samples of class " + std::to_string(c));
      z.energies[i] = mode.kind == EnergyMode::Kind::Bhattacharyya
                          ? bhattacharyya_energy(syn[i], reg[i], mode.aggregation)
                          : qnorm_energy(syn[i], reg[i], mode.q, mode.aggregation);
    }
  }
  z.accuracy = accuracy(classifier, eval_set);
  return z;
}

}  // namespace gol
