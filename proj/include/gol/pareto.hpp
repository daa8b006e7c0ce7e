#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gol/energy.hpp"
#include "gol/error.hpp"

namespace gol {

enum class Orientation { Maximize, Minimize };

/// z1 dominates z2: no worse everywhere, strictly better somewhere.
inline bool dominates(std::span<const double> z1, std::span<const double> z2,
                      Orientation o = Orientation::Maximize) {
  if (z1.size() != z2.size())
    throw ParameterError("objective length mismatch: " + std::to_string(z1.size()) + " vs " + std::to_string(z2.size()));
  bool strict = false;
  for (std::size_t i = 0; i < z1.size(); ++i) {
    const double a = o == Orientation::Maximize ? z1[i] : -z1[i];
    const double b = o == Orientation::Maximize ? z2[i] : -z2[i];
    if (a < b) return false;
    if (a > b) strict = true;
  }
  return strict;
}

inline bool dominates(const ObjectiveVector& z1, const ObjectiveVector& z2, Orientation o = Orientation::Maximize) {
  return dominates(z1.values(), z2.values(), o);
}

struct SolutionRecord {
  std::vector<double> theta;
  ObjectiveVector z;
  int episode = 0;
  int candidate = 0;
  std::uint64_t seed = 0;  // generation stream that produced the evaluated data

  friend bool operator==(const SolutionRecord&, const SolutionRecord&) = default;
};

/// Append-only store of evaluated candidates across episodes.
class Archive {
public:
  Archive() = default;

  void append(SolutionRecord r) {
    if (!records_.empty() && r.z.size() != records_.front().z.size())
      throw ParameterError("archive record has " + std::to_string(r.z.size()) + " objectives, expected " +
                           std::to_string(records_.front().z.size()));
    records_.push_back(std::move(r));
  }

  void append(std::vector<SolutionRecord> batch) {
    for (auto& r : batch) append(std::move(r));
  }

  std::span<const SolutionRecord> records() const noexcept { return records_; }
  const SolutionRecord& operator[](std::size_t i) const { return records_.at(i); }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  // Records with episode <= t.
  Archive prefix_until(int t) const {
    Archive a;
    for (const auto& r : records_)
      if (r.episode <= t) a.records_.push_back(r);
    return a;
  }

  friend bool operator==(const Archive&, const Archive&) = default;

private:
  std::vector<SolutionRecord> records_;
};

namespace detail {

inline std::vector<std::vector<double>> objective_matrix(std::span<const SolutionRecord> records) {
  std::vector<std::vector<double>> z;
  z.reserve(records.size());
  for (const auto& r : records) z.push_back(r.z.values());
  return z;
}

}  // namespace detail

/// Indices of the non-dominated rows, ascending. Rows are visited in
/// lexicographic best-first order, so a row can only be dominated by one
/// visited earlier, and by transitivity, by a row already on the front.
inline std::vector<std::size_t> pareto_front_indices(const std::vector<std::vector<double>>& z,
                                                     Orientation o = Orientation::Maximize) {
  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return o == Orientation::Maximize ? z[a] > z[b] : z[a] < z[b];
  });
  std::vector<std::size_t> front;
  for (std::size_t i : order) {
    bool dominated = false;
    for (std::size_t f : front)
      if (dominates(z[f], z[i], o)) {
        dominated = true;
        break;
      }
    if (!dominated) front.push_back(i);
  }
  std::sort(front.begin(), front.end());
  return front;
}

/// Non-dominated records in insertion order. Equal objective vectors are all kept.
inline std::vector<SolutionRecord> pareto_front(const Archive& archive, Orientation o = Orientation::Maximize) {
  if (archive.empty()) throw DataError("cannot extract a Pareto front from an empty archive");
  std::vector<SolutionRecord> out;
  for (std::size_t i : pareto_front_indices(detail::objective_matrix(archive.records()), o))
    out.push_back(archive[i]);
  return out;
}

/// Fast non-dominated sort: front index per row, 0-based.
inline std::vector<std::size_t> nondominated_ranks(const std::vector<std::vector<double>>& z,
                                                   Orientation o = Orientation::Maximize) {
  const std::size_t n = z.size();
  std::vector<std::vector<std::size_t>> dominated_by_me(n);
  std::vector<std::size_t> dom_count(n, 0), rank(n, 0);
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(z[p], z[q], o))
        dominated_by_me[p].push_back(q);
      else if (dominates(z[q], z[p], o))
        ++dom_count[p];
    }
    if (dom_count[p] == 0) current.push_back(p);
  }
  std::size_t level = 0;
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : current) {
      rank[p] = level;
      for (std::size_t q : dominated_by_me[p])
        if (--dom_count[q] == 0) next.push_back(q);
    }
    current = std::move(next);
    ++level;
  }
  return rank;
}

/// Fronts F1, F2, ... as index lists into `records`, each in insertion order.
inline std::vector<std::vector<std::size_t>> nondominated_sort(std::span<const SolutionRecord> records,
                                                               Orientation o = Orientation::Maximize) {
  if (records.empty()) throw DataError("nothing to sort");
  const auto rank = nondominated_ranks(detail::objective_matrix(records), o);
  const std::size_t levels = *std::max_element(rank.begin(), rank.end()) + 1;
  std::vector<std::vector<std::size_t>> fronts(levels);
  for (std::size_t i = 0; i < rank.size(); ++i) fronts[rank[i]].push_back(i);
  return fronts;
}

/// Crowding distance per row. Rows holding an objective's extreme value get
/// +inf; others add (next larger distinct value - next smaller distinct
/// value) / range. Tied rows therefore score identically and the result is
/// independent of input order. Objectives with zero range contribute 0.
inline std::vector<double> crowding_distance(const std::vector<std::vector<double>>& z) {
  const std::size_t n = z.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (n == 0) throw DataError("crowding distance of an empty front");
  if (n <= 2) return std::vector<double>(n, inf);
  const std::size_t w = z.front().size();
  std::vector<double> d(n, 0.0);
  std::vector<double> vals(n);
  for (std::size_t m = 0; m < w; ++m) {
    for (std::size_t i = 0; i < n; ++i) vals[i] = z[i][m];
    std::vector<double> distinct = vals;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const double range = distinct.back() - distinct.front();
    if (range == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = std::lower_bound(distinct.begin(), distinct.end(), vals[i]);
      if (it == distinct.begin() || it + 1 == distinct.end()) {
        d[i] = inf;
        continue;
      }
      d[i] += (*(it + 1) - *(it - 1)) / range;
    }
  }
  return d;
}

inline std::vector<double> crowding_distance(std::span<const SolutionRecord> front) {
  return crowding_distance(detail::objective_matrix(front));
}

struct ScalarizationWeights {
  std::vector<double> lambda;

  void validate() const {
    if (lambda.empty()) throw ConfigError("scalarization weights are empty");
    bool any = false;
    for (double l : lambda) {
      if (!(l >= 0.0)) throw ConfigError("scalarization weights must be nonnegative");
      any = any || l > 0.0;
    }
    if (!any) throw ConfigError("scalarization weights are all zero");
  }
};

inline double scalarize(std::span<const double> z, const ScalarizationWeights& w) {
  if (z.size() != w.lambda.size())
    throw ParameterError("scalarization length mismatch: " + std::to_string(z.size()) + " vs " +
                         std::to_string(w.lambda.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += w.lambda[i] * z[i];
  return s;
}

inline double scalarize(const ObjectiveVector& z, const ScalarizationWeights& w) { return scalarize(z.values(), w); }

namespace detail {

// Recursive slicing over the last objective. Points must weakly exceed ref.
inline double hv_recursive(std::vector<std::vector<double>> pts, std::span<const double> ref, std::size_t dims) {
  if (pts.empty()) return 0.0;
  if (dims == 1) {
    double best = ref[0];
    for (const auto& p : pts) best = std::max(best, p[0]);
    return best - ref[0];
  }
  const std::size_t last = dims - 1;
  std::sort(pts.begin(), pts.end(), [&](const auto& a, const auto& b) { return a[last] > b[last]; });
  double volume = 0.0;
  std::vector<std::vector<double>> slab;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    slab.push_back(pts[i]);
    const double lower = i + 1 < pts.size() ? pts[i + 1][last] : ref[last];
    const double height = pts[i][last] - lower;
    if (height <= 0.0) continue;
    std::vector<std::vector<double>> proj;
    for (const auto& p : slab) proj.emplace_back(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(last));
    const auto keep = pareto_front_indices(proj, Orientation::Maximize);
    std::vector<std::vector<double>> reduced;
    for (std::size_t k : keep) reduced.push_back(proj[k]);
    volume += height * hv_recursive(std::move(reduced), ref.first(last), last);
  }
  return volume;
}

}  // namespace detail

/// Hypervolume dominated by `points` (maximization) above reference `ref`.
inline double hypervolume(const std::vector<std::vector<double>>& points, std::span<const double> ref) {
  std::vector<std::vector<double>> pts;
  for (const auto& p : points) {
    if (p.size() != ref.size()) throw ParameterError("hypervolume dimension mismatch");
    bool above = true;
    for (std::size_t i = 0; i < p.size(); ++i) above = above && p[i] > ref[i];
    if (above) pts.push_back(p);
  }
  return detail::hv_recursive(std::move(pts), ref, ref.size());
}

}  // namespace gol
