#ifndef MHOF_PARETO_HPP
#define MHOF_PARETO_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mhof/errors.hpp"

namespace mhof {

/// One observation of all loss terms at an epoch: the empirical risk `ell`
/// and the d regularization values `reg`. All entries are finite; d >= 1.
struct ObjectiveVector {
  double ell;
  std::vector<double> reg;

  ObjectiveVector(double ell_value, std::vector<double> reg_values);

  /// Number of regularization terms d.
  std::size_t dim() const { return reg.size(); }

  /// Concatenated (ell, reg...) coordinates, length d+1.
  std::vector<double> joint() const;

  bool operator==(const ObjectiveVector&) const = default;
};

/// Reference coordinates (ell0, reg0...) for hypervolume, length d+1.
struct RefPoint {
  std::vector<double> values;

  explicit RefPoint(std::vector<double> v);
  static RefPoint from_objective(const ObjectiveVector& o);

  std::size_t dim() const { return values.size(); }
};

/// Append-only record of visited outputs; insertion order is epoch order.
/// Duplicates are permitted: non-dominated filtering is a query.
class Archive {
 public:
  void append(ObjectiveVector o);
  const std::vector<ObjectiveVector>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

 private:
  std::vector<ObjectiveVector> points_;
};

/// Componentwise u <= v (weak Pareto dominance for minimization; reflexive).
bool dominates(std::span<const double> u, std::span<const double> v);

/// Mutual non-dominance: neither vector dominates the other.
bool equivalent(std::span<const double> u, std::span<const double> v);

/// Points of the archive not dominated by any other point, compared on the
/// concatenated (ell, reg) coordinates. Componentwise-equal duplicates keep
/// the earliest entry. The result is an antichain.
std::vector<ObjectiveVector> pareto_filter(const Archive& arch);

/// Exact Lebesgue measure of the union of boxes [p, ref] over the given
/// points (recursive dimension sweep). Coordinates above the reference are
/// clipped to it, so partially-better points earn partial credit. Invariant
/// under permutation and under adding dominated points. Practical for
/// dimensions up to about 8.
double hypervolume(const std::vector<std::vector<double>>& points,
                   const RefPoint& ref);

/// Monte-Carlo estimate of the dominated volume with its binomial standard
/// error. Deterministic for a given seed (counter-based sampler).
struct McEstimate {
  double estimate;
  double stderr_estimate;
};
McEstimate hypervolume_mc(const std::vector<std::vector<double>>& points,
                          const RefPoint& ref, std::uint64_t samples,
                          std::uint64_t seed);

/// Dominated hypervolume of the archive's non-dominated front with respect
/// to the epoch-0 reference. Non-decreasing as the archive grows.
double ehv_of_archive(const Archive& arch, const RefPoint& ref);

}  // namespace mhof

#endif  // MHOF_PARETO_HPP
