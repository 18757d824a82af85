#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mhof/errors.hpp"
#include "mhof/pareto.hpp"

namespace mhof {

/// One per-epoch observation: loss terms, controller outputs, shrink flag,
/// and the dominated hypervolume of the run archive up to this epoch.
struct EpochRecord {
  std::uint64_t k = 0;
  double ell = 0.0;
  std::vector<double> reg;
  std::vector<double> mu;
  std::vector<double> b;
  bool shrank = false;
  double ehv = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct TraceMeta {
  std::string problem_digest;
  std::string scheme_digest;
  std::uint64_t seed = 0;
  std::uint64_t d = 0;
  std::uint64_t budget = 0;  // B; a trace holds at most B+1 records (k = 0..B)

  bool operator==(const TraceMeta&) const = default;
};

/// Append-only per-run record. `append` derives the hypervolume column from
/// the archive of (ell, reg) points seen so far, with record 0 as reference;
/// `from_records` trusts stored values so saved traces can be audited as-is.
class Trace {
 public:
  explicit Trace(TraceMeta meta);

  /// Requires k == size() (dense from 0); record 0 must have shrank = false.
  void append(std::uint64_t k, double ell, std::vector<double> reg,
              std::vector<double> mu, std::vector<double> b, bool shrank);

  /// Rebuilds a trace from stored records without recomputing ehv. Validates
  /// only structure (dense k from 0, dimensions, record cap) so that value
  /// corruption remains observable to downstream audits.
  static Trace from_records(TraceMeta meta, std::vector<EpochRecord> records);

  const TraceMeta& meta() const { return meta_; }
  const std::vector<EpochRecord>& epochs() const { return epochs_; }
  std::size_t size() const { return epochs_.size(); }
  bool empty() const { return epochs_.empty(); }

  /// Epoch-0 reference point (ell, reg); throws if the trace is empty.
  RefPoint ref_point() const;

  /// Archive of (ell, reg) observations in epoch order.
  Archive archive() const;

  bool operator==(const Trace& other) const {
    return meta_ == other.meta_ && epochs_ == other.epochs_;
  }

 private:
  void check_record_shape(const EpochRecord& rec) const;

  TraceMeta meta_;
  std::vector<EpochRecord> epochs_;
};

/// Epoch index of the last shrink event, 0 if none occurred.
std::uint64_t last_shrink_epoch(const Trace& trace);

/// JSON-lines persistence: line 1 is the meta object, each later line one
/// epoch record with fields k, ell, reg, mu, b, shrank, ehv. Numbers are
/// written as shortest round-trip decimals, so save/load is bit-exact.
void save_trace(const Trace& trace, const std::filesystem::path& path);
Trace load_trace(const std::filesystem::path& path);

}  // namespace mhof
