#include "mhof/trace.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace mhof {

namespace {

using ordered_json = nlohmann::ordered_json;

void require_dim(const std::vector<double>& v, std::uint64_t d, const char* field) {
  if (v.size() != d) {
    throw DimensionError(std::string("trace record field '") + field +
                         "' has length " + std::to_string(v.size()) +
                         ", expected d = " + std::to_string(d));
  }
}

}  // namespace

Trace::Trace(TraceMeta meta) : meta_(std::move(meta)) {
  if (meta_.d == 0) throw ConfigError("trace meta: d must be >= 1");
  if (meta_.budget == 0) throw ConfigError("trace meta: budget must be >= 1");
}

void Trace::check_record_shape(const EpochRecord& rec) const {
  require_dim(rec.reg, meta_.d, "reg");
  require_dim(rec.mu, meta_.d, "mu");
  require_dim(rec.b, meta_.d, "b");
  if (epochs_.size() > meta_.budget) {
    throw SequencingError("trace already holds budget+1 records");
  }
  if (rec.k != epochs_.size()) {
    throw SequencingError("epoch index " + std::to_string(rec.k) +
                          " out of order, expected " +
                          std::to_string(epochs_.size()));
  }
}

void Trace::append(std::uint64_t k, double ell, std::vector<double> reg,
                   std::vector<double> mu, std::vector<double> b, bool shrank) {
  EpochRecord rec{k, ell, std::move(reg), std::move(mu), std::move(b), shrank, 0.0};
  check_record_shape(rec);
  if (rec.k == 0 && rec.shrank) {
    throw SequencingError("record 0 cannot be a shrink epoch");
  }
  // A point weakly dominated by an earlier observation leaves the archive's
  // non-dominated front — and therefore the hypervolume — unchanged, so the
  // previous value carries over exactly.
  bool covered = false;
  for (const auto& prior : epochs_) {
    bool dom = prior.ell <= rec.ell;
    for (std::size_t i = 0; i < rec.reg.size() && dom; ++i) {
      dom = prior.reg[i] <= rec.reg[i];
    }
    if (dom) {
      covered = true;
      break;
    }
  }
  epochs_.push_back(std::move(rec));
  epochs_.back().ehv =
      covered ? epochs_[epochs_.size() - 2].ehv : ehv_of_archive(archive(), ref_point());
}

Trace Trace::from_records(TraceMeta meta, std::vector<EpochRecord> records) {
  Trace t(std::move(meta));
  for (auto& rec : records) {
    t.check_record_shape(rec);
    t.epochs_.push_back(std::move(rec));
  }
  return t;
}

RefPoint Trace::ref_point() const {
  if (epochs_.empty()) throw SequencingError("trace is empty: no reference point");
  return RefPoint::from_objective(ObjectiveVector(epochs_[0].ell, epochs_[0].reg));
}

Archive Trace::archive() const {
  Archive arch;
  for (const auto& rec : epochs_) {
    arch.append(ObjectiveVector(rec.ell, rec.reg));
  }
  return arch;
}

std::uint64_t last_shrink_epoch(const Trace& trace) {
  const auto& ep = trace.epochs();
  for (auto it = ep.rbegin(); it != ep.rend(); ++it) {
    if (it->shrank) return it->k;
  }
  return 0;
}

namespace {

ordered_json meta_to_json(const TraceMeta& m) {
  ordered_json j;
  j["problem_digest"] = m.problem_digest;
  j["scheme_digest"] = m.scheme_digest;
  j["seed"] = m.seed;
  j["d"] = m.d;
  j["B"] = m.budget;
  return j;
}

ordered_json record_to_json(const EpochRecord& r) {
  ordered_json j;
  j["k"] = r.k;
  j["ell"] = r.ell;
  j["reg"] = r.reg;
  j["mu"] = r.mu;
  j["b"] = r.b;
  j["shrank"] = r.shrank;
  j["ehv"] = r.ehv;
  return j;
}

ordered_json parse_line(const std::string& line, std::size_t lineno) {
  ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded()) {
    throw ParseError("malformed JSON object", lineno);
  }
  if (!j.is_object()) {
    throw ParseError("expected a JSON object", lineno);
  }
  return j;
}

void reject_unknown_keys(const ordered_json& j,
                         std::initializer_list<const char*> allowed,
                         std::size_t lineno) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError("unknown field '" + item.key() + "'", lineno);
    }
  }
}

template <typename T>
T field(const ordered_json& j, const char* key, std::size_t lineno) {
  if (!j.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'", lineno);
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("field '") + key + "' has the wrong type", lineno);
  }
}

}  // namespace

void save_trace(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open '" + path.string() + "' for writing");
  }
  out << meta_to_json(trace.meta()).dump() << '\n';
  for (const auto& rec : trace.epochs()) {
    out << record_to_json(rec).dump() << '\n';
  }
  if (!out) {
    throw Error("write to '" + path.string() + "' failed");
  }
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open '" + path.string() + "' for reading");
  }

  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) {
    throw ParseError("missing meta line", 1);
  }
  lineno = 1;
  const ordered_json jm = parse_line(line, lineno);
  reject_unknown_keys(jm, {"problem_digest", "scheme_digest", "seed", "d", "B"},
                      lineno);
  TraceMeta meta;
  meta.problem_digest = field<std::string>(jm, "problem_digest", lineno);
  meta.scheme_digest = field<std::string>(jm, "scheme_digest", lineno);
  meta.seed = field<std::uint64_t>(jm, "seed", lineno);
  meta.d = field<std::uint64_t>(jm, "d", lineno);
  meta.budget = field<std::uint64_t>(jm, "B", lineno);

  std::vector<EpochRecord> records;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const ordered_json jr = parse_line(line, lineno);
    reject_unknown_keys(jr, {"k", "ell", "reg", "mu", "b", "shrank", "ehv"},
                        lineno);
    EpochRecord rec;
    rec.k = field<std::uint64_t>(jr, "k", lineno);
    rec.ell = field<double>(jr, "ell", lineno);
    rec.reg = field<std::vector<double>>(jr, "reg", lineno);
    rec.mu = field<std::vector<double>>(jr, "mu", lineno);
    rec.b = field<std::vector<double>>(jr, "b", lineno);
    rec.shrank = field<bool>(jr, "shrank", lineno);
    rec.ehv = field<double>(jr, "ehv", lineno);
    if (rec.reg.size() != meta.d || rec.mu.size() != meta.d ||
        rec.b.size() != meta.d) {
      throw SchemaError("line " + std::to_string(lineno) +
                        ": record vectors disagree with meta d = " +
                        std::to_string(meta.d));
    }
    if (rec.k != records.size()) {
      throw SchemaError("line " + std::to_string(lineno) +
                        ": epoch index " + std::to_string(rec.k) +
                        " out of order, expected " +
                        std::to_string(records.size()));
    }
    records.push_back(std::move(rec));
  }
  if (records.size() > meta.budget + 1) {
    throw SchemaError("trace holds " + std::to_string(records.size()) +
                      " records, budget admits at most " +
                      std::to_string(meta.budget + 1));
  }
  return Trace::from_records(std::move(meta), std::move(records));
}

}  // namespace mhof
