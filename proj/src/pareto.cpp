#include "mhof/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>
#include <utility>

#include "mhof/rng.hpp"

namespace mhof {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericError(std::string(what) + " contains a non-finite entry");
    }
  }
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

ObjectiveVector::ObjectiveVector(double ell_value, std::vector<double> reg_values)
    : ell(ell_value), reg(std::move(reg_values)) {
  if (reg.empty()) {
    throw DimensionError("ObjectiveVector: needs at least one regularization term");
  }
  if (!std::isfinite(ell)) {
    throw NumericError("ObjectiveVector: ell is non-finite");
  }
  require_finite(reg, "ObjectiveVector: reg");
}

std::vector<double> ObjectiveVector::joint() const {
  std::vector<double> out;
  out.reserve(reg.size() + 1);
  out.push_back(ell);
  out.insert(out.end(), reg.begin(), reg.end());
  return out;
}

RefPoint::RefPoint(std::vector<double> v) : values(std::move(v)) {
  if (values.empty()) {
    throw DimensionError("RefPoint: empty");
  }
  require_finite(values, "RefPoint");
}

RefPoint RefPoint::from_objective(const ObjectiveVector& o) {
  return RefPoint(o.joint());
}

void Archive::append(ObjectiveVector o) {
  if (!points_.empty()) {
    require_same_dim(points_.front().dim(), o.dim(), "Archive::append");
  }
  points_.push_back(std::move(o));
}

bool dominates(std::span<const double> u, std::span<const double> v) {
  require_same_dim(u.size(), v.size(), "dominates");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] > v[i]) return false;
  }
  return true;
}

bool equivalent(std::span<const double> u, std::span<const double> v) {
  return !dominates(u, v) && !dominates(v, u);
}

std::vector<ObjectiveVector> pareto_filter(const Archive& arch) {
  const auto& pts = arch.points();
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> joint(n);
  for (std::size_t i = 0; i < n; ++i) joint[i] = pts[i].joint();

  std::vector<ObjectiveVector> front;
  for (std::size_t i = 0; i < n; ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < n && keep; ++j) {
      if (j == i) continue;
      if (!dominates(joint[j], joint[i])) continue;
      if (joint[j] != joint[i]) {
        keep = false;  // strictly dominated
      } else if (j < i) {
        keep = false;  // duplicate of an earlier epoch
      }
    }
    if (keep) front.push_back(pts[i]);
  }
  return front;
}

namespace {

// Clip coordinates to the reference and drop points whose box [p, ref] has
// zero volume. Result: every surviving coordinate is strictly below ref.
std::vector<std::vector<double>> clip_to_ref(
    const std::vector<std::vector<double>>& points, const RefPoint& ref) {
  std::vector<std::vector<double>> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    require_same_dim(p.size(), ref.values.size(), "hypervolume");
    std::vector<double> q(p.size());
    bool positive_volume = true;
    for (std::size_t j = 0; j < p.size(); ++j) {
      q[j] = std::min(p[j], ref.values[j]);
      if (q[j] >= ref.values[j]) positive_volume = false;
    }
    if (positive_volume) out.push_back(std::move(q));
  }
  return out;
}

// Measure of the union of boxes [p, ref] by slicing on the last coordinate
// and recursing on the projection; points must already lie strictly below
// ref in every coordinate. Each level keeps only the non-dominated slab
// projections (dominated boxes add nothing to the union) and reuses the
// recursive sub-volume while the slab front is unchanged; both cuts are
// exact. All per-level scratch lives in flat buffers reused across the
// recursion, so the hot path performs no allocation.
class SweepEngine {
 public:
  SweepEngine(std::size_t dims, const double* ref)
      : levels_(dims + 1), ref_(ref) {}

  /// Input rows of the given level, flat with stride == level.
  std::vector<double>& input(std::size_t level) { return levels_[level].input; }

  double measure(std::size_t dim) {
    Level& lv = levels_[dim];
    const std::vector<double>& in = lv.input;
    const std::size_t n = in.size() / dim;
    if (n == 0) return 0.0;
    if (dim == 1) {
      double lo = in[0];
      for (std::size_t i = 1; i < n; ++i) lo = std::min(lo, in[i]);
      return ref_[0] - lo;
    }

    lv.order.resize(n);
    for (std::size_t i = 0; i < n; ++i) lv.order[i] = i;
    std::sort(lv.order.begin(), lv.order.end(),
              [&in, dim](std::size_t a, std::size_t b) {
                const double za = in[a * dim + dim - 1];
                const double zb = in[b * dim + dim - 1];
                if (za != zb) return za < zb;
                return a < b;
              });

    const std::size_t m = dim - 1;  // slab stride
    lv.slab.clear();
    double total = 0.0;
    double slab_volume = 0.0;
    bool slab_dirty = false;
    for (std::size_t j = 0; j < n; ++j) {
      const double* row = in.data() + lv.order[j] * dim;
      bool covered = false;
      for (std::size_t r = 0; r < lv.slab.size() && !covered; r += m) {
        bool dom = true;
        for (std::size_t c = 0; c < m; ++c) {
          if (lv.slab[r + c] > row[c]) {
            dom = false;
            break;
          }
        }
        covered = dom;
      }
      if (!covered) {
        std::size_t w = 0;
        for (std::size_t r = 0; r < lv.slab.size(); r += m) {
          bool dominated = true;
          for (std::size_t c = 0; c < m; ++c) {
            if (row[c] > lv.slab[r + c]) {
              dominated = false;
              break;
            }
          }
          if (!dominated) {
            if (w != r) {
              std::copy(lv.slab.begin() + r, lv.slab.begin() + r + m,
                        lv.slab.begin() + w);
            }
            w += m;
          }
        }
        lv.slab.resize(w);
        lv.slab.insert(lv.slab.end(), row, row + m);
        slab_dirty = true;
      }
      const double z_lo = row[dim - 1];
      const double z_hi = (j + 1 < n) ? in[lv.order[j + 1] * dim + dim - 1]
                                      : ref_[dim - 1];
      if (z_hi > z_lo) {
        if (slab_dirty) {
          levels_[m].input.assign(lv.slab.begin(), lv.slab.end());
          slab_volume = measure(m);
          slab_dirty = false;
        }
        total += (z_hi - z_lo) * slab_volume;
      }
    }
    return total;
  }

 private:
  struct Level {
    std::vector<double> input;
    std::vector<std::size_t> order;
    std::vector<double> slab;
  };

  std::vector<Level> levels_;
  const double* ref_;
};

// Scratch buffers shared by the dedicated 3-d and 4-d routines.
struct Hv34Scratch {
  std::vector<std::size_t> order3;  // 3-d sort permutation
  std::vector<std::pair<double, double>> stairs;  // 2-d staircase: x asc, y desc
  std::vector<std::size_t> order4;  // 4-d sort permutation
  std::vector<double> front3;       // non-dominated 3-d projections, stride 3
  std::vector<double> overlaps;     // overlap boxes of one insertion, stride 3
};

// Exact 3-d measure by a z-sweep that maintains the staircase of
// non-dominated (x, y) projections and its covered area incrementally.
// Points are flat with stride 3 and lie strictly below ref componentwise.
double hv3(const double* pts, std::size_t n, const double* ref, Hv34Scratch& ws) {
  if (n == 0) return 0.0;
  const double rx = ref[0];
  const double ry = ref[1];
  const double rz = ref[2];

  ws.order3.resize(n);
  for (std::size_t i = 0; i < n; ++i) ws.order3[i] = i;
  std::sort(ws.order3.begin(), ws.order3.end(),
            [pts](std::size_t a, std::size_t b) {
              const double za = pts[a * 3 + 2];
              const double zb = pts[b * 3 + 2];
              if (za != zb) return za < zb;
              return a < b;
            });

  ws.stairs.clear();
  double area = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double* p = pts + ws.order3[j] * 3;
    const double x = p[0];
    const double y = p[1];
    const double z = p[2];

    auto lb = std::lower_bound(
        ws.stairs.begin(), ws.stairs.end(), x,
        [](const std::pair<double, double>& e, double key) { return e.first < key; });
    const double y_left = (lb == ws.stairs.begin()) ? ry : std::prev(lb)->second;
    double y_cover = y_left;  // lowest stair y over x' <= x
    if (lb != ws.stairs.end() && lb->first == x) y_cover = std::min(y_cover, lb->second);

    if (y < y_cover) {  // p extends the staircase
      const double x1 = (lb == ws.stairs.end()) ? rx : lb->first;
      auto it = lb;
      double removed = 0.0;  // area of stairs now dominated by p
      while (it != ws.stairs.end() && it->second >= y) {
        const double seg_end =
            (std::next(it) == ws.stairs.end()) ? rx : std::next(it)->first;
        removed += (seg_end - it->first) * (ry - it->second);
        ++it;
      }
      const double x_end = (it == ws.stairs.end()) ? rx : it->first;
      area += (x_end - x) * (ry - y) - (x1 - x) * (ry - y_left) - removed;
      auto pos = ws.stairs.erase(lb, it);
      ws.stairs.insert(pos, {x, y});
    }

    const double z_hi = (j + 1 < n) ? pts[ws.order3[j + 1] * 3 + 2] : rz;
    if (z_hi > z) total += (z_hi - z) * area;
  }
  return total;
}

// Exact 4-d measure: sweep on the last coordinate, growing the 3-d front
// volume by each new point's exclusive contribution — its box volume minus
// the 3-d measure of its overlaps with the existing front.
double hv4(const double* pts, std::size_t n, const double* ref, Hv34Scratch& ws) {
  if (n == 0) return 0.0;
  ws.order4.resize(n);
  for (std::size_t i = 0; i < n; ++i) ws.order4[i] = i;
  std::sort(ws.order4.begin(), ws.order4.end(),
            [pts](std::size_t a, std::size_t b) {
              const double wa = pts[a * 4 + 3];
              const double wb = pts[b * 4 + 3];
              if (wa != wb) return wa < wb;
              return a < b;
            });

  ws.front3.clear();
  double volume3 = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double* p = pts + ws.order4[j] * 4;
    bool covered = false;
    for (std::size_t r = 0; r < ws.front3.size() && !covered; r += 3) {
      covered = ws.front3[r] <= p[0] && ws.front3[r + 1] <= p[1] &&
                ws.front3[r + 2] <= p[2];
    }
    if (!covered) {
      ws.overlaps.clear();
      for (std::size_t r = 0; r < ws.front3.size(); r += 3) {
        ws.overlaps.push_back(std::max(ws.front3[r], p[0]));
        ws.overlaps.push_back(std::max(ws.front3[r + 1], p[1]));
        ws.overlaps.push_back(std::max(ws.front3[r + 2], p[2]));
      }
      const double box =
          (ref[0] - p[0]) * (ref[1] - p[1]) * (ref[2] - p[2]);
      const double shared = hv3(ws.overlaps.data(), ws.overlaps.size() / 3, ref, ws);
      // The exclusive contribution is non-negative by construction; the
      // guard only absorbs last-ulp rounding of box minus shared.
      volume3 += std::max(box - shared, 0.0);

      std::size_t w = 0;
      for (std::size_t r = 0; r < ws.front3.size(); r += 3) {
        const bool dominated = p[0] <= ws.front3[r] && p[1] <= ws.front3[r + 1] &&
                               p[2] <= ws.front3[r + 2];
        if (!dominated) {
          if (w != r) {
            std::copy(ws.front3.begin() + r, ws.front3.begin() + r + 3,
                      ws.front3.begin() + w);
          }
          w += 3;
        }
      }
      ws.front3.resize(w);
      ws.front3.insert(ws.front3.end(), p, p + 3);
    }

    const double w_lo = p[3];
    const double w_hi = (j + 1 < n) ? pts[ws.order4[j + 1] * 4 + 3] : ref[3];
    if (w_hi > w_lo) total += (w_hi - w_lo) * volume3;
  }
  return total;
}

}  // namespace

double hypervolume(const std::vector<std::vector<double>>& points,
                   const RefPoint& ref) {
  const std::size_t dim = ref.values.size();
  std::vector<double> flat;
  flat.reserve(points.size() * dim);
  for (const auto& p : points) {
    require_same_dim(p.size(), dim, "hypervolume");
    const std::size_t base = flat.size();
    bool positive_volume = true;
    for (std::size_t j = 0; j < dim; ++j) {
      const double q = std::min(p[j], ref.values[j]);
      if (q >= ref.values[j]) positive_volume = false;
      flat.push_back(q);
    }
    if (!positive_volume) flat.resize(base);
  }
  const std::size_t n = flat.size() / dim;

  Hv34Scratch ws;
  if (dim == 3) return hv3(flat.data(), n, ref.values.data(), ws);
  if (dim == 4) return hv4(flat.data(), n, ref.values.data(), ws);
  SweepEngine engine(dim, ref.values.data());
  engine.input(dim) = std::move(flat);
  return engine.measure(dim);
}

McEstimate hypervolume_mc(const std::vector<std::vector<double>>& points,
                          const RefPoint& ref, std::uint64_t samples,
                          std::uint64_t seed) {
  const auto pts = clip_to_ref(points, ref);
  if (pts.empty() || samples == 0) return {0.0, 0.0};

  const std::size_t dim = ref.values.size();
  std::vector<double> lo = pts.front();
  for (const auto& p : pts) {
    for (std::size_t j = 0; j < dim; ++j) lo[j] = std::min(lo[j], p[j]);
  }
  double box = 1.0;
  for (std::size_t j = 0; j < dim; ++j) box *= ref.values[j] - lo[j];
  if (box <= 0.0) return {0.0, 0.0};

  std::uint64_t hits = 0;
  std::vector<double> x(dim);
  for (std::uint64_t i = 0; i < samples; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      x[j] = lo[j] + uniform01(seed, i * dim + j) * (ref.values[j] - lo[j]);
    }
    for (const auto& p : pts) {
      bool inside = true;
      for (std::size_t j = 0; j < dim; ++j) {
        if (x[j] < p[j]) {
          inside = false;
          break;
        }
      }
      if (inside) {
        ++hits;
        break;
      }
    }
  }
  const double n = static_cast<double>(samples);
  const double phat = static_cast<double>(hits) / n;
  return {box * phat, box * std::sqrt(phat * (1.0 - phat) / n)};
}

double ehv_of_archive(const Archive& arch, const RefPoint& ref) {
  const auto front = pareto_filter(arch);
  std::vector<std::vector<double>> pts;
  pts.reserve(front.size());
  for (const auto& o : front) pts.push_back(o.joint());
  return hypervolume(pts, ref);
}

}  // namespace mhof
