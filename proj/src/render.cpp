#include "mhof/render.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "mhof/format.hpp"

namespace mhof {

namespace {

using mhof::format_double;

std::string fmt(double value) { return format_double(value); }

std::string fmt_coord(double value) {
  char buf[32];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

struct Range {
  double lo = 0.0, hi = 1.0;

  static Range of(const std::vector<double>& values) {
    Range r{values.front(), values.front()};
    for (double v : values) {
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
    if (r.hi == r.lo) {  // flat series still needs a drawable band
      r.lo -= 0.5;
      r.hi += 0.5;
    }
    return r;
  }
};

constexpr double kPanelW = 640.0, kPanelH = 160.0, kMargin = 46.0;

class SvgWriter {
 public:
  explicit SvgWriter(const std::filesystem::path& path, double width,
                     double height)
      : out_(path) {
    if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
         << fmt_coord(width) << "\" height=\"" << fmt_coord(height)
         << "\" viewBox=\"0 0 " << fmt_coord(width) << ' ' << fmt_coord(height)
         << "\">\n";
  }
  ~SvgWriter() { out_ << "</svg>\n"; }

  void line(double x1, double y1, double x2, double y2, const char* color,
            double width = 1.0) {
    out_ << "<line x1=\"" << fmt_coord(x1) << "\" y1=\"" << fmt_coord(y1)
         << "\" x2=\"" << fmt_coord(x2) << "\" y2=\"" << fmt_coord(y2)
         << "\" stroke=\"" << color << "\" stroke-width=\"" << fmt_coord(width)
         << "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& color, double width = 1.2) {
    if (pts.empty()) return;
    out_ << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"" << fmt_coord(width) << "\" points=\"";
    for (const auto& [x, y] : pts) {
      out_ << fmt_coord(x) << ',' << fmt_coord(y) << ' ';
    }
    out_ << "\"/>\n";
  }

  void circle(double x, double y, double r, const std::string& color,
              const char* stroke = "none") {
    out_ << "<circle cx=\"" << fmt_coord(x) << "\" cy=\"" << fmt_coord(y)
         << "\" r=\"" << fmt_coord(r) << "\" fill=\"" << color
         << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void text(double x, double y, const std::string& content,
            const char* color = "#333333") {
    out_ << "<text x=\"" << fmt_coord(x) << "\" y=\"" << fmt_coord(y)
         << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
         << "\">" << content << "</text>\n";
  }

  bool good() const { return static_cast<bool>(out_); }

 private:
  std::ofstream out_;
};

struct Panel {
  double top;
  Range x, y;

  double px(double v) const {
    return kMargin + (v - x.lo) / (x.hi - x.lo) * kPanelW;
  }
  double py(double v) const {
    return top + kPanelH - (v - y.lo) / (y.hi - y.lo) * kPanelH;
  }
};

void draw_panel_frame(SvgWriter& svg, const Panel& panel,
                      const std::string& label) {
  svg.line(kMargin, panel.top, kMargin, panel.top + kPanelH, "#888888");
  svg.line(kMargin, panel.top + kPanelH, kMargin + kPanelW,
           panel.top + kPanelH, "#888888");
  svg.text(kMargin + 4.0, panel.top + 12.0, label);
  svg.text(4.0, panel.top + 14.0, fmt(panel.y.hi), "#888888");
  svg.text(4.0, panel.top + kPanelH, fmt(panel.y.lo), "#888888");
}

std::string ramp_color(double t) {
  // Blue-to-red ramp over [0, 1].
  const int r = static_cast<int>(std::lround(40.0 + 200.0 * t));
  const int b = static_cast<int>(std::lround(240.0 - 200.0 * t));
  return "rgb(" + std::to_string(r) + ",60," + std::to_string(b) + ")";
}

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::string>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << header << '\n';
  for (const auto& row : rows) out << row << '\n';
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace

void render_dynamics(const Trace& trace, const std::filesystem::path& svg_path,
                     const std::filesystem::path& csv_path) {
  const auto& ep = trace.epochs();
  if (ep.empty()) throw SequencingError("render_dynamics: empty trace");
  const std::size_t d = trace.meta().d;
  const std::size_t panels = d + 1;

  std::vector<double> ks;
  ks.reserve(ep.size());
  for (const auto& rec : ep) ks.push_back(static_cast<double>(rec.k));
  const Range kx = Range::of(ks);

  const double height = 2.0 * kMargin + static_cast<double>(panels) * (kPanelH + kMargin);
  SvgWriter svg(svg_path, kMargin * 2.0 + kPanelW, height);

  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> span;
    for (const auto& rec : ep) {
      span.push_back(rec.reg[i]);
      span.push_back(rec.b[i]);
    }
    Panel panel{kMargin + static_cast<double>(i) * (kPanelH + kMargin), kx,
                Range::of(span)};
    draw_panel_frame(svg, panel, "reg[" + std::to_string(i) + "] vs setpoint");
    std::vector<std::pair<double, double>> reg_pts, b_pts;
    for (const auto& rec : ep) {
      reg_pts.emplace_back(panel.px(static_cast<double>(rec.k)),
                           panel.py(rec.reg[i]));
      b_pts.emplace_back(panel.px(static_cast<double>(rec.k)),
                         panel.py(rec.b[i]));
    }
    svg.polyline(reg_pts, "#1f77b4");
    svg.polyline(b_pts, "#d62728");
    for (const auto& rec : ep) {
      if (rec.shrank) {
        svg.circle(panel.px(static_cast<double>(rec.k)), panel.py(rec.b[i]),
                   2.6, "#d62728");
      }
    }
  }

  // Multiplier panel on a log10 scale; mu is positive by construction.
  std::vector<double> logmu;
  for (const auto& rec : ep) {
    for (double m : rec.mu) logmu.push_back(std::log10(m));
  }
  Panel panel{kMargin + static_cast<double>(d) * (kPanelH + kMargin), kx,
              Range::of(logmu)};
  draw_panel_frame(svg, panel, "log10 mu");
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& rec : ep) {
      pts.emplace_back(panel.px(static_cast<double>(rec.k)),
                       panel.py(std::log10(rec.mu[i])));
    }
    svg.polyline(pts, ramp_color(d == 1 ? 0.5
                                        : static_cast<double>(i) /
                                              static_cast<double>(d - 1)));
  }
  if (!svg.good()) throw Error("write to '" + svg_path.string() + "' failed");

  std::string header = "k";
  for (std::size_t i = 0; i < d; ++i) header += ",reg" + std::to_string(i);
  for (std::size_t i = 0; i < d; ++i) header += ",b" + std::to_string(i);
  for (std::size_t i = 0; i < d; ++i) header += ",mu" + std::to_string(i);
  header += ",shrank";
  std::vector<std::string> rows;
  rows.reserve(ep.size());
  for (const auto& rec : ep) {
    std::string row = std::to_string(rec.k);
    for (double v : rec.reg) row += ',' + fmt(v);
    for (double v : rec.b) row += ',' + fmt(v);
    for (double v : rec.mu) row += ',' + fmt(v);
    row += rec.shrank ? ",1" : ",0";
    rows.push_back(std::move(row));
  }
  write_csv(csv_path, header, rows);
}

void render_phase_portrait(const Trace& trace, std::size_t reg_index,
                           const std::filesystem::path& svg_path,
                           const std::filesystem::path& csv_path,
                           std::uint64_t stride) {
  const auto& ep = trace.epochs();
  if (ep.empty()) throw SequencingError("render_phase_portrait: empty trace");
  if (reg_index >= trace.meta().d) {
    throw DimensionError("render_phase_portrait: reg_index " +
                         std::to_string(reg_index) + " out of range for d = " +
                         std::to_string(trace.meta().d));
  }
  if (stride == 0) throw ConfigError("stride: must be >= 1");

  const std::uint64_t selected = last_shrink_epoch(trace);
  std::vector<std::size_t> plotted;
  for (std::size_t i = 0; i < ep.size(); ++i) {
    if (ep[i].k % stride == 0 || ep[i].k == selected) plotted.push_back(i);
  }

  std::vector<double> xs, ys;
  for (std::size_t i : plotted) {
    xs.push_back(ep[i].reg[reg_index]);
    ys.push_back(ep[i].ell);
  }
  const Range rx = Range::of(xs), ry = Range::of(ys);
  SvgWriter svg(svg_path, kMargin * 2.0 + kPanelW,
                kMargin * 2.0 + kPanelH * 2.0);
  svg.line(kMargin, kMargin, kMargin, kMargin + 2.0 * kPanelH, "#888888");
  svg.line(kMargin, kMargin + 2.0 * kPanelH, kMargin + kPanelW,
           kMargin + 2.0 * kPanelH, "#888888");
  svg.text(kMargin + 4.0, kMargin + 12.0,
           "ell vs reg[" + std::to_string(reg_index) + "]");

  auto px = [&](double v) {
    return kMargin + (v - rx.lo) / (rx.hi - rx.lo) * kPanelW;
  };
  auto py = [&](double v) {
    return kMargin + 2.0 * kPanelH -
           (v - ry.lo) / (ry.hi - ry.lo) * 2.0 * kPanelH;
  };

  const double span =
      std::max<double>(1.0, static_cast<double>(ep.back().k));
  for (std::size_t i : plotted) {
    const double t = static_cast<double>(ep[i].k) / span;
    svg.circle(px(ep[i].reg[reg_index]), py(ep[i].ell), 2.2, ramp_color(t));
  }
  const EpochRecord& first = ep.front();
  svg.circle(px(first.reg[reg_index]), py(first.ell), 5.0, "none", "#000000");
  const EpochRecord& sel = ep[selected];
  svg.circle(px(sel.reg[reg_index]), py(sel.ell), 5.0, "none", "#2ca02c");
  if (!svg.good()) throw Error("write to '" + svg_path.string() + "' failed");

  std::vector<std::string> rows;
  rows.reserve(plotted.size());
  for (std::size_t i : plotted) {
    std::string row = std::to_string(ep[i].k);
    row += ',' + fmt(ep[i].reg[reg_index]);
    row += ',' + fmt(ep[i].ell);
    row += ep[i].k == 0 ? ",1" : ",0";
    row += ep[i].k == selected ? ",1" : ",0";
    rows.push_back(std::move(row));
  }
  write_csv(csv_path, "k,reg,ell,initial,selected", rows);
}

}  // namespace mhof
