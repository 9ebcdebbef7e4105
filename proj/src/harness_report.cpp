#include "tokencom/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tokencom::harness {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

CompressionReport compression_report(const RunConfig& cfg, const scenes::Dataset& data) {
  if (data.test.empty()) throw std::runtime_error("compression report: empty test split");
  double scene_bytes = 0.0, text_bytes = 0.0;
  int ge2 = 0, proposed_smaller = 0;
  const double proposed_per_ep = static_cast<double>(cfg.k) * cfg.l_t * 4;
  const double bench4_per_ep = static_cast<double>(cfg.k) * cfg.sensor.l_emb * 4;
  for (const auto& qa : data.test) {
    const double t = static_cast<double>(scenes::describe_scene_text(qa.scene).size());
    scene_bytes += static_cast<double>(scenes::serialize_scene(qa.scene).size());
    text_bytes += t;
    if (qa.scene.objects.size() >= 2) {
      ++ge2;
      proposed_smaller += (proposed_per_ep < t);
    }
  }
  scene_bytes /= static_cast<double>(data.test.size());
  text_bytes /= static_cast<double>(data.test.size());

  CompressionReport rep;
  auto push = [&rep](const std::string& scale, const std::string& mode, double bytes,
                     double bench4_bytes) {
    rep.rows.push_back(CompressionRow{scale, mode, bytes, bench4_bytes / bytes});
  };
  push("desk", "bench1", scene_bytes, bench4_per_ep);
  push("desk", "bench3", text_bytes, bench4_per_ep);
  push("desk", "bench4", bench4_per_ep, bench4_per_ep);
  push("desk", "proposed", proposed_per_ep, bench4_per_ep);
  // Paper-scale arithmetic: 5 tokens at width 4096, coded width 512 or 256.
  const double paper_b4 = 5.0 * 4096 * 4;
  push("paper", "bench4", paper_b4, paper_b4);
  push("paper", "proposed_512", 5.0 * 512 * 4, paper_b4);
  push("paper", "proposed_256", 5.0 * 256 * 4, paper_b4);
  rep.frac_proposed_below_text_ge2 =
      ge2 > 0 ? static_cast<double>(proposed_smaller) / ge2 : 1.0;
  return rep;
}

void write_compression_csv(const std::filesystem::path& path, const CompressionReport& rep) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("compression report: cannot write " + path.string());
  out << "scale,mode,bytes_per_episode,ratio_bench4_over_mode\n";
  for (const auto& r : rep.rows) {
    out << r.scale << "," << r.mode << "," << fmt_num(r.bytes_per_episode) << ","
        << fmt_num(r.ratio_bench4_over_mode) << "\n";
  }
  out << "desk,proposed_below_bench3_frac_ge2obj," << fmt_num(rep.frac_proposed_below_text_ge2)
      << ",\n";
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("spearman: need two equal-length series");
  }
  const auto ra = ranks(a), rb = ranks(b);
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= static_cast<double>(ra.size());
  mb /= static_cast<double>(rb.size());
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  if (da == 0 || db == 0) return 0.0;
  return num / std::sqrt(da * db);
}

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series) {
  if (series.empty()) throw std::invalid_argument("chart: no series");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (double x : s.x) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
    }
    for (double y : s.y) {
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmin >= xmax) xmax = xmin + 1;
  if (ymin >= ymax) ymax = ymin + 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const int w = 640, h = 420, ml = 64, mr = 140, mt = 36, mb = 48;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  svg << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  // Axes.
  svg << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 5.0;
    const double yv = ymin + (ymax - ymin) * t / 5.0;
    svg << "<line x1=\"" << px(xv) << "\" y1=\"" << h - mb << "\" x2=\"" << px(xv) << "\" y2=\""
        << h - mb + 4 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(xv) << "\" y=\"" << h - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt_num(xv) << "</text>\n";
    svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml << "\" y2=\""
        << py(yv) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_num(yv) << "</text>\n";
  }
  svg << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
  svg << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << (mt + h - mb) / 2 << ")\">" << ylabel << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = colors[si % 6];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    svg << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
          << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    const int ly = mt + 16 + static_cast<int>(si) * 18;
    svg << "<line x1=\"" << w - mr + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << w - mr + 30
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << w - mr + 36 << "\" y=\"" << ly << "\" font-size=\"11\">" << s.label
        << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("chart: cannot write " + path.string());
  out << svg.str();
}

}  // namespace tokencom::harness
