#include "gfkchain/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace gfkchain::cli {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 130.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

const char* colour(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  return palette[i % 5];
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string tick_label(int k) { return k == 0 ? "direct" : std::to_string(k) + " IS"; }

}  // namespace

std::vector<TrendSeries> trend_from_results(const std::vector<ResultRow>& rows) {
  std::map<std::string, std::map<int, std::pair<double, int>>> acc;
  for (const auto& r : rows) {
    if (std::isnan(r.chain_acc)) continue;
    auto& cell = acc[r.kernel][r.n_intermediates];
    cell.first += r.chain_acc;
    ++cell.second;
  }
  if (acc.empty()) throw UserError("no rows");
  std::vector<TrendSeries> out;
  for (const char* name : {"linear", "gfk"}) {
    auto it = acc.find(name);
    if (it == acc.end()) continue;
    TrendSeries s;
    s.kernel = name;
    for (const auto& [k, sum] : it->second) {
      s.n_intermediates.push_back(k);
      s.mean_accuracy.push_back(sum.first / sum.second);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string render_svg(const std::vector<TrendSeries>& series) {
  std::set<int> all_k;
  for (const auto& s : series) all_k.insert(s.n_intermediates.begin(), s.n_intermediates.end());
  const std::vector<int> ks(all_k.begin(), all_k.end());
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_of = [&](int k) {
    const auto i = std::lower_bound(ks.begin(), ks.end(), k) - ks.begin();
    return ks.size() < 2 ? kLeft + plot_w / 2 : kLeft + plot_w * static_cast<double>(i) / (ks.size() - 1);
  };
  auto y_of = [&](double v) { return kTop + plot_h * (1.0 - std::clamp(v, 0.0, 1.0)); };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth, 0) + "\" height=\"" +
         fixed(kHeight, 0) + "\" viewBox=\"0 0 " + fixed(kWidth, 0) + " " + fixed(kHeight, 0) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fixed(kLeft, 0) + "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
         "Mean damage-label accuracy at the target</text>\n";

  // Axes and grid.
  svg += "<g stroke=\"#888\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = i / 5.0;
    const double y = y_of(v);
    svg += "<line x1=\"" + fixed(kLeft, 1) + "\" y1=\"" + fixed(y, 1) + "\" x2=\"" +
           fixed(kLeft + plot_w, 1) + "\" y2=\"" + fixed(y, 1) + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + fixed(kLeft - 8, 1) + "\" y=\"" + fixed(y + 4, 1) +
           "\" text-anchor=\"end\" stroke=\"none\">" + fixed(v, 1) + "</text>\n";
  }
  for (int k : ks) {
    svg += "<text x=\"" + fixed(x_of(k), 1) + "\" y=\"" + fixed(kTop + plot_h + 18, 1) +
           "\" text-anchor=\"middle\" stroke=\"none\">" + tick_label(k) + "</text>\n";
  }
  svg += "<line x1=\"" + fixed(kLeft, 1) + "\" y1=\"" + fixed(kTop + plot_h, 1) + "\" x2=\"" +
         fixed(kLeft + plot_w, 1) + "\" y2=\"" + fixed(kTop + plot_h, 1) + "\"/>\n";
  svg += "<line x1=\"" + fixed(kLeft, 1) + "\" y1=\"" + fixed(kTop, 1) + "\" x2=\"" + fixed(kLeft, 1) +
         "\" y2=\"" + fixed(kTop + plot_h, 1) + "\"/>\n";
  svg += "<text x=\"" + fixed(kLeft + plot_w / 2, 1) + "\" y=\"" + fixed(kHeight - 10, 1) +
         "\" text-anchor=\"middle\" stroke=\"none\">intermediate structures</text>\n";
  svg += "</g>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    std::string points;
    std::string values;
    for (std::size_t i = 0; i < s.n_intermediates.size(); ++i) {
      if (i > 0) {
        points += " ";
        values += " ";
      }
      points += fixed(x_of(s.n_intermediates[i]), 1) + "," + fixed(y_of(s.mean_accuracy[i]), 1);
      values += fixed(s.mean_accuracy[i], 3);
    }
    svg += "<polyline data-kernel=\"" + s.kernel + "\" data-values=\"" + values + "\" points=\"" +
           points + "\" fill=\"none\" stroke=\"" + colour(si) + "\" stroke-width=\"2\"/>\n";
    for (std::size_t i = 0; i < s.n_intermediates.size(); ++i) {
      svg += "<circle cx=\"" + fixed(x_of(s.n_intermediates[i]), 1) + "\" cy=\"" +
             fixed(y_of(s.mean_accuracy[i]), 1) + "\" r=\"3\" fill=\"" + colour(si) + "\"><title>" +
             s.kernel + " " + tick_label(s.n_intermediates[i]) + ": " + fixed(s.mean_accuracy[i], 3) +
             "</title></circle>\n";
    }
    const double ly = kTop + 16.0 * static_cast<double>(si);
    svg += "<line x1=\"" + fixed(kWidth - kRight + 15, 1) + "\" y1=\"" + fixed(ly, 1) + "\" x2=\"" +
           fixed(kWidth - kRight + 35, 1) + "\" y2=\"" + fixed(ly, 1) + "\" stroke=\"" + colour(si) +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fixed(kWidth - kRight + 40, 1) + "\" y=\"" + fixed(ly + 4, 1) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + s.kernel + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace gfkchain::cli
