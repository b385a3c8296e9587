#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "output.hpp"

namespace ccesnet::cli {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 360;
constexpr double kMargin = 40;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(const std::string& title, double w = kWidth, double h = kHeight) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<text x=\"" << fmt(kMargin) << "\" y=\"20\">" << escape(title) << "</text>\n";
  return s.str();
}

}  // namespace

std::string svg_histogram(const std::string& title, double lo, double hi, const std::vector<long>& counts) {
  std::ostringstream s;
  s << header(title);
  const long peak = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  const double bar_w = counts.empty() ? 0 : plot_w / static_cast<double>(counts.size());
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const double h = peak ? plot_h * static_cast<double>(counts[b]) / static_cast<double>(peak) : 0.0;
    s << "<rect x=\"" << fmt(kMargin + bar_w * static_cast<double>(b)) << "\" y=\"" << fmt(kHeight - kMargin - h)
      << "\" width=\"" << fmt(bar_w) << "\" height=\"" << fmt(h) << "\" fill=\"steelblue\" stroke=\"white\"/>\n";
  }
  s << "<line x1=\"" << fmt(kMargin) << "\" y1=\"" << fmt(kHeight - kMargin) << "\" x2=\"" << fmt(kWidth - kMargin)
    << "\" y2=\"" << fmt(kHeight - kMargin) << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << fmt(kMargin) << "\" y=\"" << fmt(kHeight - 15) << "\">" << fmt(lo) << "</text>\n";
  s << "<text x=\"" << fmt(kWidth - kMargin) << "\" y=\"" << fmt(kHeight - 15) << "\" text-anchor=\"end\">"
    << fmt(hi) << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

std::string svg_curve(const std::string& title, const std::vector<double>& x, const std::vector<double>& y,
                      int mark) {
  std::ostringstream s;
  s << header(title);
  if (x.empty()) return s.str() + "</svg>\n";
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  const double xs = *xmax > *xmin ? (kWidth - 2 * kMargin) / (*xmax - *xmin) : 0.0;
  const double ys = *ymax > *ymin ? (kHeight - 2 * kMargin) / (*ymax - *ymin) : 0.0;
  auto px = [&](double v) { return kMargin + (v - *xmin) * xs; };
  auto py = [&](double v) { return kHeight - kMargin - (v - *ymin) * ys; };
  s << "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) s << (i ? " " : "") << fmt(px(x[i])) << "," << fmt(py(y[i]));
  s << "\"/>\n";
  if (mark >= 0 && mark < static_cast<int>(x.size())) {
    s << "<circle cx=\"" << fmt(px(x[mark])) << "\" cy=\"" << fmt(py(y[mark]))
      << "\" r=\"4\" fill=\"firebrick\"/>\n";
    s << "<text x=\"" << fmt(px(x[mark]) + 6) << "\" y=\"" << fmt(py(y[mark]) - 6) << "\">(" << fmt(x[mark]) << ", "
      << fmt(y[mark]) << ")</text>\n";
  }
  s << "<text x=\"" << fmt(kMargin) << "\" y=\"" << fmt(kHeight - 15) << "\">" << fmt(*xmin) << "</text>\n";
  s << "<text x=\"" << fmt(kWidth - kMargin) << "\" y=\"" << fmt(kHeight - 15) << "\" text-anchor=\"end\">"
    << fmt(*xmax) << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

std::string svg_dendrogram(const std::string& title, const Dendrogram& tree, const std::vector<std::string>& labels) {
  const int n = static_cast<int>(labels.size());
  const double row = 14;
  const double label_w = 80;
  const double height = 2 * kMargin + row * std::max(n, 1);
  std::ostringstream s;
  s << header(title, kWidth, height);
  double top = 0.0;
  for (const auto& m : tree.merges) top = std::max(top, m.height);
  const double scale = top > 0 ? (kWidth - 2 * kMargin - label_w) / top : 0.0;
  // leaves on the left at height 0, merges extend right
  std::vector<double> y(n + tree.merges.size()), x(n + tree.merges.size(), kMargin + label_w);
  for (int k = 0; k < n && k < static_cast<int>(tree.leaf_order.size()); ++k) {
    const int leaf = tree.leaf_order[k];
    y[leaf] = kMargin + row * (k + 0.5);
    s << "<text x=\"" << fmt(kMargin + label_w - 4) << "\" y=\"" << fmt(y[leaf] + 4) << "\" text-anchor=\"end\">"
      << escape(labels[leaf]) << "</text>\n";
  }
  for (std::size_t k = 0; k < tree.merges.size(); ++k) {
    const auto& m = tree.merges[k];
    const double hx = kMargin + label_w + m.height * scale;
    s << "<path fill=\"none\" stroke=\"black\" d=\"M" << fmt(x[m.a]) << "," << fmt(y[m.a]) << " H" << fmt(hx) << " V"
      << fmt(y[m.b]) << " H" << fmt(x[m.b]) << "\"/>\n";
    x[n + k] = hx;
    y[n + k] = 0.5 * (y[m.a] + y[m.b]);
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace ccesnet::cli
