#pragma once

#include <string>
#include <vector>

#include "ccesnet/netanalysis.hpp"

namespace ccesnet::cli {

std::string svg_histogram(const std::string& title, double lo, double hi, const std::vector<long>& counts);

// Polyline of (x, y); `mark` highlights one point (negative for none).
std::string svg_curve(const std::string& title, const std::vector<double>& x, const std::vector<double>& y,
                      int mark = -1);

std::string svg_dendrogram(const std::string& title, const Dendrogram& tree, const std::vector<std::string>& labels);

}  // namespace ccesnet::cli
