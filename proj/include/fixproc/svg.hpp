#pragma once

// Minimal static SVG emission for grids and curve panels.

#include <span>
#include <string>
#include <vector>

#include "fixproc/density.hpp"

namespace fixproc::svg {

/// Heatmap with a fixed ramp. Sequential data maps min..max onto
/// dark-blue..yellow; diverging data maps -a..a onto blue..white..red with
/// a = max |value|.
std::string heatmap(const GridGeometry& g, std::span<const double> values, const std::string& title,
                    bool diverging = false);

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#000000";
  double width = 1.0;
  bool dashed = false;
  bool step = false;  // draw as a right-continuous step function
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Panels laid out in a grid with `columns` columns.
std::string panels(const std::vector<Panel>& panels, int columns = 3);

}  // namespace fixproc::svg
