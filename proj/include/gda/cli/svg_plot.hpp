#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>

#include "gda/ca_engine.hpp"
#include "gda/cli/config.hpp"

namespace gda::cli {

/// Equal-aspect affine map from factor-plane coordinates to SVG pixels:
///
///     px = width / 2  + scale * (x - x_mid)
///     py = height / 2 - scale * (y - y_mid)
///
/// The data box is the bounding box of every plotted point and the origin,
/// padded by 5% of its extent on each side (extents below 1e-12 count as
/// 1e-12); x_mid/y_mid are its centre and scale is the largest value that
/// fits it inside the plot area (width/height minus two margins).
struct Viewport {
  double width = 800.0;
  double height = 600.0;
  double margin = 60.0;
  double scale = 1.0;
  double x_mid = 0.0;
  double y_mid = 0.0;

  std::pair<double, double> map(double x, double y) const {
    return {width / 2.0 + scale * (x - x_mid), height / 2.0 - scale * (y - y_mid)};
  }
};

Viewport fit_viewport(std::span<const std::pair<double, double>> points, double width = 800.0,
                      double height = 600.0, double margin = 60.0);

struct PlotOptions {
  std::size_t axis_x = 0;  // 0-based
  std::size_t axis_y = 1;
  RateMode rates = RateMode::Raw;
};

/// SVG 1.1 factor plane. Layers are <g> elements with ids "crosshair",
/// "respondents" (main rows, circles), "modalities" (main columns, squares),
/// "supplementary" (triangles), "centroids" (diamonds) and "axis-labels".
/// Triangle and diamond markers carry their centre in data-x/data-y.
std::string render_factor_plane(const FactorModel& model, const PlotOptions& options);

/// "Axis 1: 53.60%" or, for modified rates, "Axis 1: 88.87% (modified)".
std::string axis_label(const FactorModel& model, std::size_t axis, RateMode mode);

}  // namespace gda::cli
