#include "gda/cli/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "gda/error.hpp"

namespace gda::cli {

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string px(double v) { return fmt::format("{:.3f}", v); }

}  // namespace

Viewport fit_viewport(std::span<const std::pair<double, double>> points, double width, double height,
                      double margin) {
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
  for (const auto& [x, y] : points) {
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  }
  const double x_ext = std::max(x_hi - x_lo, 1e-12);
  const double y_ext = std::max(y_hi - y_lo, 1e-12);
  x_lo -= 0.05 * x_ext;
  x_hi += 0.05 * x_ext;
  y_lo -= 0.05 * y_ext;
  y_hi += 0.05 * y_ext;

  Viewport v;
  v.width = width;
  v.height = height;
  v.margin = margin;
  v.x_mid = (x_lo + x_hi) / 2.0;
  v.y_mid = (y_lo + y_hi) / 2.0;
  v.scale = std::min((width - 2.0 * margin) / (x_hi - x_lo), (height - 2.0 * margin) / (y_hi - y_lo));
  return v;
}

std::string axis_label(const FactorModel& model, std::size_t axis, RateMode mode) {
  if (mode == RateMode::Raw) {
    const auto rates = model.rates();
    return fmt::format("Axis {}: {:.2f}%", axis + 1, 100.0 * rates(static_cast<Eigen::Index>(axis)));
  }
  if (model.kind != AnalysisKind::MCA)
    throw Error(ErrorCode::BadConfig, "modified rates are defined for MCA only");
  const std::vector<double> ev(model.eigenvalues.begin(), model.eigenvalues.end());
  for (const auto& m : modified_rates(ev, model.q_active))
    if (m.axis == axis) return fmt::format("Axis {}: {:.2f}% (modified)", axis + 1, 100.0 * m.rate);
  return fmt::format("Axis {}: below average eigenvalue (modified)", axis + 1);
}

std::string render_factor_plane(const FactorModel& model, const PlotOptions& options) {
  const std::size_t ax = options.axis_x;
  const std::size_t ay = options.axis_y;
  if (ax == ay || ax >= model.axes() || ay >= model.axes())
    throw Error(ErrorCode::BadAxis, fmt::format("axes {},{} invalid for a model with {} axes", ax + 1, ay + 1,
                                                model.axes()));
  const auto ix = static_cast<Eigen::Index>(ax);
  const auto iy = static_cast<Eigen::Index>(ay);

  std::vector<std::pair<double, double>> all;
  auto add_cloud = [&](const PointCloud& c) {
    for (Eigen::Index i = 0; i < c.coords.rows(); ++i) all.emplace_back(c.coords(i, ix), c.coords(i, iy));
  };
  auto add_list = [&](const std::vector<Projection>& list) {
    for (const auto& p : list) all.emplace_back(p.coords(ix), p.coords(iy));
  };
  add_cloud(model.rows);
  add_cloud(model.cols);
  add_list(model.sup_rows);
  add_list(model.sup_cols);
  add_list(model.centroids);
  const Viewport vp = fit_viewport(all);

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  svg << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" data-scale=\"{2:.17g}\" data-x-mid=\"{3:.17g}\" data-y-mid=\"{4:.17g}\">\n",
      vp.width, vp.height, vp.scale, vp.x_mid, vp.y_mid);
  svg << "<desc>" << xml_escape(to_string(model.kind)) << " factor plane, axes " << ax + 1 << " and " << ay + 1
      << "; px = width/2 + scale*(x - x_mid), py = height/2 - scale*(y - y_mid)</desc>\n";
  svg << fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", vp.width, vp.height);

  const auto [ox, oy] = vp.map(0.0, 0.0);
  svg << "<g id=\"crosshair\" stroke=\"#999999\" stroke-width=\"1\" stroke-dasharray=\"4,3\">\n";
  svg << "<line x1=\"" << px(vp.margin) << "\" y1=\"" << px(oy) << "\" x2=\"" << px(vp.width - vp.margin)
      << "\" y2=\"" << px(oy) << "\"/>\n";
  svg << "<line x1=\"" << px(ox) << "\" y1=\"" << px(vp.margin) << "\" x2=\"" << px(ox) << "\" y2=\""
      << px(vp.height - vp.margin) << "\"/>\n";
  svg << "</g>\n";

  const bool label_rows = model.kind == AnalysisKind::CA;
  svg << "<g id=\"respondents\" fill=\"#4477aa\" fill-opacity=\"0.6\" font-family=\"sans-serif\" font-size=\"10\">\n";
  for (std::size_t i = 0; i < model.rows.size(); ++i) {
    const auto [x, y] = vp.map(model.rows.coords(static_cast<Eigen::Index>(i), ix),
                               model.rows.coords(static_cast<Eigen::Index>(i), iy));
    svg << "<circle cx=\"" << px(x) << "\" cy=\"" << px(y) << "\" r=\"2.5\"/>\n";
    if (label_rows)
      svg << "<text x=\"" << px(x + 4) << "\" y=\"" << px(y - 4) << "\">" << xml_escape(model.rows.labels[i])
          << "</text>\n";
  }
  svg << "</g>\n";

  svg << "<g id=\"modalities\" fill=\"#cc3311\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t j = 0; j < model.cols.size(); ++j) {
    const auto [x, y] = vp.map(model.cols.coords(static_cast<Eigen::Index>(j), ix),
                               model.cols.coords(static_cast<Eigen::Index>(j), iy));
    svg << "<rect x=\"" << px(x - 3) << "\" y=\"" << px(y - 3) << "\" width=\"6\" height=\"6\"/>\n";
    svg << "<text x=\"" << px(x + 5) << "\" y=\"" << px(y - 5) << "\">" << xml_escape(model.cols.labels[j])
        << "</text>\n";
  }
  svg << "</g>\n";

  svg << "<g id=\"supplementary\" fill=\"#228833\" font-family=\"sans-serif\" font-size=\"11\" font-style=\"italic\">\n";
  for (const auto* list : {&model.sup_cols, &model.sup_rows}) {
    for (const auto& p : *list) {
      const auto [x, y] = vp.map(p.coords(ix), p.coords(iy));
      svg << "<polygon data-x=\"" << px(x) << "\" data-y=\"" << px(y) << "\" points=\"" << px(x) << ","
          << px(y - 4) << " " << px(x - 4) << "," << px(y + 3) << " " << px(x + 4) << "," << px(y + 3)
          << "\"/>\n";
      svg << "<text x=\"" << px(x + 5) << "\" y=\"" << px(y - 5) << "\">" << xml_escape(p.label) << "</text>\n";
    }
  }
  svg << "</g>\n";

  svg << "<g id=\"centroids\" fill=\"#000000\" font-family=\"sans-serif\" font-size=\"11\" font-weight=\"bold\">\n";
  for (const auto& p : model.centroids) {
    const auto [x, y] = vp.map(p.coords(ix), p.coords(iy));
    svg << "<polygon data-x=\"" << px(x) << "\" data-y=\"" << px(y) << "\" points=\"" << px(x) << ","
        << px(y - 5) << " " << px(x + 5) << "," << px(y) << " " << px(x) << "," << px(y + 5) << " "
        << px(x - 5) << "," << px(y) << "\"/>\n";
    svg << "<text x=\"" << px(x + 6) << "\" y=\"" << px(y - 6) << "\">" << xml_escape(p.label) << "</text>\n";
  }
  svg << "</g>\n";

  svg << "<g id=\"axis-labels\" font-family=\"sans-serif\" font-size=\"13\">\n";
  svg << "<text x=\"" << px(vp.width - vp.margin) << "\" y=\"" << px(vp.height - vp.margin / 3)
      << "\" text-anchor=\"end\">" << xml_escape(axis_label(model, ax, options.rates)) << "</text>\n";
  svg << "<text x=\"" << px(vp.margin / 3) << "\" y=\"" << px(vp.margin) << "\" transform=\"rotate(-90 "
      << px(vp.margin / 3) << " " << px(vp.margin) << ")\" text-anchor=\"end\">"
      << xml_escape(axis_label(model, ay, options.rates)) << "</text>\n";
  svg << "</g>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace gda::cli
