#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "biphoton/measurement.hpp"

namespace biphoton::cli {

struct PlotStyle {
  std::string title;
  std::string x_label = "scan coordinate";
  std::string y_label = "coincidences";
};

/// Histogram points with the fitted curve, written as a self-contained SVG.
/// Output bytes are a pure function of the inputs. Throws
/// std::invalid_argument for empty data and IoError for unwritable paths.
void emit_plot(const CoincidenceHistogram& hist, const PlotStyle& style,
               const std::filesystem::path& path);

/// Several histograms as panels of one figure, two per row.
void emit_panel_plot(std::span<const CoincidenceHistogram> hists,
                     std::span<const std::string> titles,
                     const std::filesystem::path& path);

/// Plain x-y curve (used for the Schmidt-number scan).
void emit_curve_plot(std::span<const double> x, std::span<const double> y,
                     const PlotStyle& style,
                     const std::filesystem::path& path);

}  // namespace biphoton::cli
