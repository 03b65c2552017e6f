#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dplab {

struct LogLogSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::optional<double> fit_slope;  ///< fitted line drawn when set
    std::optional<double> fit_intercept;
};

struct LogLogPlot {
    std::string title;
    std::string x_label = "eps";
    std::string y_label = "error";
    std::vector<LogLogSeries> series;
    std::vector<double> reference_slopes{0.5, 1.0};
    std::string comment;  ///< embedded as an XML comment (config hash etc.)
    std::optional<std::string> timestamp;
};

/// Self-contained SVG document.
std::string render_loglog_svg(const LogLogPlot& plot);

/// Current UTC time as ISO-8601.
std::string utc_timestamp();

}  // namespace dplab
