#include "dplab/svg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

namespace dplab {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 160.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

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

struct Axes {
    double lx0, lx1, ly0, ly1;
    double px(double x) const { return kLeft + (std::log10(x) - lx0) / (lx1 - lx0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (std::log10(y) - ly0) / (ly1 - ly0) * (kHeight - kTop - kBottom); }
};

}  // namespace

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string render_loglog_svg(const LogLogPlot& plot) {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : plot.series) {
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!(s.x[k] > 0.0) || !(s.y[k] > 0.0)) continue;
            xmin = std::min(xmin, s.x[k]);
            xmax = std::max(xmax, s.x[k]);
            ymin = std::min(ymin, s.y[k]);
            ymax = std::max(ymax, s.y[k]);
        }
    }
    if (!(xmin < INFINITY)) {
        xmin = 0.01, xmax = 1.0, ymin = 1e-6, ymax = 1.0;
    }
    Axes ax{std::floor(std::log10(xmin)), std::ceil(std::log10(xmax)), std::floor(std::log10(ymin)),
            std::ceil(std::log10(ymax))};
    if (ax.lx1 <= ax.lx0) ax.lx1 = ax.lx0 + 1.0;
    if (ax.ly1 <= ax.ly0) ax.ly1 = ax.ly0 + 1.0;

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    if (!plot.comment.empty()) s += "<!-- " + escape(plot.comment) + " -->\n";
    if (plot.timestamp) s += "<!-- generated " + escape(*plot.timestamp) + " -->\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
         escape(plot.title) + "</text>\n";

    // grid and decades
    s += "<g stroke=\"#ddd\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double d = ax.lx0; d <= ax.lx1 + 1e-9; d += 1.0) {
        const double x = ax.px(std::pow(10.0, d));
        s += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(x) + "\" y2=\"" + num(kHeight - kBottom) + "\"/>\n";
        s += "<text stroke=\"none\" x=\"" + num(x) + "\" y=\"" + num(kHeight - kBottom + 16) + "\" text-anchor=\"middle\">1e" +
             label_num(d) + "</text>\n";
    }
    for (double d = ax.ly0; d <= ax.ly1 + 1e-9; d += 1.0) {
        const double y = ax.py(std::pow(10.0, d));
        s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kWidth - kRight) + "\" y2=\"" + num(y) + "\"/>\n";
        s += "<text stroke=\"none\" x=\"" + num(kLeft - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">1e" +
             label_num(d) + "</text>\n";
    }
    s += "</g>\n";
    s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kWidth - kLeft - kRight) + "\" height=\"" +
         num(kHeight - kTop - kBottom) + "\" fill=\"none\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num((kLeft + kWidth - kRight) / 2) + "\" y=\"" + num(kHeight - 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + escape(plot.x_label) + "</text>\n";
    s += "<text x=\"20\" y=\"" + num((kTop + kHeight - kBottom) / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 20 " + num((kTop + kHeight - kBottom) / 2) + ")\">" + escape(plot.y_label) +
         "</text>\n";

    // reference slopes through the first point of the first series
    double ax0 = std::pow(10.0, ax.lx1);
    double ay0 = std::pow(10.0, (ax.ly0 + ax.ly1) / 2);
    if (!plot.series.empty() && !plot.series.front().x.empty()) {
        const auto& f = plot.series.front();
        const auto k = static_cast<std::size_t>(std::max_element(f.x.begin(), f.x.end()) - f.x.begin());
        if (f.y[k] > 0.0) {
            ax0 = f.x[k];
            ay0 = f.y[k] * 1.6;
        }
    }
    int legend = 0;
    const auto legend_entry = [&](const std::string& color, const std::string& dash, const std::string& text) {
        const double y = kTop + 14 + 18 * legend++;
        const double x = kWidth - kRight + 12;
        s += "<line x1=\"" + num(x) + "\" y1=\"" + num(y) + "\" x2=\"" + num(x + 24) + "\" y2=\"" + num(y) + "\" stroke=\"" + color +
             "\" stroke-width=\"2\"" + dash + "/>\n";
        s += "<text x=\"" + num(x + 30) + "\" y=\"" + num(y + 4) + "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(text) +
             "</text>\n";
    };
    s += "<g>\n";
    for (double slope : plot.reference_slopes) {
        const double xa = std::pow(10.0, ax.lx0);
        const double ya = ay0 * std::pow(xa / ax0, slope);
        s += "<line x1=\"" + num(ax.px(ax0)) + "\" y1=\"" + num(ax.py(ay0)) + "\" x2=\"" + num(ax.px(xa)) + "\" y2=\"" +
             num(ax.py(ya)) + "\" stroke=\"#888\" stroke-dasharray=\"6,4\" stroke-width=\"1\"/>\n";
        legend_entry("#888", " stroke-dasharray=\"6,4\"", "slope " + label_num(slope));
    }
    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& se = plot.series[k];
        const std::string color = kColors[k % 5];
        for (std::size_t i = 0; i < se.x.size() && i < se.y.size(); ++i) {
            if (!(se.x[i] > 0.0) || !(se.y[i] > 0.0)) continue;
            const double x = ax.px(se.x[i]);
            const double y = ax.py(se.y[i]);
            s += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"4\" fill=\"" + color + "\"/>\n";
        }
        if (se.fit_slope && se.fit_intercept && !se.x.empty()) {
            const auto [lo, hi] = std::minmax_element(se.x.begin(), se.x.end());
            const auto line_y = [&](double x) { return std::exp(*se.fit_intercept + *se.fit_slope * std::log(x)); };
            s += "<line x1=\"" + num(ax.px(*lo)) + "\" y1=\"" + num(ax.py(line_y(*lo))) + "\" x2=\"" + num(ax.px(*hi)) +
                 "\" y2=\"" + num(ax.py(line_y(*hi))) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        }
        std::string text = se.label;
        if (se.fit_slope) text += " (" + label_num(*se.fit_slope) + ")";
        legend_entry(color, "", text);
    }
    s += "</g>\n</svg>\n";
    return s;
}

}  // namespace dplab
