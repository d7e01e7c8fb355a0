#include "svgplot.hpp"

#include <algorithm>
#include <cstdio>

namespace bufsim::svgplot {

namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 320;
constexpr double kPad = 40;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string header() {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
           "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " +
           num(kHeight) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string axes() {
    return "<line x1=\"" + num(kPad) + "\" y1=\"" + num(kHeight - kPad) + "\" x2=\"" +
           num(kWidth - kPad) + "\" y2=\"" + num(kHeight - kPad) +
           "\" stroke=\"black\"/>\n<line x1=\"" + num(kPad) + "\" y1=\"" + num(kPad) +
           "\" x2=\"" + num(kPad) + "\" y2=\"" + num(kHeight - kPad) +
           "\" stroke=\"black\"/>\n";
}

std::string polyline(const std::vector<double>& ys, double y_max, double n,
                     const char* color) {
    std::string pts;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        double x = kPad + (kWidth - 2 * kPad) * static_cast<double>(i) / std::max(n - 1, 1.0);
        double y = kHeight - kPad - (kHeight - 2 * kPad) * (ys[i] / y_max);
        pts += num(x) + "," + num(y) + " ";
    }
    return "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1\" points=\"" + pts + "\"/>\n";
}

std::string label(double x, double y, const std::string& text, const char* color) {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) +
           "\" font-family=\"monospace\" font-size=\"12\" fill=\"" + color + "\">" +
           text + "</text>\n";
}

}  // namespace

std::string timeseries(const sim::Trace& trace) {
    const double n = static_cast<double>(trace.slots.size());
    const double loss_line = trace.config.link.bdp + trace.config.link.buffer;
    double y_max = loss_line;
    std::vector<double> w, q;
    w.reserve(trace.slots.size());
    q.reserve(trace.slots.size());
    for (const auto& s : trace.slots) {
        w.push_back(s.aggregate_window);
        q.push_back(s.queue);
        y_max = std::max(y_max, s.aggregate_window);
    }
    std::string out = header() + axes();
    double y_loss = kHeight - kPad - (kHeight - 2 * kPad) * (loss_line / y_max);
    out += "<line x1=\"" + num(kPad) + "\" y1=\"" + num(y_loss) + "\" x2=\"" +
           num(kWidth - kPad) + "\" y2=\"" + num(y_loss) +
           "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    out += polyline(w, y_max, n, "steelblue");
    out += polyline(q, y_max, n, "darkorange");
    out += label(kPad + 4, kPad - 8, "W (packets)", "steelblue");
    out += label(kPad + 110, kPad - 8, "Q (packets)", "darkorange");
    out += label(kWidth - kPad - 140, y_loss - 4, "bdp + B = " + num(loss_line), "gray");
    out += "</svg>\n";
    return out;
}

std::string histogram(const analysis::Histogram& hist) {
    std::string out = header() + axes();
    const std::size_t bins = hist.counts.size();
    std::uint64_t max_count = 1;
    for (auto c : hist.counts) max_count = std::max(max_count, c);
    const double span = hist.edges.back() - hist.edges.front();
    for (std::size_t i = 0; i < bins; ++i) {
        double x0 = kPad + (kWidth - 2 * kPad) * (hist.edges[i] - hist.edges.front()) / span;
        double x1 = kPad + (kWidth - 2 * kPad) * (hist.edges[i + 1] - hist.edges.front()) / span;
        double h = (kHeight - 2 * kPad) * static_cast<double>(hist.counts[i]) /
                   static_cast<double>(max_count);
        out += "<rect x=\"" + num(x0) + "\" y=\"" + num(kHeight - kPad - h) +
               "\" width=\"" + num(std::max(x1 - x0 - 1, 1.0)) + "\" height=\"" + num(h) +
               "\" fill=\"steelblue\"/>\n";
    }
    if (hist.predicted_min_buffer) {
        double cut = hist.edges.back() - *hist.predicted_min_buffer;
        if (cut >= hist.edges.front() && cut <= hist.edges.back()) {
            double x = kPad + (kWidth - 2 * kPad) * (cut - hist.edges.front()) / span;
            out += "<line x1=\"" + num(x) + "\" y1=\"" + num(kPad) + "\" x2=\"" + num(x) +
                   "\" y2=\"" + num(kHeight - kPad) +
                   "\" stroke=\"crimson\" stroke-dasharray=\"4 3\"/>\n";
            out += label(x + 4, kPad + 12, "B - dhi*bdp/sqrt(n)", "crimson");
        }
    }
    out += label(kPad + 4, kPad - 8, "queue depth distribution", "black");
    out += "</svg>\n";
    return out;
}

}  // namespace bufsim::svgplot
