#include "forager/harness/plots.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace forager::harness {

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("plots: cannot write " + path);
    out << content;
}

std::vector<double> windowed_means(const std::vector<double>& xs, int window) {
    std::vector<double> out;
    for (std::size_t begin = 0; begin < xs.size(); begin += window) {
        const std::size_t end = std::min(xs.size(), begin + static_cast<std::size_t>(window));
        double m = 0.0;
        for (std::size_t i = begin; i < end; ++i) m += xs[i];
        out.push_back(m / static_cast<double>(end - begin));
    }
    return out;
}

} // namespace

std::string svg_line_chart(const std::vector<double>& ys, const std::string& title) {
    if (ys.empty()) throw std::invalid_argument("svg_line_chart: empty series");
    const double w = 640.0, h = 400.0, margin = 48.0;
    double lo = *std::min_element(ys.begin(), ys.end());
    double hi = *std::max_element(ys.begin(), ys.end());
    if (hi - lo < 1e-12) {
        hi += 1.0;
        lo -= 1.0;
    }
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    svg << "  <rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    svg << "  <text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";
    svg << "  <line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << w - margin
        << "\" y2=\"" << h - margin << "\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << h - margin << "\" stroke=\"black\"/>\n";
    svg << "  <text x=\"8\" y=\"" << margin << "\" font-size=\"11\">" << format_double(hi)
        << "</text>\n";
    svg << "  <text x=\"8\" y=\"" << h - margin << "\" font-size=\"11\">" << format_double(lo)
        << "</text>\n";
    svg << "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    const double spanx = w - 2 * margin;
    const double spany = h - 2 * margin;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double x =
            margin + (ys.size() > 1 ? spanx * static_cast<double>(i) / (ys.size() - 1) : spanx / 2);
        const double y = h - margin - spany * (ys[i] - lo) / (hi - lo);
        svg << format_double(x) << ',' << format_double(y) << ' ';
    }
    svg << "\"/>\n</svg>\n";
    return svg.str();
}

std::vector<std::string> emit_plots(const MetricsLog& log, const std::string& out_dir,
                                    int window) {
    if (log.empty()) throw std::invalid_argument("emit_plots: empty log");
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;

    const std::vector<double> rewards = log.rewards();
    const std::vector<double> avg = moving_average(rewards, window);
    {
        std::ostringstream csv;
        csv << "episode,reward,moving_avg\n";
        for (std::size_t i = 0; i < rewards.size(); ++i)
            csv << log.records()[i].episode << ',' << format_double(rewards[i]) << ','
                << format_double(avg[i]) << '\n';
        const std::string p = out_dir + "/reward_curve.csv";
        write_file(p, csv.str());
        written.push_back(p);
    }
    {
        const std::string p = out_dir + "/reward_curve.svg";
        write_file(p, svg_line_chart(avg, "reward (moving average)"));
        written.push_back(p);
    }

    if (!log.has_share_telemetry()) return written;

    std::vector<double> a1, a2, other;
    for (const EpisodeRecord& r : log.records()) {
        a1.push_back(r.share_a1);
        a2.push_back(r.share_a2);
        other.push_back(r.share_other);
    }
    const std::vector<double> wa1 = windowed_means(a1, window);
    const std::vector<double> wa2 = windowed_means(a2, window);
    const std::vector<double> wother = windowed_means(other, window);
    {
        std::ostringstream csv;
        csv << "window,share_a1,share_a2,share_other\n";
        for (std::size_t i = 0; i < wa1.size(); ++i)
            csv << i << ',' << format_double(wa1[i]) << ',' << format_double(wa2[i]) << ','
                << format_double(wother[i]) << '\n';
        const std::string p = out_dir + "/selection_shares.csv";
        write_file(p, csv.str());
        written.push_back(p);
    }
    const std::pair<const char*, const std::vector<double>*> series[] = {
        {"share_a1", &wa1}, {"share_a2", &wa2}, {"share_other", &wother}};
    for (const auto& [name, ys] : series) {
        const std::string p = out_dir + "/" + name + ".svg";
        write_file(p, svg_line_chart(*ys, name));
        written.push_back(p);
    }
    return written;
}

} // namespace forager::harness
