#include "forager/harness/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace forager::harness {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<double> MetricsLog::rewards() const {
    std::vector<double> out;
    out.reserve(records_.size());
    for (const EpisodeRecord& r : records_) out.push_back(r.reward);
    return out;
}

bool MetricsLog::has_share_telemetry() const {
    for (const EpisodeRecord& r : records_)
        if (r.share_a1 != 0.0 || r.share_a2 != 0.0 || r.share_other != 0.0) return true;
    return false;
}

std::string MetricsLog::to_csv() const {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const EpisodeRecord& r : records_) {
        out << r.episode << ',' << r.seed << ',' << format_double(r.reward) << ',' << r.steps
            << ',' << format_double(r.share_a1) << ',' << format_double(r.share_a2) << ','
            << format_double(r.share_other) << ',' << r.wall_ms << '\n';
    }
    return out.str();
}

void MetricsLog::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("metrics: cannot write " + path);
    out << to_csv();
}

MetricsLog MetricsLog::from_csv_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("metrics: empty CSV");
    if (line != kCsvHeader) throw std::runtime_error("metrics: unexpected CSV header: " + line);
    MetricsLog log;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ls, tok, ',')) cols.push_back(tok);
        if (cols.size() != 8)
            throw std::runtime_error("metrics: line " + std::to_string(line_no) +
                                     ": expected 8 columns");
        EpisodeRecord r;
        try {
            r.episode = std::stol(cols[0]);
            r.seed = std::stoull(cols[1]);
            r.reward = std::stod(cols[2]);
            r.steps = std::stol(cols[3]);
            r.share_a1 = std::stod(cols[4]);
            r.share_a2 = std::stod(cols[5]);
            r.share_other = std::stod(cols[6]);
            r.wall_ms = std::stoll(cols[7]);
        } catch (const std::exception&) {
            throw std::runtime_error("metrics: line " + std::to_string(line_no) + ": bad value");
        }
        log.append(r);
    }
    return log;
}

MetricsLog MetricsLog::read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("metrics: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_csv_text(ss.str());
}

std::vector<double> moving_average(const std::vector<double>& xs, int window) {
    if (window < 1) throw std::invalid_argument("moving_average: window must be >= 1");
    std::vector<double> out(xs.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        acc += xs[i];
        if (i >= static_cast<std::size_t>(window)) acc -= xs[i - window];
        const std::size_t n = std::min<std::size_t>(i + 1, window);
        out[i] = acc / static_cast<double>(n);
    }
    return out;
}

std::vector<CompareRow> compare_table(const std::map<std::string, MetricsLog>& logs, long tail) {
    std::vector<CompareRow> rows;
    for (const auto& [name, log] : logs) {
        if (log.empty()) throw std::invalid_argument("compare_table: empty log for " + name);
        const std::vector<double> rewards = log.rewards();
        const std::size_t n = std::min<std::size_t>(rewards.size(), static_cast<std::size_t>(tail));
        const std::size_t begin = rewards.size() - n;
        double mean = 0.0;
        for (std::size_t i = begin; i < rewards.size(); ++i) mean += rewards[i];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = begin; i < rewards.size(); ++i)
            var += (rewards[i] - mean) * (rewards[i] - mean);
        var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
        rows.push_back({name, mean, std::sqrt(var)});
    }
    return rows;
}

std::string compare_table_csv(const std::vector<CompareRow>& rows) {
    std::ostringstream out;
    out << "variant,mean,std\n";
    for (const CompareRow& r : rows)
        out << r.variant << ',' << format_double(r.mean) << ',' << format_double(r.stddev) << '\n';
    return out.str();
}

double share_a2_slope(const MetricsLog& log, int window) {
    if (window < 1) throw std::invalid_argument("share_a2_slope: window must be >= 1");
    std::vector<double> ys;
    const auto& recs = log.records();
    for (std::size_t begin = 0; begin < recs.size(); begin += window) {
        const std::size_t end = std::min(recs.size(), begin + window);
        double mean = 0.0;
        for (std::size_t i = begin; i < end; ++i) mean += recs[i].share_a2;
        ys.push_back(mean / static_cast<double>(end - begin));
    }
    const std::size_t n = ys.size();
    if (n < 2) return 0.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += ys[i];
        sxx += x * x;
        sxy += x * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    return denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

} // namespace forager::harness
