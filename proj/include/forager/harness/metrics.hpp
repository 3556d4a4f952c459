#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace forager::harness {

struct EpisodeRecord {
    long episode = 0;
    std::uint64_t seed = 0;
    double reward = 0.0;
    long steps = 0;
    double share_a1 = 0.0;
    double share_a2 = 0.0;
    double share_other = 0.0;
    std::int64_t wall_ms = 0;
};

// Append-only episode records; CSV serialization round-trips the doubles
// exactly (shortest round-trip formatting).
class MetricsLog {
public:
    static constexpr const char* kCsvHeader =
        "episode,seed,reward,steps,share_a1,share_a2,share_other,wall_ms";

    void append(EpisodeRecord rec) { records_.push_back(rec); }
    const std::vector<EpisodeRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    std::vector<double> rewards() const;
    bool has_share_telemetry() const;

    std::string to_csv() const;
    void write_csv(const std::string& path) const;
    static MetricsLog from_csv_text(const std::string& text);
    static MetricsLog read_csv(const std::string& path);

private:
    std::vector<EpisodeRecord> records_;
};

// Trailing mean; the first window-1 entries average what is available.
std::vector<double> moving_average(const std::vector<double>& xs, int window);

struct CompareRow {
    std::string variant;
    double mean = 0.0;
    double stddev = 0.0;
};

// Mean and standard deviation of each variant over its last `tail` episodes.
std::vector<CompareRow> compare_table(const std::map<std::string, MetricsLog>& logs, long tail);

std::string compare_table_csv(const std::vector<CompareRow>& rows);

// Least-squares slope of the windowed share_a2 series; 0 for fewer than two
// windows.
double share_a2_slope(const MetricsLog& log, int window);

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

} // namespace forager::harness
