#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "statarb/mc.hpp"

namespace statarb {

enum class TestKind { AdfNoConstant, KssRaw, JohansenTrace };

std::string to_string(TestKind kind);
TestKind test_kind_from_string(const std::string& s);

// Simulated finite-sample null distribution of one test statistic, stored as
// quantile rows over a probability grid, one row per simulated sample size.
struct CriticalValueTable {
    int version = 1;
    TestKind kind = TestKind::AdfNoConstant;
    int dims = 1;  // system dimension for the trace test, 1 otherwise
    bool right_tail = false;
    std::uint64_t seed = 0;
    std::vector<int> sample_sizes;          // ascending
    std::vector<std::int64_t> reps;         // per sample size
    std::vector<double> probs;              // ascending, in (0,1)
    std::vector<std::vector<double>> quantiles;  // [sample size][prob]

    // Null quantile at cumulative probability p, interpolating rows in 1/T
    // and clamping T outside the simulated grid.
    double quantile(double prob, int T) const;

    // Tail probability of observing `stat` under the null: left tail for the
    // regression t-ratios, right tail for the trace statistic.
    double p_value(double stat, int T) const;

    void validate() const;
};

struct GenerationProfile {
    std::vector<int> sample_sizes;
    std::vector<std::int64_t> reps;
    std::uint64_t seed = 0;
};

GenerationProfile default_profile(TestKind kind, int dims);

CriticalValueTable generate_table(TestKind kind, int dims, const GenerationProfile& profile,
                                  ExecutionMode mode = ExecutionMode::Parallel);

CriticalValueTable load_table(const std::string& path);
void save_table(const CriticalValueTable& table, const std::string& path);

// Lazy table registry backed by a JSON cache directory. table() loads from
// disk when a cached file matches the profile, otherwise simulates the table
// and writes it back. Safe to call from multiple threads; generation holds
// the registry lock, so warm tables up front before fanning out.
class CriticalValueStore {
  public:
    explicit CriticalValueStore(std::string cache_dir = "",
                                ExecutionMode mode = ExecutionMode::Parallel);

    const CriticalValueTable& table(TestKind kind, int dims = 1) const;

    // Replaces the profile used for lazily generated tables (tests use small
    // replication counts here).
    void set_profile(TestKind kind, int dims, GenerationProfile profile);

    // Registers a prebuilt table, bypassing disk and generation.
    void put(CriticalValueTable table);

  private:
    std::string cache_path(TestKind kind, int dims, const GenerationProfile& p) const;

    std::string cache_dir_;
    ExecutionMode mode_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<int, int>, CriticalValueTable> tables_;
    std::map<std::pair<int, int>, GenerationProfile> profiles_;
};

}  // namespace statarb
