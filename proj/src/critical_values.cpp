#include "statarb/critical_values.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "statarb/errors.hpp"
#include "statarb/johansen.hpp"
#include "statarb/synth.hpp"
#include "statarb/unit_root.hpp"

namespace statarb {

namespace {

// Tails are denser than the body: significance work lives at 1% and below
// for the t-ratio tests and at 90%+ for the trace test.
const std::vector<double> kProbGrid = {
    0.0005, 0.001, 0.0025, 0.005, 0.0075, 0.01,  0.0125, 0.015, 0.02,  0.025, 0.03,
    0.04,   0.05,  0.06,   0.075, 0.10,   0.125, 0.15,   0.20,  0.25,  0.30,  0.40,
    0.50,   0.60,  0.70,   0.75,  0.80,   0.85,  0.90,   0.925, 0.95,  0.96,  0.97,
    0.975,  0.98,  0.985,  0.99,  0.9925, 0.995, 0.9975, 0.999, 0.9995};

const std::vector<int> kSampleGrid = {100, 250, 500, 1000, 2500, 5000, 10000};

double sorted_quantile(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 0) throw DegenerateInputError("quantile of empty sample");
    const double h = p * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Quantile row for sample size T, interpolating between simulated rows
// linearly in 1/T and clamping beyond the grid.
std::vector<double> row_at(const CriticalValueTable& t, int T) {
    const auto& sizes = t.sample_sizes;
    if (T <= sizes.front()) return t.quantiles.front();
    if (T >= sizes.back()) return t.quantiles.back();
    std::size_t i = 0;
    while (i + 2 < sizes.size() && sizes[i + 1] < T) ++i;
    const double x0 = 1.0 / sizes[i];
    const double x1 = 1.0 / sizes[i + 1];
    const double w = (1.0 / T - x0) / (x1 - x0);
    std::vector<double> row(t.probs.size());
    for (std::size_t j = 0; j < row.size(); ++j)
        row[j] = (1.0 - w) * t.quantiles[i][j] + w * t.quantiles[i + 1][j];
    return row;
}

double mc_statistic(TestKind kind, int dims, int T, std::uint64_t rep_seed) {
    switch (kind) {
        case TestKind::AdfNoConstant:
            return adf_statistic(simulate_random_walk(T, rep_seed), 0);
        case TestKind::KssRaw:
            return kss_statistic(simulate_random_walk(T, rep_seed), 0);
        case TestKind::JohansenTrace: {
            Eigen::MatrixXd levels(T, dims);
            for (int j = 0; j < dims; ++j) {
                auto walk = simulate_random_walk(T, derive_seed(rep_seed, static_cast<std::uint64_t>(j)));
                for (int r = 0; r < T; ++r) levels(r, j) = walk[static_cast<std::size_t>(r)];
            }
            return johansen_trace(levels, 1).trace_stats.front();
        }
    }
    throw ConfigError("unknown test kind");
}

}  // namespace

std::string to_string(TestKind kind) {
    switch (kind) {
        case TestKind::AdfNoConstant: return "adf_nc";
        case TestKind::KssRaw: return "kss_raw";
        case TestKind::JohansenTrace: return "johansen_trace";
    }
    return "unknown";
}

TestKind test_kind_from_string(const std::string& s) {
    if (s == "adf_nc") return TestKind::AdfNoConstant;
    if (s == "kss_raw") return TestKind::KssRaw;
    if (s == "johansen_trace") return TestKind::JohansenTrace;
    throw ConfigError("unknown test kind: " + s);
}

double CriticalValueTable::quantile(double prob, int T) const {
    const auto row = row_at(*this, T);
    const double p = std::clamp(prob, probs.front(), probs.back());
    std::size_t j = 0;
    while (j + 2 < probs.size() && probs[j + 1] < p) ++j;
    const double span = probs[j + 1] - probs[j];
    const double w = span > 0.0 ? (p - probs[j]) / span : 0.0;
    return (1.0 - w) * row[j] + w * row[j + 1];
}

double CriticalValueTable::p_value(double stat, int T) const {
    const auto row = row_at(*this, T);
    const std::size_t m = row.size();
    double cdf;
    if (stat <= row.front()) {
        const double dq = row[1] - row[0];
        const double slope = dq > 0.0 ? (probs[1] - probs[0]) / dq : 0.0;
        cdf = std::clamp(probs[0] + (stat - row[0]) * slope, 0.0, probs[0]);
    } else if (stat >= row.back()) {
        const double dq = row[m - 1] - row[m - 2];
        const double slope = dq > 0.0 ? (probs[m - 1] - probs[m - 2]) / dq : 0.0;
        cdf = std::clamp(probs[m - 1] + (stat - row[m - 1]) * slope, probs[m - 1], 1.0);
    } else {
        std::size_t j = 0;
        while (j + 2 < m && row[j + 1] < stat) ++j;
        const double dq = row[j + 1] - row[j];
        // A flat segment is a probability atom; report its upper edge.
        cdf = dq > 0.0 ? probs[j] + (stat - row[j]) / dq * (probs[j + 1] - probs[j]) : probs[j + 1];
    }
    const double p = right_tail ? 1.0 - cdf : cdf;
    return std::clamp(p, 0.0, 1.0);
}

void CriticalValueTable::validate() const {
    if (sample_sizes.empty() || probs.size() < 2) throw ConfigError("critical value table: empty grid");
    if (!std::is_sorted(sample_sizes.begin(), sample_sizes.end()))
        throw ConfigError("critical value table: sample sizes not ascending");
    if (!std::is_sorted(probs.begin(), probs.end()))
        throw ConfigError("critical value table: probability grid not ascending");
    if (quantiles.size() != sample_sizes.size() || reps.size() != sample_sizes.size())
        throw ConfigError("critical value table: row count mismatch");
    for (const auto& row : quantiles) {
        if (row.size() != probs.size()) throw ConfigError("critical value table: row width mismatch");
        if (!std::is_sorted(row.begin(), row.end()))
            throw ConfigError("critical value table: quantile row not monotone");
    }
}

GenerationProfile default_profile(TestKind kind, int dims) {
    GenerationProfile p;
    p.sample_sizes = kSampleGrid;
    if (kind == TestKind::JohansenTrace) {
        p.reps = {50000, 50000, 50000, 50000, 20000, 12000, 8000};
        // Replication cost grows with the system dimension; thin the counts
        // so wide panels stay affordable, the tail quantiles converge fast.
        if (dims >= 5)
            for (auto& r : p.reps) r = std::max<std::int64_t>(4000, r / 4);
    } else {
        p.reps = {100000, 100000, 100000, 100000, 40000, 25000, 15000};
    }
    switch (kind) {
        case TestKind::AdfNoConstant: p.seed = 0xadf00001u; break;
        case TestKind::KssRaw: p.seed = 0x1c550001u; break;
        case TestKind::JohansenTrace: p.seed = 0x30484e53u + static_cast<std::uint64_t>(dims); break;
    }
    return p;
}

CriticalValueTable generate_table(TestKind kind, int dims, const GenerationProfile& profile,
                                  ExecutionMode mode) {
    if (profile.sample_sizes.size() != profile.reps.size() || profile.sample_sizes.empty())
        throw ConfigError("generation profile: sample sizes and reps must align");
    if (kind != TestKind::JohansenTrace && dims != 1)
        throw ConfigError("generation profile: dims applies to the trace test only");

    CriticalValueTable table;
    table.kind = kind;
    table.dims = dims;
    table.right_tail = kind == TestKind::JohansenTrace;
    table.seed = profile.seed;
    table.sample_sizes = profile.sample_sizes;
    table.reps = profile.reps;
    table.probs = kProbGrid;
    table.quantiles.resize(profile.sample_sizes.size());

    for (std::size_t si = 0; si < profile.sample_sizes.size(); ++si) {
        const int T = profile.sample_sizes[si];
        const std::uint64_t size_seed = derive_seed(profile.seed, 1000 + si);
        auto stats = run_replications(profile.reps[si], size_seed, mode,
                                      [&](std::uint64_t rep_seed) {
                                          return mc_statistic(kind, dims, T, rep_seed);
                                      });
        std::sort(stats.begin(), stats.end());
        table.quantiles[si].resize(table.probs.size());
        for (std::size_t j = 0; j < table.probs.size(); ++j)
            table.quantiles[si][j] = sorted_quantile(stats, table.probs[j]);
    }
    table.validate();
    return table;
}

void save_table(const CriticalValueTable& table, const std::string& path) {
    nlohmann::json j;
    j["version"] = table.version;
    j["kind"] = to_string(table.kind);
    j["dims"] = table.dims;
    j["right_tail"] = table.right_tail;
    j["seed"] = table.seed;
    j["sample_sizes"] = table.sample_sizes;
    j["reps"] = table.reps;
    j["probs"] = table.probs;
    j["quantiles"] = table.quantiles;
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write critical value table: " + path);
    out << j.dump(1) << "\n";
}

CriticalValueTable load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read critical value table: " + path);
    nlohmann::json j;
    in >> j;
    CriticalValueTable t;
    t.version = j.at("version").get<int>();
    t.kind = test_kind_from_string(j.at("kind").get<std::string>());
    t.dims = j.at("dims").get<int>();
    t.right_tail = j.at("right_tail").get<bool>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.sample_sizes = j.at("sample_sizes").get<std::vector<int>>();
    t.reps = j.at("reps").get<std::vector<std::int64_t>>();
    t.probs = j.at("probs").get<std::vector<double>>();
    t.quantiles = j.at("quantiles").get<std::vector<std::vector<double>>>();
    t.validate();
    return t;
}

CriticalValueStore::CriticalValueStore(std::string cache_dir, ExecutionMode mode)
    : cache_dir_(std::move(cache_dir)), mode_(mode) {}

std::string CriticalValueStore::cache_path(TestKind kind, int dims, const GenerationProfile&) const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_d%d.json", to_string(kind).c_str(), dims);
    return cache_dir_ + "/" + buf;
}

void CriticalValueStore::set_profile(TestKind kind, int dims, GenerationProfile profile) {
    std::lock_guard<std::mutex> lock(mu_);
    const auto key = std::make_pair(static_cast<int>(kind), dims);
    profiles_[key] = std::move(profile);
    tables_.erase(key);
}

void CriticalValueStore::put(CriticalValueTable table) {
    table.validate();
    std::lock_guard<std::mutex> lock(mu_);
    const auto key = std::make_pair(static_cast<int>(table.kind), table.dims);
    tables_[key] = std::move(table);
}

const CriticalValueTable& CriticalValueStore::table(TestKind kind, int dims) const {
    if (kind != TestKind::JohansenTrace) dims = 1;
    const auto key = std::make_pair(static_cast<int>(kind), dims);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = tables_.find(key);
    if (it != tables_.end()) return it->second;

    auto pit = profiles_.find(key);
    const GenerationProfile profile = pit != profiles_.end() ? pit->second : default_profile(kind, dims);

    if (!cache_dir_.empty()) {
        const std::string path = cache_path(kind, dims, profile);
        if (std::filesystem::exists(path)) {
            try {
                CriticalValueTable t = load_table(path);
                if (t.seed == profile.seed && t.sample_sizes == profile.sample_sizes &&
                    t.reps == profile.reps) {
                    return tables_.emplace(key, std::move(t)).first->second;
                }
            } catch (const Error&) {
                // stale or corrupt cache entry: fall through and regenerate
            }
        }
    }

    CriticalValueTable t = generate_table(kind, dims, profile, mode_);
    if (!cache_dir_.empty()) save_table(t, cache_path(kind, dims, profile));
    return tables_.emplace(key, std::move(t)).first->second;
}

}  // namespace statarb
