#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "statarb/critical_values.hpp"
#include "statarb/errors.hpp"
#include "statarb/mc.hpp"
#include "statarb/synth.hpp"
#include "statarb/unit_root.hpp"

using namespace statarb;

namespace {

GenerationProfile tiny_profile(std::uint64_t seed = 7) {
    GenerationProfile p;
    p.sample_sizes = {100, 200};
    p.reps = {2500, 2500};
    p.seed = seed;
    return p;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("statarb_cv_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("serial and parallel replication runs are bit identical") {
    auto stat = [](std::uint64_t seed) { return adf_statistic(simulate_random_walk(120, seed), 0); };
    auto serial = run_replications(800, 99, ExecutionMode::Serial, stat);
    auto parallel = run_replications(800, 99, ExecutionMode::Parallel, stat);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) REQUIRE(serial[i] == parallel[i]);
}

TEST_CASE("generated tables are identical across execution modes") {
    auto p = tiny_profile();
    auto a = generate_table(TestKind::AdfNoConstant, 1, p, ExecutionMode::Serial);
    auto b = generate_table(TestKind::AdfNoConstant, 1, p, ExecutionMode::Parallel);
    REQUIRE(a.quantiles.size() == b.quantiles.size());
    for (std::size_t r = 0; r < a.quantiles.size(); ++r)
        for (std::size_t c = 0; c < a.quantiles[r].size(); ++c)
            REQUIRE(a.quantiles[r][c] == b.quantiles[r][c]);
}

TEST_CASE("quantile rows are monotone in probability") {
    for (TestKind kind : {TestKind::AdfNoConstant, TestKind::KssRaw}) {
        auto table = generate_table(kind, 1, tiny_profile());
        table.validate();
        REQUIRE(table.probs.size() >= 3);
        for (const auto& row : table.quantiles)
            for (std::size_t i = 1; i < row.size(); ++i) CHECK(row[i - 1] <= row[i]);
    }
}

TEST_CASE("p_value and quantile are consistent inverses") {
    auto table = generate_table(TestKind::AdfNoConstant, 1, tiny_profile());
    for (int T : {100, 150, 200}) {
        for (double prob : {0.01, 0.05, 0.10, 0.5, 0.9}) {
            const double q = table.quantile(prob, T);
            CHECK(table.p_value(q, T) == doctest::Approx(prob).epsilon(1e-6));
        }
        // A statistic below every simulated draw has p-value at the grid floor,
        // one above has p-value at the grid ceiling.
        CHECK(table.p_value(-100.0, T) <= table.probs.front());
        CHECK(table.p_value(100.0, T) >= table.probs.back());
    }
}

TEST_CASE("trace table reads from the right tail") {
    auto p = tiny_profile();
    p.reps = {1500, 1500};
    auto table = generate_table(TestKind::JohansenTrace, 2, p);
    CHECK(table.right_tail);
    // For a right-tailed statistic large values are significant.
    CHECK(table.p_value(1000.0, 150) <= table.probs.front());
    CHECK(table.p_value(-1000.0, 150) >= table.probs.back());
    const double q95 = table.quantile(0.95, 150);
    CHECK(table.p_value(q95, 150) == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("quantiles interpolate between simulated sample sizes") {
    auto table = generate_table(TestKind::AdfNoConstant, 1, tiny_profile());
    const double q100 = table.quantile(0.05, 100);
    const double q200 = table.quantile(0.05, 200);
    const double q150 = table.quantile(0.05, 150);
    CHECK(((q100 <= q150 && q150 <= q200) || (q200 <= q150 && q150 <= q100)));
    // Outside the grid the nearest simulated size applies.
    CHECK(table.quantile(0.05, 50) == q100);
    CHECK(table.quantile(0.05, 5000) == q200);
}

TEST_CASE("small-sample adf quantiles sit near the asymptotic table") {
    GenerationProfile p;
    p.sample_sizes = {500};
    p.reps = {20000};
    p.seed = 3;
    auto table = generate_table(TestKind::AdfNoConstant, 1, p);
    // No-constant Dickey-Fuller asymptotics: 1% -2.58, 5% -1.95, 10% -1.62.
    CHECK(table.quantile(0.01, 500) == doctest::Approx(-2.58).epsilon(0.03));
    CHECK(table.quantile(0.05, 500) == doctest::Approx(-1.95).epsilon(0.03));
    CHECK(table.quantile(0.10, 500) == doctest::Approx(-1.62).epsilon(0.03));
}

TEST_CASE("tables survive a save/load round trip") {
    TempDir dir;
    auto table = generate_table(TestKind::KssRaw, 1, tiny_profile());
    const std::string path = (dir.path / "kss.json").string();
    save_table(table, path);
    auto loaded = load_table(path);

    CHECK(loaded.kind == table.kind);
    CHECK(loaded.dims == table.dims);
    CHECK(loaded.right_tail == table.right_tail);
    CHECK(loaded.seed == table.seed);
    CHECK(loaded.sample_sizes == table.sample_sizes);
    CHECK(loaded.reps == table.reps);
    REQUIRE(loaded.probs.size() == table.probs.size());
    for (std::size_t i = 0; i < table.probs.size(); ++i)
        CHECK(loaded.probs[i] == doctest::Approx(table.probs[i]).epsilon(1e-15));
    REQUIRE(loaded.quantiles.size() == table.quantiles.size());
    for (std::size_t r = 0; r < table.quantiles.size(); ++r)
        for (std::size_t c = 0; c < table.quantiles[r].size(); ++c)
            CHECK(loaded.quantiles[r][c] == doctest::Approx(table.quantiles[r][c]).epsilon(1e-14));

    CHECK_THROWS_AS(load_table((dir.path / "missing.json").string()), ConfigError);
}

TEST_CASE("store generates once and reuses the disk cache") {
    TempDir dir;
    {
        CriticalValueStore store(dir.path.string(), ExecutionMode::Serial);
        store.set_profile(TestKind::AdfNoConstant, 1, tiny_profile());
        const auto& t = store.table(TestKind::AdfNoConstant);
        CHECK(t.sample_sizes == std::vector<int>{100, 200});
    }
    // One cache file written.
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir.path)) {
        (void)e;
        ++files;
    }
    CHECK(files == 1);

    // A second store with the same profile loads rather than regenerates:
    // corrupt detection is by profile match, so a matching file is trusted.
    CriticalValueStore again(dir.path.string(), ExecutionMode::Serial);
    again.set_profile(TestKind::AdfNoConstant, 1, tiny_profile());
    auto direct = generate_table(TestKind::AdfNoConstant, 1, tiny_profile(), ExecutionMode::Serial);
    const auto& cached = again.table(TestKind::AdfNoConstant);
    REQUIRE(cached.quantiles.size() == direct.quantiles.size());
    for (std::size_t r = 0; r < direct.quantiles.size(); ++r)
        for (std::size_t c = 0; c < direct.quantiles[r].size(); ++c)
            CHECK(cached.quantiles[r][c] == doctest::Approx(direct.quantiles[r][c]).epsilon(1e-14));

    // A different profile must not reuse the stale file.
    CriticalValueStore other(dir.path.string(), ExecutionMode::Serial);
    other.set_profile(TestKind::AdfNoConstant, 1, tiny_profile(8));
    const auto& regenerated = other.table(TestKind::AdfNoConstant);
    CHECK(regenerated.seed == 8);
}

TEST_CASE("store put bypasses generation") {
    CriticalValueStore store("", ExecutionMode::Serial);
    CriticalValueTable table;
    table.kind = TestKind::AdfNoConstant;
    table.dims = 1;
    table.seed = 1;
    table.sample_sizes = {100};
    table.reps = {10};
    table.probs = {0.01, 0.5, 0.99};
    table.quantiles = {{-2.5, -0.4, 1.0}};
    store.put(table);
    CHECK(store.table(TestKind::AdfNoConstant).quantiles[0][0] == -2.5);
}

TEST_CASE("two independent half-size runs bracket the full-run quantile") {
    // Basic stability: quantile estimates from disjoint seeds agree to a few
    // percent at these replication counts.
    auto stat = [](std::uint64_t seed) { return adf_statistic(simulate_random_walk(200, seed), 0); };
    auto a = run_replications(4000, 11, ExecutionMode::Serial, stat);
    auto b = run_replications(4000, 12, ExecutionMode::Serial, stat);
    auto q = [](std::vector<double> v, double p) {
        std::sort(v.begin(), v.end());
        return v[static_cast<std::size_t>(p * static_cast<double>(v.size() - 1))];
    };
    CHECK(q(a, 0.05) == doctest::Approx(q(b, 0.05)).epsilon(0.06));
    CHECK(q(a, 0.5) == doctest::Approx(q(b, 0.5)).epsilon(0.25));
}
