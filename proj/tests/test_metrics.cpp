#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ibrisk/errors.hpp"
#include "ibrisk/metrics.hpp"
#include "ibrisk/rng.hpp"

using namespace ibrisk;

namespace {

// Hand-built trajectory over n_real banks with uniform asset weights.
Trajectory make_traj(std::vector<double> s, std::vector<double> i1, std::vector<double> i2,
                     std::vector<Compartment> final_state, bool censored = false) {
    Trajectory t;
    t.n_real = static_cast<int>(final_state.size());
    t.s = s;
    t.i1 = i1;
    t.i2 = i2;
    t.s_w = std::move(s);
    t.i1_w = std::move(i1);
    t.i2_w = std::move(i2);
    t.theta.assign(t.s.size(), 1.0);
    t.final_state = std::move(final_state);
    t.censored = censored;
    for (std::size_t k = 0; k < t.s.size(); ++k) {
        t.mu_log.push_back(std::vector<double>(t.n_real, 0.0));
    }
    return t;
}

} // namespace

TEST_CASE("scalar accumulator: degenerate and two-point samples") {
    ScalarAccumulator one;
    one.add(0.7);
    const auto s1 = one.stats();
    CHECK(s1.mean == 0.7);
    CHECK(s1.lo == s1.hi); // a single run has zero interval width

    ScalarAccumulator two;
    two.add(0.0);
    two.add(1.0);
    const auto s2 = two.stats();
    CHECK(s2.mean == 0.5);
    // sd = sqrt(0.5), stderr = 0.5, band = 1.96 * 0.5.
    CHECK(s2.hi - s2.mean == doctest::Approx(1.96 * 0.5));
}

TEST_CASE("prevalence: all-healthy trajectories give s = 1 everywhere") {
    std::vector<Trajectory> trajs;
    for (int k = 0; k < 3; ++k) {
        trajs.push_back(make_traj({1.0}, {0.0}, {0.0},
                                  {Compartment::Exposed, Compartment::Exposed}));
    }
    const auto prev = prevalence(trajs, 10, Weighting::Count);
    REQUIRE(prev.s.size() == 11);
    for (const auto& cell : prev.s) {
        CHECK(cell.mean == 1.0);
        CHECK(cell.lo == cell.hi); // zero variance, zero width
    }
    CHECK(prev.i2.back().mean == 0.0);
}

TEST_CASE("prevalence pads short runs with their absorbing state") {
    // One run absorbs at t = 1 with i2 = 0.5; grids longer than the run must
    // keep reading 0.5.
    std::vector<Trajectory> trajs = {make_traj({1.0, 0.5}, {0.0, 0.0}, {0.0, 0.5},
                                               {Compartment::Bankrupted,
                                                Compartment::Exposed})};
    const auto prev = prevalence(trajs, 7, Weighting::Count);
    CHECK(prev.i2.back().mean == 0.5);
    CHECK(prev.s.back().mean == 0.5);
}

TEST_CASE("bankruptcy ratio: trivial and averaged cases") {
    std::vector<Trajectory> none = {make_traj({1.0}, {0.0}, {0.0},
                                              {Compartment::Exposed,
                                               Compartment::Exposed})};
    CHECK(bankruptcy_ratio(none, Weighting::Count).ratio.mean == 0.0);

    std::vector<Trajectory> split = {
        make_traj({1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {Compartment::Exposed}),
        make_traj({0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}, {Compartment::Bankrupted})};
    CHECK(bankruptcy_ratio(split, Weighting::Count).ratio.mean == 0.5);

    // Padding never changes the ratio: extend the first run by hand.
    auto padded = split;
    padded[0].s.push_back(padded[0].s.back());
    padded[0].i1.push_back(padded[0].i1.back());
    padded[0].i2.push_back(padded[0].i2.back());
    padded[0].i2_w.push_back(padded[0].i2_w.back());
    CHECK(bankruptcy_ratio(padded, Weighting::Count).ratio.mean ==
          bankruptcy_ratio(split, Weighting::Count).ratio.mean);
}

TEST_CASE("bankruptcy ratio counts censored runs") {
    auto capped = make_traj({0.5, 0.5}, {0.5, 0.5}, {0.0, 0.0},
                            {Compartment::Distressed, Compartment::Exposed}, true);
    std::vector<Trajectory> trajs = {capped};
    const auto res = bankruptcy_ratio(trajs, Weighting::Count);
    CHECK(res.censored_runs == 1);
    CHECK(res.runs == 1);
}

TEST_CASE("country decomposition stacks to the total ratio") {
    std::vector<NodeMeta> nodes = {{"B0", "AT", false},
                                   {"B1", "AT", false},
                                   {"B2", "DE", false},
                                   {"B3", "DE", false},
                                   {"G", "ZZ", true}};
    std::vector<double> weight = {0.25, 0.25, 0.25, 0.25, 0.0};

    SUBCASE("defaults only in one country put all mass there") {
        Trajectory t = make_traj({0.5, 0.5}, {0.0, 0.0}, {0.5, 0.5},
                                 {Compartment::Bankrupted, Compartment::Bankrupted,
                                  Compartment::Exposed, Compartment::Exposed,
                                  Compartment::Exposed});
        std::vector<Trajectory> trajs = {t};
        const auto dec = country_decomposition(trajs, nodes, weight, Weighting::Count);
        CHECK(dec.at("AT").mean == 0.5);
        CHECK(dec.at("DE").mean == 0.0);
        const auto total = bankruptcy_ratio(trajs, Weighting::Count).ratio.mean;
        CHECK(dec.at("AT").mean + dec.at("DE").mean == doctest::Approx(total).epsilon(1e-9));
    }
    SUBCASE("symmetric defaults split evenly") {
        Trajectory t = make_traj({0.5, 0.5}, {0.0, 0.0}, {0.5, 0.5},
                                 {Compartment::Bankrupted, Compartment::Exposed,
                                  Compartment::Bankrupted, Compartment::Exposed,
                                  Compartment::Exposed});
        std::vector<Trajectory> trajs = {t};
        const auto dec = country_decomposition(trajs, nodes, weight, Weighting::Assets);
        CHECK(dec.at("AT").mean == dec.at("DE").mean);
    }
}

TEST_CASE("mu dynamics: zeros stay zero and saturated lenders pin the mean at 1") {
    Trajectory healthy = make_traj({1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0},
                                   {Compartment::Exposed, Compartment::Exposed});
    std::vector<Trajectory> trajs = {healthy};
    auto summary = mu_dynamics(trajs, 5);
    for (const auto& step : summary) {
        CHECK(step.mean == 0.0);
        CHECK(step.max == 0.0);
        CHECK(step.q75 == 0.0);
    }

    Trajectory hot = healthy;
    hot.mu_log.clear();
    hot.mu_log.push_back({0.0, 0.0}); // t = 0: nobody infected yet
    hot.mu_log.push_back({1.0, 1.0}); // from t = 1 every lender is infected
    std::vector<Trajectory> hot_trajs = {hot};
    summary = mu_dynamics(hot_trajs, 4);
    CHECK(summary[0].mean == 0.0);
    for (std::size_t t = 1; t < summary.size(); ++t) {
        CHECK(summary[t].mean == 1.0);
        CHECK(summary[t].min == 1.0);
        CHECK(summary[t].median == 1.0);
    }
}

TEST_CASE("mu dynamics matches a hand-computed three-bank expectation") {
    // Two runs; bank-level mu fields chosen by hand. At t=1 the pooled sample
    // is {0.2, 0.4, 0.6, 0.0, 1.0, 0.4}: mean 13/30.
    Trajectory a = make_traj({1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0},
                             {Compartment::Exposed, Compartment::Exposed,
                              Compartment::Exposed});
    a.mu_log = {{0.0, 0.0, 0.0}, {0.2, 0.4, 0.6}};
    Trajectory b = a;
    b.mu_log = {{0.0, 0.0, 0.0}, {0.0, 1.0, 0.4}};
    std::vector<Trajectory> trajs = {a, b};
    const auto summary = mu_dynamics(trajs, 1);
    CHECK(summary[0].mean == 0.0);
    CHECK(summary[1].mean == doctest::Approx(13.0 / 30.0).epsilon(1e-12));
    CHECK(summary[1].min == 0.0);
    CHECK(summary[1].max == 1.0);
    CHECK(summary[1].samples == 6);
}

TEST_CASE("critical time scans the recorded multiplier") {
    Trajectory t = make_traj({1.0}, {0.0}, {0.0}, {Compartment::Exposed});

    SUBCASE("beta* = 0 crosses immediately") {
        t.theta = {1.0, 0.9};
        CHECK(critical_time(t, 0.0, 1.0) == 0);
    }
    SUBCASE("a healthy system with beta* = 1 never crosses") {
        t.theta = {2.0, 2.0, 2.0};
        CHECK_FALSE(critical_time(t, 1.0, 1.0).has_value());
    }
    SUBCASE("a scripted crossing at t = 7 is found at t = 7") {
        t.theta.assign(12, 1.4);
        for (std::size_t k = 7; k < t.theta.size(); ++k) t.theta[k] = 0.95;
        CHECK(critical_time(t, 0.4, 1.0) == 7);
    }
    SUBCASE("phi = 1 crossing equals the s-threshold rule") {
        RngStream rng(5);
        for (int trial = 0; trial < 200; ++trial) {
            const double beta_star = rng.uniform(0.0, 2.0);
            const int n = 10;
            Trajectory traj = make_traj({1.0}, {0.0}, {0.0}, {Compartment::Exposed});
            traj.s.clear();
            traj.theta.clear();
            double s = 1.0;
            for (int step = 0; step < 20; ++step) {
                traj.s.push_back(s);
                traj.theta.push_back(theta_multiplier(s, beta_star));
                if (rng.uniform01() < 0.4) s = std::max(0.0, s - 1.0 / n);
            }
            const auto got = critical_time(traj, beta_star, 1.0);
            std::optional<int> expected;
            for (std::size_t k = 0; k < traj.s.size(); ++k) {
                if (traj.s[k] <= 1.0 / (1.0 + beta_star)) {
                    expected = static_cast<int>(k);
                    break;
                }
            }
            CHECK(got == expected);
        }
    }
}

TEST_CASE("count and asset ratios coincide for equal asset weights") {
    // With uniform weights the asset share of defaulted banks equals the
    // count fraction up to floating-point summation.
    Trajectory t = make_traj({0.25, 0.25}, {0.25, 0.0}, {0.5, 0.75},
                             {Compartment::Bankrupted, Compartment::Bankrupted,
                              Compartment::Bankrupted, Compartment::Exposed});
    std::vector<Trajectory> trajs = {t};
    const auto count = bankruptcy_ratio(trajs, Weighting::Count).ratio.mean;
    const auto assets = bankruptcy_ratio(trajs, Weighting::Assets).ratio.mean;
    CHECK(count == doctest::Approx(assets).epsilon(1e-12));
}

TEST_CASE("rank correlation: monotone is one, reversed is minus one, ties average") {
    std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> b = {10.0, 20.0, 30.0, 40.0};
    CHECK(rank_correlation(a, b) == doctest::Approx(1.0));
    std::vector<double> r = {40.0, 30.0, 20.0, 10.0};
    CHECK(rank_correlation(a, r) == doctest::Approx(-1.0));
    std::vector<double> ties = {1.0, 1.0, 2.0, 2.0};
    CHECK(rank_correlation(ties, ties) == doctest::Approx(1.0));
    CHECK_THROWS_AS(static_cast<void>(rank_correlation(a, std::vector<double>{1.0})),
                    validation_error);
}

TEST_CASE("empty inputs are rejected") {
    std::vector<Trajectory> empty;
    CHECK_THROWS_AS(static_cast<void>(prevalence(empty, 5, Weighting::Count)),
                    validation_error);
    CHECK_THROWS_AS(static_cast<void>(bankruptcy_ratio(empty, Weighting::Count)),
                    validation_error);
}
