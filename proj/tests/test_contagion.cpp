#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ibrisk/contagion.hpp"
#include "ibrisk/errors.hpp"
#include "ibrisk/rng.hpp"

using namespace ibrisk;

namespace {

ReconstructedNetwork make_network(int n, const std::vector<double>& weights) {
    ReconstructedNetwork net;
    net.n = n;
    net.weights = weights;
    for (int i = 0; i < n; ++i) {
        NodeMeta meta;
        meta.bank_id = "B" + std::to_string(i);
        meta.country = "XX";
        net.nodes.push_back(meta);
    }
    return net;
}

ContagionNetwork plain_view(const ReconstructedNetwork& net) {
    const std::vector<double> zeros(net.n, 0.0);
    const std::vector<double> ones(net.n, 1.0);
    return prepare_network(net, zeros, zeros, ones);
}

} // namespace

TEST_CASE("lambda_base is the lender's row-normalized lending share") {
    const auto net = make_network(3, {0, 1, 1, // two equal loans
                                      0, 0, 5, // single borrower
                                      0, 0, 0});
    CHECK(lambda_base(net, 0, 1) == 0.5);
    CHECK(lambda_base(net, 0, 2) == 0.5);
    CHECK(lambda_base(net, 1, 2) == 1.0);
    CHECK(lambda_base(net, 2, 0) == 0.0); // zero out-strength is defined as 0

    const auto skew = make_network(3, {0, 3, 1, 0, 0, 0, 0, 0, 0});
    CHECK(lambda_base(skew, 0, 1) == doctest::Approx(0.75));
    CHECK(lambda_base(skew, 0, 2) == doctest::Approx(0.25));
}

TEST_CASE("lambda_star node-term exponent") {
    CHECK(lambda_star(0.7, 0.0) == 0.7);          // gamma = 0 restores the base rate
    CHECK(lambda_star(0.5, 1.0) == 1.0);          // exponent 0 with positive base
    CHECK(lambda_star(0.5, -1.0) == doctest::Approx(0.25));
    CHECK(lambda_star(0.0, 1.0) == 0.0);          // 0^0 := 0, no link no contagion
}

TEST_CASE("theta multiplier and its non-linear transform") {
    CHECK(theta_multiplier(1.0, 0.0) == 1.0);
    CHECK(theta_multiplier(0.5, 1.0) == 1.0); // s at the reversal threshold
    CHECK(theta_multiplier(0.5, 0.5) == doctest::Approx(0.75));

    CHECK(theta_nonlinear(0.37, 1.0, 1.5) == 0.37);            // phi = 1 is the identity
    CHECK(theta_nonlinear(1.5, 7.0, 1.5) == 1.5);              // boundary preserved
    CHECK(theta_nonlinear(0.5, 2.0, 1.0) == doctest::Approx(0.25)); // beta* = 0, phi = 2
    CHECK(theta_nonlinear(0.0, 2.0, 1.5) == 0.0);
}

TEST_CASE("lambda_plus: theta scales the exponent") {
    CHECK(lambda_plus(0.6, 0.25, 1.0) == lambda_star(0.6, 0.25));
    CHECK(lambda_plus(0.5, 0.0, 0.0) == 1.0); // full panic limit
    CHECK(lambda_plus(0.5, 0.0, 2.0) == doctest::Approx(0.25));
    CHECK(lambda_plus(0.0, 0.0, 0.0) == 0.0); // 0^0 := 0 again
}

TEST_CASE("mu is the infected share of in-weight") {
    const auto net = make_network(3, {0, 0, 2, //
                                      0, 0, 2, //
                                      0, 0, 0});
    std::vector<Compartment> state = {Compartment::Exposed, Compartment::Exposed,
                                      Compartment::Exposed};
    CHECK(mu_rate(net, state, 2) == 0.0); // no infected lenders

    state[0] = Compartment::Distressed;
    CHECK(mu_rate(net, state, 2) == doctest::Approx(0.5));

    state[1] = Compartment::Bankrupted;
    CHECK(mu_rate(net, state, 2) == 1.0); // every lender infected

    CHECK(mu_rate(net, state, 0) == 0.0); // zero in-strength
}

TEST_CASE("mu_star resilience exponent") {
    CHECK(mu_star(0.4, 0.0) == 0.4);
    CHECK(mu_star(0.25, 0.5) == doctest::Approx(0.5));
    CHECK(mu_star(0.25, -1.0) == doctest::Approx(0.0625));
    CHECK(mu_star(0.0, 1.0) == 0.0);
}

TEST_CASE("step: an all-healthy state is a fixed point") {
    const auto net = make_network(3, {0, 1, 1, 0, 0, 1, 0, 0, 0});
    const auto cn = plain_view(net);
    const std::vector<Compartment> state(3, Compartment::Exposed);
    ContagionConfig config;
    config.variant = Variant::BM;
    RngStream rng(1);
    CHECK(step(cn, state, config, rng) == state);
}

TEST_CASE("step: a certain attack infects the sole borrower") {
    // Bank 0 lends only to bank 1, so lambda = 1; a bankrupted lender attacks
    // unscaled and the borrower must be distressed next step.
    const auto net = make_network(2, {0, 5, 0, 0});
    const auto cn = plain_view(net);
    std::vector<Compartment> state = {Compartment::Bankrupted, Compartment::Exposed};
    ContagionConfig config;
    config.variant = Variant::BM;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RngStream rng(seed);
        const auto next = step(cn, state, config, rng);
        CHECK(next[1] == Compartment::Distressed);
    }
}

TEST_CASE("step frequencies match hand-computed single-step probabilities") {
    // Chain 0 -> {1, 2} with weights 3 and 1: lambda are 0.75 and 0.25.
    // With bank 0 bankrupted, P(1 infected) = 0.75, P(2 infected) = 0.25.
    const auto net = make_network(3, {0, 3, 1, 0, 0, 0, 0, 0, 0});
    const auto cn = plain_view(net);
    const std::vector<Compartment> state = {Compartment::Bankrupted, Compartment::Exposed,
                                            Compartment::Exposed};
    ContagionConfig config;
    config.variant = Variant::BM;
    const int trials = 40000;
    int hits1 = 0, hits2 = 0;
    for (int k = 0; k < trials; ++k) {
        RngStream rng(derive_seed(2024, {static_cast<std::uint64_t>(k)}));
        const auto next = step(cn, state, config, rng);
        hits1 += next[1] == Compartment::Distressed;
        hits2 += next[2] == Compartment::Distressed;
    }
    const auto band = [&](double p) { return 3.0 * std::sqrt(p * (1 - p) / trials); };
    CHECK(std::abs(hits1 / double(trials) - 0.75) < band(0.75));
    CHECK(std::abs(hits2 / double(trials) - 0.25) < band(0.25));
}

TEST_CASE("epsilon scales distressed lenders only") {
    const auto net = make_network(2, {0, 5, 0, 0});
    const auto cn = plain_view(net);
    ContagionConfig config;
    config.variant = Variant::BM;
    config.epsilon = 0.0;

    // A distressed lender with epsilon = 0 cannot attack.
    std::vector<Compartment> state = {Compartment::Distressed, Compartment::Exposed};
    RngStream rng(3);
    CHECK(step(cn, state, config, rng)[1] == Compartment::Exposed);

    // A bankrupted lender ignores epsilon.
    state[0] = Compartment::Bankrupted;
    RngStream rng2(3);
    CHECK(step(cn, state, config, rng2)[1] == Compartment::Distressed);
}

TEST_CASE("run: saturated system fully defaults within two steps") {
    // Complete digraph; gamma = 1 makes every rate lambda^0 = 1 and once all
    // lenders are infected mu = 1.
    const int n = 4;
    std::vector<double> w(n * n, 1.0);
    for (int i = 0; i < n; ++i) w[i * n + i] = 0.0;
    const auto net = make_network(n, w);
    const std::vector<double> gamma(n, 1.0), nu(n, 0.0), assets(n, 1.0);
    const auto cn = prepare_network(net, gamma, nu, assets);
    ContagionConfig config;
    config.variant = Variant::NT;
    RngStream rng(10);
    const auto traj = run(cn, 0, config, rng);
    CHECK(traj.steps() == 2);
    CHECK(traj.i2.back() == 1.0);
    CHECK(traj.i1.back() == 0.0);
    CHECK_FALSE(traj.censored);
}

TEST_CASE("run: a seed with no borrowers and healthy lenders stalls to the cap") {
    const auto net = make_network(2, {0, 0, 3, 0}); // bank 1 lends to bank 0
    const auto cn = plain_view(net);
    ContagionConfig config;
    config.variant = Variant::BM;
    config.max_steps = 15;
    RngStream rng(4);
    const auto traj = run(cn, 0, config, rng);
    CHECK(traj.steps() == 15);
    CHECK(traj.censored);
    CHECK(traj.i1.back() == 0.5);
    CHECK(traj.i2.back() == 0.0);
}

TEST_CASE("run is deterministic in the stream seed") {
    RngStream setup(8);
    const int n = 8;
    std::vector<double> w(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && setup.uniform01() < 0.5) w[i * n + j] = setup.lognormal(0, 1);
        }
    }
    const auto net = make_network(n, w);
    const auto cn = plain_view(net);
    ContagionConfig config;
    config.variant = Variant::BM;
    RngStream a(123), b(123);
    const auto ta = run(cn, 2, config, a);
    const auto tb = run(cn, 2, config, b);
    CHECK(ta.s == tb.s);
    CHECK(ta.i1 == tb.i1);
    CHECK(ta.i2 == tb.i2);
    CHECK(ta.infected_at == tb.infected_at);
    CHECK(ta.defaulted_at == tb.defaulted_at);
}

TEST_CASE("variant reductions are bitwise under identical streams") {
    RngStream setup(21);
    const int n = 9;
    std::vector<double> w(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && setup.uniform01() < 0.5) w[i * n + j] = setup.lognormal(0, 1);
        }
    }
    const auto net = make_network(n, w);
    const std::vector<double> zeros(n, 0.0), ones(n, 1.0);
    std::vector<double> gamma(n), nu(n);
    for (int i = 0; i < n; ++i) {
        gamma[i] = setup.uniform(-0.8, 0.8);
        nu[i] = setup.uniform(-0.8, 0.8);
    }

    SUBCASE("NT with zero gamma equals BM") {
        const auto cn = prepare_network(net, zeros, zeros, ones);
        ContagionConfig bm, nt;
        bm.variant = Variant::BM;
        nt.variant = Variant::NT;
        for (int seed_bank = 0; seed_bank < n; ++seed_bank) {
            RngStream a(derive_seed(5, {static_cast<std::uint64_t>(seed_bank)}));
            RngStream b(derive_seed(5, {static_cast<std::uint64_t>(seed_bank)}));
            const auto ta = run(cn, seed_bank, bm, a);
            const auto tb = run(cn, seed_bank, nt, b);
            CHECK(ta.s == tb.s);
            CHECK(ta.i1 == tb.i1);
            CHECK(ta.i2 == tb.i2);
            CHECK(ta.final_state == tb.final_state);
        }
    }
    SUBCASE("NT+RES with zero nu equals NT with the same gamma") {
        const auto cn = prepare_network(net, gamma, zeros, ones);
        ContagionConfig nt, res;
        nt.variant = Variant::NT;
        res.variant = Variant::NT_RES;
        for (int seed_bank = 0; seed_bank < n; ++seed_bank) {
            RngStream a(derive_seed(6, {static_cast<std::uint64_t>(seed_bank)}));
            RngStream b(derive_seed(6, {static_cast<std::uint64_t>(seed_bank)}));
            const auto ta = run(cn, seed_bank, nt, a);
            const auto tb = run(cn, seed_bank, res, b);
            CHECK(ta.final_state == tb.final_state);
            CHECK(ta.i2 == tb.i2);
        }
    }
}

TEST_CASE("theta reversal: lambda_plus brackets lambda_star at s* = 1/(1+beta*)") {
    RngStream rng(33);
    for (int k = 0; k < 500; ++k) {
        const double lambda = rng.uniform(0.05, 0.95);
        const double gamma = rng.uniform(-0.9, 0.9);
        const double beta_star = rng.uniform(0.0, 2.0);
        const double s = rng.uniform(0.0, 1.0);
        const double theta = theta_multiplier(s, beta_star);
        const double star = lambda_star(lambda, gamma);
        const double plus = lambda_plus(lambda, gamma, theta);
        const double s_threshold = 1.0 / (1.0 + beta_star);
        if (s > s_threshold) {
            CHECK(plus < star);
        } else if (s < s_threshold) {
            CHECK(plus > star);
        }
    }
}

TEST_CASE("monotone absorption along random trajectories") {
    RngStream setup(55);
    const int n = 10;
    std::vector<double> w(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && setup.uniform01() < 0.4) w[i * n + j] = setup.lognormal(0, 1);
        }
    }
    const auto net = make_network(n, w);
    std::vector<double> gamma(n), nu(n), assets(n);
    for (int i = 0; i < n; ++i) {
        gamma[i] = setup.uniform(-0.9, 0.9);
        nu[i] = setup.uniform(-0.9, 0.9);
        assets[i] = setup.lognormal(0, 1);
    }
    const auto cn = prepare_network(net, gamma, nu, assets);
    ContagionConfig config;
    config.variant = Variant::NT_RES_THETA;
    config.beta_star = 0.4;
    for (int seed_bank = 0; seed_bank < n; ++seed_bank) {
        RngStream rng(derive_seed(9, {static_cast<std::uint64_t>(seed_bank)}));
        const auto traj = run(cn, seed_bank, config, rng);
        for (std::size_t t = 1; t < traj.s.size(); ++t) {
            CHECK(traj.s[t] <= traj.s[t - 1]);
            CHECK(traj.i2[t] >= traj.i2[t - 1]);
            CHECK(traj.s[t] + traj.i1[t] + traj.i2[t] == doctest::Approx(1.0));
            CHECK(traj.s_w[t] + traj.i1_w[t] + traj.i2_w[t] == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("the ground bank never transitions and never attacks") {
    ReconstructedNetwork net = make_network(3, {0, 4, 0, //
                                                0, 0, 0, //
                                                0, 9, 0});
    net.nodes[2].is_ground = true; // lends to bank 1
    const std::vector<double> zeros(3, 0.0), ones(3, 1.0);
    const auto cn = prepare_network(net, zeros, zeros, ones);
    CHECK(cn.n_real == 2);
    ContagionConfig config;
    config.variant = Variant::BM;
    RngStream rng(2);
    const auto traj = run(cn, 0, config, rng);
    CHECK(traj.final_state[2] == Compartment::Exposed);
    // Fractions are over the two real banks: the seeded bank is half the mass.
    CHECK(traj.i1[0] == 0.5);
    // Bank 1's in-weight is diluted by the healthy ground lender, so its mu
    // after infection by bank 0 is 4/13.
    if (traj.final_state[1] != Compartment::Exposed) {
        CHECK(traj.mu_log.back()[1] == doctest::Approx(4.0 / 13.0));
    }
}

TEST_CASE("mean-field integrator conserves mass and handles boundary cases") {
    SUBCASE("disease-free start stays disease-free") {
        const auto series = integrate_mean_field(0.9, 0.4, 1.0, 1.0, 0.0, 0.0, 0.01, 500);
        for (const auto& pt : series) {
            CHECK(pt.s == 1.0);
            CHECK(pt.i1 == 0.0);
        }
    }
    SUBCASE("conservation holds along a generic run") {
        const auto series =
            integrate_mean_field(0.9, 0.4, 1.0, 0.95, 0.05, 0.0, 0.01, 1000);
        for (const auto& pt : series) {
            CHECK(std::abs(pt.s + pt.i1 + pt.i2 - 1.0) < 1e-9);
        }
    }
    SUBCASE("lambda = 0 reduces to exponential decay of i1") {
        const double mu = 0.7, i10 = 0.3;
        const auto series = integrate_mean_field(0.0, mu, 1.0, 0.7, i10, 0.0, 0.01, 1000);
        for (const auto& pt : series) {
            CHECK(std::abs(pt.i1 - i10 * std::exp(-mu * pt.t)) < 1e-6);
        }
    }
    SUBCASE("bad inputs are rejected") {
        CHECK_THROWS_AS(
            static_cast<void>(integrate_mean_field(1, 1, 1, 0.5, 0.1, 0.1, 0.01, 10)),
            validation_error);
        CHECK_THROWS_AS(
            static_cast<void>(integrate_mean_field(1, 1, 1, 1.0, 0.0, 0.0, 0.0, 10)),
            validation_error);
    }
}

TEST_CASE("rate bounds hold under fuzzing") {
    RngStream rng(77);
    for (int k = 0; k < 20000; ++k) {
        const double lambda = rng.uniform01();
        const double gamma = rng.uniform(-1.0, 1.0);
        const double nu = rng.uniform(-1.0, 1.0);
        const double beta_star = rng.uniform(0.0, 3.0);
        const double theta = theta_multiplier(rng.uniform01(), beta_star);
        const double mu = rng.uniform01();
        const double star = lambda_star(lambda, gamma);
        const double plus = lambda_plus(lambda, gamma, theta);
        const double mstar = mu_star(mu, nu);
        CHECK(star >= 0.0);
        CHECK(star <= 1.0);
        CHECK(plus >= 0.0);
        CHECK(plus <= 1.0);
        CHECK(mstar >= 0.0);
        CHECK(mstar <= 1.0);
    }
}
