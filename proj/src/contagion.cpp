#include "ibrisk/contagion.hpp"

#include <cmath>
#include <sstream>

#include "ibrisk/errors.hpp"

namespace ibrisk {

const char* variant_name(Variant v) {
    switch (v) {
    case Variant::BM: return "BM";
    case Variant::NT: return "NT";
    case Variant::NT_RES: return "NT+RES";
    case Variant::NT_RES_THETA: return "NT+RES+THETA";
    }
    return "?";
}

Variant parse_variant(const std::string& name) {
    if (name == "BM") return Variant::BM;
    if (name == "NT") return Variant::NT;
    if (name == "NT+RES") return Variant::NT_RES;
    if (name == "NT+RES+THETA") return Variant::NT_RES_THETA;
    throw validation_error("unknown variant '" + name +
                           "' (expected BM, NT, NT+RES or NT+RES+THETA)");
}

double pow_rate(double base, double exponent) {
    if (base == 0.0) return 0.0; // 0^0 := 0, absent exposures never transmit
    if (exponent == 0.0) return 1.0;
    if (exponent == 1.0) return base;
    return std::pow(base, exponent);
}

double lambda_base(const ReconstructedNetwork& net, int lender, int borrower) {
    const double out = net.out_strength(lender);
    if (!(out > 0.0)) return 0.0;
    return net.w(lender, borrower) / out;
}

double lambda_star(double lambda, double gamma_lender) {
    return pow_rate(lambda, 1.0 - gamma_lender);
}

double theta_multiplier(double s_fraction, double beta_star) {
    return (1.0 + beta_star) * s_fraction;
}

double theta_nonlinear(double theta, double phi, double theta_max) {
    if (phi == 1.0) return theta;
    if (theta == theta_max) return theta_max; // boundary preserved exactly
    if (theta == 0.0) return 0.0;
    return std::pow(theta, phi) / std::pow(theta_max, phi - 1.0);
}

double lambda_plus(double lambda, double gamma_lender, double theta) {
    return pow_rate(lambda, (1.0 - gamma_lender) * theta);
}

double mu_rate(const ReconstructedNetwork& net, std::span<const Compartment> state,
               int borrower) {
    double total = 0.0, infected = 0.0;
    for (int l = 0; l < net.n; ++l) {
        const double w = net.w(l, borrower);
        total += w;
        if (state[l] != Compartment::Exposed) infected += w;
    }
    if (!(total > 0.0)) return 0.0; // a bank that borrows nothing cannot be squeezed
    return infected / total;
}

double mu_star(double mu, double nu_borrower) {
    return pow_rate(mu, 1.0 - nu_borrower);
}

ContagionNetwork prepare_network(const ReconstructedNetwork& net,
                                 std::span<const double> gamma, std::span<const double> nu,
                                 std::span<const double> total_assets) {
    if (gamma.size() != static_cast<std::size_t>(net.n) ||
        nu.size() != static_cast<std::size_t>(net.n) ||
        total_assets.size() != static_cast<std::size_t>(net.n)) {
        throw validation_error("indicator vectors must align with the network nodes");
    }
    ContagionNetwork cn;
    cn.n = net.n;
    cn.nodes = net.nodes;
    cn.gamma.assign(gamma.begin(), gamma.end());
    cn.nu.assign(nu.begin(), nu.end());
    cn.ground.resize(net.n, 0);
    cn.in_edges.resize(net.n);
    cn.in_strength.assign(net.n, 0.0);

    double real_assets = 0.0;
    for (int i = 0; i < net.n; ++i) {
        cn.ground[i] = net.nodes[i].is_ground ? 1 : 0;
        if (!net.nodes[i].is_ground) {
            ++cn.n_real;
            real_assets += total_assets[i];
        }
    }
    cn.asset_weight.assign(net.n, 0.0);
    for (int i = 0; i < net.n; ++i) {
        if (!net.nodes[i].is_ground && real_assets > 0.0) {
            cn.asset_weight[i] = total_assets[i] / real_assets;
        }
    }

    std::vector<double> out_strength(net.n, 0.0);
    for (int i = 0; i < net.n; ++i) out_strength[i] = net.out_strength(i);
    for (int j = 0; j < net.n; ++j) {
        for (int i = 0; i < net.n; ++i) {
            const double w = net.w(i, j);
            if (w <= 0.0) continue;
            ContagionNetwork::InEdge e;
            e.lender = i;
            e.weight = w;
            e.lambda = out_strength[i] > 0.0 ? w / out_strength[i] : 0.0;
            e.lambda_star = lambda_star(e.lambda, cn.gamma[i]);
            cn.in_edges[j].push_back(e);
            cn.in_strength[j] += w;
        }
    }
    return cn;
}

namespace {

double count_fraction(std::span<const Compartment> state, const ContagionNetwork& net,
                      Compartment c) {
    int count = 0;
    for (int i = 0; i < net.n; ++i) {
        if (!net.ground[i] && state[i] == c) ++count;
    }
    return net.n_real > 0 ? static_cast<double>(count) / net.n_real : 0.0;
}

double effective_mu(const ContagionNetwork& net, std::span<const Compartment> state,
                    int bank, const ContagionConfig& config) {
    double total = net.in_strength[bank];
    if (!(total > 0.0)) return 0.0;
    double infected = 0.0;
    for (const auto& e : net.in_edges[bank]) {
        if (state[e.lender] != Compartment::Exposed) infected += e.weight;
    }
    const double mu = infected / total;
    if (config.variant == Variant::NT_RES || config.variant == Variant::NT_RES_THETA) {
        return mu_star(mu, net.nu[bank]);
    }
    return mu;
}

} // namespace

std::vector<Compartment> step(const ContagionNetwork& net,
                              std::span<const Compartment> state,
                              const ContagionConfig& config, RngStream& rng) {
    std::vector<Compartment> next(state.begin(), state.end());

    double theta_plus = 1.0;
    if (config.variant == Variant::NT_RES_THETA) {
        const double s = count_fraction(state, net, Compartment::Exposed);
        const double theta = theta_multiplier(s, config.beta_star);
        theta_plus = theta_nonlinear(theta, config.phi, 1.0 + config.beta_star);
    }

    // Attack phase: every distressed or bankrupted lender fires at each of its
    // exposed borrowers independently. Draw order is fixed (borrower-major,
    // lender-ascending) so a run is a pure function of its stream.
    for (int j = 0; j < net.n; ++j) {
        if (net.ground[j] || state[j] != Compartment::Exposed) continue;
        bool hit = false;
        for (const auto& e : net.in_edges[j]) {
            const Compartment lender_state = state[e.lender];
            if (lender_state == Compartment::Exposed) continue;
            double rate;
            switch (config.variant) {
            case Variant::BM: rate = e.lambda; break;
            case Variant::NT:
            case Variant::NT_RES: rate = e.lambda_star; break;
            case Variant::NT_RES_THETA: rate = pow_rate(e.lambda_star, theta_plus); break;
            default: rate = 0.0; break;
            }
            const double q =
                lender_state == Compartment::Distressed ? config.epsilon * rate : rate;
            if (rng.bernoulli(q)) hit = true;
        }
        if (hit) next[j] = Compartment::Distressed;
    }

    // Default phase, from the same pre-transition state.
    for (int i = 0; i < net.n; ++i) {
        if (state[i] != Compartment::Distressed) continue;
        const double mu = effective_mu(net, state, i, config);
        if (rng.bernoulli(mu)) next[i] = Compartment::Bankrupted;
    }
    return next;
}

namespace {

void record_state(Trajectory& traj, const ContagionNetwork& net,
                  std::span<const Compartment> state, const ContagionConfig& config) {
    double s_count = 0.0, i1_count = 0.0, i2_count = 0.0;
    double s_w = 0.0, i1_w = 0.0, i2_w = 0.0;
    for (int i = 0; i < net.n; ++i) {
        if (net.ground[i]) continue;
        switch (state[i]) {
        case Compartment::Exposed:
            s_count += 1.0;
            s_w += net.asset_weight[i];
            break;
        case Compartment::Distressed:
            i1_count += 1.0;
            i1_w += net.asset_weight[i];
            break;
        case Compartment::Bankrupted:
            i2_count += 1.0;
            i2_w += net.asset_weight[i];
            break;
        }
    }
    const double n = static_cast<double>(net.n_real);
    traj.s.push_back(s_count / n);
    traj.i1.push_back(i1_count / n);
    traj.i2.push_back(i2_count / n);
    traj.s_w.push_back(s_w);
    traj.i1_w.push_back(i1_w);
    traj.i2_w.push_back(i2_w);
    traj.theta.push_back(theta_multiplier(s_count / n, config.beta_star));
    if (config.record_mu) {
        std::vector<double> mu;
        mu.reserve(net.n_real);
        for (int i = 0; i < net.n; ++i) {
            if (net.ground[i]) continue;
            mu.push_back(effective_mu(net, state, i, config));
        }
        traj.mu_log.push_back(std::move(mu));
    }
}

int distressed_count(const ContagionNetwork& net, std::span<const Compartment> state) {
    int count = 0;
    for (int i = 0; i < net.n; ++i) {
        if (state[i] == Compartment::Distressed) ++count;
    }
    return count;
}

} // namespace

Trajectory run(const ContagionNetwork& net, int seed_bank, const ContagionConfig& config,
               RngStream& rng) {
    if (seed_bank < 0 || seed_bank >= net.n) {
        throw validation_error("seed bank index out of range");
    }
    if (net.ground[seed_bank]) {
        throw validation_error("the ground bank cannot seed a contagion");
    }
    if (config.max_steps < 1) {
        throw validation_error("max_steps must be at least 1");
    }
    if (!(config.epsilon >= 0.0 && config.epsilon <= 1.0)) {
        throw validation_error("epsilon must lie in [0, 1]");
    }
    if (!(config.beta_star >= 0.0)) {
        throw validation_error("beta_star must be nonnegative");
    }
    if (!(config.phi >= 1.0)) {
        throw validation_error("phi must be at least 1");
    }

    Trajectory traj;
    traj.n_real = net.n_real;
    traj.seed_bank = seed_bank;
    traj.infected_at.assign(net.n, -1);
    traj.defaulted_at.assign(net.n, -1);
    traj.infected_at[seed_bank] = 0;

    std::vector<Compartment> state(net.n, Compartment::Exposed);
    state[seed_bank] = Compartment::Distressed;
    record_state(traj, net, state, config);

    for (int t = 0; t < config.max_steps; ++t) {
        if (distressed_count(net, state) == 0) break;
        auto next = step(net, state, config, rng);
        for (int i = 0; i < net.n; ++i) {
            if (next[i] != state[i]) {
                if (next[i] == Compartment::Distressed) traj.infected_at[i] = t + 1;
                if (next[i] == Compartment::Bankrupted) traj.defaulted_at[i] = t + 1;
            }
        }
        state = std::move(next);
        record_state(traj, net, state, config);
    }
    traj.censored = distressed_count(net, state) > 0;
    traj.final_state = std::move(state);
    return traj;
}

std::vector<MeanFieldPoint> integrate_mean_field(double lambda, double mu, double epsilon,
                                                 double s0, double i10, double i20,
                                                 double dt, int steps) {
    if (!(dt > 0.0)) throw validation_error("dt must be positive");
    if (std::abs(s0 + i10 + i20 - 1.0) > 1e-12) {
        throw validation_error("initial fractions must sum to 1");
    }
    struct Deriv {
        double ds, di1, di2;
    };
    auto deriv = [&](double s, double i1, double i2) {
        const double infection = lambda * (epsilon * i1 + i2) * s;
        return Deriv{-infection, infection - mu * i1, mu * i1};
    };

    std::vector<MeanFieldPoint> out;
    out.reserve(steps + 1);
    double t = 0.0, s = s0, i1 = i10, i2 = i20;
    out.push_back({t, s, i1, i2});
    for (int k = 0; k < steps; ++k) {
        const Deriv k1 = deriv(s, i1, i2);
        const Deriv k2 =
            deriv(s + 0.5 * dt * k1.ds, i1 + 0.5 * dt * k1.di1, i2 + 0.5 * dt * k1.di2);
        const Deriv k3 =
            deriv(s + 0.5 * dt * k2.ds, i1 + 0.5 * dt * k2.di1, i2 + 0.5 * dt * k2.di2);
        const Deriv k4 = deriv(s + dt * k3.ds, i1 + dt * k3.di1, i2 + dt * k3.di2);
        s += dt / 6.0 * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds);
        i1 += dt / 6.0 * (k1.di1 + 2.0 * k2.di1 + 2.0 * k3.di1 + k4.di1);
        i2 += dt / 6.0 * (k1.di2 + 2.0 * k2.di2 + 2.0 * k3.di2 + k4.di2);
        t = dt * (k + 1);
        out.push_back({t, s, i1, i2});
    }
    return out;
}

} // namespace ibrisk
