#include "ibrisk/oracle.hpp"

#include <cmath>
#include <fstream>

#include "ibrisk/csv.hpp"
#include "ibrisk/errors.hpp"

namespace ibrisk {

std::uint32_t ExactChain::encode(std::span<const Compartment> state) {
    std::uint32_t code = 0;
    for (std::size_t i = state.size(); i-- > 0;) {
        code = code * 3 + static_cast<std::uint32_t>(state[i]);
    }
    return code;
}

std::vector<Compartment> ExactChain::decode(std::uint32_t code, int n) {
    std::vector<Compartment> state(n);
    for (int i = 0; i < n; ++i) {
        state[i] = static_cast<Compartment>(code % 3);
        code /= 3;
    }
    return state;
}

bool ExactChain::is_absorbing(std::uint32_t code, int n) {
    for (int i = 0; i < n; ++i) {
        if (code % 3 == 1) return false;
        code /= 3;
    }
    return true;
}

namespace {

double oracle_pow(double base, double exponent) {
    if (base == 0.0) return 0.0;
    if (exponent == 0.0) return 1.0;
    return std::pow(base, exponent);
}

} // namespace

ExactChain build_chain(const ReconstructedNetwork& net, const ContagionConfig& config,
                       std::span<const double> gamma, std::span<const double> nu) {
    const int n = net.n;
    if (n > kMaxOracleBanks) {
        throw validation_error("exact chain limited to 8 banks");
    }
    for (const auto& node : net.nodes) {
        if (node.is_ground) {
            throw validation_error("exact chain expects real banks only");
        }
    }

    std::vector<double> out_strength(n, 0.0), in_strength(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out_strength[i] += net.w(i, j);
            in_strength[j] += net.w(i, j);
        }
    }

    ExactChain chain;
    chain.n = n;
    chain.states = 1;
    for (int i = 0; i < n; ++i) chain.states *= 3;
    chain.rows.resize(chain.states);

    std::vector<Compartment> state(n);
    for (std::uint32_t code = 0; code < chain.states; ++code) {
        state = ExactChain::decode(code, n);

        if (ExactChain::is_absorbing(code, n)) {
            chain.rows[code] = {{code, 1.0}};
            continue;
        }

        int s_count = 0;
        for (int i = 0; i < n; ++i) {
            if (state[i] == Compartment::Exposed) ++s_count;
        }
        double theta_plus = 1.0;
        if (config.variant == Variant::NT_RES_THETA) {
            const double s = static_cast<double>(s_count) / n;
            const double theta_max = 1.0 + config.beta_star;
            const double theta = theta_max * s;
            theta_plus = config.phi == 1.0
                             ? theta
                             : (theta == theta_max
                                    ? theta_max
                                    : std::pow(theta, config.phi) /
                                          std::pow(theta_max, config.phi - 1.0));
        }

        // Per-bank transition probabilities, independent given the state.
        // movers[k] = (bank, probability of moving); banks that cannot move
        // are left out of the outcome enumeration.
        std::vector<std::pair<int, double>> movers;
        for (int b = 0; b < n; ++b) {
            if (state[b] == Compartment::Exposed) {
                double survive = 1.0;
                for (int l = 0; l < n; ++l) {
                    if (state[l] == Compartment::Exposed) continue;
                    const double w = net.w(l, b);
                    if (w <= 0.0 || out_strength[l] <= 0.0) continue;
                    const double lambda = w / out_strength[l];
                    double rate;
                    switch (config.variant) {
                    case Variant::BM: rate = lambda; break;
                    case Variant::NT:
                    case Variant::NT_RES:
                        rate = oracle_pow(lambda, 1.0 - gamma[l]);
                        break;
                    case Variant::NT_RES_THETA:
                        rate = oracle_pow(lambda, (1.0 - gamma[l]) * theta_plus);
                        break;
                    default: rate = 0.0; break;
                    }
                    if (state[l] == Compartment::Distressed) rate *= config.epsilon;
                    survive *= 1.0 - rate;
                }
                const double p_infect = 1.0 - survive;
                if (p_infect > 0.0) movers.push_back({b, p_infect});
            } else if (state[b] == Compartment::Distressed) {
                double mu = 0.0;
                if (in_strength[b] > 0.0) {
                    double infected = 0.0;
                    for (int l = 0; l < n; ++l) {
                        if (state[l] != Compartment::Exposed) infected += net.w(l, b);
                    }
                    mu = infected / in_strength[b];
                }
                if (config.variant == Variant::NT_RES ||
                    config.variant == Variant::NT_RES_THETA) {
                    mu = oracle_pow(mu, 1.0 - nu[b]);
                }
                movers.push_back({b, mu});
            }
        }

        // Powers of 3 for in-place state arithmetic on the encoded value.
        std::vector<std::uint32_t> pow3(n, 1);
        for (int i = 1; i < n; ++i) pow3[i] = pow3[i - 1] * 3;

        auto& row = chain.rows[code];
        const std::size_t outcomes = std::size_t{1} << movers.size();
        row.reserve(outcomes);
        for (std::size_t mask = 0; mask < outcomes; ++mask) {
            double prob = 1.0;
            std::uint32_t target = code;
            for (std::size_t k = 0; k < movers.size(); ++k) {
                const auto [bank, p_move] = movers[k];
                if (mask & (std::size_t{1} << k)) {
                    prob *= p_move;
                    target += pow3[bank]; // S -> I1 or I1 -> I2, one ternary digit up
                } else {
                    prob *= 1.0 - p_move;
                }
            }
            if (prob > 0.0) row.push_back({target, prob});
        }
    }
    return chain;
}

std::vector<double> absorbing_distribution(const ExactChain& chain, std::uint32_t initial,
                                           int horizon) {
    std::vector<double> dist(chain.states, 0.0);
    dist[initial] = 1.0;
    std::vector<double> next(chain.states, 0.0);
    for (int t = 0; t < horizon; ++t) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::uint32_t s = 0; s < chain.states; ++s) {
            const double mass = dist[s];
            if (mass == 0.0) continue;
            for (const auto& [target, p] : chain.rows[s]) {
                next[target] += mass * p;
            }
        }
        dist.swap(next);
    }
    return dist;
}

void dump_chain_csv(const ExactChain& chain, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    out << "from,to,probability\n";
    for (std::uint32_t s = 0; s < chain.states; ++s) {
        for (const auto& [target, p] : chain.rows[s]) {
            out << s << "," << target << "," << csv::format_double(p) << "\n";
        }
    }
}

OracleCheckReport oracle_check(int instances, long runs_per_instance, std::uint64_t seed,
                               int max_steps, double min_mass) {
    OracleCheckReport report;
    report.runs_per_instance = runs_per_instance;
    report.pass = true;
    const Variant variants[] = {Variant::BM, Variant::NT, Variant::NT_RES,
                                Variant::NT_RES_THETA};

    for (int k = 0; k < instances; ++k) {
        RngStream gen(derive_seed(seed, {0x0A11u, static_cast<std::uint64_t>(k)}));
        const int n = 3 + static_cast<int>(gen.uniform_index(3)); // 3, 4 or 5 banks

        ReconstructedNetwork net;
        net.n = n;
        net.weights.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) {
            NodeMeta meta;
            meta.bank_id = "T" + std::to_string(i);
            meta.country = "XX";
            net.nodes.push_back(meta);
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if (gen.uniform01() < 0.7) net.w(i, j) = gen.lognormal(0.0, 1.0);
            }
        }

        std::vector<double> gamma(n), nu(n), assets(n, 1.0);
        for (int i = 0; i < n; ++i) {
            gamma[i] = gen.uniform(-0.9, 0.9);
            nu[i] = gen.uniform(-0.9, 0.9);
        }

        ContagionConfig config;
        config.variant = variants[k % 4];
        config.epsilon = k % 2 == 0 ? 1.0 : 0.6;
        config.beta_star = gen.uniform(0.1, 1.0);
        config.phi = k % 3 == 0 ? 2.0 : 1.0;
        config.max_steps = max_steps;
        config.record_mu = false;
        const int seed_bank = static_cast<int>(gen.uniform_index(n));

        const auto chain = build_chain(net, config, gamma, nu);
        std::vector<Compartment> initial(n, Compartment::Exposed);
        initial[seed_bank] = Compartment::Distressed;
        const auto exact =
            absorbing_distribution(chain, ExactChain::encode(initial), max_steps);

        const auto cn = prepare_network(net, gamma, nu, assets);
        std::vector<long> counts(chain.states, 0);
        for (long r = 0; r < runs_per_instance; ++r) {
            RngStream rng(derive_seed(seed, {0x0A12u, static_cast<std::uint64_t>(k),
                                             static_cast<std::uint64_t>(r)}));
            const auto traj = run(cn, seed_bank, config, rng);
            ++counts[ExactChain::encode(traj.final_state)];
        }

        OracleInstanceResult res;
        res.index = k;
        res.n = n;
        res.variant = config.variant;
        res.epsilon = config.epsilon;
        res.beta_star = config.beta_star;
        res.phi = config.phi;
        res.pass = true;
        const double runs = static_cast<double>(runs_per_instance);
        for (std::uint32_t s = 0; s < chain.states; ++s) {
            if (!ExactChain::is_absorbing(s, n)) continue;
            const double p = exact[s];
            if (p < min_mass) continue;
            ++res.states_compared;
            const double freq = static_cast<double>(counts[s]) / runs;
            const double sd = std::sqrt(p * (1.0 - p) / runs);
            const double sigmas = std::abs(freq - p) / sd;
            res.worst_sigma = std::max(res.worst_sigma, sigmas);
            if (sigmas > 3.0) res.pass = false;
        }
        report.pass = report.pass && res.pass;
        report.instances.push_back(res);
    }
    return report;
}

} // namespace ibrisk
