#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ibrisk/reconstruct.hpp"
#include "ibrisk/rng.hpp"

namespace ibrisk {

// Exposed-Distressed-Bankrupted compartments. Exposed banks are healthy but
// funded by potentially infectious lenders; there is no recovery.
enum class Compartment : std::uint8_t { Exposed = 0, Distressed = 1, Bankrupted = 2 };

enum class Variant {
    BM,          // benchmark: raw lending-share rates
    NT,          // lender node-term in the contagion rate
    NT_RES,      // + borrower resilience in the bankruptcy rate
    NT_RES_THETA // + systemic risk multiplier on the contagion rate
};

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);

struct ContagionConfig {
    Variant variant = Variant::NT_RES_THETA;
    double epsilon = 1.0;   // scale on distressed (not bankrupted) lenders' attacks
    double beta_star = 0.5; // systemic multiplier weight; theta = (1 + beta*) s
    double phi = 1.0;       // non-linearity speed, 1 = linear multiplier
    int max_steps = 50;
    bool record_mu = true;  // log per-bank bankruptcy rates each step
};

// One simulation: compartment fractions per step (count- and asset-weighted,
// ground excluded), the realized systemic multiplier, per-bank event times
// and optionally the per-step bankruptcy-rate field.
struct Trajectory {
    int n_real = 0;
    int seed_bank = -1;
    std::vector<double> s, i1, i2;       // count fractions, one entry per recorded state
    std::vector<double> s_w, i1_w, i2_w; // asset-weighted fractions
    std::vector<double> theta;           // (1 + beta*) s(t) per recorded state
    std::vector<int> infected_at;        // per node, -1 = never
    std::vector<int> defaulted_at;
    std::vector<std::vector<double>> mu_log; // per state: effective mu per node
    bool censored = false;                   // step cap hit with distressed banks left
    std::vector<Compartment> final_state;

    int steps() const { return static_cast<int>(s.size()) - 1; }
};

// --- rate primitives -------------------------------------------------------
// Power-law rates use the 0^0 := 0 convention: a missing exposure never
// transmits, whatever the exponent.

double pow_rate(double base, double exponent);

// lambda_ij = w_ij / sum_j w_ij, the lender's share of its total lending.
double lambda_base(const ReconstructedNetwork& net, int lender, int borrower);

// lambda* = lambda^(1 - gamma_lender).
double lambda_star(double lambda, double gamma_lender);

// theta = (1 + beta*) s.
double theta_multiplier(double s_fraction, double beta_star);

// theta+ = theta^phi / theta_max^(phi - 1); phi = 1 restores theta.
double theta_nonlinear(double theta, double phi, double theta_max);

// lambda+ = lambda^((1 - gamma_lender) theta).
double lambda_plus(double lambda, double gamma_lender, double theta);

// mu_i = (in-weight from distressed or bankrupted lenders) / total in-weight.
double mu_rate(const ReconstructedNetwork& net, std::span<const Compartment> state,
               int borrower);

// mu* = mu^(1 - nu_borrower).
double mu_star(double mu, double nu_borrower);

// --- engine ----------------------------------------------------------------

// Preprocessed network view: in-edges per borrower with cached base and
// node-term rates, shared by every seed run on the same network.
struct ContagionNetwork {
    int n = 0;
    std::vector<NodeMeta> nodes;
    std::vector<double> gamma; // per node, aligned with nodes
    std::vector<double> nu;
    std::vector<double> asset_weight; // share of real-bank total assets, ground 0

    struct InEdge {
        int lender = 0;
        double weight = 0.0;
        double lambda = 0.0;
        double lambda_star = 0.0;
    };
    std::vector<std::vector<InEdge>> in_edges; // per borrower, lender-ascending
    std::vector<double> in_strength;
    std::vector<std::uint8_t> ground;
    int n_real = 0;
};

ContagionNetwork prepare_network(const ReconstructedNetwork& net,
                                 std::span<const double> gamma, std::span<const double> nu,
                                 std::span<const double> total_assets);

// Synchronous one-step update: exposed banks are attacked by each distressed
// or bankrupted in-lender independently (epsilon scales distressed lenders
// only), distressed banks default with their variant's bankruptcy rate, and
// every transition is computed from the state at t before any is applied.
// Newly distressed banks only become contagious on the following step.
std::vector<Compartment> step(const ContagionNetwork& net,
                              std::span<const Compartment> state,
                              const ContagionConfig& config, RngStream& rng);

// Seeds one distressed bank and iterates until no bank is distressed or the
// step cap is reached.
Trajectory run(const ContagionNetwork& net, int seed_bank, const ContagionConfig& config,
               RngStream& rng);

// Fixed-step RK4 for the mean-field system
//   ds/dt = -lambda (eps i1 + i2) s,  di1/dt = +lambda (eps i1 + i2) s - mu i1,
//   di2/dt = mu i1.
struct MeanFieldPoint {
    double t, s, i1, i2;
};
std::vector<MeanFieldPoint> integrate_mean_field(double lambda, double mu, double epsilon,
                                                 double s0, double i10, double i20,
                                                 double dt, int steps);

} // namespace ibrisk
