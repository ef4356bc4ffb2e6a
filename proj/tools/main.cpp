#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ibrisk/contagion.hpp"
#include "ibrisk/csv.hpp"
#include "ibrisk/errors.hpp"
#include "ibrisk/ingest.hpp"
#include "ibrisk/manifest.hpp"
#include "ibrisk/metrics.hpp"
#include "ibrisk/oracle.hpp"
#include "ibrisk/pipeline.hpp"
#include "ibrisk/reconstruct.hpp"
#include "ibrisk/synth.hpp"
#include "ibrisk/version.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct SynthArgs {
    ibrisk::SynthConfig config;
    std::string years = "2006:2013";
    std::string out = "synth";
};

void parse_year_range(const std::string& text, int& first, int& last) {
    const auto sep = text.find(':');
    try {
        if (sep == std::string::npos) {
            first = last = std::stoi(text);
        } else {
            first = std::stoi(text.substr(0, sep));
            last = std::stoi(text.substr(sep + 1));
        }
    } catch (const std::exception&) {
        throw ibrisk::validation_error("cannot parse year range '" + text + "'");
    }
    if (last < first) {
        throw ibrisk::validation_error("empty year range '" + text + "'");
    }
}

int run_synth(const SynthArgs& args) {
    const auto start = Clock::now();
    ibrisk::SynthConfig config = args.config;
    parse_year_range(args.years, config.year_start, config.year_end);
    const auto data = ibrisk::synth_inputs(config);
    ibrisk::write_synth(data, args.out);

    ibrisk::RunManifest manifest;
    manifest.command = "synth";
    manifest.master_seed = config.seed;
    manifest.config = {{"banks", config.banks},
                       {"countries", config.countries},
                       {"year_start", config.year_start},
                       {"year_end", config.year_end},
                       {"seed", config.seed},
                       {"liability_surplus", config.liability_surplus},
                       {"size_sigma", config.size_sigma},
                       {"interbank_alpha", config.interbank_alpha},
                       {"year_drift", config.year_drift},
                       {"bis_diagonal_boost", config.bis_diagonal_boost},
                       {"homogeneous", config.homogeneous}};
    manifest.input_digests = nlohmann::json::object();
    manifest.wall_seconds = seconds_since(start);
    ibrisk::write_manifest(args.out, manifest);
    std::cout << "wrote " << data.banks.size() << " bank-year rows, "
              << data.spreads.size() << " spreads, " << config.countries
              << "x" << config.countries << " BIS matrix under " << args.out << "\n";
    return 0;
}

struct ReconstructArgs {
    std::string banks_path;
    std::string bis_path;
    std::string impute_path;
    std::string out = "ensemble";
    std::string z_mode = "global";
    ibrisk::ReconstructionConfig config;
    bool no_blocks = false;
    bool no_ipf = false;
    bool exclude_ground_density = false;
    int year = 0; // 0 = every year in the file
};

int run_reconstruct(const ReconstructArgs& args) {
    const auto start = Clock::now();
    ibrisk::ReconstructionConfig config = args.config;
    config.z_mode = args.z_mode == "per-block" ? ibrisk::ZMode::PerBlock
                                               : ibrisk::ZMode::Global;
    if (args.z_mode != "global" && args.z_mode != "per-block") {
        throw ibrisk::validation_error("--z-mode must be 'global' or 'per-block'");
    }
    config.use_blocks = !args.no_blocks;
    config.ipf = !args.no_ipf;
    config.ground_in_density = !args.exclude_ground_density;

    std::optional<int> year_filter;
    if (args.year != 0) year_filter = args.year;
    const auto banks = ibrisk::load_banks(args.banks_path, year_filter);
    if (banks.empty()) throw ibrisk::validation_error("no bank rows selected");
    std::optional<std::filesystem::path> impute;
    if (!args.impute_path.empty()) impute = args.impute_path;
    const auto bis = ibrisk::load_bis(args.bis_path, impute);

    std::filesystem::create_directories(args.out);
    const auto config_echo = ibrisk::reconstruction_config_json(config);
    for (int year : ibrisk::distinct_years(banks)) {
        std::vector<ibrisk::BankRecord> year_banks;
        for (const auto& b : banks) {
            if (b.year == year) year_banks.push_back(b);
        }
        ibrisk::ReconstructionConfig year_config = config;
        year_config.seed =
            ibrisk::derive_seed(config.seed, {static_cast<std::uint64_t>(year)});
        const auto build = ibrisk::generate_ensemble(year_banks, bis, year_config);
        ibrisk::write_ensemble(args.out, year, build, config_echo);
        double mean_density = 0.0;
        for (const auto& m : build.members) mean_density += m.realized_density;
        mean_density /= static_cast<double>(build.members.size());
        std::cout << "year " << year << ": " << build.members.size()
                  << " networks, expected density "
                  << ibrisk::csv::format_double(build.expected_density)
                  << ", ensemble mean " << ibrisk::csv::format_double(mean_density) << "\n";
    }

    ibrisk::RunManifest manifest;
    manifest.command = "reconstruct";
    manifest.master_seed = config.seed;
    manifest.config = config_echo;
    manifest.config["year_filter"] = args.year;
    manifest.input_digests = {{"banks", ibrisk::file_digest(args.banks_path)},
                              {"bis", ibrisk::file_digest(args.bis_path)}};
    if (!args.impute_path.empty()) {
        manifest.input_digests["bis_impute"] = ibrisk::file_digest(args.impute_path);
    }
    manifest.wall_seconds = seconds_since(start);
    ibrisk::write_manifest(args.out, manifest);
    return 0;
}

struct SimulateArgs {
    std::string ensemble_dir;
    std::string banks_path;
    std::string spreads_path;
    std::string out = "results";
    std::string variant = "NT+RES+THETA";
    ibrisk::ContagionConfig config;
    std::uint64_t seed = 0;
    int threads = 0;
    bool per_year_pooling = false;
    bool write_trajectories = false;
    bool write_events = false;
};

struct LoadedInputs {
    std::vector<ibrisk::BankRecord> banks;
    std::vector<ibrisk::CountrySpread> spreads;
    std::vector<double> gamma;
    std::vector<double> nu;
};

LoadedInputs load_simulation_inputs(const std::string& banks_path,
                                    const std::string& spreads_path,
                                    bool per_year_pooling) {
    LoadedInputs in;
    in.banks = ibrisk::load_banks(banks_path);
    in.spreads = ibrisk::load_spreads(spreads_path);
    const auto pooling =
        per_year_pooling ? ibrisk::Pooling::PerYear : ibrisk::Pooling::AllYears;
    in.gamma = ibrisk::node_term_gamma(in.banks, in.spreads, pooling);
    in.nu = ibrisk::resilience_nu(in.banks, pooling);
    return in;
}

int effective_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

int run_simulate(const SimulateArgs& args) {
    const auto start = Clock::now();
    ibrisk::ContagionConfig config = args.config;
    config.variant = ibrisk::parse_variant(args.variant);

    const auto inputs = load_simulation_inputs(args.banks_path, args.spreads_path,
                                               args.per_year_pooling);
    const auto years = ibrisk::ensemble_years(args.ensemble_dir);
    std::filesystem::create_directories(args.out);

    std::ofstream traj_out, events_out;
    if (args.write_trajectories) {
        traj_out.open(std::filesystem::path(args.out) / "trajectories.csv");
        traj_out << "year,network_id,seed_bank,t,s,i1,i2,s_w,i1_w,i2_w,theta\n";
    }
    if (args.write_events) {
        events_out.open(std::filesystem::path(args.out) / "events.csv");
        events_out << "run_id,bank_id,infected_at,defaulted_at\n";
    }

    std::vector<ibrisk::YearResults> all_years;
    const int threads = effective_threads(args.threads);
    for (int year : years) {
        const auto stored = ibrisk::load_ensemble_year(args.ensemble_dir, year);
        const auto aligned =
            ibrisk::align_indicators(stored.members.front().nodes, year, inputs.banks,
                                     inputs.gamma, inputs.nu);
        ibrisk::TrajectorySink sink;
        const auto& nodes = stored.members.front().nodes;
        if (args.write_trajectories || args.write_events) {
            sink = [&](int network, int seed_bank, const ibrisk::Trajectory& traj) {
                if (args.write_trajectories) {
                    for (std::size_t t = 0; t < traj.s.size(); ++t) {
                        traj_out << year << "," << network << ","
                                 << nodes[seed_bank].bank_id << "," << t << ","
                                 << ibrisk::csv::format_double(traj.s[t]) << ","
                                 << ibrisk::csv::format_double(traj.i1[t]) << ","
                                 << ibrisk::csv::format_double(traj.i2[t]) << ","
                                 << ibrisk::csv::format_double(traj.s_w[t]) << ","
                                 << ibrisk::csv::format_double(traj.i1_w[t]) << ","
                                 << ibrisk::csv::format_double(traj.i2_w[t]) << ","
                                 << ibrisk::csv::format_double(traj.theta[t]) << "\n";
                    }
                }
                if (args.write_events) {
                    std::ostringstream run_id;
                    run_id << year << ":" << network << ":" << nodes[seed_bank].bank_id;
                    for (std::size_t b = 0; b < nodes.size(); ++b) {
                        if (nodes[b].is_ground) continue;
                        if (traj.infected_at[b] < 0) continue;
                        events_out << run_id.str() << "," << nodes[b].bank_id << ","
                                   << traj.infected_at[b] << ",";
                        if (traj.defaulted_at[b] >= 0) events_out << traj.defaulted_at[b];
                        events_out << "\n";
                    }
                }
            };
        }
        auto results =
            ibrisk::simulate_year(stored.members, aligned.gamma, aligned.nu,
                                  aligned.total_assets, config, args.seed, year, threads,
                                  sink);
        std::cout << "year " << year << ": " << results.runs << " runs, bankruptcy ratio "
                  << ibrisk::csv::format_double(results.ratio_count.ratio.mean)
                  << " (count) / "
                  << ibrisk::csv::format_double(results.ratio_assets.ratio.mean)
                  << " (assets), censored " << results.censored << "\n";
        all_years.push_back(std::move(results));
    }

    const std::filesystem::path out_dir(args.out);
    ibrisk::write_prevalence_csv(out_dir / "prevalence.csv", all_years);
    ibrisk::write_bankruptcy_ratio_csv(out_dir / "bankruptcy_ratio.csv", all_years);
    ibrisk::write_country_decomposition_csv(out_dir / "country_decomposition.csv",
                                            all_years);
    ibrisk::write_mu_dynamics_csv(out_dir / "mu_dynamics.csv", all_years);
    ibrisk::write_critical_times_csv(out_dir / "critical_times.csv", all_years);

    nlohmann::json summary;
    summary["config"] = ibrisk::contagion_config_json(config);
    summary["seed"] = args.seed;
    summary["years"] = nlohmann::json::array();
    for (const auto& y : all_years) {
        summary["years"].push_back({{"year", y.year},
                                    {"runs", y.runs},
                                    {"censored", y.censored},
                                    {"bankruptcy_ratio_count", y.ratio_count.ratio.mean},
                                    {"bankruptcy_ratio_assets", y.ratio_assets.ratio.mean}});
    }
    std::ofstream summary_out(out_dir / "summary.json");
    summary_out << summary.dump(2) << "\n";

    ibrisk::RunManifest manifest;
    manifest.command = "simulate";
    manifest.master_seed = args.seed;
    manifest.config = ibrisk::contagion_config_json(config);
    manifest.config["per_year_pooling"] = args.per_year_pooling;
    manifest.config["ensemble_dir"] = args.ensemble_dir;
    manifest.input_digests = {{"banks", ibrisk::file_digest(args.banks_path)},
                              {"spreads", ibrisk::file_digest(args.spreads_path)}};
    manifest.wall_seconds = seconds_since(start);
    ibrisk::write_manifest(out_dir, manifest);
    return 0;
}

struct SweepArgs {
    std::string ensemble_dir;
    std::string banks_path;
    std::string spreads_path;
    std::string out = "sweep";
    std::vector<std::string> variants = {"NT+RES+THETA"};
    std::vector<double> beta_stars = {0.5};
    std::vector<double> phis = {1.0};
    double epsilon = 1.0;
    int max_steps = 50;
    std::uint64_t seed = 0;
    int threads = 0;
    bool per_year_pooling = false;
};

int run_sweep(const SweepArgs& args) {
    const auto start = Clock::now();
    if (args.variants.empty() || args.beta_stars.empty() || args.phis.empty()) {
        throw ibrisk::validation_error("sweep grid must be nonempty");
    }
    const auto inputs = load_simulation_inputs(args.banks_path, args.spreads_path,
                                               args.per_year_pooling);
    const auto years = ibrisk::ensemble_years(args.ensemble_dir);
    const int threads = effective_threads(args.threads);

    std::vector<ibrisk::StoredEnsemble> stored;
    for (int year : years) {
        stored.push_back(ibrisk::load_ensemble_year(args.ensemble_dir, year));
    }

    std::filesystem::create_directories(args.out);
    std::ofstream out(std::filesystem::path(args.out) / "sweep.csv");
    if (!out) throw ibrisk::io_error("cannot write sweep.csv");
    out << "year,variant,beta_star,phi,statistic,weighting,value,ci_lo,ci_hi\n";

    for (const auto& variant_name : args.variants) {
        for (double beta_star : args.beta_stars) {
            for (double phi : args.phis) {
                ibrisk::ContagionConfig config;
                config.variant = ibrisk::parse_variant(variant_name);
                config.epsilon = args.epsilon;
                config.beta_star = beta_star;
                config.phi = phi;
                config.max_steps = args.max_steps;
                config.record_mu = false;
                for (std::size_t yi = 0; yi < stored.size(); ++yi) {
                    const int year = years[yi];
                    const auto aligned = ibrisk::align_indicators(
                        stored[yi].members.front().nodes, year, inputs.banks,
                        inputs.gamma, inputs.nu);
                    const auto res = ibrisk::simulate_year(
                        stored[yi].members, aligned.gamma, aligned.nu,
                        aligned.total_assets, config, args.seed, year, threads);

                    auto emit = [&](const char* stat, const char* weighting,
                                    double value, double lo, double hi) {
                        out << year << "," << variant_name << ","
                            << ibrisk::csv::format_double(beta_star) << ","
                            << ibrisk::csv::format_double(phi) << "," << stat << ","
                            << weighting << "," << ibrisk::csv::format_double(value)
                            << "," << ibrisk::csv::format_double(lo) << ","
                            << ibrisk::csv::format_double(hi) << "\n";
                    };
                    emit("bankruptcy_ratio", "count", res.ratio_count.ratio.mean,
                         res.ratio_count.ratio.lo, res.ratio_count.ratio.hi);
                    emit("bankruptcy_ratio", "assets", res.ratio_assets.ratio.mean,
                         res.ratio_assets.ratio.lo, res.ratio_assets.ratio.hi);

                    ibrisk::ScalarAccumulator tstar;
                    long none = 0;
                    for (const auto& row : res.critical_times) {
                        if (row.t_star) {
                            tstar.add(static_cast<double>(*row.t_star));
                        } else {
                            ++none;
                        }
                    }
                    const auto ts = tstar.stats();
                    if (ts.n > 0) {
                        emit("mean_critical_time", "-", ts.mean, ts.lo, ts.hi);
                    }
                    emit("critical_time_none_fraction", "-",
                         static_cast<double>(none) /
                             static_cast<double>(res.critical_times.size()),
                         0.0, 0.0);
                }
            }
        }
    }

    ibrisk::RunManifest manifest;
    manifest.command = "sweep";
    manifest.master_seed = args.seed;
    manifest.config = {{"variants", args.variants},
                       {"beta_stars", args.beta_stars},
                       {"phis", args.phis},
                       {"epsilon", args.epsilon},
                       {"max_steps", args.max_steps},
                       {"per_year_pooling", args.per_year_pooling},
                       {"ensemble_dir", args.ensemble_dir}};
    manifest.input_digests = {{"banks", ibrisk::file_digest(args.banks_path)},
                              {"spreads", ibrisk::file_digest(args.spreads_path)}};
    manifest.wall_seconds = seconds_since(start);
    ibrisk::write_manifest(args.out, manifest);
    return 0;
}

struct OracleArgs {
    int instances = 20;
    long runs = 100000;
    std::uint64_t seed = 7;
    int max_steps = 50;
};

int run_oracle_check(const OracleArgs& args) {
    const auto report =
        ibrisk::oracle_check(args.instances, args.runs, args.seed, args.max_steps);
    for (const auto& inst : report.instances) {
        std::cout << (inst.pass ? "[ok]  " : "[FAIL] ") << "instance " << inst.index
                  << " n=" << inst.n << " variant=" << ibrisk::variant_name(inst.variant)
                  << " eps=" << inst.epsilon << " beta*=" << inst.beta_star
                  << " phi=" << inst.phi << " states=" << inst.states_compared
                  << " worst=" << inst.worst_sigma << " sigma\n";
    }
    std::cout << (report.pass ? "oracle check passed" : "oracle check FAILED") << " ("
              << report.instances.size() << " instances, " << report.runs_per_instance
              << " runs each)\n";
    return report.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ibrisk: interbank network reconstruction and liquidity-contagion "
                 "simulation"};
    app.set_version_flag("--version", ibrisk::kVersion);
    app.set_config("--config", "", "flat key=value configuration file");
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate synthetic input files");
    synth->add_option("--banks", synth_args.config.banks, "bank count")
        ->capture_default_str();
    synth->add_option("--countries", synth_args.config.countries, "country count")
        ->capture_default_str();
    synth->add_option("--years", synth_args.years, "year range first:last")
        ->capture_default_str();
    synth->add_option("--seed", synth_args.config.seed, "master seed")
        ->capture_default_str();
    synth->add_option("--liability-surplus", synth_args.config.liability_surplus,
                      "aggregate L/A excess");
    synth->add_option("--size-sigma", synth_args.config.size_sigma,
                      "lognormal sigma of bank sizes");
    synth->add_option("--interbank-alpha", synth_args.config.interbank_alpha,
                      "interbank books scale as T^alpha");
    synth->add_option("--year-drift", synth_args.config.year_drift,
                      "scale on year-over-year balance-sheet noise");
    synth->add_option("--bis-boost", synth_args.config.bis_diagonal_boost,
                      "own-country lending boost in the BIS matrix");
    synth->add_flag("--homogeneous", synth_args.config.homogeneous,
                    "equal balance sheets across banks");
    synth->add_option("--out", synth_args.out, "output directory")->capture_default_str();

    ReconstructArgs rec_args;
    auto* rec = app.add_subcommand("reconstruct", "build a network ensemble from "
                                                  "aggregate exposures");
    rec->add_option("--banks", rec_args.banks_path, "banks.csv path")->required();
    rec->add_option("--bis", rec_args.bis_path, "bis.csv path")->required();
    rec->add_option("--impute", rec_args.impute_path, "bis_impute.csv path");
    rec->add_option("--density", rec_args.config.target_density, "target density")
        ->capture_default_str();
    rec->add_option("--ensemble", rec_args.config.ensemble_size, "networks per year")
        ->capture_default_str();
    rec->add_option("--seed", rec_args.config.seed, "master seed")->capture_default_str();
    rec->add_option("--z-mode", rec_args.z_mode, "global or per-block")
        ->capture_default_str();
    rec->add_flag("--no-blocks", rec_args.no_blocks, "drop the country-block constraints");
    rec->add_flag("--no-ipf", rec_args.no_ipf, "skip the strength rebalancing pass");
    rec->add_option("--ipf-tol", rec_args.config.ipf_tol, "IPF convergence tolerance");
    rec->add_flag("--exclude-ground-density", rec_args.exclude_ground_density,
                  "leave ground-bank pairs out of the density normalization");
    rec->add_option("--year", rec_args.year, "only this year (default: all in file)");
    rec->add_option("--out", rec_args.out, "output directory")->capture_default_str();

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "run the contagion protocol on an "
                                               "ensemble");
    sim->add_option("--ensemble", sim_args.ensemble_dir, "ensemble directory")->required();
    sim->add_option("--banks", sim_args.banks_path, "banks.csv path")->required();
    sim->add_option("--spreads", sim_args.spreads_path, "spreads.csv path")->required();
    sim->add_option("--variant", sim_args.variant, "BM, NT, NT+RES or NT+RES+THETA")
        ->capture_default_str();
    sim->add_option("--epsilon", sim_args.config.epsilon, "distressed-lender scale")
        ->capture_default_str();
    sim->add_option("--beta-star", sim_args.config.beta_star, "systemic multiplier weight")
        ->capture_default_str();
    sim->add_option("--phi", sim_args.config.phi, "multiplier non-linearity (>= 1)")
        ->capture_default_str();
    sim->add_option("--max-steps", sim_args.config.max_steps, "iteration cap")
        ->capture_default_str();
    sim->add_option("--seed", sim_args.seed, "master seed")->capture_default_str();
    sim->add_option("--threads", sim_args.threads, "worker threads (0 = hardware)");
    sim->add_flag("--per-year-pooling", sim_args.per_year_pooling,
                  "rescale indicators within each year instead of over all years");
    sim->add_flag("--write-trajectories", sim_args.write_trajectories,
                  "emit the long-format per-step trajectory CSV");
    sim->add_flag("--write-events", sim_args.write_events,
                  "emit the per-bank infection/default event log");
    sim->add_option("--out", sim_args.out, "output directory")->capture_default_str();

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "grid of simulate runs over variants, "
                                              "beta* and phi");
    sweep->add_option("--ensemble", sweep_args.ensemble_dir, "ensemble directory")
        ->required();
    sweep->add_option("--banks", sweep_args.banks_path, "banks.csv path")->required();
    sweep->add_option("--spreads", sweep_args.spreads_path, "spreads.csv path")->required();
    sweep->add_option("--variants", sweep_args.variants, "variant list")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--beta-star", sweep_args.beta_stars, "beta* grid")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--phi", sweep_args.phis, "phi grid")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--epsilon", sweep_args.epsilon, "distressed-lender scale");
    sweep->add_option("--max-steps", sweep_args.max_steps, "iteration cap");
    sweep->add_option("--seed", sweep_args.seed, "master seed")->capture_default_str();
    sweep->add_option("--threads", sweep_args.threads, "worker threads (0 = hardware)");
    sweep->add_flag("--per-year-pooling", sweep_args.per_year_pooling,
                    "per-year indicator rescaling");
    sweep->add_option("--out", sweep_args.out, "output directory")->capture_default_str();

    OracleArgs oracle_args;
    auto* oracle = app.add_subcommand("oracle-check", "validate the stochastic engine "
                                                      "against exact tiny-instance chains");
    oracle->add_option("--instances", oracle_args.instances, "instance count")
        ->capture_default_str();
    oracle->add_option("--runs", oracle_args.runs, "Monte Carlo runs per instance")
        ->capture_default_str();
    oracle->add_option("--seed", oracle_args.seed, "master seed")->capture_default_str();
    oracle->add_option("--max-steps", oracle_args.max_steps, "iteration cap")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
        if (synth->parsed()) return run_synth(synth_args);
        if (rec->parsed()) return run_reconstruct(rec_args);
        if (sim->parsed()) return run_simulate(sim_args);
        if (sweep->parsed()) return run_sweep(sweep_args);
        if (oracle->parsed()) return run_oracle_check(oracle_args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ibrisk::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ibrisk::infeasible_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ibrisk::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
