#include "ibrisk/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "ibrisk/csv.hpp"
#include "ibrisk/errors.hpp"

namespace ibrisk {

namespace {

std::string member_stem(int index) {
    std::ostringstream s;
    s << "member_" << std::setw(3) << std::setfill('0') << index;
    return s.str();
}

std::filesystem::path year_dir(const std::filesystem::path& dir, int year) {
    return dir / ("year=" + std::to_string(year));
}

} // namespace

void write_ensemble(const std::filesystem::path& dir, int year, const EnsembleBuild& build,
                    const nlohmann::json& config_echo) {
    const auto ydir = year_dir(dir, year);
    std::filesystem::create_directories(ydir);
    for (const auto& net : build.members) {
        const auto stem = member_stem(net.member_index);
        {
            std::ofstream out(ydir / (stem + ".csv"));
            if (!out) throw io_error("cannot write " + (ydir / (stem + ".csv")).string());
            out << "lender_id,borrower_id,weight\n";
            for (int i = 0; i < net.n; ++i) {
                for (int j = 0; j < net.n; ++j) {
                    const double w = net.w(i, j);
                    if (w <= 0.0) continue;
                    out << net.nodes[i].bank_id << "," << net.nodes[j].bank_id << ","
                        << csv::format_double(w) << "\n";
                }
            }
        }
        {
            nlohmann::json j;
            j["year"] = year;
            j["member_index"] = net.member_index;
            j["member_seed"] = net.member_seed;
            j["realized_density"] = net.realized_density;
            j["expected_density"] = build.expected_density;
            if (build.z.mode == ZMode::Global) {
                j["z"] = build.z.z_global;
            } else {
                j["z_blocks"] = build.z.z_block;
            }
            j["config"] = config_echo;
            nlohmann::json nodes = nlohmann::json::array();
            for (const auto& node : net.nodes) {
                nodes.push_back({{"bank_id", node.bank_id},
                                 {"country", node.country},
                                 {"is_ground", node.is_ground}});
            }
            j["nodes"] = nodes;
            std::ofstream out(ydir / (stem + ".json"));
            if (!out) throw io_error("cannot write " + (ydir / (stem + ".json")).string());
            out << j.dump(2) << "\n";
        }
    }
}

StoredEnsemble load_ensemble_year(const std::filesystem::path& dir, int year) {
    const auto ydir = year_dir(dir, year);
    if (!std::filesystem::is_directory(ydir)) {
        throw io_error("no ensemble directory " + ydir.string());
    }
    StoredEnsemble ensemble;
    ensemble.year = year;
    std::vector<std::filesystem::path> metas;
    for (const auto& entry : std::filesystem::directory_iterator(ydir)) {
        if (entry.path().extension() == ".json") metas.push_back(entry.path());
    }
    std::sort(metas.begin(), metas.end());
    for (const auto& meta_path : metas) {
        std::ifstream meta_in(meta_path);
        if (!meta_in) throw io_error("cannot open " + meta_path.string());
        nlohmann::json meta = nlohmann::json::parse(meta_in, nullptr, true);

        ReconstructedNetwork net;
        net.member_index = meta.at("member_index").get<int>();
        net.member_seed = meta.at("member_seed").get<std::uint64_t>();
        net.realized_density = meta.at("realized_density").get<double>();
        std::map<std::string, int> index_of;
        for (const auto& node : meta.at("nodes")) {
            NodeMeta nm;
            nm.bank_id = node.at("bank_id").get<std::string>();
            nm.country = node.at("country").get<std::string>();
            nm.is_ground = node.at("is_ground").get<bool>();
            index_of[nm.bank_id] = static_cast<int>(net.nodes.size());
            net.nodes.push_back(std::move(nm));
        }
        net.n = static_cast<int>(net.nodes.size());
        net.weights.assign(static_cast<std::size_t>(net.n) * net.n, 0.0);

        auto csv_path = meta_path;
        csv_path.replace_extension(".csv");
        const auto table = csv::read_file(csv_path);
        const auto c_lender = table.column("lender_id");
        const auto c_borrower = table.column("borrower_id");
        const auto c_weight = table.column("weight");
        if (!c_lender || !c_borrower || !c_weight) {
            throw validation_error(csv_path.string() +
                                   ": expected lender_id,borrower_id,weight header");
        }
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            const auto line = table.line_numbers[r];
            auto li = index_of.find(row[*c_lender]);
            auto bi = index_of.find(row[*c_borrower]);
            if (li == index_of.end() || bi == index_of.end()) {
                std::ostringstream msg;
                msg << csv_path.string() << ":" << line << ": unknown bank id";
                throw validation_error(msg.str());
            }
            net.w(li->second, bi->second) =
                csv::parse_double(row[*c_weight], csv_path, line, "weight");
        }
        ensemble.members.push_back(std::move(net));
    }
    if (ensemble.members.empty()) {
        throw io_error("no ensemble members under " + ydir.string());
    }
    std::sort(ensemble.members.begin(), ensemble.members.end(),
              [](const auto& a, const auto& b) { return a.member_index < b.member_index; });
    return ensemble;
}

std::vector<int> ensemble_years(const std::filesystem::path& dir) {
    std::vector<int> years;
    if (!std::filesystem::is_directory(dir)) {
        throw io_error("no ensemble directory " + dir.string());
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_directory()) continue;
        const auto name = entry.path().filename().string();
        if (name.rfind("year=", 0) == 0) {
            years.push_back(std::stoi(name.substr(5)));
        }
    }
    std::sort(years.begin(), years.end());
    if (years.empty()) throw io_error("no year=<N> directories under " + dir.string());
    return years;
}

AlignedIndicators align_indicators(std::span<const NodeMeta> nodes, int year,
                                   std::span<const BankRecord> banks,
                                   std::span<const double> gamma_by_bank,
                                   std::span<const double> nu_by_bank) {
    std::map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < banks.size(); ++i) {
        if (banks[i].year == year) row_of[banks[i].bank_id] = i;
    }
    AlignedIndicators out;
    out.gamma.assign(nodes.size(), 0.0);
    out.nu.assign(nodes.size(), 0.0);
    out.total_assets.assign(nodes.size(), 0.0);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (nodes[k].is_ground) continue;
        auto it = row_of.find(nodes[k].bank_id);
        if (it == row_of.end()) {
            throw validation_error("no balance-sheet row for bank " + nodes[k].bank_id +
                                   " in year " + std::to_string(year));
        }
        out.gamma[k] = gamma_by_bank[it->second];
        out.nu[k] = nu_by_bank[it->second];
        out.total_assets[k] = banks[it->second].total_assets;
    }
    return out;
}

YearResults simulate_year(std::span<const ReconstructedNetwork> ensemble,
                          std::span<const double> gamma, std::span<const double> nu,
                          std::span<const double> total_assets,
                          const ContagionConfig& config, std::uint64_t master_seed,
                          int year, int threads, const TrajectorySink& sink) {
    if (ensemble.empty()) throw validation_error("simulate_year needs at least one network");
    if (threads < 1) threads = 1;

    YearResults results;
    results.year = year;
    results.max_steps = config.max_steps;
    results.nodes = ensemble.front().nodes;

    std::vector<int> seed_nodes;
    for (std::size_t k = 0; k < results.nodes.size(); ++k) {
        if (!results.nodes[k].is_ground) seed_nodes.push_back(static_cast<int>(k));
    }
    const long n_networks = static_cast<long>(ensemble.size());
    const long n_seeds = static_cast<long>(seed_nodes.size());
    const long total_runs = n_networks * n_seeds;

    const int grid = config.max_steps + 1;
    CurveAccumulator s_c(grid), i1_c(grid), i2_c(grid);
    CurveAccumulator s_w(grid), i1_w(grid), i2_w(grid);
    ScalarAccumulator ratio_c, ratio_w;
    MuAccumulator mu_acc(grid);
    std::map<std::string, ScalarAccumulator> country_c, country_w;
    int n_real = 0;
    for (const auto& node : results.nodes) {
        if (!node.is_ground) {
            ++n_real;
            country_c[node.country];
            country_w[node.country];
        }
    }

    // The contagion view of each network is built lazily and reused by every
    // seed; networks are processed in order, runs inside a network in chunks
    // so workers never touch shared accumulators.
    for (long net_idx = 0; net_idx < n_networks; ++net_idx) {
        const auto cn = prepare_network(ensemble[net_idx], gamma, nu, total_assets);
        std::vector<Trajectory> chunk(n_seeds);
        const long stride = std::max<long>(1, (n_seeds + threads - 1) / threads);
        std::vector<std::thread> workers;
        for (int w = 0; w < threads; ++w) {
            const long begin = w * stride;
            const long end = std::min(n_seeds, begin + stride);
            if (begin >= end) break;
            workers.emplace_back([&, begin, end]() {
                for (long k = begin; k < end; ++k) {
                    RngStream rng(derive_seed(master_seed,
                                              {static_cast<std::uint64_t>(year),
                                               static_cast<std::uint64_t>(net_idx),
                                               static_cast<std::uint64_t>(k)}));
                    chunk[k] = run(cn, seed_nodes[k], config, rng);
                }
            });
        }
        for (auto& worker : workers) worker.join();

        for (long k = 0; k < n_seeds; ++k) {
            const Trajectory& traj = chunk[k];
            s_c.add(traj.s);
            i1_c.add(traj.i1);
            i2_c.add(traj.i2);
            s_w.add(traj.s_w);
            i1_w.add(traj.i1_w);
            i2_w.add(traj.i2_w);
            ratio_c.add(traj.i2.back());
            ratio_w.add(traj.i2_w.back());
            if (config.record_mu) mu_acc.add(traj);
            if (traj.censored) ++results.censored;

            std::map<std::string, double> share_c, share_w;
            for (const auto& [country, unused] : country_c) {
                share_c[country] = 0.0;
                share_w[country] = 0.0;
            }
            for (std::size_t b = 0; b < results.nodes.size(); ++b) {
                if (results.nodes[b].is_ground) continue;
                if (traj.final_state[b] != Compartment::Bankrupted) continue;
                share_c[results.nodes[b].country] += 1.0 / static_cast<double>(n_real);
                share_w[results.nodes[b].country] +=
                    cn.asset_weight[b]; // normalized asset share
            }
            for (auto& [country, acc] : country_c) acc.add(share_c[country]);
            for (auto& [country, acc] : country_w) acc.add(share_w[country]);

            results.critical_times.push_back({static_cast<int>(net_idx), seed_nodes[k],
                                              critical_time(traj, config.beta_star,
                                                            config.phi)});
            if (sink) sink(static_cast<int>(net_idx), seed_nodes[k], traj);
        }
    }

    results.runs = total_runs;
    results.prevalence_count = {s_c.stats(), i1_c.stats(), i2_c.stats()};
    results.prevalence_assets = {s_w.stats(), i1_w.stats(), i2_w.stats()};
    results.ratio_count = {ratio_c.stats(), results.censored, results.runs};
    results.ratio_assets = {ratio_w.stats(), results.censored, results.runs};
    for (auto& [country, acc] : country_c) results.country_count[country] = acc.stats();
    for (auto& [country, acc] : country_w) results.country_assets[country] = acc.stats();
    if (config.record_mu) results.mu = mu_acc.summary();
    return results;
}

namespace {

void open_out(std::ofstream& out, const std::filesystem::path& path) {
    out.open(path);
    if (!out) throw io_error("cannot write " + path.string());
}

void write_curve_rows(std::ofstream& out, int year, const char* weighting,
                      const PrevalenceResult& prev) {
    const char* names[3] = {"s", "i1", "i2"};
    const std::vector<MeanCI>* curves[3] = {&prev.s, &prev.i1, &prev.i2};
    for (int c = 0; c < 3; ++c) {
        for (std::size_t t = 0; t < curves[c]->size(); ++t) {
            const auto& cell = (*curves[c])[t];
            out << year << "," << t << "," << names[c] << "," << weighting << ","
                << csv::format_double(cell.mean) << "," << csv::format_double(cell.lo)
                << "," << csv::format_double(cell.hi) << "\n";
        }
    }
}

} // namespace

void write_prevalence_csv(const std::filesystem::path& path,
                          std::span<const YearResults> years) {
    std::ofstream out;
    open_out(out, path);
    out << "year,t,compartment,weighting,mean,ci_lo,ci_hi\n";
    for (const auto& y : years) {
        write_curve_rows(out, y.year, "count", y.prevalence_count);
        write_curve_rows(out, y.year, "assets", y.prevalence_assets);
    }
}

void write_bankruptcy_ratio_csv(const std::filesystem::path& path,
                                std::span<const YearResults> years) {
    std::ofstream out;
    open_out(out, path);
    out << "year,weighting,mean,ci_lo,ci_hi,censored_runs,runs\n";
    for (const auto& y : years) {
        out << y.year << ",count," << csv::format_double(y.ratio_count.ratio.mean) << ","
            << csv::format_double(y.ratio_count.ratio.lo) << ","
            << csv::format_double(y.ratio_count.ratio.hi) << "," << y.censored << ","
            << y.runs << "\n";
        out << y.year << ",assets," << csv::format_double(y.ratio_assets.ratio.mean) << ","
            << csv::format_double(y.ratio_assets.ratio.lo) << ","
            << csv::format_double(y.ratio_assets.ratio.hi) << "," << y.censored << ","
            << y.runs << "\n";
    }
}

void write_country_decomposition_csv(const std::filesystem::path& path,
                                     std::span<const YearResults> years) {
    std::ofstream out;
    open_out(out, path);
    out << "year,country,weighting,mean,ci_lo,ci_hi\n";
    for (const auto& y : years) {
        for (const auto& [country, cell] : y.country_count) {
            out << y.year << "," << country << ",count," << csv::format_double(cell.mean)
                << "," << csv::format_double(cell.lo) << "," << csv::format_double(cell.hi)
                << "\n";
        }
        for (const auto& [country, cell] : y.country_assets) {
            out << y.year << "," << country << ",assets," << csv::format_double(cell.mean)
                << "," << csv::format_double(cell.lo) << "," << csv::format_double(cell.hi)
                << "\n";
        }
    }
}

void write_mu_dynamics_csv(const std::filesystem::path& path,
                           std::span<const YearResults> years) {
    std::ofstream out;
    open_out(out, path);
    out << "year,t,mean,min,q25,median,q75,max,samples\n";
    for (const auto& y : years) {
        for (std::size_t t = 0; t < y.mu.size(); ++t) {
            const auto& m = y.mu[t];
            out << y.year << "," << t << "," << csv::format_double(m.mean) << ","
                << csv::format_double(m.min) << "," << csv::format_double(m.q25) << ","
                << csv::format_double(m.median) << "," << csv::format_double(m.q75) << ","
                << csv::format_double(m.max) << "," << m.samples << "\n";
        }
    }
}

void write_critical_times_csv(const std::filesystem::path& path,
                              std::span<const YearResults> years) {
    std::ofstream out;
    open_out(out, path);
    out << "year,network_id,seed_bank,t_star\n";
    for (const auto& y : years) {
        for (const auto& row : y.critical_times) {
            out << y.year << "," << row.network << ","
                << y.nodes[row.seed_bank].bank_id << ",";
            if (row.t_star) out << *row.t_star;
            out << "\n";
        }
    }
}

nlohmann::json contagion_config_json(const ContagionConfig& config) {
    return {{"variant", variant_name(config.variant)}, {"epsilon", config.epsilon},
            {"beta_star", config.beta_star},           {"phi", config.phi},
            {"max_steps", config.max_steps},           {"record_mu", config.record_mu}};
}

nlohmann::json reconstruction_config_json(const ReconstructionConfig& config) {
    return {{"target_density", config.target_density},
            {"ensemble_size", config.ensemble_size},
            {"z_mode", config.z_mode == ZMode::Global ? "global" : "per-block"},
            {"use_blocks", config.use_blocks},
            {"ipf", config.ipf},
            {"ipf_tol", config.ipf_tol},
            {"ipf_max_iter", config.ipf_max_iter},
            {"seed", config.seed},
            {"ground_in_density", config.ground_in_density},
            {"rejection_cap", config.rejection_cap}};
}

} // namespace ibrisk
