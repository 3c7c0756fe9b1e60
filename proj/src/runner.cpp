#include "lmfg/runner.hpp"

#include "lmfg/analysis.hpp"
#include "lmfg/ca.hpp"
#include "lmfg/field.hpp"
#include "lmfg/integrate.hpp"
#include "lmfg/io.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <thread>

namespace lmfg {

namespace fs = std::filesystem;

namespace {

std::string csv_mirror(const std::vector<double>& data) {
    std::string out = "index,value\n";
    for (std::size_t i = 0; i < data.size(); ++i)
        out += std::to_string(i) + "," + fmt_double(data[i]) + "\n";
    return out;
}

void write_snapshot(const fs::path& dir, const std::string& stem,
                    const std::vector<int>& dims, const std::vector<double>& data) {
    write_raster(dir / (stem + ".lmfg"), dims, data);
    if (data.size() <= 10000)
        write_text(dir / (stem + ".csv"), csv_mirror(data));
}

std::string clusters_csv(const ClusterReport& rep) {
    std::size_t nd = rep.clusters.empty() ? 0 : rep.clusters.front().centroid.size();
    std::string out = "cluster_id,sign,size";
    for (std::size_t a = 0; a < nd; ++a) out += ",centroid_" + std::to_string(a);
    out += ",boundary_len\n";
    for (const Cluster& c : rep.clusters) {
        out += std::to_string(c.id) + "," + std::to_string(c.sign) + "," +
               std::to_string(c.size);
        for (double x : c.centroid) out += "," + fmt_double(x);
        out += "," + std::to_string(c.boundary_len) + "\n";
    }
    return out;
}

std::string run_end_name(RunEnd e) {
    switch (e) {
        case RunEnd::completed: return "completed";
        case RunEnd::fixed_point: return "fixed_point";
        case RunEnd::two_cycle: return "two_cycle";
    }
    return "?";
}

PointSummary run_ca(const ExperimentConfig& cfg, const fs::path& out, int threads) {
    Geometry geom = build_geometry(cfg.geometry);
    StrengthField strengths = sample_disorder(cfg.disorder, geom.size(), cfg.seed_disorder);
    AgentSystem sys{make_initial(cfg.init, geom, cfg.seed_init), &geom, &strengths, 0};
    NoiseModel noise = cfg.noise_model();

    Trajectory traj = run(sys, noise, cfg.steps, cfg.snapshot_every, threads);

    std::string tcsv = "t,m,flips\n";
    for (std::size_t t = 0; t < traj.m.size(); ++t)
        tcsv += std::to_string(t) + "," + fmt_double(traj.m[t]) + "," +
                std::to_string(t == 0 ? 0 : traj.flips[t - 1]) + "\n";
    write_text(out / "trajectory.csv", tcsv);

    auto to_doubles = [](const std::vector<std::int8_t>& s) {
        return std::vector<double>(s.begin(), s.end());
    };
    std::vector<int> dims = geom.spatial() ? geom.dims : std::vector<int>{geom.size()};
    for (const auto& [t, state] : traj.snapshots)
        write_snapshot(out, "state_t" + std::to_string(t), dims, to_doubles(state));
    write_snapshot(out, "state_final", dims, to_doubles(sys.sigma));

    ClusterReport rep = detect_clusters(sys.sigma, geom);
    write_text(out / "clusters.csv", clusters_csv(rep));

    PointSummary sum;
    sum.m_final = traj.m.back();
    sum.n_clusters = static_cast<long>(rep.clusters.size());
    // discrete analogues: relative strength (p_i + s_i)/norm plays the
    // role of f, one lattice unit the role of the layer thickness
    long above = 0;
    for (int i = 0; i < geom.size(); ++i)
        if ((strengths.p[i] + strengths.s[i]) / strengths.norm > 1.0) ++above;
    sum.P_tot = static_cast<double>(above) / geom.size();
    double S = mean_cluster_distance(rep, geom);
    auto op = order_parameter(S, 1.0, cfg.eta_dense, cfg.eta_sparse);
    sum.eta = op.eta;
    sum.phase = to_string(op.phase);

    long minority = 0;
    int majority = sum.m_final >= 0.0 ? +1 : -1;
    for (const Cluster& c : rep.clusters)
        if (c.sign != majority) minority += c.size;

    std::string scsv =
        "m_final,end,steps_run,n_clusters,minority_fraction,P_tot,S,eta,phase\n";
    scsv += fmt_double(sum.m_final) + "," + run_end_name(traj.end) + "," +
            std::to_string(traj.steps_run) + "," + std::to_string(sum.n_clusters) + "," +
            fmt_double(static_cast<double>(minority) / geom.size()) + "," +
            fmt_double(sum.P_tot) + "," + fmt_double(S) + "," + fmt_double(sum.eta) +
            "," + sum.phase + "\n";
    write_text(out / "summary.csv", scsv);
    return sum;
}

PointSummary run_pde(const ExperimentConfig& cfg, const fs::path& out, int threads) {
    FieldGrid grid = build_field_grid(cfg);
    double dt = cfg.dt > 0.0 ? cfg.dt : 0.5 * stability_bound(grid);
    write_snapshot(out, "f", grid.dims, grid.f);
    write_snapshot(out, "field_initial", grid.dims, grid.v);

    EvolveResult res = evolve(grid, cfg.t_end, dt, cfg.conv_tol, cfg.record_every, threads);

    std::string scsv = "t,H,max_abs_rhs\n";
    for (const EvolveRecord& r : res.series)
        scsv += fmt_double(r.t) + "," + fmt_double(r.H) + "," +
                fmt_double(r.max_abs_rhs) + "\n";
    write_text(out / "series.csv", scsv);
    write_snapshot(out, "field_final", grid.dims, grid.v);

    EnsembleStats stats = ensemble_stats({grid.f}, grid.dims, grid.boundary, grid.dx,
                                         grid.alpha, {grid.v}, cfg.eta_dense,
                                         cfg.eta_sparse);
    Geometry adj = grid_adjacency(grid.dims, grid.boundary);
    ClusterReport rep = detect_clusters(threshold_field(grid.v, adj), adj);
    write_text(out / "clusters.csv", clusters_csv(rep));

    PointSummary sum;
    double mean_v = 0.0;
    for (double v : grid.v) mean_v += v;
    sum.m_final = mean_v / grid.cells();
    sum.eta = stats.eta;
    sum.phase = to_string(stats.phase);
    sum.P_tot = stats.P_tot;
    sum.n_clusters = static_cast<long>(rep.clusters.size());
    if (res.diverged) sum.status = "diverged";

    std::string sumcsv =
        "m_final,converged,diverged,steps,t_final,P_tot,h_eff,S,eta,phase,n_clusters\n";
    sumcsv += fmt_double(sum.m_final) + "," + (res.converged ? "true" : "false") + "," +
              (res.diverged ? "true" : "false") + "," + std::to_string(res.steps) + "," +
              fmt_double(res.t_final) + "," + fmt_double(stats.P_tot) + "," +
              fmt_double(stats.h_eff) + "," + fmt_double(stats.S) + "," +
              fmt_double(stats.eta) + "," + sum.phase + "," +
              std::to_string(sum.n_clusters) + "\n";
    write_text(out / "summary.csv", sumcsv);
    return sum;
}

PointSummary run_analyze(const ExperimentConfig& cfg, const fs::path& out, int) {
    Raster f = read_raster(cfg.analyze_f);
    std::vector<std::vector<double>> states;
    if (!cfg.analyze_state.empty()) {
        Raster s = read_raster(cfg.analyze_state);
        if (s.dims != f.dims)
            throw std::runtime_error("analyze: state and f rasters have different shapes");
        states.push_back(std::move(s.data));
    }
    EnsembleStats stats = ensemble_stats({f.data}, f.dims, cfg.field_boundary,
                                         cfg.field_dx, cfg.alpha, states,
                                         cfg.eta_dense, cfg.eta_sparse);
    Geometry adj = grid_adjacency(f.dims, cfg.field_boundary);
    std::vector<std::int8_t> sign;
    if (!states.empty()) {
        sign = threshold_field(states[0], adj);
    } else {
        sign.resize(f.data.size());
        for (std::size_t i = 0; i < f.data.size(); ++i)
            sign[i] = static_cast<std::int8_t>(f.data[i] > 1.0 ? +1 : -1);
    }
    ClusterReport rep = detect_clusters(sign, adj);
    write_text(out / "clusters.csv", clusters_csv(rep));

    PointSummary sum;
    sum.eta = stats.eta;
    sum.phase = to_string(stats.phase);
    sum.P_tot = stats.P_tot;
    sum.n_clusters = static_cast<long>(rep.clusters.size());

    std::string scsv = "P_tot,h_eff,n_layers,S,eta,phase,n_clusters,no_clusters\n";
    scsv += fmt_double(stats.P_tot) + "," + fmt_double(stats.h_eff) + "," +
            std::to_string(stats.n_layers) + "," + fmt_double(stats.S) + "," +
            fmt_double(stats.eta) + "," + sum.phase + "," +
            std::to_string(sum.n_clusters) + "," +
            (stats.no_clusters ? "true" : "false") + "\n";
    write_text(out / "summary.csv", scsv);
    return sum;
}

PointSummary run_consensus(const ExperimentConfig& cfg, const fs::path& out,
                           int threads) {
    PredictionSet preds = ingest_file(cfg.predictions_path);
    EmbeddedSystem emb = embed(preds, cfg.geometry, cfg.disorder.beta);
    AgentSystem sys = emb.view();
    ConsensusResult res = consensus(sys, cfg.noise_model(), cfg.max_steps, threads);

    std::string ccsv =
        "decision,p_yes,p_no,m_final,steps_to_stationarity,converged,two_cycle,"
        "minority_agents,minority_clusters\n";
    ccsv += to_string(res.decision) + "," + fmt_double(res.p_yes) + "," +
            fmt_double(res.p_no) + "," + fmt_double(res.m_final) + "," +
            std::to_string(res.steps_to_stationarity) + "," +
            (res.converged ? "true" : "false") + "," +
            (res.two_cycle ? "true" : "false") + "," +
            std::to_string(res.minority_agents) + "," +
            std::to_string(res.minority.clusters.size()) + "\n";
    write_text(out / "consensus.csv", ccsv);
    write_text(out / "minority_clusters.csv", clusters_csv(res.minority));

    PointSummary sum;
    sum.m_final = res.m_final;
    sum.n_clusters = static_cast<long>(res.minority.clusters.size());
    sum.phase = to_string(res.decision);
    return sum;
}

KeyValueMap map_from_text(const std::string& text) {
    KeyValueMap map;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
            return s;
        };
        map[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return map;
}

PointSummary run_sweep(const ExperimentConfig& cfg, const fs::path& out, int threads) {
    KeyValueMap base = map_from_text(resolved_config_text(cfg));
    for (auto it = base.begin(); it != base.end();)
        it = it->first.rfind("sweep.", 0) == 0 ? base.erase(it) : std::next(it);
    base["mode"] = to_string(cfg.sweep_target);

    // grid of points in axis order: first axis outer, second inner
    struct Point {
        std::vector<std::pair<std::string, double>> coords;
    };
    std::vector<Point> points;
    const auto& ax0 = cfg.sweep_values.at(cfg.sweep_axes[0]);
    if (cfg.sweep_axes.size() == 1) {
        for (double v0 : ax0) points.push_back({{{cfg.sweep_axes[0], v0}}});
    } else {
        const auto& ax1 = cfg.sweep_values.at(cfg.sweep_axes[1]);
        for (double v0 : ax0)
            for (double v1 : ax1)
                points.push_back({{{cfg.sweep_axes[0], v0}, {cfg.sweep_axes[1], v1}}});
    }

    std::vector<PointSummary> results(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t k = next.fetch_add(1);
            if (k >= points.size()) break;
            char name[32];
            std::snprintf(name, sizeof(name), "point_%03zu", k);
            try {
                KeyValueMap kvs = base;
                for (const auto& [key, val] : points[k].coords)
                    kvs[key] = fmt_double(val);
                ExperimentConfig pc = parse_config_map(kvs);
                results[k] = run_experiment(pc, (out / name).string(), 1);
            } catch (const std::exception& e) {
                results[k].status = std::string("error: ") + e.what();
            }
        }
    };
    int nw = std::max(1, threads);
    std::vector<std::thread> pool;
    for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::string csv = "point";
    for (const auto& axis : cfg.sweep_axes) csv += "," + axis;
    csv += ",m_final,eta,phase,P_tot,n_clusters,status\n";
    for (std::size_t k = 0; k < points.size(); ++k) {
        csv += std::to_string(k);
        for (const auto& [_, val] : points[k].coords) csv += "," + fmt_double(val);
        const PointSummary& r = results[k];
        csv += "," + fmt_double(r.m_final) + "," + fmt_double(r.eta) + "," + r.phase +
               "," + fmt_double(r.P_tot) + "," + std::to_string(r.n_clusters) + "," +
               r.status + "\n";
    }
    write_text(out / "sweep_summary.csv", csv);

    PointSummary sum;
    sum.status = "ok";
    for (const auto& r : results)
        if (r.status != "ok") sum.status = "partial";
    return sum;
}

} // namespace

PointSummary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                            int threads) {
    fs::path out(out_dir);
    fs::create_directories(out);
    write_text(out / "config_resolved.cfg", resolved_config_text(cfg));

    PointSummary sum;
    switch (cfg.mode) {
        case Mode::ca: sum = run_ca(cfg, out, threads); break;
        case Mode::pde: sum = run_pde(cfg, out, threads); break;
        case Mode::analyze: sum = run_analyze(cfg, out, threads); break;
        case Mode::consensus: sum = run_consensus(cfg, out, threads); break;
        case Mode::sweep: sum = run_sweep(cfg, out, threads); break;
    }
    write_manifest(out);
    return sum;
}

} // namespace lmfg
