// Command-line front end: one subcommand per pipeline stage. Every run writes
// the exact config that produced it next to its outputs.
#include <sys/file.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "vfil/vfil.hpp"

namespace fs = std::filesystem;
using namespace vfil;

namespace {

// Advisory lock on the output directory for the process lifetime.
class DirLock {
  public:
    explicit DirLock(const fs::path& dir) {
        fs::create_directories(dir);
        path_ = dir / ".lock";
        fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0 || ::flock(fd_, LOCK_EX | LOCK_NB) != 0)
            throw std::runtime_error("output directory is locked by another process: " +
                                     dir.string());
    }
    ~DirLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }

  private:
    fs::path path_;
    int fd_ = -1;
};

RunConfig load_config(const std::string& path) {
    if (path.empty()) return RunConfig{};
    return nlohmann::json::parse(io::read_text(path)).get<RunConfig>();
}

SpatialGrid box_grid(const RunConfig& c) { return SpatialGrid(c.box_length, c.box_points); }

EvolveOptions evolve_options(const RunConfig& c) {
    EvolveOptions o;
    o.floor_eps = c.floor_eps;
    o.edge_tol = c.edge_tol;
    o.frame_stride = 1;  // chunking below handles the stride
    return o;
}

ComplexField make_ic(const RunConfig& c, const SpatialGrid& grid) {
    ComplexField f(grid);
    if (c.ic_type == "constant") return f;
    if (c.ic_type == "gaussian") {
        for (std::size_t j = 0; j < grid.n; ++j) {
            const double s = grid.sigma(j);
            f[j] = c.ic_amplitude * std::exp(-s * s);
        }
        return f;
    }
    if (c.ic_type == "self_similar") {
        if (c.profile_path.empty())
            throw std::runtime_error("self_similar initial data needs --profile");
        const ProfileSolution prof = io::read_profile(c.profile_path);
        return self_similar_deviation(prof, c.t_start, grid);
    }
    throw std::runtime_error("unknown ic_type: " + c.ic_type);
}

EquationKind make_kind(const RunConfig& c) {
    if (c.kind == "pair") return EquationKind::pair();
    if (c.kind == "polygonal") return EquationKind::polygonal(c.omega, c.rho, c.theta);
    if (c.kind == "bm") return EquationKind::bm(c.omega);
    if (c.kind == "full_kmd") {
        if (c.pair_rescaled) return EquationKind::kmd_pair_rescaled();
        if (c.circulations.empty()) throw std::runtime_error("full_kmd needs circulations");
        return EquationKind::full_kmd(c.circulations, c.center_gamma.value_or(0.0));
    }
    throw std::runtime_error("unknown kind: " + c.kind);
}

double min_separation(const EvolutionRun& run, std::size_t i) {
    const SpatialGrid& g = run.grid;
    switch (run.kind.tag) {
        case EquationKind::Tag::pair: {
            const ComplexField psi = run.psi(i);
            double m = 1e300;
            for (std::size_t j = 0; j < g.n; ++j) m = std::min(m, 2.0 * psi[j].real());
            return m;
        }
        case EquationKind::Tag::polygonal:
        case EquationKind::Tag::bm: {
            const ComplexField psi = run.psi(i);
            double m = 1e300;
            for (std::size_t j = 0; j < g.n; ++j) m = std::min(m, std::abs(psi[j]));
            return m;
        }
        case EquationKind::Tag::full_kmd: {
            double m = 1e300;
            for (std::size_t a = 0; a < run.frames[i].size(); ++a)
                for (std::size_t b = a + 1; b < run.frames[i].size(); ++b)
                    for (std::size_t j = 0; j < g.n; ++j)
                        m = std::min(m, std::abs(run.frames[i][a][j] - run.frames[i][b][j]));
            return m;
        }
    }
    return 0.0;
}

int cmd_profile(const RunConfig& cfg) {
    DirLock lock(cfg.out_dir);
    const RadialGrid grid = RadialGrid::uniform(cfg.x_max, cfg.radial_points);
    const ProfileMode mode = cfg.mode == "pair" ? ProfileMode::pair : ProfileMode::polygonal;
    std::ofstream log(fs::path(cfg.out_dir) / "convergence.log");
    try {
        const ProfileSolution sol =
            solve_profile(cfg.model_params(), mode, grid, cfg.profile_tol, cfg.profile_max_iter);
        io::write_profile(fs::path(cfg.out_dir) / "profile.json", sol);
        io::write_text(fs::path(cfg.out_dir) / "config.json", nlohmann::json(cfg).dump(2) + "\n");
        log << "converged in " << sol.iterations << " iterations\n"
            << "final_update " << sol.final_update << "\ncontraction_ratio "
            << sol.contraction_ratio << "\nresidual " << profile_residual(sol) << "\ntail_bound "
            << sol.tail_bound << "\n";
        std::cout << "profile: converged in " << sol.iterations
                  << " iterations, certificate " << sol.final_update << ", residual "
                  << profile_residual(sol) << "\n";
        return 0;
    } catch (const convergence_error& e) {
        log << "no convergence: " << e.what() << "\n";
        std::cerr << "profile: " << e.what() << "\n";
        return 1;
    }
}

int cmd_pv(const RunConfig& cfg, int corners, double rho) {
    DirLock lock(cfg.out_dir);
    const PointVortexState s0 = regular_polygon(corners, cfg.center_gamma, rho, cfg.theta);
    const auto traj = integrate_pv(s0, cfg.pv_T, cfg.pv_dt, cfg.collision_eps);
    io::write_pv_csv(fs::path(cfg.out_dir) / "trajectory.csv", traj, cfg.pv_dt, cfg.collision_eps);
    io::write_text(fs::path(cfg.out_dir) / "config.json", nlohmann::json(cfg).dump(2) + "\n");
    const PVInvariants a = pv_invariants(traj.front());
    const PVInvariants b = pv_invariants(traj.back());
    std::cout << "pv: " << traj.size() << " frames, hamiltonian drift "
              << std::abs(a.hamiltonian - b.hamiltonian) << "\n";
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    DirLock lock(cfg.out_dir);
    const SpatialGrid grid = box_grid(cfg);
    const EquationKind kind = make_kind(cfg);
    const EvolveOptions opt = evolve_options(cfg);

    std::vector<ComplexField> fields;
    if (kind.tag == EquationKind::Tag::full_kmd) {
        const ComplexField base = make_ic(cfg, grid);
        const auto n = kind.gamma.size();
        for (std::size_t a = 0; a < n; ++a) {
            ComplexField f = base;
            cplx root = std::polar(cfg.rho, cfg.theta + 2.0 * std::numbers::pi *
                                                           static_cast<double>(a) /
                                                           static_cast<double>(n));
            if (cfg.pair_rescaled) root = (a == 0) ? cplx{1.0, 0.0} : cplx{-1.0, 0.0};
            for (std::size_t j = 0; j < grid.n; ++j)
                f[j] = cfg.pair_rescaled && a == 1 ? -std::conj(base[j] + 1.0)
                                                   : root * (base[j] + 1.0);
            fields.push_back(std::move(f));
        }
    } else {
        fields.push_back(make_ic(cfg, grid));
    }

    // reduced co-run for the symmetry column
    std::optional<EvolutionRun> reduced;
    EvolutionRun run;
    run.kind = kind;
    run.grid = grid;
    run.dt = cfg.dt;
    run.t_start = cfg.t_start;
    run.t_end = cfg.t_end;
    run.background = kind.background_description();
    run.times.push_back(cfg.t_start);
    run.frames.push_back(fields);

    std::string abort_note;
    const double chunk = cfg.dt * static_cast<double>(cfg.frame_stride);
    double t = cfg.t_start;
    try {
        while (t < cfg.t_end - 0.5 * cfg.dt) {
            const double t_next = std::min(t + chunk, cfg.t_end);
            EvolutionRun piece = split_step_evolve(run.frames.back(), kind, t, t_next, cfg.dt,
                                                   {opt.floor_eps, opt.edge_tol, 1u << 30});
            run.times.push_back(piece.times.back());
            run.frames.push_back(piece.frames.back());
            t = t_next;
        }
    } catch (const near_collision_error& e) {
        abort_note = "near-collision abort at t=" + std::to_string(e.t) +
                     ", sigma=" + std::to_string(e.sigma);
    }

    if (cfg.symmetry_column && kind.tag == EquationKind::Tag::full_kmd && !cfg.pair_rescaled) {
        ComplexField eta0 = make_ic(cfg, grid);
        const double omega = omega_from(static_cast<int>(kind.gamma.size()), kind.center_gamma);
        EvolutionRun red;
        red.kind = EquationKind::polygonal(omega, cfg.rho, cfg.theta);
        red.grid = grid;
        red.times.push_back(cfg.t_start);
        red.frames.push_back({eta0});
        double tr = cfg.t_start;
        for (std::size_t i = 1; i < run.times.size(); ++i) {
            EvolutionRun piece = split_step_evolve(red.frames.back(), red.kind, tr, run.times[i],
                                                   cfg.dt, {opt.floor_eps, opt.edge_tol, 1u << 30});
            red.times.push_back(piece.times.back());
            red.frames.push_back(piece.frames.back());
            tr = run.times[i];
        }
        reduced = std::move(red);
    }

    io::write_run(cfg.out_dir, run, cfg);

    std::ostringstream summary;
    summary << "t,min_separation";
    for (std::size_t a = 0; a < kind.fields(); ++a) summary << ",l2_f" << a;
    summary << ",energy";
    if (reduced) summary << ",symmetry_deviation";
    summary << "\n";
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        summary << io::csv_double(run.times[i]) << "," << io::csv_double(min_separation(run, i));
        for (std::size_t a = 0; a < kind.fields(); ++a)
            summary << "," << io::csv_double(l2_norm(run.frames[i][a]));
        double energy = 0.0;
        if (kind.tag == EquationKind::Tag::polygonal || kind.tag == EquationKind::Tag::bm)
            energy = energy_bm(run.psi(i), kind.omega);
        else if (kind.tag == EquationKind::Tag::pair)
            energy = energy_bm(run.psi(i), 0.0);
        summary << "," << io::csv_double(energy);
        if (reduced) {
            double dev = 0.0;
            const ComplexField psi1 = reduced->psi(i);
            for (std::size_t a = 0; a < kind.gamma.size(); ++a) {
                const cplx root = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(a) /
                                                      static_cast<double>(kind.gamma.size()));
                for (std::size_t j = 0; j < grid.n; ++j)
                    dev = std::max(dev, std::abs(run.frames[i][a][j] - root * psi1[j]));
            }
            summary << "," << io::csv_double(dev);
        }
        summary << "\n";
    }
    if (!abort_note.empty()) summary << "# " << abort_note << "\n";
    io::write_text(fs::path(cfg.out_dir) / "summary.csv", summary.str());

    // plot data: Re Psi snapshots at first, middle, and last stored frames
    std::ostringstream snap;
    snap << "sigma";
    const std::vector<std::size_t> picks{0, run.times.size() / 2, run.times.size() - 1};
    for (std::size_t i : picks) snap << ",re_psi_t" << io::csv_double(run.times[i]);
    snap << "\n";
    for (std::size_t j = 0; j < grid.n; ++j) {
        snap << io::csv_double(grid.sigma(j));
        for (std::size_t i : picks) snap << "," << io::csv_double(run.psi(i)[j].real());
        snap << "\n";
    }
    io::write_text(fs::path(cfg.out_dir) / "snapshots.csv", snap.str());

    if (kind.tag == EquationKind::Tag::pair && cfg.ic_type == "self_similar" &&
        abort_note.empty()) {
        const ScalingFit fit = collision_scaling_fit(run);
        nlohmann::json j{{"slope", fit.slope}, {"prefactor", fit.prefactor}};
        io::write_text(fs::path(cfg.out_dir) / "scaling_fit.json", j.dump(2) + "\n");
        std::cout << "simulate: scaling slope " << fit.slope << ", prefactor " << fit.prefactor
                  << "\n";
    }
    std::cout << "simulate: " << run.times.size() << " frames -> " << cfg.out_dir;
    if (!abort_note.empty()) std::cout << " (" << abort_note << ")";
    std::cout << "\n";
    return abort_note.empty() ? 0 : 2;
}

int cmd_fixedpoint(const RunConfig& cfg) {
    DirLock lock(cfg.out_dir);
    if (cfg.profile_path.empty() || !fs::exists(cfg.profile_path)) {
        std::cerr << "fixedpoint: profile artifact missing: " << cfg.profile_path << "\n";
        return 1;
    }
    const ProfileSolution prof = io::read_profile(cfg.profile_path);
    const ProfileMode mode = prof.mode;
    const SpatialGrid grid = box_grid(cfg);
    FixedPointOptions opt;
    opt.mesh_panels = cfg.duhamel_panels;
    opt.ladder_levels = cfg.ladder_levels;
    opt.tol = cfg.fixedpoint_tol;
    opt.max_iter = cfg.fixedpoint_max_iter;
    opt.ratio_target = cfg.ratio_target;

    ModelParams params = cfg.model_params();
    FixedPointResult res;
    try {
        if (cfg.bisect) {
            const BisectionResult bis = bisect_t0(prof, params, mode, grid, opt, cfg.t0_start);
            res = bis.fixed_point;
            params.t0 = bis.t0;
        } else {
            res = solve_r(prof, params, mode, grid, opt);
        }
    } catch (const std::runtime_error& e) {
        std::cerr << "fixedpoint: " << e.what() << "\n";
        return 1;
    }

    // seeded contraction probes on scaled copies of the solution
    std::vector<double> probe_ratios;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 3; ++k) {
        PerturbationTrajectory r1 = res.r, r2 = res.r;
        const double s1 = u(rng), s2 = u(rng);
        for (auto& f : r1.frames)
            for (auto& z : f.values) z *= s1;
        for (auto& f : r2.frames)
            for (auto& z : f.values) z *= s2;
        if (s1 == s2) continue;
        probe_ratios.push_back(contraction_probe(r1, r2, prof, params, mode, opt));
    }

    RunConfig out_cfg = cfg;
    out_cfg.t0 = params.t0;
    io::write_trajectory(cfg.out_dir, res.r, out_cfg);
    io::write_text(fs::path(cfg.out_dir) / "fixedpoint_report.json",
                   io::fixedpoint_report_json(res, probe_ratios).dump(2) + "\n");
    std::cout << "fixedpoint: t0 " << res.t0 << ", iterations " << res.iterations
              << ", ||r||_X components: l2 " << res.report.l2_component << ", grad "
              << res.report.grad_component << ", local " << res.report.local_component
              << ", total " << res.report.total << "\n";
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    SuiteInputs in;
    in.profile_path = cfg.profile_path;
    in.trajectory_dir = cfg.trajectory_dir;
    in.sweep_alphas = cfg.sweep_alphas;
    in.tol_report = cfg.tol_report;
    fs::create_directories(cfg.out_dir);
    in.report_path = (fs::path(cfg.out_dir) / "verify_report.json").string();
    try {
        io::write_text(fs::path(cfg.out_dir) / "config.json", nlohmann::json(cfg).dump(2) + "\n");
        const SuiteReport rep = run_suite(in);
        std::size_t failed = 0;
        for (const auto& c : rep.checks) {
            if (!c.symbolic && !c.passed && !c.premise_violated) {
                ++failed;
                std::cout << "FAIL " << c.id << " margin " << c.margin << "\n";
            }
        }
        std::cout << "verify: " << rep.checks.size() << " checks, " << failed
                  << " explicit failures -> " << in.report_path << "\n";
        return rep.explicit_failure ? 1 : 0;
    } catch (const std::runtime_error& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return 1;
    }
}

int cmd_sweep(const RunConfig& cfg) {
    DirLock lock(cfg.out_dir);
    if (cfg.sweep_alphas.empty()) {
        std::cerr << "sweep: no alphas given\n";
        return 1;
    }
    const SpatialGrid grid(20.0, 16384);
    const std::vector<double> samples{1e-6, 1e-3, 0.04};
    std::vector<std::vector<BoundCheck>> sweeps;
    const ProfileMode mode = cfg.mode == "pair" ? ProfileMode::pair : ProfileMode::polygonal;
    for (double alpha : cfg.sweep_alphas) {
        ModelParams p = cfg.model_params();
        p.alpha = alpha;
        const ProfileSolution prof =
            solve_profile(p, mode, RadialGrid::uniform(cfg.x_max, cfg.radial_points),
                          cfg.profile_tol, cfg.profile_max_iter, /*require_membership=*/false);
        sweeps.push_back(check_source_bounds(prof, grid, samples, cfg.tol_report));
    }

    io::write_text(fs::path(cfg.out_dir) / "config.json", nlohmann::json(cfg).dump(2) + "\n");
    std::ostringstream table;
    table << "constant";
    for (double a : cfg.sweep_alphas) table << ",alpha_" << a;
    table << "\n";
    for (const BoundCheck& ref : sweeps.front()) {
        if (!ref.symbolic) continue;
        table << ref.id;
        for (const auto& sweep : sweeps)
            for (const BoundCheck& c : sweep)
                if (c.id == ref.id) table << "," << io::csv_double(c.lhs_max);
        table << "\n";
    }
    io::write_text(fs::path(cfg.out_dir) / "uniformity.csv", table.str());

    std::vector<BoundCheck> uni = uniformity_checks(sweeps);
    io::write_verify_report(fs::path(cfg.out_dir) / "sweep_report.json", uni);
    for (const auto& c : uni)
        std::cout << c.id << " spread " << c.lhs_max << (c.passed ? " ok" : " FAIL") << "\n";
    return explicit_failures(uni) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vortex filament collision toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    RunConfig cfg;
    // Config file first (pre-scanned), explicit flags land on top of it.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                cfg = load_config(argv[i + 1]);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            }
        }
    }

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "seed for probe sampling");
    };

    auto* p_profile = app.add_subcommand("profile", "construct a self-similar collision profile");
    add_common(p_profile);
    p_profile->add_option("--mode", cfg.mode, "pair | polygonal");
    p_profile->add_option("--alpha", cfg.alpha, "profile slope");
    p_profile->add_option("--omega", cfg.omega, "angular velocity (polygonal)");
    p_profile->add_option("--x-max", cfg.x_max, "radial truncation");
    p_profile->add_option("--radial-points", cfg.radial_points, "radial nodes");
    p_profile->add_option("--tol", cfg.profile_tol, "iteration tolerance");

    int pv_corners = 3;
    double pv_rho = 1.0;
    auto* p_pv = app.add_subcommand("pv", "integrate the point-vortex system");
    add_common(p_pv);
    p_pv->add_option("--corners", pv_corners, "polygon corners");
    double pv_center = 0.0;
    bool pv_has_center = false;
    p_pv->add_option("--center-gamma", pv_center, "central circulation")
        ->each([&](const std::string&) { pv_has_center = true; });
    p_pv->add_option("--rho", pv_rho, "polygon radius");
    p_pv->add_option("--T", cfg.pv_T, "integration horizon");
    p_pv->add_option("--dt", cfg.pv_dt, "time step");

    auto* p_sim = app.add_subcommand("simulate", "split-step evolution of one equation kind");
    add_common(p_sim);
    p_sim->add_option("--kind", cfg.kind, "pair | polygonal | bm | full_kmd");
    p_sim->add_option("--alpha", cfg.alpha, "profile slope (self-similar runs)");
    p_sim->add_option("--omega", cfg.omega, "angular velocity");
    p_sim->add_option("--L", cfg.box_length, "box length");
    p_sim->add_option("--n", cfg.box_points, "grid points (power of two)");
    p_sim->add_option("--dt", cfg.dt, "time step");
    p_sim->add_option("--t-start", cfg.t_start, "start time");
    p_sim->add_option("--t-end", cfg.t_end, "end time");
    p_sim->add_option("--stride", cfg.frame_stride, "steps between stored frames");
    p_sim->add_option("--ic", cfg.ic_type, "constant | gaussian | self_similar");
    p_sim->add_option("--ic-amplitude", cfg.ic_amplitude, "gaussian amplitude");
    p_sim->add_option("--profile", cfg.profile_path, "profile artifact for self-similar data");
    p_sim->add_option("--edge-tol", cfg.edge_tol, "box edge guard");
    p_sim->add_option("--floor", cfg.floor_eps, "denominator floor");

    auto* p_fp = app.add_subcommand("fixedpoint", "perturbation fixed point");
    add_common(p_fp);
    p_fp->add_option("--profile", cfg.profile_path, "profile artifact")->required();
    p_fp->add_option("--alpha", cfg.alpha, "profile slope");
    p_fp->add_option("--omega", cfg.omega, "angular velocity (polygonal)");
    p_fp->add_option("--t0", cfg.t0, "horizon (with --no-bisect)");
    p_fp->add_flag("!--no-bisect", cfg.bisect, "skip the horizon bisection");
    p_fp->add_option("--L", cfg.box_length, "box length");
    p_fp->add_option("--n", cfg.box_points, "grid points");
    p_fp->add_option("--panels", cfg.duhamel_panels, "quadrature panels");
    p_fp->add_option("--ladder", cfg.ladder_levels, "dyadic ladder levels");

    auto* p_ver = app.add_subcommand("verify", "inequality suite on stored artifacts");
    add_common(p_ver);
    p_ver->add_option("--profile", cfg.profile_path, "profile artifact")->required();
    p_ver->add_option("--trajectory", cfg.trajectory_dir, "fixed-point trajectory directory");
    p_ver->add_option("--sweep", cfg.sweep_alphas, "alpha sweep for measured constants");

    auto* p_sweep = app.add_subcommand("sweep", "measured-constant uniformity across alphas");
    add_common(p_sweep);
    p_sweep->add_option("--alphas", cfg.sweep_alphas, "alpha list")->required();
    p_sweep->add_option("--mode", cfg.mode, "pair | polygonal");
    p_sweep->add_option("--x-max", cfg.x_max, "radial truncation");
    p_sweep->add_option("--radial-points", cfg.radial_points, "radial nodes");

    CLI11_PARSE(app, argc, argv);

    try {
        if (p_profile->parsed()) return cmd_profile(cfg);
        if (p_pv->parsed()) {
            if (pv_has_center) cfg.center_gamma = pv_center;
            return cmd_pv(cfg, pv_corners, pv_rho);
        }
        if (p_sim->parsed()) return cmd_simulate(cfg);
        if (p_fp->parsed()) return cmd_fixedpoint(cfg);
        if (p_ver->parsed()) return cmd_verify(cfg);
        if (p_sweep->parsed()) return cmd_sweep(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
