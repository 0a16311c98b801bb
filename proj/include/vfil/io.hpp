// Artifact serialization: profile JSON, run directories (binary frames +
// index.json + summary.csv), perturbation trajectories, verification reports,
// point-vortex CSV. Binary frames are raw little-endian float64 pairs (re, im).
#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vfil/config.hpp"
#include "vfil/duhamel.hpp"
#include "vfil/field.hpp"
#include "vfil/pointvortex.hpp"
#include "vfil/profile.hpp"
#include "vfil/schrodinger.hpp"
#include "vfil/verify.hpp"
#include "vfil/xnorm.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary frame format assumes a little-endian host");

namespace vfil {

namespace io {

using nlohmann::json;

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// ---- profile ----------------------------------------------------------------

inline json profile_to_json(const ProfileSolution& sol) {
    json j;
    j["mode"] = to_string(sol.mode);
    j["alpha"] = sol.alpha;
    j["omega"] = sol.omega;
    j["nodes"] = sol.grid.nodes;
    std::vector<double> w_re, w_im, u_re, u_im;
    for (const auto& z : sol.w) {
        w_re.push_back(z.real());
        w_im.push_back(z.imag());
    }
    for (const auto& z : sol.u) {
        u_re.push_back(z.real());
        u_im.push_back(z.imag());
    }
    j["w_re"] = w_re;
    j["w_im"] = w_im;
    j["u_re"] = u_re;
    j["u_im"] = u_im;
    j["iterations"] = sol.iterations;
    j["final_update"] = sol.final_update;
    j["tail_bound"] = sol.tail_bound;
    j["contraction_ratio"] = sol.contraction_ratio;
    return j;
}

inline ProfileSolution profile_from_json(const json& j) {
    ProfileSolution sol;
    sol.mode = j.at("mode").get<std::string>() == "pair" ? ProfileMode::pair : ProfileMode::polygonal;
    sol.alpha = j.at("alpha").get<double>();
    sol.omega = j.at("omega").get<double>();
    sol.grid = RadialGrid(j.at("nodes").get<std::vector<double>>());
    const auto w_re = j.at("w_re").get<std::vector<double>>();
    const auto w_im = j.at("w_im").get<std::vector<double>>();
    const auto u_re = j.at("u_re").get<std::vector<double>>();
    const auto u_im = j.at("u_im").get<std::vector<double>>();
    for (std::size_t i = 0; i < w_re.size(); ++i) sol.w.emplace_back(w_re[i], w_im[i]);
    for (std::size_t i = 0; i < u_re.size(); ++i) sol.u.emplace_back(u_re[i], u_im[i]);
    sol.iterations = j.at("iterations").get<std::size_t>();
    sol.final_update = j.at("final_update").get<double>();
    sol.tail_bound = j.at("tail_bound").get<double>();
    if (j.contains("contraction_ratio")) sol.contraction_ratio = j.at("contraction_ratio").get<double>();
    sol.converged = true;
    return sol;
}

inline void write_profile(const std::filesystem::path& path, const ProfileSolution& sol) {
    write_text(path, profile_to_json(sol).dump(2) + "\n");
}

inline ProfileSolution read_profile(const std::filesystem::path& path) {
    return profile_from_json(json::parse(read_text(path)));
}

// ---- binary fields ----------------------------------------------------------

inline void write_field_binary(const std::filesystem::path& path, const ComplexField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
}

inline ComplexField read_field_binary(const std::filesystem::path& path, const SpatialGrid& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::vector<cplx> v(grid.n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(grid.n * sizeof(cplx)));
    if (!in) throw std::runtime_error("truncated field file: " + path.string());
    return ComplexField(grid, std::move(v));
}

// ---- evolution runs ---------------------------------------------------------

inline std::string frame_file_name(std::size_t frame, std::size_t filament) {
    std::ostringstream ss;
    ss << "frame_" << std::setw(6) << std::setfill('0') << frame << "_f" << std::setw(2)
       << std::setfill('0') << filament << ".bin";
    return ss.str();
}

inline void write_run(const std::filesystem::path& dir, const EvolutionRun& run,
                      const RunConfig& config) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "frames");
    write_text(dir / "config.json", json(config).dump(2) + "\n");

    json index;
    index["t"] = run.times;
    index["grid"] = {{"L", run.grid.L}, {"n", run.grid.n}};
    index["kind"] = static_cast<int>(run.kind.tag);
    index["omega"] = run.kind.omega;
    index["rho"] = run.kind.rho;
    index["theta"] = run.kind.theta;
    index["circulations"] = run.kind.gamma;
    index["dispersion"] = run.kind.dispersion;
    index["center_gamma"] = run.kind.center_gamma;
    index["dt"] = run.dt;
    index["background"] = run.background;
    index["filaments"] = run.kind.fields();
    std::vector<std::vector<std::string>> files;
    for (std::size_t i = 0; i < run.frames.size(); ++i) {
        std::vector<std::string> row;
        for (std::size_t a = 0; a < run.frames[i].size(); ++a) {
            const std::string name = frame_file_name(i, a);
            write_field_binary(dir / "frames" / name, run.frames[i][a]);
            row.push_back(name);
        }
        files.push_back(std::move(row));
    }
    index["files"] = files;
    write_text(dir / "index.json", index.dump(2) + "\n");
}

inline EvolutionRun read_run(const std::filesystem::path& dir) {
    const json index = json::parse(read_text(dir / "index.json"));
    EvolutionRun run;
    const SpatialGrid grid(index.at("grid").at("L").get<double>(),
                           index.at("grid").at("n").get<std::size_t>());
    run.grid = grid;
    run.times = index.at("t").get<std::vector<double>>();
    run.dt = index.at("dt").get<double>();
    run.background = index.at("background").get<std::string>();
    const int tag = index.at("kind").get<int>();
    const auto circulations = index.at("circulations").get<std::vector<double>>();
    const auto dispersion = index.at("dispersion").get<std::vector<double>>();
    switch (tag) {
        case 0: run.kind = EquationKind::pair(); break;
        case 1:
            run.kind = EquationKind::polygonal(index.at("omega").get<double>(),
                                               index.at("rho").get<double>(),
                                               index.at("theta").get<double>());
            break;
        case 2: run.kind = EquationKind::bm(index.at("omega").get<double>()); break;
        default:
            run.kind = EquationKind::full_kmd(circulations, dispersion,
                                              index.value("center_gamma", 0.0));
            break;
    }
    run.t_start = run.times.front();
    run.t_end = run.times.back();
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        std::vector<ComplexField> row;
        for (std::size_t a = 0; a < run.kind.fields(); ++a)
            row.push_back(read_field_binary(
                dir / "frames" / index.at("files")[i][a].get<std::string>(), grid));
        run.frames.push_back(std::move(row));
    }
    return run;
}

// ---- perturbation trajectories ----------------------------------------------

inline void write_trajectory(const std::filesystem::path& dir, const PerturbationTrajectory& traj,
                             const RunConfig& config) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "frames");
    write_text(dir / "config.json", json(config).dump(2) + "\n");
    json index;
    index["t"] = traj.times;
    index["alpha"] = traj.alpha;
    index["gamma"] = traj.gamma;
    index["grid"] = {{"L", traj.frames[0].grid.L}, {"n", traj.frames[0].grid.n}};
    std::vector<std::string> files;
    for (std::size_t i = 0; i < traj.frames.size(); ++i) {
        const std::string name = frame_file_name(i, 0);
        write_field_binary(dir / "frames" / name, traj.frames[i]);
        files.push_back(name);
    }
    index["files"] = files;
    write_text(dir / "index.json", index.dump(2) + "\n");
}

inline PerturbationTrajectory read_trajectory(const std::filesystem::path& dir) {
    const json index = json::parse(read_text(dir / "index.json"));
    PerturbationTrajectory traj;
    const SpatialGrid grid(index.at("grid").at("L").get<double>(),
                           index.at("grid").at("n").get<std::size_t>());
    traj.times = index.at("t").get<std::vector<double>>();
    traj.alpha = index.at("alpha").get<double>();
    traj.gamma = index.at("gamma").get<double>();
    for (const auto& name : index.at("files"))
        traj.frames.push_back(read_field_binary(dir / "frames" / name.get<std::string>(), grid));
    return traj;
}

// ---- reports ----------------------------------------------------------------

inline json fixedpoint_report_json(const FixedPointResult& res,
                                   const std::vector<double>& probe_ratios = {}) {
    json j;
    j["alpha"] = res.r.alpha;
    j["t0"] = res.t0;
    j["gamma"] = res.r.gamma;
    j["iterations"] = res.iterations;
    j["ratios"] = res.ratios;
    j["xnorm_components"] = {{"l2", res.report.l2_component},
                             {"grad", res.report.grad_component},
                             {"local", res.report.local_component},
                             {"total", res.report.total}};
    j["converged"] = res.converged;
    j["ball_ok"] = res.ball_ok;
    j["sup_bound_ok"] = res.sup_bound_ok;
    j["quad_self_error"] = res.quad_self_error;
    if (!probe_ratios.empty()) j["probe_ratios"] = probe_ratios;
    if (!res.failure.empty()) j["failure"] = res.failure;
    return j;
}

inline void to_json(json& j, const BoundCheck& c) {
    j = json{{"id", c.id},
             {"lhs_max", c.lhs_max},
             {"rhs_min_or_budget", c.rhs_min_or_budget},
             {"margin", c.margin},
             {"passed", c.passed},
             {"symbolic", c.symbolic},
             {"premise_violated", c.premise_violated},
             {"uniformity", c.uniformity},
             {"nodes_checked", c.nodes_checked},
             {"note", c.note}};
}

inline void write_verify_report(const std::filesystem::path& path,
                                const std::vector<BoundCheck>& checks) {
    json j;
    j["checks"] = json::array();
    for (const auto& c : checks) {
        json cj;
        to_json(cj, c);
        j["checks"].push_back(cj);
    }
    j["explicit_failures"] = explicit_failures(checks);
    write_text(path, j.dump(2) + "\n");
}

// ---- CSV --------------------------------------------------------------------

inline std::string csv_double(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

inline void write_pv_csv(const std::filesystem::path& path,
                         const std::vector<PointVortexState>& traj, double dt,
                         double collision_eps) {
    std::ostringstream out;
    out << "# point-vortex trajectory; gamma = [";
    for (std::size_t j = 0; j < traj.front().gamma.size(); ++j)
        out << (j ? "," : "") << csv_double(traj.front().gamma[j]);
    out << "]; dt = " << csv_double(dt) << "; collision_eps = " << csv_double(collision_eps) << "\n";
    out << "t";
    for (std::size_t j = 0; j < traj.front().z.size(); ++j)
        out << ",re_z" << j << ",im_z" << j;
    out << "\n";
    for (const auto& s : traj) {
        out << csv_double(s.t);
        for (const auto& z : s.z) out << "," << csv_double(z.real()) << "," << csv_double(z.imag());
        out << "\n";
    }
    write_text(path, out.str());
}

}  // namespace io
}  // namespace vfil
