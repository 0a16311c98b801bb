// Run configuration: one flat, fully serialized record per run so any output
// is reproducible from the config stored next to it.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vfil/params.hpp"

namespace vfil {

struct RunConfig {
    int schema_version = 1;

    // model
    double alpha = 20.0;
    double omega = 0.0;
    std::optional<int> filament_count;
    std::optional<double> center_gamma;
    double rho = 1.0;
    double theta = 0.0;
    double t0 = 0.5;
    double gamma = 0.125;

    // discretization
    double box_length = 80.0;
    std::size_t box_points = 4096;
    double x_max = 40.0;
    std::size_t radial_points = 16001;

    // evolution
    std::string kind = "pair";  // pair | polygonal | bm | full_kmd
    double dt = 1e-3;
    double t_start = 0.0;
    double t_end = 1.0;
    std::size_t frame_stride = 16;
    std::string ic_type = "constant";  // constant | gaussian | self_similar
    double ic_amplitude = 0.01;
    std::string profile_path;          // self_similar initial data / fixed-point input
    std::vector<double> circulations;  // full_kmd
    bool pair_rescaled = false;        // full_kmd: use the rescaled pair system
    bool symmetry_column = false;      // full_kmd: co-run the reduced equation

    // profile solve
    std::string mode = "pair";  // pair | polygonal
    double profile_tol = 1e-10;
    std::size_t profile_max_iter = 64;

    // fixed point
    std::size_t duhamel_panels = 256;
    std::size_t ladder_levels = 8;
    double fixedpoint_tol = 1e-8;
    std::size_t fixedpoint_max_iter = 48;
    double ratio_target = 0.5;
    bool bisect = true;
    double t0_start = 0.25;

    // guards and tolerances
    double floor_eps = 1e-6;
    double edge_tol = 1e-8;
    double collision_eps = 1e-9;
    double tol_report = 1e-9;

    // point vortex
    double pv_T = 1.0;
    double pv_dt = 1e-3;

    // verification inputs
    std::string trajectory_dir;
    std::vector<double> sweep_alphas;

    std::string out_dir = "out";
    std::uint64_t seed = 0;

    ModelParams model_params() const {
        ModelParams p;
        p.alpha = alpha;
        p.omega = omega;
        p.filament_count = filament_count;
        p.center_gamma = center_gamma;
        p.rho = rho;
        p.theta = theta;
        p.t0 = t0;
        p.gamma = gamma;
        return p;
    }
};

inline void to_json(nlohmann::json& j, const RunConfig& c) {
    j = nlohmann::json{{"schema_version", c.schema_version},
                       {"alpha", c.alpha},
                       {"omega", c.omega},
                       {"rho", c.rho},
                       {"theta", c.theta},
                       {"t0", c.t0},
                       {"gamma", c.gamma},
                       {"box_length", c.box_length},
                       {"box_points", c.box_points},
                       {"x_max", c.x_max},
                       {"radial_points", c.radial_points},
                       {"kind", c.kind},
                       {"dt", c.dt},
                       {"t_start", c.t_start},
                       {"t_end", c.t_end},
                       {"frame_stride", c.frame_stride},
                       {"ic_type", c.ic_type},
                       {"ic_amplitude", c.ic_amplitude},
                       {"profile_path", c.profile_path},
                       {"circulations", c.circulations},
                       {"pair_rescaled", c.pair_rescaled},
                       {"symmetry_column", c.symmetry_column},
                       {"mode", c.mode},
                       {"profile_tol", c.profile_tol},
                       {"profile_max_iter", c.profile_max_iter},
                       {"duhamel_panels", c.duhamel_panels},
                       {"ladder_levels", c.ladder_levels},
                       {"fixedpoint_tol", c.fixedpoint_tol},
                       {"fixedpoint_max_iter", c.fixedpoint_max_iter},
                       {"ratio_target", c.ratio_target},
                       {"bisect", c.bisect},
                       {"t0_start", c.t0_start},
                       {"floor_eps", c.floor_eps},
                       {"edge_tol", c.edge_tol},
                       {"collision_eps", c.collision_eps},
                       {"tol_report", c.tol_report},
                       {"pv_T", c.pv_T},
                       {"pv_dt", c.pv_dt},
                       {"trajectory_dir", c.trajectory_dir},
                       {"sweep_alphas", c.sweep_alphas},
                       {"out_dir", c.out_dir},
                       {"seed", c.seed}};
    if (c.filament_count) j["filament_count"] = *c.filament_count;
    if (c.center_gamma) j["center_gamma"] = *c.center_gamma;
}

inline void from_json(const nlohmann::json& j, RunConfig& c) {
    RunConfig defaults;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    c = defaults;
    get("schema_version", c.schema_version);
    get("alpha", c.alpha);
    get("omega", c.omega);
    get("rho", c.rho);
    get("theta", c.theta);
    get("t0", c.t0);
    get("gamma", c.gamma);
    get("box_length", c.box_length);
    get("box_points", c.box_points);
    get("x_max", c.x_max);
    get("radial_points", c.radial_points);
    get("kind", c.kind);
    get("dt", c.dt);
    get("t_start", c.t_start);
    get("t_end", c.t_end);
    get("frame_stride", c.frame_stride);
    get("ic_type", c.ic_type);
    get("ic_amplitude", c.ic_amplitude);
    get("profile_path", c.profile_path);
    get("circulations", c.circulations);
    get("pair_rescaled", c.pair_rescaled);
    get("symmetry_column", c.symmetry_column);
    get("mode", c.mode);
    get("profile_tol", c.profile_tol);
    get("profile_max_iter", c.profile_max_iter);
    get("duhamel_panels", c.duhamel_panels);
    get("ladder_levels", c.ladder_levels);
    get("fixedpoint_tol", c.fixedpoint_tol);
    get("fixedpoint_max_iter", c.fixedpoint_max_iter);
    get("ratio_target", c.ratio_target);
    get("bisect", c.bisect);
    get("t0_start", c.t0_start);
    get("floor_eps", c.floor_eps);
    get("edge_tol", c.edge_tol);
    get("collision_eps", c.collision_eps);
    get("tol_report", c.tol_report);
    get("pv_T", c.pv_T);
    get("pv_dt", c.pv_dt);
    get("trajectory_dir", c.trajectory_dir);
    get("sweep_alphas", c.sweep_alphas);
    get("out_dir", c.out_dir);
    get("seed", c.seed);
    if (j.contains("filament_count")) c.filament_count = j.at("filament_count").get<int>();
    if (j.contains("center_gamma")) c.center_gamma = j.at("center_gamma").get<double>();
}

}  // namespace vfil
