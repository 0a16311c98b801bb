#include <catch_amalgamated.hpp>

#include <filesystem>

#include "vfil/io.hpp"

using namespace vfil;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("vfil_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string file_bytes(const fs::path& p) { return io::read_text(p); }

}  // namespace

TEST_CASE("profile JSON round trip preserves every sample", "[io]") {
    ModelParams p;
    p.alpha = 12.0;
    const ProfileSolution sol =
        solve_profile(p, ProfileMode::pair, RadialGrid::uniform(10.0, 501), 1e-10);
    const fs::path dir = temp_dir("profile");
    io::write_profile(dir / "profile.json", sol);
    const ProfileSolution back = io::read_profile(dir / "profile.json");
    CHECK(back.mode == sol.mode);
    CHECK(back.alpha == sol.alpha);
    CHECK(back.omega == sol.omega);
    CHECK(back.iterations == sol.iterations);
    CHECK(back.final_update == sol.final_update);
    CHECK(back.tail_bound == sol.tail_bound);
    REQUIRE(back.grid.nodes == sol.grid.nodes);
    REQUIRE(back.w.size() == sol.w.size());
    for (std::size_t i = 0; i < sol.w.size(); ++i) {
        CHECK(back.w[i] == sol.w[i]);
        CHECK(back.u[i] == sol.u[i]);
    }
}

TEST_CASE("run config JSON round trip", "[io]") {
    RunConfig c;
    c.alpha = 17.5;
    c.kind = "bm";
    c.filament_count = 4;
    c.center_gamma = -1.5;
    c.omega = 0.0;
    c.sweep_alphas = {10.0, 20.0};
    c.seed = 1234567;
    const nlohmann::json j = c;
    const RunConfig back = j.get<RunConfig>();
    CHECK(back.alpha == c.alpha);
    CHECK(back.kind == c.kind);
    CHECK(back.filament_count.value() == 4);
    CHECK(back.center_gamma.value() == -1.5);
    CHECK(back.sweep_alphas == c.sweep_alphas);
    CHECK(back.seed == c.seed);

    RunConfig d;
    const nlohmann::json jd = d;
    const RunConfig dback = jd.get<RunConfig>();
    CHECK_FALSE(dback.filament_count.has_value());
}

TEST_CASE("evolution run round trip is bit exact", "[io]") {
    const SpatialGrid g(40.0, 256);
    ComplexField chi(g);
    for (std::size_t j = 0; j < g.n; ++j) chi[j] = 0.01 * std::exp(-std::pow(g.sigma(j), 2));
    EvolutionRun run =
        split_step_evolve({chi}, EquationKind::bm(1.0), 0.0, 0.05, 1e-3, {.frame_stride = 10});
    const fs::path dir = temp_dir("run");
    io::write_run(dir, run, RunConfig{});
    const EvolutionRun back = io::read_run(dir);
    CHECK(back.times == run.times);
    CHECK(back.kind.tag == run.kind.tag);
    CHECK(back.kind.omega == run.kind.omega);
    REQUIRE(back.frames.size() == run.frames.size());
    for (std::size_t i = 0; i < run.frames.size(); ++i)
        for (std::size_t j = 0; j < g.n; ++j) CHECK(back.frames[i][0][j] == run.frames[i][0][j]);
}

TEST_CASE("trajectory round trip", "[io]") {
    const SpatialGrid g(40.0, 256);
    PerturbationTrajectory traj;
    traj.alpha = 20.0;
    traj.gamma = 0.125;
    traj.times = {1e-4, 2e-4};
    ComplexField f(g);
    f[5] = {0.25, -0.5};
    traj.frames = {f, f};
    const fs::path dir = temp_dir("traj");
    io::write_trajectory(dir, traj, RunConfig{});
    const PerturbationTrajectory back = io::read_trajectory(dir);
    CHECK(back.times == traj.times);
    CHECK(back.alpha == traj.alpha);
    CHECK(back.frames[0][5] == traj.frames[0][5]);
}

TEST_CASE("identical runs produce identical bytes", "[io]") {
    const SpatialGrid g(40.0, 256);
    auto make_run = [&] {
        ComplexField chi(g);
        for (std::size_t j = 0; j < g.n; ++j) chi[j] = 0.01 * std::exp(-std::pow(g.sigma(j), 2));
        return split_step_evolve({chi}, EquationKind::bm(1.0), 0.0, 0.05, 1e-3,
                                 {.frame_stride = 10});
    };
    const fs::path d1 = temp_dir("det1");
    const fs::path d2 = temp_dir("det2");
    io::write_run(d1, make_run(), RunConfig{});
    io::write_run(d2, make_run(), RunConfig{});
    const EvolutionRun r1 = io::read_run(d1);
    for (std::size_t i = 0; i < r1.frames.size(); ++i) {
        const auto name = io::frame_file_name(i, 0);
        CHECK(file_bytes(d1 / "frames" / name) == file_bytes(d2 / "frames" / name));
    }
    CHECK(file_bytes(d1 / "index.json") == file_bytes(d2 / "index.json"));
}

TEST_CASE("point-vortex CSV carries circulations in the header", "[io]") {
    const auto traj = integrate_pv(regular_polygon(3, -1.0), 0.01, 1e-3);
    const fs::path dir = temp_dir("pv");
    io::write_pv_csv(dir / "trajectory.csv", traj, 1e-3, 1e-9);
    const std::string text = file_bytes(dir / "trajectory.csv");
    CHECK(text.find("gamma = [1,1,1,-1]") != std::string::npos);
    CHECK(text.find("t,re_z0,im_z0") != std::string::npos);
}

TEST_CASE("verify report serialization", "[io]") {
    std::vector<BoundCheck> checks(2);
    checks[0].id = "profile-lower";
    checks[0].passed = true;
    checks[1].id = "b-l2";
    checks[1].symbolic = true;
    checks[1].passed = true;
    const fs::path dir = temp_dir("report");
    io::write_verify_report(dir / "verify_report.json", checks);
    const auto j = nlohmann::json::parse(file_bytes(dir / "verify_report.json"));
    CHECK(j.at("checks").size() == 2);
    CHECK(j.at("explicit_failures") == false);
}
