#include <catch_amalgamated.hpp>

#include <cmath>

#include "vfil/suite.hpp"
#include "vfil/verify.hpp"

using namespace vfil;

namespace {

const ProfileSolution& pair_profile() {
    static ProfileSolution sol = [] {
        ModelParams p;
        p.alpha = 20.0;
        return solve_profile(p, ProfileMode::pair, RadialGrid::uniform(20.0, 8001), 1e-10);
    }();
    return sol;
}

BoundCheck find(const std::vector<BoundCheck>& v, const std::string& id) {
    for (const auto& c : v)
        if (c.id == id) return c;
    FAIL("missing check " + id);
    return {};
}

}  // namespace

TEST_CASE("profile bounds pass on a converged profile", "[verify]") {
    const auto checks = check_profile_bounds(pair_profile());
    REQUIRE(checks.size() == 5);
    for (const auto& c : checks) {
        INFO(c.id << " margin " << c.margin);
        CHECK(c.passed);
        CHECK_FALSE(c.symbolic);
        CHECK(c.nodes_checked > 1000);
    }
}

TEST_CASE("straight surrogate saturates nothing: full margin on the deviation", "[verify]") {
    const RadialGrid g = RadialGrid::uniform(20.0, 2001);
    ProfileSolution sol;
    sol.mode = ProfileMode::pair;
    sol.alpha = 8.0;
    sol.grid = g;
    sol.w.assign(g.m(), cplx{0.0, 0.0});
    sol.u = couple_u(g, sol.w, 8.0);
    sol.converged = true;
    const auto checks = check_profile_bounds(sol);
    const BoundCheck dev = find(checks, "profile-deviation");
    CHECK(dev.passed);
    CHECK(dev.lhs_max == 0.0);  // lhs is exactly 0 for the straight profile
    // the scalar margin is the node-wise minimum, attained at x = 0 where the
    // budget min(1, x) alpha/4 itself vanishes
    CHECK(dev.margin == 0.0);
}

TEST_CASE("fault injection flips every profile check", "[verify]") {
    const auto base = check_profile_bounds(pair_profile());
    for (const auto& c : base) CHECK(c.passed);

    auto corrupt = [&](auto mutate, const std::string& id) {
        ProfileSolution bad = pair_profile();
        mutate(bad);
        const auto checks = check_profile_bounds(bad);
        const BoundCheck c = find(checks, id);
        INFO(id);
        CHECK_FALSE(c.passed);
    };
    const std::size_t k = 4000;  // x = 10
    corrupt([&](ProfileSolution& s) { s.u[k] += 10.0; }, "profile-deviation");
    corrupt([&](ProfileSolution& s) { s.u[k] += cplx{0.0, 300.0}; }, "profile-upper");
    corrupt([&](ProfileSolution& s) { s.u[k] -= 200.0; }, "profile-lower");
    corrupt([&](ProfileSolution& s) { s.u[k] += 0.2; }, "profile-gradient");
    corrupt([&](ProfileSolution& s) { s.u[k] += 1e-4; }, "profile-curvature");
}

TEST_CASE("H bounds hold on a sample grid and vanish at sigma = 0", "[verify]") {
    std::vector<double> ts{1e-4, 0.01, 0.25, 0.81};
    std::vector<double> sigmas;
    for (int k = -30; k <= 30; ++k) sigmas.push_back(0.07 * k);
    const auto checks = check_H_bounds(pair_profile(), ts, sigmas);
    for (const auto& c : checks) {
        INFO(c.id << " margin " << c.margin);
        CHECK(c.passed);
    }
    // at sigma = 0 the deviation lhs is |sqrt(t) u(0) - sqrt(t)| = 0
    std::vector<double> origin{0.0};
    const auto at0 = check_H_bounds(pair_profile(), ts, origin);
    CHECK(find(at0, "H-deviation").lhs_max == 0.0);
}

TEST_CASE("denominator floors with and without r; premise flag on injected violation",
          "[verify]") {
    const SpatialGrid g(80.0, 1024);
    PerturbationTrajectory traj;
    traj.alpha = 20.0;
    traj.gamma = 0.125;
    traj.times = {0.0025, 0.01, 0.04};
    for (std::size_t i = 0; i < 3; ++i) traj.frames.emplace_back(g);

    auto checks = check_denominator_bounds(traj, pair_profile(), 20.0);
    for (const auto& c : checks) {
        INFO(c.id << " margin " << c.margin);
        CHECK(c.passed);
        CHECK_FALSE(c.premise_violated);
    }

    // inject r = -sqrt(t)/3 on I: breaks the premise ||r|| < sqrt(t)/4 while the
    // conclusion still holds (the actual Re H carries twice its lower bound)
    PerturbationTrajectory bad = traj;
    auto inject = [&](PerturbationTrajectory& tr, double scale) {
        for (std::size_t i = 0; i < tr.size(); ++i) {
            const double v = -scale * std::sqrt(tr.times[i]);
            for (std::size_t j = 0; j < g.n; ++j)
                if (std::abs(g.sigma(j)) < 0.5 / 20.0) tr.frames[i][j] = cplx{v, 0.0};
        }
    };
    inject(bad, 1.0 / 3.0);
    const auto bad_checks = check_denominator_bounds(bad, pair_profile(), 20.0);
    const BoundCheck near = find(bad_checks, "den-near");
    CHECK(near.premise_violated);
    CHECK(near.passed);
    CHECK(find(bad_checks, "den-near-base").passed);  // the r-free floor is untouched

    // a deeper injection breaks the conclusion too; the flag separates the two
    PerturbationTrajectory worse = traj;
    inject(worse, 0.9);
    const auto worse_checks = check_denominator_bounds(worse, pair_profile(), 20.0);
    const BoundCheck near2 = find(worse_checks, "den-near");
    CHECK(near2.premise_violated);
    CHECK_FALSE(near2.passed);
}

TEST_CASE("assembled lower bounds hold for r = 0 and fail under corruption", "[verify]") {
    const SpatialGrid g(80.0, 1024);
    PerturbationTrajectory traj;
    traj.alpha = 20.0;
    traj.gamma = 0.125;
    traj.times = {0.01, 0.09};
    traj.frames.emplace_back(g);
    traj.frames.emplace_back(g);
    auto checks = check_assembled_lower_bounds(traj, pair_profile(), 20.0, ProfileMode::pair);
    for (const auto& c : checks) CHECK(c.passed);

    // the far floor 1/32 sits far below the actual field (~1), so the
    // injection must wipe out nearly all of it
    for (auto& z : traj.frames[0].values) z = cplx{-1.0, 0.0};
    checks = check_assembled_lower_bounds(traj, pair_profile(), 20.0, ProfileMode::pair);
    CHECK_FALSE(find(checks, "psi-lower-far").passed);
}

TEST_CASE("source bounds: exact identities and measured constants", "[verify]") {
    const SpatialGrid g(20.0, 16384);
    const std::vector<double> samples{0.0, 1e-6, 1e-3, 0.04};
    const auto checks = check_source_bounds(pair_profile(), g, samples);
    CHECK(find(checks, "b-support").passed);
    CHECK(find(checks, "b-support").lhs_max == 0.0);
    CHECK(find(checks, "a-near-identity").passed);
    CHECK(find(checks, "a-near-identity").lhs_max == 0.0);
    CHECK(find(checks, "apol-near-identity").passed);
    for (const char* id : {"b-l2", "a-l2", "a-l1-near", "a-far", "grad-b-l2"}) {
        const BoundCheck c = find(checks, id);
        CHECK(c.symbolic);
        CHECK(c.passed);
        CHECK(c.lhs_max > 0.0);
    }
}

TEST_CASE("uniformity of measured constants across an alpha sweep", "[verify]") {
    const SpatialGrid g(20.0, 16384);
    const std::vector<double> samples{1e-6, 1e-3, 0.04};
    std::vector<std::vector<BoundCheck>> sweeps;
    for (double alpha : {10.0, 20.0, 40.0}) {
        ModelParams p;
        p.alpha = alpha;
        const ProfileSolution prof =
            solve_profile(p, ProfileMode::pair, RadialGrid::uniform(20.0, 8001), 1e-10, 64, false);
        sweeps.push_back(check_source_bounds(prof, g, samples));
    }
    const auto uni = uniformity_checks(sweeps);
    CHECK(!uni.empty());
    for (const auto& c : uni) {
        INFO(c.id << " spread " << c.lhs_max);
        CHECK(c.passed);
    }
    // the b-envelope constant is stable well inside the budget
    for (const auto& c : uni)
        if (c.id == "uniformity:b-l2") CHECK(c.lhs_max < 2.0);
}

TEST_CASE("run_suite demands its artifacts", "[verify]") {
    SuiteInputs in;
    in.profile_path = "/nonexistent/profile.json";
    CHECK_THROWS(run_suite(in));
}

TEST_CASE("explicit_failures ignores symbolic and premise-violated entries", "[verify]") {
    std::vector<BoundCheck> checks(3);
    checks[0].passed = false;
    checks[0].symbolic = true;
    checks[1].passed = false;
    checks[1].premise_violated = true;
    checks[2].passed = true;
    CHECK_FALSE(explicit_failures(checks));
    checks[2].passed = false;
    CHECK(explicit_failures(checks));
}
