#include <doctest.h>

#include <cmath>
#include <set>

#include "toedit/error.hpp"
#include "toedit/simulator.hpp"

using namespace toedit;
using namespace toedit::sim;

namespace {

SimConfig small_config() {
    SimConfig cfg;
    cfg.d = 3;
    cfg.T = 20;
    cfg.m1_size = 4;
    cfg.eta = 0.5;
    cfg.generations = 5;
    cfg.trials = 40;
    cfg.seed = 21;
    return cfg;
}

double max_abs(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("ridgeless fit agrees with the normal equations") {
    Rng rng = make_rng(1, "fit");
    SimConfig cfg = small_config();
    auto data = make_dataset(cfg, rng);
    Vector y = data.X * data.w_star + data.E1;
    Vector w = fit_ridgeless(data.X, y);
    Matrix gram = data.X.transpose() * data.X;
    Vector normal = gram.ldlt().solve(data.X.transpose() * y);
    CHECK(max_abs(w - normal) < 1e-12);
    // Noise-free targets are recovered exactly.
    CHECK(max_abs(fit_ridgeless(data.X, data.X * data.w_star) - data.w_star) < 1e-12);
}

TEST_CASE("rank-deficient designs are rejected") {
    Matrix X = Matrix::Zero(6, 2);
    X.col(0).setOnes();
    X.col(1).setOnes();
    CHECK_THROWS_AS(RidgelessSolver{X}, ConfigError);
}

TEST_CASE("test error") {
    Vector w(2), ws(2);
    w << 1.0, 2.0;
    ws << 0.0, 0.0;
    CHECK(test_error(w, ws) == doctest::Approx(5.0));
    Matrix sigma = Matrix::Identity(2, 2) * 2.0;
    CHECK(test_error(w, ws, sigma) == doctest::Approx(10.0));
}

TEST_CASE("w* modes") {
    SimConfig cfg = small_config();
    Rng rng = make_rng(2, "w");
    auto unit = make_dataset(cfg, rng);
    CHECK(unit.w_star[0] == 1.0);
    CHECK(unit.w_star.norm() == doctest::Approx(1.0));
    cfg.w_star_mode = WStarMode::random_unit;
    auto random = make_dataset(cfg, rng);
    CHECK(random.w_star.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(parse_w_star_mode(to_string(WStarMode::random_unit)) == WStarMode::random_unit);
}

TEST_CASE("mask sizes and disjointness over the grid") {
    for (std::size_t d : {2u, 5u, 10u}) {
        for (std::size_t T : {20u, 50u, 100u}) {
            if (T < d + 2) continue;
            for (double eta : {0.3, 0.5, 0.8}) {
                const auto m1 = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.2 * T * (1 - eta))));
                for (std::size_t count : {1u, 5u, 19u}) {
                    Rng rng = make_rng(T * 100 + d, count);
                    auto schedule = make_edit_masks(T, m1, eta, count, rng);
                    auto sizes = mask_sizes(m1, eta, count);
                    REQUIRE(schedule.masks.size() == count);
                    std::set<std::size_t> seen;
                    for (std::size_t i = 0; i < count; ++i) {
                        CHECK(schedule.masks[i].size() == sizes[i]);
                        CHECK(sizes[i] == static_cast<std::size_t>(std::lround(m1 * std::pow(eta, i))));
                        for (std::size_t r : schedule.masks[i]) {
                            CHECK(r < T);
                            CHECK(seen.insert(r).second);
                        }
                    }
                    CHECK_NOTHROW(schedule.check_disjoint(T));
                }
            }
        }
    }
}

TEST_CASE("mask capacity and overlap errors") {
    Rng rng = make_rng(0, 0ULL);
    CHECK_THROWS_AS(make_edit_masks(10, 8, 0.9, 3, rng), ConfigError);
    EditMaskSchedule bad{{{0, 1}, {1, 2}}};
    CHECK_THROWS_AS(bad.check_disjoint(5), ConfigError);
    EditMaskSchedule out_of_range{{{7}}};
    CHECK_THROWS_AS(out_of_range.check_disjoint(5), ConfigError);
}

TEST_CASE("zero noise gives zero error in both processes") {
    SimConfig cfg = small_config();
    cfg.sigma2 = 0.0;
    auto collapse = run_collapse_process(cfg);
    auto editing = run_editing_process(cfg);
    for (double e : collapse.mean_error) CHECK(e < 1e-24);
    for (double e : editing.mean_error) CHECK(e < 1e-24);
}

TEST_CASE("first generation is shared by both processes") {
    SimConfig cfg = small_config();
    auto collapse = run_collapse_process(cfg);
    auto editing = run_editing_process(cfg);
    CHECK(collapse.mean_error[0] == editing.mean_error[0]);
    CHECK(collapse.stderr_error[0] == editing.stderr_error[0]);
}

TEST_CASE("results do not depend on the job count") {
    SimConfig cfg = small_config();
    auto a = run_editing_process(cfg);
    cfg.jobs = 4;
    auto b = run_editing_process(cfg);
    CHECK(a.mean_error == b.mean_error);
    CHECK(a.stderr_error == b.stderr_error);
    CHECK(a.moments.first == b.moments.first);
}

TEST_CASE("recorded trials replay the editing process") {
    SimConfig cfg = small_config();
    cfg.trials = 6;
    auto traj = run_editing_process(cfg);
    std::vector<double> mean(cfg.generations, 0.0);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        auto trial = record_editing_trial(cfg, t);
        REQUIRE(trial.noise.size() == cfg.generations);
        REQUIRE(trial.estimates.size() == cfg.generations);
        REQUIRE(trial.schedule.masks.size() == cfg.generations - 1);
        for (std::size_t g = 0; g < cfg.generations; ++g) mean[g] += trial.errors[g];
    }
    for (std::size_t g = 0; g < cfg.generations; ++g)
        CHECK(mean[g] / static_cast<double>(cfg.trials) == doctest::Approx(traj.mean_error[g]).epsilon(1e-12));
}

TEST_CASE("unrolled target identity for the editing recursion") {
    // Every row is overwritten at most once, so the targets behind w_{n+1} are
    // X w* + E_1 + sum_i M_i (X (w_i - w*) + E_{i+1} - E_1).
    for (std::size_t d : {2u, 5u, 10u}) {
        SimConfig cfg;
        cfg.d = d;
        cfg.T = 40;
        cfg.m1_size = 8;
        cfg.generations = 6;
        cfg.seed = 100 + d;
        for (std::size_t t = 0; t < 5; ++t) {
            auto trial = record_editing_trial(cfg, t);
            const auto& X = trial.data.X;
            for (std::size_t n = 0; n + 1 < cfg.generations; ++n) {
                Vector y = X * trial.data.w_star + trial.noise[0];
                for (std::size_t i = 0; i <= n; ++i) {
                    Vector shift = X * (trial.estimates[i] - trial.data.w_star) + trial.noise[i + 1] - trial.noise[0];
                    for (std::size_t r : trial.schedule.masks[i]) y[static_cast<Eigen::Index>(r)] += shift[static_cast<Eigen::Index>(r)];
                }
                CHECK(max_abs(fit_ridgeless(X, y) - trial.estimates[n + 1]) <= 1e-8);
            }
        }
    }
}

TEST_CASE("closed form without edits is the first estimate") {
    SimConfig cfg = small_config();
    auto trial = record_editing_trial(cfg, 0);
    Vector w = closed_form_estimator(trial.data.X, {trial.noise[0]}, EditMaskSchedule{}, trial.data.w_star);
    CHECK(max_abs(w - trial.estimates[0]) <= 1e-10);
    // Empty masks leave every later estimate at the first one as well.
    EditMaskSchedule empty{{{}, {}}};
    Vector w2 = closed_form_estimator(trial.data.X, {trial.noise[0], trial.noise[1], trial.noise[2]}, empty,
                                      trial.data.w_star);
    CHECK(max_abs(w2 - trial.estimates[0]) <= 1e-10);
    CHECK_THROWS_AS(closed_form_estimator(trial.data.X, {trial.noise[0]}, empty, trial.data.w_star), ConfigError);
}

TEST_CASE("trace moments and bounds") {
    auto m = estimate_trace_moments(1, 10, 4000, 5);
    CHECK(m.first == doctest::Approx(1.0 / 8.0).epsilon(0.05));
    CHECK(m.second > 0.0);
    CHECK(estimate_trace_moments(2, 8, 10, 1, 1).first == estimate_trace_moments(2, 8, 10, 1, 3).first);
    CHECK_THROWS_AS(estimate_trace_moments(5, 6, 10, 1), ConfigError);

    SimConfig cfg;
    auto b = theoretical_bounds(cfg, {0.1, 0.01});
    CHECK(b.collapse_slope == doctest::Approx(10.0 / 89.0).epsilon(1e-14));
    CHECK(b.relaxed == doctest::Approx(20.0 / 89.0).epsilon(1e-14));
    REQUIRE(b.geometric.has_value());
    CHECK(*b.geometric == doctest::Approx(10.0 / 89.0 + 0.1 * std::sqrt(20.0) / 0.5).epsilon(1e-14));
    CHECK(b.collapse_line(3) == doctest::Approx(30.0 / 89.0));
    cfg.eta = 1.0;
    CHECK_FALSE(theoretical_bounds(cfg, {0.1, 0.01}).geometric.has_value());
}

TEST_CASE("config validation lists every violation") {
    SimConfig cfg;
    cfg.d = 0;
    cfg.T = 1;
    cfg.sigma2 = -1.0;
    cfg.generations = 0;
    cfg.trials = 0;
    cfg.eta = -0.5;
    CHECK(cfg.violations().size() >= 5);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK(SimConfig{}.violations().empty());
}

TEST_CASE("line fit") {
    auto fit = fit_line({3.0, 5.0, 7.0, 9.0});
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    auto noisy = fit_line({1.0, 3.0, 2.0});
    CHECK(noisy.slope == doctest::Approx(0.5));
    CHECK(noisy.r_squared == doctest::Approx(0.25));
    CHECK_THROWS_AS(fit_line({1.0}), ConfigError);
}
