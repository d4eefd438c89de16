#include "toedit/simulator.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "toedit/error.hpp"
#include "toedit/parallel.hpp"

namespace toedit::sim {

std::string_view to_string(WStarMode mode) noexcept {
    return mode == WStarMode::random_unit ? "random_unit" : "unit_first_axis";
}

WStarMode parse_w_star_mode(std::string_view name) {
    if (name == "unit_first_axis") return WStarMode::unit_first_axis;
    if (name == "random_unit") return WStarMode::random_unit;
    throw ConfigError("unknown w* mode '" + std::string(name) + "'");
}

std::vector<std::string> SimConfig::violations() const {
    std::vector<std::string> out;
    if (d == 0) out.emplace_back("d must be >= 1");
    if (T < d + 2) out.emplace_back("T must be >= d + 2 (T=" + std::to_string(T) + ", d=" + std::to_string(d) + ")");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) out.emplace_back("sigma2 must be finite and >= 0");
    if (m1_size > T) out.emplace_back("m1_size must be <= T");
    if (!(eta >= 0.0) || !std::isfinite(eta)) out.emplace_back("eta must be finite and >= 0");
    if (generations == 0) out.emplace_back("generations must be >= 1");
    if (trials == 0) out.emplace_back("trials must be >= 1");
    return out;
}

void SimConfig::validate() const {
    auto v = violations();
    if (v.empty()) return;
    std::string msg = "invalid simulation config:";
    for (const auto& s : v) msg += " " + s + ";";
    msg.pop_back();
    throw ConfigError(msg);
}

Vector draw_noise(std::size_t T, double sigma2, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = std::sqrt(sigma2);
    Vector e(static_cast<Eigen::Index>(T));
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = scale * normal(rng);
    return e;
}

Dataset make_dataset(const SimConfig& cfg, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto T = static_cast<Eigen::Index>(cfg.T);
    const auto d = static_cast<Eigen::Index>(cfg.d);
    Dataset data;
    data.X.resize(T, d);
    for (Eigen::Index r = 0; r < T; ++r)
        for (Eigen::Index c = 0; c < d; ++c) data.X(r, c) = normal(rng);
    data.E1 = draw_noise(cfg.T, cfg.sigma2, rng);
    data.w_star = Vector::Zero(d);
    if (cfg.w_star_mode == WStarMode::unit_first_axis) {
        data.w_star[0] = 1.0;
    } else {
        double norm = 0.0;
        while (norm == 0.0) {
            for (Eigen::Index c = 0; c < d; ++c) data.w_star[c] = normal(rng);
            norm = data.w_star.norm();
        }
        data.w_star /= norm;
    }
    return data;
}

RidgelessSolver::RidgelessSolver(const Matrix& X) : qr_(X) {
    if (qr_.rank() < X.cols())
        throw ConfigError("design matrix is rank deficient (rank " + std::to_string(qr_.rank()) + " < " +
                          std::to_string(X.cols()) + " columns)");
}

Vector RidgelessSolver::solve(const Vector& y) const {
    if (y.size() != qr_.rows()) throw ConfigError("target length does not match design rows");
    return qr_.solve(y);
}

Vector fit_ridgeless(const Matrix& X, const Vector& Y) { return RidgelessSolver(X).solve(Y); }

double test_error(const Vector& w, const Vector& w_star, const Matrix& Sigma) {
    if (w.size() != w_star.size() || Sigma.rows() != w.size() || Sigma.cols() != w.size())
        throw ConfigError("test_error dimension mismatch");
    const Vector diff = w - w_star;
    return diff.dot(Sigma * diff);
}

double test_error(const Vector& w, const Vector& w_star) {
    if (w.size() != w_star.size()) throw ConfigError("test_error dimension mismatch");
    return (w - w_star).squaredNorm();
}

void EditMaskSchedule::check_disjoint(std::size_t T) const {
    std::vector<int> owner(T, -1);
    for (std::size_t i = 0; i < masks.size(); ++i) {
        for (std::size_t r : masks[i]) {
            if (r >= T) throw ConfigError("mask row " + std::to_string(r) + " outside [0, T)");
            if (owner[r] >= 0)
                throw ConfigError("masks " + std::to_string(owner[r] + 1) + " and " + std::to_string(i + 1) +
                                  " share row " + std::to_string(r));
            owner[r] = static_cast<int>(i);
        }
    }
}

std::vector<std::size_t> mask_sizes(std::size_t m1_size, double eta, std::size_t count) {
    std::vector<std::size_t> sizes(count);
    double size = static_cast<double>(m1_size);
    for (std::size_t i = 0; i < count; ++i) {
        sizes[i] = static_cast<std::size_t>(std::max(0L, std::lround(size)));
        size *= eta;
    }
    return sizes;
}

EditMaskSchedule make_edit_masks(std::size_t T, std::size_t m1_size, double eta, std::size_t count, Rng& rng) {
    if (!(eta >= 0.0)) throw ConfigError("eta must be >= 0");
    const auto sizes = mask_sizes(m1_size, eta, count);
    const std::size_t needed = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    if (needed > T)
        throw ConfigError("mask schedule needs " + std::to_string(needed) + " distinct rows but T = " +
                          std::to_string(T) + "; use T >= " + std::to_string(needed));

    std::vector<std::size_t> rows(T);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    for (std::size_t i = 0; i < needed; ++i) std::swap(rows[i], rows[i + uniform_index(rng, T - i)]);

    EditMaskSchedule schedule;
    schedule.masks.reserve(count);
    std::size_t offset = 0;
    for (std::size_t size : sizes) {
        std::vector<std::size_t> mask(rows.begin() + static_cast<std::ptrdiff_t>(offset),
                                      rows.begin() + static_cast<std::ptrdiff_t>(offset + size));
        std::sort(mask.begin(), mask.end());
        schedule.masks.push_back(std::move(mask));
        offset += size;
    }
    return schedule;
}

EditMaskSchedule make_edit_masks(const SimConfig& cfg, Rng& rng) {
    return make_edit_masks(cfg.T, cfg.m1_size, cfg.eta, cfg.generations, rng);
}

namespace {

TraceMoments design_moments(const Matrix& X) {
    Eigen::JacobiSVD<Matrix> svd(X);
    TraceMoments m;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        const double s2 = svd.singularValues()[i] * svd.singularValues()[i];
        m.first += 1.0 / s2;
        m.second += 1.0 / (s2 * s2);
    }
    return m;
}

struct TrialResult {
    std::vector<double> errors;
    TraceMoments moments;
};

TrialResult collapse_trial(const SimConfig& cfg, std::size_t trial) {
    Rng rng = make_rng(cfg.seed, trial);
    Dataset data = make_dataset(cfg, rng);
    RidgelessSolver solver(data.X);
    TrialResult out;
    out.moments = design_moments(data.X);
    out.errors.reserve(cfg.generations);
    Vector w = solver.solve(data.X * data.w_star + data.E1);
    out.errors.push_back(test_error(w, data.w_star));
    for (std::size_t g = 2; g <= cfg.generations; ++g) {
        const Vector y = data.X * w + draw_noise(cfg.T, cfg.sigma2, rng);
        w = solver.solve(y);
        out.errors.push_back(test_error(w, data.w_star));
    }
    return out;
}

EditingTrial editing_trial(const SimConfig& cfg, std::size_t trial, bool record) {
    Rng rng = make_rng(cfg.seed, trial);
    EditingTrial out;
    out.data = make_dataset(cfg, rng);
    out.schedule = make_edit_masks(cfg.T, cfg.m1_size, cfg.eta, cfg.generations - 1, rng);
    const Dataset& data = out.data;
    RidgelessSolver solver(data.X);

    Vector y_tilde = data.X * data.w_star + data.E1;
    Vector w = solver.solve(y_tilde);
    out.errors.push_back(test_error(w, data.w_star));
    if (record) {
        out.noise.push_back(data.E1);
        out.estimates.push_back(w);
    }
    for (std::size_t g = 2; g <= cfg.generations; ++g) {
        Vector noise = draw_noise(cfg.T, cfg.sigma2, rng);
        const Vector y_hat = data.X * w + noise;
        for (std::size_t r : out.schedule.masks[g - 2]) y_tilde[static_cast<Eigen::Index>(r)] = y_hat[static_cast<Eigen::Index>(r)];
        w = solver.solve(y_tilde);
        out.errors.push_back(test_error(w, data.w_star));
        if (record) {
            out.noise.push_back(std::move(noise));
            out.estimates.push_back(w);
        }
    }
    return out;
}

template <class Trial>
SimTrajectory aggregate(const SimConfig& cfg, Trial&& run_trial) {
    std::vector<TrialResult> results(cfg.trials);
    parallel_for(cfg.trials, cfg.jobs, [&](std::size_t t) { results[t] = run_trial(t); });

    SimTrajectory traj;
    const double n = static_cast<double>(cfg.trials);
    traj.mean_error.assign(cfg.generations, 0.0);
    traj.stderr_error.assign(cfg.generations, 0.0);
    for (const auto& r : results) {
        for (std::size_t g = 0; g < cfg.generations; ++g) traj.mean_error[g] += r.errors[g];
        traj.moments.first += r.moments.first;
        traj.moments.second += r.moments.second;
    }
    for (auto& m : traj.mean_error) m /= n;
    traj.moments.first /= n;
    traj.moments.second /= n;
    if (cfg.trials > 1) {
        for (std::size_t g = 0; g < cfg.generations; ++g) {
            double ss = 0.0;
            for (const auto& r : results) {
                const double dev = r.errors[g] - traj.mean_error[g];
                ss += dev * dev;
            }
            traj.stderr_error[g] = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        }
    }
    traj.bounds = theoretical_bounds(cfg, traj.moments);
    return traj;
}

}  // namespace

TraceMoments estimate_trace_moments(std::size_t d, std::size_t T, std::size_t trials, std::uint64_t seed,
                                    std::size_t jobs) {
    if (d == 0 || T < d + 2) throw ConfigError("trace moments need d >= 1 and T >= d + 2");
    if (trials == 0) throw ConfigError("trace moments need at least one trial");
    std::vector<TraceMoments> per_trial(trials);
    parallel_for(trials, jobs, [&](std::size_t t) {
        Rng rng = make_rng(seed, t);
        std::normal_distribution<double> normal(0.0, 1.0);
        Matrix X(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(d));
        for (Eigen::Index r = 0; r < X.rows(); ++r)
            for (Eigen::Index c = 0; c < X.cols(); ++c) X(r, c) = normal(rng);
        per_trial[t] = design_moments(X);
    });
    TraceMoments m;
    for (const auto& p : per_trial) {
        m.first += p.first;
        m.second += p.second;
    }
    m.first /= static_cast<double>(trials);
    m.second /= static_cast<double>(trials);
    return m;
}

TheoreticalBounds theoretical_bounds(const SimConfig& cfg, const TraceMoments& moments) {
    if (cfg.T < cfg.d + 2) throw ConfigError("bounds need T >= d + 2");
    TheoreticalBounds b;
    const double d = static_cast<double>(cfg.d);
    b.collapse_slope = cfg.sigma2 * d / (static_cast<double>(cfg.T) - d - 1.0);
    b.relaxed = 2.0 * b.collapse_slope;
    if (cfg.eta > 0.0 && cfg.eta < 1.0) {
        b.geometric = b.collapse_slope + cfg.sigma2 * std::sqrt(moments.second) *
                                             std::sqrt(static_cast<double>(cfg.m1_size)) / (1.0 - cfg.eta);
    }
    return b;
}

std::vector<double> SimTrajectory::collapse_line() const {
    std::vector<double> line(mean_error.size());
    for (std::size_t g = 0; g < line.size(); ++g) line[g] = bounds.collapse_line(g + 1);
    return line;
}

SimTrajectory run_collapse_process(const SimConfig& cfg) {
    cfg.validate();
    return aggregate(cfg, [&](std::size_t t) { return collapse_trial(cfg, t); });
}

SimTrajectory run_editing_process(const SimConfig& cfg) {
    cfg.validate();
    return aggregate(cfg, [&](std::size_t t) {
        auto trial = editing_trial(cfg, t, false);
        return TrialResult{std::move(trial.errors), design_moments(trial.data.X)};
    });
}

EditingTrial record_editing_trial(const SimConfig& cfg, std::size_t trial) {
    cfg.validate();
    return editing_trial(cfg, trial, true);
}

LineFit fit_line(const std::vector<double>& y) {
    if (y.size() < 2) throw ConfigError("a line fit needs at least two points");
    const double n = static_cast<double>(y.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        mx += static_cast<double>(i + 1);
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double dx = static_cast<double>(i + 1) - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * static_cast<double>(i + 1));
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

Vector closed_form_estimator(const Matrix& X, const std::vector<Vector>& noise, const EditMaskSchedule& schedule,
                             const Vector& w_star) {
    if (noise.size() != schedule.masks.size() + 1)
        throw ConfigError("closed form needs one more noise vector than masks (" + std::to_string(noise.size()) +
                          " noise, " + std::to_string(schedule.masks.size()) + " masks)");
    const auto T = static_cast<std::size_t>(X.rows());
    schedule.check_disjoint(T);
    Vector acc = noise.front();
    for (std::size_t i = 0; i < schedule.masks.size(); ++i) {
        for (std::size_t r : schedule.masks[i]) {
            const auto row = static_cast<Eigen::Index>(r);
            acc[row] += noise[i + 1][row];
        }
    }
    return w_star + RidgelessSolver(X).solve(acc);
}

}  // namespace toedit::sim
