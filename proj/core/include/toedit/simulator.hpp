#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "toedit/random.hpp"

namespace toedit::sim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class WStarMode { unit_first_axis, random_unit };

std::string_view to_string(WStarMode mode) noexcept;
WStarMode parse_w_star_mode(std::string_view name);

/// Gaussian linear model y = x.w* + eps with x ~ N(0, I_d), eps ~ N(0, sigma2).
struct SimConfig {
    std::size_t d = 10;
    /// Samples per generation; needs T >= d + 2.
    std::size_t T = 100;
    double sigma2 = 1.0;
    WStarMode w_star_mode = WStarMode::unit_first_axis;
    /// Rows edited at the first editing step.
    std::size_t m1_size = 20;
    /// Geometric decay of the edited-row count between steps.
    double eta = 0.5;
    std::size_t generations = 10;
    std::size_t trials = 500;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;

    std::vector<std::string> violations() const;
    void validate() const;
};

struct Dataset {
    Matrix X;
    Vector E1;
    Vector w_star;
};

Dataset make_dataset(const SimConfig& cfg, Rng& rng);

/// Gaussian noise vector with variance sigma2.
Vector draw_noise(std::size_t T, double sigma2, Rng& rng);

/// Least-squares solver for a fixed design matrix. Factorizes once with a
/// column-pivoting Householder QR and reuses it for every right-hand side.
class RidgelessSolver {
public:
    /// Throws ConfigError when X lacks full column rank.
    explicit RidgelessSolver(const Matrix& X);

    /// argmin_w ||X w - y||_2.
    Vector solve(const Vector& y) const;
    Eigen::Index cols() const noexcept { return qr_.cols(); }

private:
    Eigen::ColPivHouseholderQR<Matrix> qr_;
};

Vector fit_ridgeless(const Matrix& X, const Vector& Y);

/// (w - w*)' Sigma (w - w*).
double test_error(const Vector& w, const Vector& w_star, const Matrix& Sigma);
/// Isotropic case, Sigma = I.
double test_error(const Vector& w, const Vector& w_star);

/// Row supports S_1..S_n of the diagonal editing matrices M_1..M_n.
struct EditMaskSchedule {
    std::vector<std::vector<std::size_t>> masks;

    /// Throws ConfigError when two masks share a row.
    void check_disjoint(std::size_t T) const;
};

/// Mask sizes round(m1 * eta^(i-1)), floored at 0, for i = 1..count.
std::vector<std::size_t> mask_sizes(std::size_t m1_size, double eta, std::size_t count);

/// Draws `count` pairwise disjoint masks over rows [0, T) with geometric
/// sizes. Throws ConfigError naming the required T when the sizes do not
/// fit.
EditMaskSchedule make_edit_masks(std::size_t T, std::size_t m1_size, double eta, std::size_t count, Rng& rng);
EditMaskSchedule make_edit_masks(const SimConfig& cfg, Rng& rng);

struct TraceMoments {
    /// Mean tr((X'X)^-1).
    double first = 0.0;
    /// Mean tr((X'X)^-2).
    double second = 0.0;
};

/// Monte-Carlo means over independent N(0, I) designs, computed from
/// singular values.
TraceMoments estimate_trace_moments(std::size_t d, std::size_t T, std::size_t trials, std::uint64_t seed,
                                    std::size_t jobs = 1);

struct TheoreticalBounds {
    /// sigma2 d / (T - d - 1): expected error per generation of full resynthesis.
    double collapse_slope = 0.0;
    /// 2 sigma2 d / (T - d - 1).
    double relaxed = 0.0;
    /// sigma2 d/(T-d-1) + sigma2 sqrt(E tr((X'X)^-2)) sqrt(m1) / (1 - eta);
    /// unavailable unless 0 < eta < 1.
    std::optional<double> geometric;

    double collapse_line(std::size_t n) const noexcept { return collapse_slope * static_cast<double>(n); }
};

TheoreticalBounds theoretical_bounds(const SimConfig& cfg, const TraceMoments& moments);

struct SimTrajectory {
    std::vector<double> mean_error;
    std::vector<double> stderr_error;
    TraceMoments moments;
    TheoreticalBounds bounds;

    std::vector<double> collapse_line() const;
};

/// Full resynthesis: every generation refits on X w_{n-1} + E_n.
SimTrajectory run_collapse_process(const SimConfig& cfg);

/// Editing recursion: generation g refits on targets where rows in M_{g-1}
/// are replaced by fresh synthetic labels and all others keep their previous
/// value.
SimTrajectory run_editing_process(const SimConfig& cfg);

/// Everything drawn in one editing trial, for replaying against formulas.
struct EditingTrial {
    Dataset data;
    /// E_1 .. E_G, where E_1 == data.E1.
    std::vector<Vector> noise;
    EditMaskSchedule schedule;
    /// w_1 .. w_G.
    std::vector<Vector> estimates;
    std::vector<double> errors;
};

/// Runs trial `trial` of run_editing_process and records its draws. The
/// errors match the ones run_editing_process averages.
EditingTrial record_editing_trial(const SimConfig& cfg, std::size_t trial);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of y[i] against x = i + 1. Needs two points.
LineFit fit_line(const std::vector<double>& y);

/// Closed form w* + (X'X)^-1 X' (E_1 + sum_i M_i E_{i+1}) for n masks and
/// n+1 noise vectors, evaluated with a least-squares solve. Throws
/// ConfigError if masks overlap or the counts disagree.
Vector closed_form_estimator(const Matrix& X, const std::vector<Vector>& noise, const EditMaskSchedule& schedule,
                             const Vector& w_star);

}  // namespace toedit::sim
