#pragma once

#include "volseg/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace volseg {

enum class Distribution { Gaussian, StudentT };

const char* to_string(Distribution dist);

// Conditional-variance recursion h_t = omega + alpha * h_{t-1} + beta *
// r_{t-1}^2. Note the coefficient roles: alpha multiplies the lagged
// variance, beta the lagged squared return.
struct GarchParams {
  double omega = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> nu;

  bool valid() const {
    bool core = omega > 0.0 && alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0;
    return core && (!nu || *nu > 2.0);
  }
  double stationary_variance() const { return omega / (1.0 - alpha - beta); }
};

enum class RegimeSharing { OmegaOnly, AllFree };

struct RegimeParams {
  std::vector<GarchParams> per_regime;
  RegimeSharing sharing = RegimeSharing::AllFree;
};

struct FitResult {
  std::string model;  // "garch", "omega-garch" or "abo-garch"
  Distribution distribution = Distribution::Gaussian;
  RegimeParams params;
  Segmentation segmentation;
  Vector variance_path;
  double log_lik = 0.0;
  int k = 0;
  double aic = 0.0;
  double bic = 0.0;
  bool converged = false;
  long n_eval = 0;
};

Vector garch_filter(const Eigen::Ref<const Vector>& r, const GarchParams& p, double h1);

double gaussian_loglik(const Eigen::Ref<const Vector>& r,
                       const Eigen::Ref<const Vector>& h);

// Standardized Student-t with nu > 2 scaled to unit variance, so h stays the
// conditional variance.
double student_t_loglik(const Eigen::Ref<const Vector>& r,
                        const Eigen::Ref<const Vector>& h, double nu);

struct InformationCriteria {
  double aic = 0.0;
  double bic = 0.0;
};

InformationCriteria information_criteria(double log_lik, int k, Index n);

struct FitOptions {
  Index min_obs = 30;     // shortest series / regime accepted for fitting
  double rel_tol = 1e-8;
  long max_eval = 50000;
};

// Maximum likelihood over (omega, alpha, beta[, nu]) via simplex search in
// an unconstrained reparameterization, restarted from three fixed points.
FitResult fit_garch(const Eigen::Ref<const Vector>& r, Distribution dist,
                    const FitOptions& opts = {});

// Joint likelihood with omega switching at each change point while alpha,
// beta (and nu) stay global; the variance recursion runs through regime
// boundaries without resetting.
FitResult fit_omega_garch(const Eigen::Ref<const Vector>& r, const Segmentation& seg,
                          Distribution dist, const FitOptions& opts = {});

// All of (omega, alpha, beta[, nu]) switch at each change point; like the
// omega model this is one continuous recursion, so it nests the omega model
// and the plain fit.
FitResult fit_abo_garch(const Eigen::Ref<const Vector>& r, const Segmentation& seg,
                        Distribution dist, const FitOptions& opts = {});

// Draws a path from the regime-switching model (plain GARCH when the
// segmentation is empty). Innovations are Gaussian or unit-variance
// Student-t; h starts at the first regime's stationary variance.
Vector simulate_garch(const RegimeParams& params, const Segmentation& seg,
                      Distribution dist, std::uint64_t seed);

}  // namespace volseg
