#include "volseg/garch.hpp"

#include "volseg/nelder_mead.hpp"
#include "volseg/rng.hpp"
#include "volseg/series.hpp"

#include <cmath>
#include <limits>

namespace volseg {

const char* to_string(Distribution dist) {
  return dist == Distribution::Gaussian ? "gaussian" : "student_t";
}

Vector garch_filter(const Eigen::Ref<const Vector>& r, const GarchParams& p, double h1) {
  if (!p.valid()) raise(ErrorCode::InvalidParams, "garch parameters violate constraints");
  if (!(h1 > 0.0)) raise(ErrorCode::InvalidParams, "h1 must be positive");
  Index n = r.size();
  Vector h(n);
  h[0] = h1;
  for (Index t = 1; t < n; ++t) {
    h[t] = p.omega + p.alpha * h[t - 1] + p.beta * r[t - 1] * r[t - 1];
  }
  return h;
}

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // ln(2*pi)/2

void check_lengths(const Eigen::Ref<const Vector>& r, const Eigen::Ref<const Vector>& h) {
  if (r.size() != h.size()) {
    raise(ErrorCode::LengthMismatch,
          "returns length " + std::to_string(r.size()) + " vs variance path length " +
              std::to_string(h.size()));
  }
  if ((h.array() <= 0.0).any()) {
    raise(ErrorCode::NonPositiveVariance, "variance path has non-positive entries");
  }
}

}  // namespace

double gaussian_loglik(const Eigen::Ref<const Vector>& r,
                       const Eigen::Ref<const Vector>& h) {
  check_lengths(r, h);
  double sum = 0.0;
  for (Index t = 0; t < r.size(); ++t) {
    sum += -kHalfLog2Pi - 0.5 * std::log(h[t]) - r[t] * r[t] / (2.0 * h[t]);
  }
  return sum;
}

double student_t_loglik(const Eigen::Ref<const Vector>& r,
                        const Eigen::Ref<const Vector>& h, double nu) {
  if (!(nu > 2.0)) raise(ErrorCode::InvalidNu, "nu must exceed 2");
  check_lengths(r, h);
  double constant = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                    0.5 * std::log(M_PI * (nu - 2.0));
  double sum = 0.0;
  for (Index t = 0; t < r.size(); ++t) {
    double z = r[t] * r[t] / ((nu - 2.0) * h[t]);
    sum += constant - 0.5 * std::log(h[t]) - 0.5 * (nu + 1.0) * std::log1p(z);
  }
  return sum;
}

InformationCriteria information_criteria(double log_lik, int k, Index n) {
  if (k < 1 || n < 1) raise(ErrorCode::InvalidParams, "k and n must be positive");
  InformationCriteria ic;
  ic.aic = 2.0 * k - 2.0 * log_lik;
  ic.bic = k * std::log(static_cast<double>(n)) - 2.0 * log_lik;
  return ic;
}

namespace {

// Unconstrained coordinates. Every omega is exp(a); each (alpha, beta) pair
// maps through (e^b, e^c) / (1 + e^b + e^c) so that alpha + beta < 1; nu is
// 2 + exp(d). OmegaOnly shares one (alpha, beta[, nu]) block across regimes,
// AllFree gives every regime its own.
struct SwitchingTransform {
  Index n_regimes;
  bool student_t;
  RegimeSharing sharing;

  Index dim() const {
    if (sharing == RegimeSharing::OmegaOnly) {
      return n_regimes + 2 + (student_t ? 1 : 0);
    }
    return 3 * n_regimes + (student_t ? n_regimes : 0);
  }

  std::vector<GarchParams> decode(const Vector& theta) const {
    std::vector<GarchParams> out(static_cast<std::size_t>(n_regimes));
    auto softmax_pair = [](double b, double c, GarchParams& p) {
      double eb = std::exp(b);
      double ec = std::exp(c);
      double denom = 1.0 + eb + ec;
      p.alpha = eb / denom;
      p.beta = ec / denom;
    };
    if (sharing == RegimeSharing::OmegaOnly) {
      GarchParams shared;
      softmax_pair(theta[n_regimes], theta[n_regimes + 1], shared);
      if (student_t) shared.nu = 2.0 + std::exp(theta[n_regimes + 2]);
      for (Index j = 0; j < n_regimes; ++j) {
        out[static_cast<std::size_t>(j)] = shared;
        out[static_cast<std::size_t>(j)].omega = std::exp(theta[j]);
      }
    } else {
      for (Index j = 0; j < n_regimes; ++j) {
        GarchParams& p = out[static_cast<std::size_t>(j)];
        p.omega = std::exp(theta[3 * j]);
        softmax_pair(theta[3 * j + 1], theta[3 * j + 2], p);
        if (student_t) p.nu = 2.0 + std::exp(theta[3 * n_regimes + j]);
      }
    }
    return out;
  }

  Vector encode(const std::vector<GarchParams>& params) const {
    Vector theta(dim());
    auto inverse_softmax = [](const GarchParams& p, double& b, double& c) {
      double rest = 1.0 - p.alpha - p.beta;
      b = std::log(p.alpha / rest);
      c = std::log(p.beta / rest);
    };
    if (sharing == RegimeSharing::OmegaOnly) {
      for (Index j = 0; j < n_regimes; ++j) {
        theta[j] = std::log(params[static_cast<std::size_t>(j)].omega);
      }
      double b, c;
      inverse_softmax(params.front(), b, c);
      theta[n_regimes] = b;
      theta[n_regimes + 1] = c;
      if (student_t) theta[n_regimes + 2] = std::log(params.front().nu.value() - 2.0);
    } else {
      for (Index j = 0; j < n_regimes; ++j) {
        const GarchParams& p = params[static_cast<std::size_t>(j)];
        theta[3 * j] = std::log(p.omega);
        double b, c;
        inverse_softmax(p, b, c);
        theta[3 * j + 1] = b;
        theta[3 * j + 2] = c;
        if (student_t) theta[3 * n_regimes + j] = std::log(p.nu.value() - 2.0);
      }
    }
    return theta;
  }
};

// One continuous recursion over the whole series with the coefficients
// switching at the change points; h never resets at a boundary.
Vector filter_switching(const Eigen::Ref<const Vector>& r,
                        const std::vector<GarchParams>& params,
                        const Segmentation& seg, double h1) {
  Index n = r.size();
  Vector h(n);
  h[0] = h1;
  std::size_t regime = 0;
  for (Index t = 1; t < n; ++t) {
    while (regime < seg.change_points.size() && t >= seg.change_points[regime]) ++regime;
    const GarchParams& p = params[regime];
    h[t] = p.omega + p.alpha * h[t - 1] + p.beta * r[t - 1] * r[t - 1];
  }
  return h;
}

// Likelihood with regime-resolved error distributions (nu may vary when the
// sharing mode allows it); the variance path is the joint one.
double switching_loglik(const Eigen::Ref<const Vector>& r, const Vector& h,
                        const std::vector<GarchParams>& params, const Segmentation& seg,
                        Distribution dist) {
  if (dist == Distribution::Gaussian) return gaussian_loglik(r, h);
  double sum = 0.0;
  for (Index j = 0; j < seg.regime_count(); ++j) {
    auto [lo, hi] = seg.regime_bounds(j);
    sum += student_t_loglik(r.segment(lo, hi - lo), h.segment(lo, hi - lo),
                            params[static_cast<std::size_t>(j)].nu.value());
  }
  return sum;
}

struct StartPoint {
  double alpha;
  double beta;
};

constexpr StartPoint kStarts[3] = {{0.85, 0.10}, {0.40, 0.20}, {0.10, 0.05}};
constexpr double kStartNu = 8.0;

FitResult fit_switching(const Eigen::Ref<const Vector>& r, const Segmentation& seg,
                        Distribution dist, const FitOptions& opts,
                        RegimeSharing sharing, const std::string& model_label,
                        const std::vector<Vector>& extra_starts) {
  Index n = r.size();
  Index n_regimes = seg.regime_count();
  if (n < opts.min_obs) {
    raise(ErrorCode::SeriesTooShort,
          "need at least " + std::to_string(opts.min_obs) + " observations, got " +
              std::to_string(n));
  }
  double h1 = sample_variance(r);
  if (!(h1 > 0.0)) raise(ErrorCode::NonPositiveVariance, "series has zero sample variance");

  SwitchingTransform tf{n_regimes, dist == Distribution::StudentT, sharing};

  std::vector<double> regime_var(static_cast<std::size_t>(n_regimes), h1);
  for (Index j = 0; j < n_regimes; ++j) {
    auto [lo, hi] = seg.regime_bounds(j);
    if (hi - lo >= 2) {
      double v = sample_variance(r.segment(lo, hi - lo));
      if (v > 0.0) regime_var[static_cast<std::size_t>(j)] = v;
    }
  }

  auto objective = [&](const Vector& theta) -> double {
    std::vector<GarchParams> params = tf.decode(theta);
    for (const GarchParams& p : params) {
      if (!std::isfinite(p.omega) || !(p.omega > 0.0)) {
        return std::numeric_limits<double>::infinity();
      }
    }
    Vector h = filter_switching(r, params, seg, h1);
    if (!h.allFinite() || (h.array() <= 0.0).any()) {
      return std::numeric_limits<double>::infinity();
    }
    return -switching_loglik(r, h, params, seg, dist);
  };

  std::vector<Vector> starts = extra_starts;
  for (const StartPoint& s : kStarts) {
    std::vector<GarchParams> p(static_cast<std::size_t>(n_regimes));
    for (Index j = 0; j < n_regimes; ++j) {
      GarchParams& q = p[static_cast<std::size_t>(j)];
      q.alpha = s.alpha;
      q.beta = s.beta;
      q.omega = regime_var[static_cast<std::size_t>(j)] * (1.0 - s.alpha - s.beta);
      if (tf.student_t) q.nu = kStartNu;
    }
    starts.push_back(tf.encode(p));
  }

  SimplexOptions nm_opts;
  nm_opts.rel_tol = opts.rel_tol;
  nm_opts.max_eval = opts.max_eval;

  SimplexResult best;
  best.value = std::numeric_limits<double>::infinity();
  bool best_converged = false;
  long total_eval = 0;
  for (const Vector& start : starts) {
    SimplexResult res = nelder_mead(objective, start, nm_opts);
    total_eval += res.n_eval;
    if (res.value < best.value) {
      best = res;
      best_converged = res.converged;
    }
  }

  FitResult out;
  out.model = model_label;
  out.distribution = dist;
  out.segmentation = seg;
  out.params.sharing = sharing;
  out.params.per_regime = tf.decode(best.x);
  out.variance_path = filter_switching(r, out.params.per_regime, seg, h1);
  out.log_lik = -best.value;
  out.k = static_cast<int>(tf.dim());
  InformationCriteria ic = information_criteria(out.log_lik, out.k, n);
  out.aic = ic.aic;
  out.bic = ic.bic;
  out.converged = best_converged && std::isfinite(out.log_lik);
  out.n_eval = total_eval;
  return out;
}

void validate_segmentation(const Eigen::Ref<const Vector>& r, const Segmentation& seg,
                           const FitOptions& opts) {
  seg.validate();
  if (seg.n != r.size()) {
    raise(ErrorCode::LengthMismatch, "segmentation length does not match series");
  }
  for (Index j = 0; j < seg.regime_count(); ++j) {
    auto [lo, hi] = seg.regime_bounds(j);
    if (hi - lo < opts.min_obs) {
      raise(ErrorCode::RegimeTooShort,
            "regime " + std::to_string(j) + " has " + std::to_string(hi - lo) +
                " observations, need " + std::to_string(opts.min_obs));
    }
  }
}

}  // namespace

FitResult fit_garch(const Eigen::Ref<const Vector>& r, Distribution dist,
                    const FitOptions& opts) {
  Segmentation single;
  single.n = r.size();
  FitResult out = fit_switching(r, single, dist, opts, RegimeSharing::OmegaOnly,
                                "garch", {});
  out.params.sharing = RegimeSharing::AllFree;
  return out;
}

FitResult fit_omega_garch(const Eigen::Ref<const Vector>& r, const Segmentation& seg,
                          Distribution dist, const FitOptions& opts) {
  if (seg.change_points.empty()) {
    Segmentation single;
    single.n = r.size();
    if (single.n != seg.n) {
      raise(ErrorCode::LengthMismatch, "segmentation length does not match series");
    }
    FitResult out = fit_garch(r, dist, opts);
    out.model = "omega-garch";
    out.params.sharing = RegimeSharing::OmegaOnly;
    return out;
  }
  validate_segmentation(r, seg, opts);
  // Warm start from the single-regime fit; the larger model can then never
  // end below it by more than the optimizer tolerance.
  FitResult plain = fit_garch(r, dist, opts);
  SwitchingTransform tf{seg.regime_count(), dist == Distribution::StudentT,
                        RegimeSharing::OmegaOnly};
  std::vector<GarchParams> broadcast(static_cast<std::size_t>(seg.regime_count()),
                                     plain.params.per_regime.front());
  FitResult out = fit_switching(r, seg, dist, opts, RegimeSharing::OmegaOnly,
                                "omega-garch", {tf.encode(broadcast)});
  out.n_eval += plain.n_eval;
  if (plain.log_lik > out.log_lik) {
    // The simplex drifted; fall back to the nested optimum itself.
    out.params.per_regime.assign(static_cast<std::size_t>(seg.regime_count()),
                                 plain.params.per_regime.front());
    out.variance_path = plain.variance_path;
    out.log_lik = plain.log_lik;
    InformationCriteria ic = information_criteria(out.log_lik, out.k, r.size());
    out.aic = ic.aic;
    out.bic = ic.bic;
    out.converged = plain.converged;
  }
  return out;
}

FitResult fit_abo_garch(const Eigen::Ref<const Vector>& r, const Segmentation& seg,
                        Distribution dist, const FitOptions& opts) {
  if (seg.change_points.empty()) {
    if (r.size() != seg.n) {
      raise(ErrorCode::LengthMismatch, "segmentation length does not match series");
    }
    FitResult out = fit_garch(r, dist, opts);
    out.model = "abo-garch";
    return out;
  }
  validate_segmentation(r, seg, opts);
  // Warm start from the omega-switching fit, keeping the nesting ladder
  // plain <= omega <= all-free monotone up to optimizer slack.
  FitResult omega = fit_omega_garch(r, seg, dist, opts);
  SwitchingTransform tf{seg.regime_count(), dist == Distribution::StudentT,
                        RegimeSharing::AllFree};
  FitResult out = fit_switching(r, seg, dist, opts, RegimeSharing::AllFree, "abo-garch",
                                {tf.encode(omega.params.per_regime)});
  out.n_eval += omega.n_eval;
  if (omega.log_lik > out.log_lik) {
    out.params.per_regime = omega.params.per_regime;
    out.params.sharing = RegimeSharing::AllFree;
    out.variance_path = omega.variance_path;
    out.log_lik = omega.log_lik;
    InformationCriteria ic = information_criteria(out.log_lik, out.k, r.size());
    out.aic = ic.aic;
    out.bic = ic.bic;
    out.converged = omega.converged;
  }
  return out;
}

Vector simulate_garch(const RegimeParams& params, const Segmentation& seg,
                      Distribution dist, std::uint64_t seed) {
  if (params.per_regime.empty()) raise(ErrorCode::InvalidParams, "no regime parameters");
  if (params.per_regime.size() != static_cast<std::size_t>(seg.regime_count())) {
    raise(ErrorCode::LengthMismatch, "parameter count does not match regime count");
  }
  for (const GarchParams& p : params.per_regime) {
    if (!p.valid()) raise(ErrorCode::InvalidParams, "garch parameters violate constraints");
    if (dist == Distribution::StudentT && !p.nu) {
      raise(ErrorCode::InvalidNu, "student-t simulation needs nu");
    }
  }
  Index n = seg.n;
  if (n < 1) raise(ErrorCode::InvalidParams, "segmentation has zero length");

  Rng rng(seed);
  auto draw = [&](const GarchParams& p) {
    if (dist == Distribution::Gaussian) return rng.standard_normal();
    double nu = p.nu.value();
    return rng.student_t(nu) * std::sqrt((nu - 2.0) / nu);
  };

  Vector r(n);
  std::size_t regime = 0;
  double h = params.per_regime.front().stationary_variance();
  for (Index t = 0; t < n; ++t) {
    while (regime < seg.change_points.size() && t >= seg.change_points[regime]) ++regime;
    const GarchParams& p = params.per_regime[regime];
    if (t > 0) h = p.omega + p.alpha * h + p.beta * r[t - 1] * r[t - 1];
    r[t] = std::sqrt(h) * draw(p);
  }
  return r;
}

}  // namespace volseg
