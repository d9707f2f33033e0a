// Copyright 2026 The ftrl-dynamics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ftrl/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ftrl/errors.hpp"

namespace ftrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxKktActions = 6;
constexpr double kKktNewtonTol = 1e-12;
constexpr double kKktResidualBound = 1e-9;
constexpr double kHessianConditionBound = 1e12;

void check_finite(const std::vector<double>& y) {
  for (double v : y) {
    if (!std::isfinite(v)) throw InvalidArgumentError("non-finite score");
  }
}

// Exact Euclidean projection onto the simplex (sort-and-threshold).
std::vector<double> project_to_simplex(const std::vector<double>& y) {
  const int m = static_cast<int>(y.size());
  std::vector<double> sorted(y);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (int k = 0; k < m; ++k) {
    cumulative += sorted[k];
    const double candidate = (1.0 - cumulative) / (k + 1);
    if (sorted[k] + candidate > 0.0) {
      tau = candidate;
    } else {
      break;
    }
  }
  std::vector<double> x(m);
  for (int a = 0; a < m; ++a) x[a] = std::max(0.0, y[a] + tau);
  return x;
}

void renormalize(std::vector<double>& x) {
  double sum = 0.0;
  for (double v : x) sum += v;
  for (double& v : x) v /= sum;
}

}  // namespace

Regularizer Regularizer::negentropy() {
  return Regularizer(RegularizerKind::kNegentropy, 0.0);
}

Regularizer Regularizer::squared_euclidean() {
  return Regularizer(RegularizerKind::kSquaredEuclidean, 0.0);
}

Regularizer Regularizer::tsallis(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw InvalidArgumentError("tsallis exponent must lie in (0,1)");
  }
  return Regularizer(RegularizerKind::kTsallis, q);
}

Regularizer Regularizer::parse(const std::string& config) {
  if (config == "negentropy") return negentropy();
  if (config == "euclidean") return squared_euclidean();
  const std::string prefix = "tsallis:q=";
  if (config.rfind(prefix, 0) == 0) {
    std::size_t consumed = 0;
    double q = 0.0;
    const std::string arg = config.substr(prefix.size());
    try {
      q = std::stod(arg, &consumed);
    } catch (const std::exception&) {
      throw ParseError("bad tsallis exponent in '" + config + "'");
    }
    if (consumed != arg.size()) {
      throw ParseError("trailing characters in '" + config + "'");
    }
    return tsallis(q);
  }
  throw ParseError("unknown regularizer '" + config +
                   "' (expected negentropy | euclidean | tsallis:q=<float>)");
}

std::string Regularizer::config_string() const {
  switch (kind_) {
    case RegularizerKind::kNegentropy:
      return "negentropy";
    case RegularizerKind::kSquaredEuclidean:
      return "euclidean";
    case RegularizerKind::kTsallis: {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "tsallis:q=%g", q_);
      return buf;
    }
  }
  return "";
}

bool Regularizer::steep() const {
  return kind_ != RegularizerKind::kSquaredEuclidean;
}

double Regularizer::point_gradient(double xa) const {
  switch (kind_) {
    case RegularizerKind::kNegentropy:
      return 1.0 + std::log(xa);
    case RegularizerKind::kSquaredEuclidean:
      return xa;
    case RegularizerKind::kTsallis:
      return q_ * std::pow(xa, q_ - 1.0) / (q_ - 1.0);
  }
  return 0.0;
}

double Regularizer::point_hessian(double xa) const {
  switch (kind_) {
    case RegularizerKind::kNegentropy:
      return 1.0 / xa;
    case RegularizerKind::kSquaredEuclidean:
      return 1.0;
    case RegularizerKind::kTsallis:
      return q_ * std::pow(xa, q_ - 2.0);
  }
  return 0.0;
}

double Regularizer::value(const std::vector<double>& x) const {
  switch (kind_) {
    case RegularizerKind::kNegentropy: {
      double h = 0.0;
      for (double xa : x) {
        if (xa > 0.0) h += xa * std::log(xa);
      }
      return h;
    }
    case RegularizerKind::kSquaredEuclidean: {
      double h = 0.0;
      for (double xa : x) h += 0.5 * xa * xa;
      return h;
    }
    case RegularizerKind::kTsallis: {
      double s = 0.0;
      for (double xa : x) s += std::pow(xa, q_);
      return (s - 1.0) / (q_ - 1.0);
    }
  }
  return 0.0;
}

std::vector<double> Regularizer::gradient(const std::vector<double>& x) const {
  std::vector<double> g(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (steep() && x[a] <= 0.0) {
      throw BoundaryGradientError(
          "gradient of a steep regularizer at a boundary point");
    }
    g[a] = point_gradient(x[a]);
  }
  return g;
}

std::vector<double> Regularizer::hessian_diagonal(
    const std::vector<double>& x) const {
  std::vector<double> h(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (steep() && x[a] <= 0.0) {
      throw BoundaryGradientError(
          "Hessian of a steep regularizer at a boundary point");
    }
    h[a] = point_hessian(x[a]);
  }
  return h;
}

std::vector<std::vector<double>> Regularizer::inverse_restricted_hessian(
    const std::vector<double>& x, const std::vector<int>& support) const {
  const int k = static_cast<int>(support.size());
  std::vector<double> diag(k);
  double max_h = 0.0, min_h = kInf;
  for (int i = 0; i < k; ++i) {
    const int a = support[i];
    if (a < 0 || a >= static_cast<int>(x.size())) {
      throw DimensionMismatchError("support index out of range");
    }
    if (steep() && x[a] <= 0.0) {
      throw SingularHessianError(
          "restricted Hessian of a steep regularizer at a zero coordinate");
    }
    const double h = point_hessian(x[a]);
    max_h = std::max(max_h, h);
    min_h = std::min(min_h, h);
    diag[i] = h;
  }
  if (!(min_h > 0.0) || max_h / min_h > kHessianConditionBound) {
    throw SingularHessianError("restricted Hessian conditioning exceeds 1e12");
  }
  std::vector<std::vector<double>> inv(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i) inv[i][i] = 1.0 / diag[i];
  return inv;
}

std::vector<double> Regularizer::mirror_map(const std::vector<double>& y) const {
  check_finite(y);
  switch (kind_) {
    case RegularizerKind::kNegentropy: {
      const double y_max = *std::max_element(y.begin(), y.end());
      std::vector<double> x(y.size());
      for (std::size_t a = 0; a < y.size(); ++a) x[a] = std::exp(y[a] - y_max);
      renormalize(x);
      return x;
    }
    case RegularizerKind::kSquaredEuclidean: {
      std::vector<double> x = project_to_simplex(y);
      renormalize(x);
      return x;
    }
    case RegularizerKind::kTsallis: {
      KktCertificate cert = kkt_solve(y);
      return cert.x;
    }
  }
  return {};
}

KktCertificate Regularizer::kkt_solve(const std::vector<double>& y) const {
  check_finite(y);
  const int m = static_cast<int>(y.size());
  if (m < 1 || m > kMaxKktActions) {
    throw SizeBoundError("kkt_solve enumerates supports for at most " +
                         std::to_string(kMaxKktActions) + " actions");
  }

  KktCertificate best;
  best.residual = kInf;
  bool have_valid = false;
  double best_invalid_residual = kInf;

  // Steep regularizers admit only the full support (off-support multipliers
  // would have to absorb an unbounded gradient).
  const int first_mask = steep() ? (1 << m) - 1 : 1;
  const int last_mask = (1 << m) - 1;

  for (int mask = first_mask; mask <= last_mask; ++mask) {
    std::vector<int> support;
    for (int a = 0; a < m; ++a) {
      if (mask & (1 << a)) support.push_back(a);
    }
    if (support.empty()) continue;
    const int k = static_cast<int>(support.size());

    // Damped Newton on (x_S, mu) for the smooth system
    //   g(x_a) + mu - y_a = 0 (a in S),  sum_S x_a - 1 = 0.
    std::vector<double> xs(k, 1.0 / k);
    double mu = 0.0;
    for (int i = 0; i < k; ++i) mu += y[support[i]] - point_gradient(1.0 / k);
    mu /= k;

    const auto residual_norm = [&](const std::vector<double>& xv, double muv) {
      double r = 0.0;
      double sum = 0.0;
      for (int i = 0; i < k; ++i) {
        r = std::max(r, std::abs(point_gradient(xv[i]) + muv - y[support[i]]));
        sum += xv[i];
      }
      return std::max(r, std::abs(sum - 1.0));
    };

    double fnorm = residual_norm(xs, mu);
    bool converged = fnorm < kKktNewtonTol;
    for (int iter = 0; iter < 100 && !converged; ++iter) {
      // Separable closed-form Newton step: with w_a = 1/h''(x_a),
      //   dmu = (F_sum - sum_a F_a w_a) / sum_a w_a,
      //   dx_a = -(F_a + dmu) w_a.
      double sum_w = 0.0, sum_fw = 0.0, f_sum = -1.0;
      std::vector<double> f(k), w(k);
      for (int i = 0; i < k; ++i) {
        f[i] = point_gradient(xs[i]) + mu - y[support[i]];
        w[i] = 1.0 / point_hessian(xs[i]);
        sum_w += w[i];
        sum_fw += f[i] * w[i];
        f_sum += xs[i];
      }
      const double dmu = (f_sum - sum_fw) / sum_w;
      std::vector<double> dx(k);
      double lambda_max = 1.0;
      for (int i = 0; i < k; ++i) {
        dx[i] = -(f[i] + dmu) * w[i];
        if (steep() && dx[i] < 0.0) {
          lambda_max = std::min(lambda_max, -0.995 * xs[i] / dx[i]);
        }
      }

      double lambda = lambda_max;
      bool accepted = false;
      for (int halvings = 0; halvings < 50; ++halvings, lambda *= 0.5) {
        std::vector<double> xc(k);
        bool feasible = true;
        for (int i = 0; i < k; ++i) {
          xc[i] = xs[i] + lambda * dx[i];
          if (steep() && xc[i] <= 0.0) feasible = false;
        }
        if (!feasible) continue;
        const double muc = mu + lambda * dmu;
        const double fc = residual_norm(xc, muc);
        if (fc < fnorm * (1.0 - 1e-4 * lambda) || fc < kKktNewtonTol) {
          xs = std::move(xc);
          mu = muc;
          fnorm = fc;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      converged = fnorm < kKktNewtonTol;
    }
    if (!converged) {
      best_invalid_residual = std::min(best_invalid_residual, fnorm);
      continue;
    }

    // Assemble the certificate and its multipliers.
    KktCertificate cert;
    cert.x.assign(m, 0.0);
    cert.nu.assign(m, 0.0);
    cert.mu = mu;
    double violation = fnorm;
    bool valid = true;
    std::vector<bool> in_support(m, false);
    for (int i = 0; i < k; ++i) {
      in_support[support[i]] = true;
      if (!(xs[i] > 0.0)) valid = false;
      cert.x[support[i]] = xs[i];
    }
    for (int a = 0; a < m; ++a) {
      if (in_support[a]) continue;
      // x_a = 0; stationarity defines nu_a = g_a(0) + mu - y_a, which must be
      // non-negative.  Only non-steep kinds reach here.
      const double nu_a = point_gradient(0.0) + mu - y[a];
      cert.nu[a] = nu_a;
      if (nu_a < -1e-12) valid = false;
      violation = std::max(violation, -nu_a);
    }
    if (!valid) {
      best_invalid_residual = std::min(best_invalid_residual, violation);
      continue;
    }
    for (double& nu_a : cert.nu) nu_a = std::max(0.0, nu_a);
    renormalize(cert.x);
    cert.residual = violation;
    if (!have_valid || cert.residual < best.residual) {
      best = std::move(cert);
      have_valid = true;
    }
  }

  if (!have_valid || best.residual >= kKktResidualBound) {
    throw NoConvergenceError(
        "kkt_solve: no support reached the residual bound (best " +
        std::to_string(have_valid ? best.residual : best_invalid_residual) +
        ")");
  }
  return best;
}

std::vector<double> Regularizer::reduced_mirror_map(
    const std::vector<double>& z, int benchmark) const {
  const int m = static_cast<int>(z.size()) + 1;
  if (benchmark < 0 || benchmark >= m) {
    throw InvalidArgumentError("benchmark index out of range");
  }
  std::vector<double> y(m, 0.0);
  int r = 0;
  for (int a = 0; a < m; ++a) {
    if (a == benchmark) continue;
    y[a] = z[r++];
  }
  return mirror_map(y);
}

SteepnessReport Regularizer::steepness_probe(int num_actions) const {
  if (num_actions < 2) {
    throw InvalidArgumentError("steepness probe needs at least 2 actions");
  }
  SteepnessReport report;
  report.declared_steep = steep();
  for (int k = 2; k <= 8; ++k) {
    const double delta = std::pow(10.0, -k);
    std::vector<double> x(num_actions, (1.0 - delta) / (num_actions - 1));
    x[0] = delta;
    const auto g = gradient(x);
    double norm_sq = 0.0;
    for (double ga : g) norm_sq += ga * ga;
    report.gradient_norms.emplace_back(delta, std::sqrt(norm_sq));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < report.gradient_norms.size(); ++i) {
    if (report.gradient_norms[i].second <=
        report.gradient_norms[i - 1].second) {
      monotone = false;
    }
  }
  // Divergence means the norms keep gaining ground as the boundary distance
  // shrinks; a bounded gradient moves by O(delta) only.
  const double gain = report.gradient_norms.back().second -
                      report.gradient_norms.front().second;
  const bool observed_steep = monotone && gain > 1.0;
  report.consistent = (observed_steep == report.declared_steep);
  return report;
}

}  // namespace ftrl
