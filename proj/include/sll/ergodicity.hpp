#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "sll/errors.hpp"
#include "sll/matrix.hpp"
#include "sll/simulation.hpp"

namespace sll {

/// Ergodicity coefficient of a row-stochastic matrix: one minus the smallest
/// pairwise row overlap. Zero for rank-one matrices, one for rows with
/// disjoint support.
inline double ergodicity_coefficient(const Matrix& a) {
  if (!is_row_stochastic(a, 1e-8))
    throw ContractViolation("ergodicity_coefficient: matrix is not row-stochastic");
  const std::size_t n = a.rows();
  double min_overlap = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double overlap = 0.0;
      for (std::size_t l = 0; l < n; ++l) overlap += std::min(a(i, l), a(j, l));
      min_overlap = std::min(min_overlap, overlap);
    }
  }
  const double pi = 1.0 - min_overlap;
  return pi < 0.0 ? 0.0 : (pi > 1.0 ? 1.0 : pi);
}

struct ErgodicityDiagnostics {
  double pi = 1.0;          // ergodicity coefficient of the accumulated product
  double row_spread = 1.0;  // max over columns of (max row entry - min row entry)
  std::vector<double> phi_estimate;  // row mean of the product; the rows coincide in the limit
  double delta_estimate = 0.0;       // min column sum of 1^T * product
  double eta_bound = 0.0;            // (1/n)^(n*B), the analytic floor for delta
};

/// Accumulates the backward product T_k ... T_s by left multiplication and
/// reports diagnostics on demand. Rows are renormalized every renorm_period
/// multiplies to cancel drift; the worst drift seen must stay below 1e-8 or
/// the accumulator refuses to continue.
class ProductTracker {
public:
  explicit ProductTracker(std::size_t n, int b = 1, std::uint64_t renorm_period = 1000)
      : product_(Matrix::identity(n)), b_(b), renorm_period_(renorm_period) {
    if (n == 0) throw ConfigError("ProductTracker: empty matrix");
    if (b < 1) throw ConfigError("ProductTracker: B must be >= 1");
  }

  void push(const Matrix& t) {
    if (t.rows() != product_.rows() || t.cols() != product_.cols())
      throw ConfigError("ProductTracker: dimension mismatch");
    if (renorm_period_ != 0 && length_ > 0 && length_ % renorm_period_ == 0) renormalize();
    product_ = t * product_;
    ++length_;
  }

  const Matrix& product() const { return product_; }
  std::uint64_t length() const { return length_; }
  double max_renorm_drift() const { return max_drift_; }

  ErgodicityDiagnostics diagnostics() const {
    const std::size_t n = product_.rows();
    ErgodicityDiagnostics d;
    d.pi = ergodicity_coefficient(product_);
    d.row_spread = 0.0;
    d.phi_estimate.assign(n, 0.0);
    d.delta_estimate = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < n; ++l) {
      double mx = product_(0, l), mn = product_(0, l), col_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = product_(i, l);
        mx = std::max(mx, v);
        mn = std::min(mn, v);
        col_sum += v;
        d.phi_estimate[l] += v;
      }
      d.phi_estimate[l] /= static_cast<double>(n);
      d.row_spread = std::max(d.row_spread, mx - mn);
      d.delta_estimate = std::min(d.delta_estimate, col_sum);
    }
    d.eta_bound = std::pow(1.0 / static_cast<double>(n),
                           static_cast<double>(n) * static_cast<double>(b_));
    return d;
  }

private:
  void renormalize() {
    const std::size_t n = product_.rows();
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += product_(i, j);
      max_drift_ = std::max(max_drift_, std::abs(sum - 1.0));
      for (std::size_t j = 0; j < n; ++j) product_(i, j) /= sum;
    }
    if (max_drift_ >= 1e-8)
      throw ContractViolation("ProductTracker: accumulated row-sum drift reached 1e-8");
  }

  Matrix product_;
  int b_;
  std::uint64_t renorm_period_;
  std::uint64_t length_ = 0;
  double max_drift_ = 0.0;
};

/// Per-agent least-squares slope, in nats per iteration, of the log belief
/// ratio log(mu(theta)/mu(theta_star)) against k over the trailing half of
/// the recorded trajectory. A negative slope certifies learning at rate
/// |slope|. Works on the stored log-domain state, which never saturates.
inline std::vector<double> belief_rate_estimate(const std::vector<Snapshot>& trajectory,
                                                std::size_t theta, std::size_t theta_star) {
  if (trajectory.size() < 100)
    throw ConfigError("belief_rate_estimate: need at least 100 recorded points");
  const std::size_t n = trajectory.front().log_beliefs.rows();
  const std::size_t first = trajectory.size() / 2;
  const std::size_t m = trajectory.size() - first;

  double mean_k = 0.0;
  for (std::size_t s = first; s < trajectory.size(); ++s)
    mean_k += static_cast<double>(trajectory[s].k);
  mean_k /= static_cast<double>(m);

  std::vector<double> slopes(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double cov = 0.0, var = 0.0, mean_phi = 0.0;
    for (std::size_t s = first; s < trajectory.size(); ++s)
      mean_phi += trajectory[s].log_beliefs(i, theta) - trajectory[s].log_beliefs(i, theta_star);
    mean_phi /= static_cast<double>(m);
    for (std::size_t s = first; s < trajectory.size(); ++s) {
      const double dk = static_cast<double>(trajectory[s].k) - mean_k;
      const double dphi = trajectory[s].log_beliefs(i, theta) -
                          trajectory[s].log_beliefs(i, theta_star) - mean_phi;
      cov += dk * dphi;
      var += dk * dk;
    }
    slopes[i] = cov / var;
  }
  return slopes;
}

/// Max-norm of phi_next^T T - phi_curr^T. Near zero certifies the pair as
/// consecutive members of an absolute probability sequence for T.
inline double absolute_probability_residual(const std::vector<double>& phi_next,
                                            const Matrix& t,
                                            const std::vector<double>& phi_curr) {
  const std::size_t n = t.rows();
  if (phi_next.size() != n || phi_curr.size() != n)
    throw ConfigError("absolute_probability_residual: dimension mismatch");
  auto check_stochastic_vector = [](const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) {
      if (x < -1e-12) throw ConfigError("absolute_probability_residual: negative entry");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError("absolute_probability_residual: vector does not sum to 1");
  };
  check_stochastic_vector(phi_next);
  check_stochastic_vector(phi_curr);

  double residual = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double back = 0.0;
    for (std::size_t i = 0; i < n; ++i) back += phi_next[i] * t(i, j);
    residual = std::max(residual, std::abs(back - phi_curr[j]));
  }
  return residual;
}

}  // namespace sll
