#include "semibvm/kernels.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "semibvm/error.hpp"

namespace semibvm {

namespace {

void check_config(const KernelConfig &cfg) {
  if (!(cfg.inverse_bandwidth > 0.0) || !std::isfinite(cfg.inverse_bandwidth)) {
    fail(ErrorKind::InvalidInput, "inverse bandwidth must be positive and finite");
  }
}

void check_points(const Eigen::MatrixXd &points) {
  if (points.rows() < 1 || points.cols() < 1) {
    fail(ErrorKind::InvalidInput, "kernel needs at least one point of dimension >= 1");
  }
  if (!points.allFinite()) {
    fail(ErrorKind::InvalidInput, "kernel points contain non-finite coordinates");
  }
}

} // namespace

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd &left,
                              const Eigen::MatrixXd &right,
                              const KernelConfig &cfg) {
  check_config(cfg);
  check_points(left);
  check_points(right);
  if (left.cols() != right.cols()) {
    fail(ErrorKind::InvalidInput, "kernel point sets differ in dimension");
  }
  const double a2 = cfg.inverse_bandwidth * cfg.inverse_bandwidth;
  Eigen::MatrixXd k(left.rows(), right.rows());
  for (Eigen::Index j = 0; j < right.rows(); ++j) {
    for (Eigen::Index i = 0; i < left.rows(); ++i) {
      k(i, j) = std::exp(-a2 * (left.row(i) - right.row(j)).squaredNorm());
    }
  }
  return k;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd &points,
                              const KernelConfig &cfg) {
  check_config(cfg);
  check_points(points);
  const double a2 = cfg.inverse_bandwidth * cfg.inverse_bandwidth;
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = std::exp(-a2 * (points.row(i) - points.row(j)).squaredNorm());
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

GramMatrix factorize_covariance(Eigen::MatrixXd covariance, double jitter,
                                double max_jitter) {
  if (!(jitter >= 0.0) || !(max_jitter >= jitter)) {
    fail(ErrorKind::InvalidInput, "jitter bounds must satisfy 0 <= jitter <= max_jitter");
  }
  double current = jitter;
  double applied = 0.0;
  while (true) {
    covariance.diagonal().array() += current - applied;
    applied = current;
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().allFinite()) {
      Eigen::MatrixXd lower = llt.matrixL();
      return GramMatrix(std::move(covariance), applied, std::move(lower));
    }
    if (current >= max_jitter) {
      break;
    }
    current = current > 0.0 ? std::min(2.0 * current, max_jitter) : kDefaultJitter;
  }
  std::ostringstream msg;
  msg << "Cholesky factorization failed with jitter up to " << applied;
  fail(ErrorKind::Numerical, msg.str());
}

GramMatrix gram(const Eigen::MatrixXd &points, const KernelConfig &cfg,
                double jitter, double max_jitter) {
  return factorize_covariance(kernel_matrix(points, cfg), jitter, max_jitter);
}

double bandwidth_nonadaptive(double n, double alpha, int d) {
  if (!(n >= 1.0)) {
    fail(ErrorKind::InvalidInput, "sample size must be at least 1");
  }
  if (!(alpha > 0.0)) {
    fail(ErrorKind::InvalidInput, "smoothness alpha must be positive");
  }
  if (d < 1) {
    fail(ErrorKind::InvalidInput, "covariate dimension must be at least 1");
  }
  return std::pow(n, 1.0 / (2.0 * alpha + static_cast<double>(d)));
}

Eigen::VectorXd sample_gp_path(const GramMatrix &gram, const Eigen::VectorXd &mean,
                               Rng &rng) {
  if (mean.size() != gram.size()) {
    fail(ErrorKind::InvalidInput, "GP mean length does not match the Gram matrix");
  }
  const Eigen::VectorXd z = rng.normal_vector(gram.size());
  return mean + gram.lower().triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd predict_gp_mean(const GramMatrix &gram, const Eigen::MatrixXd &points,
                                const Eigen::VectorXd &values,
                                const Eigen::MatrixXd &targets,
                                const KernelConfig &cfg) {
  if (values.size() != gram.size() || points.rows() != gram.size()) {
    fail(ErrorKind::InvalidInput, "GP prediction inputs disagree in size");
  }
  const auto lower = gram.lower().triangularView<Eigen::Lower>();
  Eigen::VectorXd alpha = lower.solve(values);
  lower.transpose().solveInPlace(alpha);
  return kernel_matrix(targets, points, cfg) * alpha;
}

RLPath sample_riemann_liouville(const std::vector<double> &grid, Rng &rng,
                                int refinement) {
  if (grid.size() < 2) {
    fail(ErrorKind::InvalidInput, "Riemann-Liouville grid needs at least two points");
  }
  if (refinement < 1) {
    fail(ErrorKind::InvalidInput, "refinement factor must be at least 1");
  }
  if (!(grid.front() >= 0.0)) {
    fail(ErrorKind::InvalidInput, "Riemann-Liouville grid must start at t >= 0");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k]) || (k > 0 && !(grid[k] > grid[k - 1]))) {
      fail(ErrorKind::InvalidInput, "Riemann-Liouville grid must be strictly increasing");
    }
  }

  // Fine left endpoints u_j and Brownian increments over [u_j, u_{j+1}].
  std::vector<double> left;
  std::vector<double> increments;
  double start = 0.0;
  for (double stop : grid) {
    if (stop > start) {
      const double step = (stop - start) / refinement;
      for (int r = 0; r < refinement; ++r) {
        left.push_back(start + r * step);
        increments.push_back(std::sqrt(step) * rng.normal());
      }
    }
    start = stop;
  }
  const double z0 = rng.normal();
  const double z1 = rng.normal();
  const double z2 = rng.normal();

  RLPath path;
  path.grid = grid;
  path.values.reserve(grid.size());
  for (double t : grid) {
    double integral = 0.0;
    for (std::size_t j = 0; j < left.size() && left[j] < t; ++j) {
      integral += std::sqrt(t - left[j]) * increments[j];
    }
    path.values.push_back(integral + z0 + z1 * t + z2 * t * t);
  }
  return path;
}

} // namespace semibvm
