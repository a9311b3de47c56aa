#include "semibvm/lfd.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "semibvm/error.hpp"

namespace semibvm {

LfdEstimate lfd_plm_analytic(const ConditionalMean &cond_mean_u,
                             const Eigen::MatrixXd &v) {
  if (v.rows() < 1) {
    fail(ErrorKind::InvalidInput, "least favorable direction needs design points");
  }
  LfdEstimate out;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const Eigen::VectorXd m = cond_mean_u(v.row(i).transpose());
    if (i == 0) {
      out.at_design.resize(v.rows(), m.size());
    }
    if (m.size() != out.at_design.cols() || !m.allFinite()) {
      fail(ErrorKind::InvalidInput,
           "E[U|V] handle returned a non-finite or mis-sized value at row " +
               std::to_string(i));
    }
    out.at_design.row(i) = -m.transpose();
  }
  return out;
}

double link_weight(Link link, double g) {
  switch (link) {
  case Link::Identity:
    return 1.0;
  case Link::Logit: {
    // f = F(1-F) and Var = F(1-F), so f*l = F(1-F).
    const double e = std::exp(-std::abs(g));
    return e / ((1.0 + e) * (1.0 + e));
  }
  case Link::ExpHazard:
    // f = e^g, Var(m) = m^2: f*l = e^g * e^g / e^{2g}.
    return 1.0;
  }
  return 1.0;
}

LfdEstimate lfd_gplm_analytic(Link link, const LinearPredictor &g0,
                              const ConditionalLaw &law, const Eigen::MatrixXd &v,
                              Rng &rng, int draws) {
  if (v.rows() < 1) {
    fail(ErrorKind::InvalidInput, "least favorable direction needs design points");
  }
  if (std::holds_alternative<ConditionalSampler>(law) && draws < 1) {
    fail(ErrorKind::InvalidInput, "Monte Carlo draw count must be positive");
  }
  LfdEstimate out;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const Eigen::VectorXd vi = v.row(i).transpose();
    Eigen::VectorXd numerator;
    double denominator = 0.0;
    auto accumulate = [&](const Eigen::VectorXd &u, double mass) {
      if (numerator.size() == 0) {
        numerator = Eigen::VectorXd::Zero(u.size());
      }
      const double w = mass * link_weight(link, g0(u, vi));
      numerator += w * u;
      denominator += w;
    };
    if (const auto *sampler = std::get_if<ConditionalSampler>(&law)) {
      for (int k = 0; k < draws; ++k) {
        accumulate((*sampler)(vi, rng), 1.0 / draws);
      }
    } else {
      for (const auto &point : std::get<ConditionalSupport>(law)(vi)) {
        accumulate(point.u, point.weight);
      }
    }
    if (!(denominator >= 1e-12)) {
      fail(ErrorKind::DegenerateDesign,
           "conditional weight expectation vanishes at row " + std::to_string(i));
    }
    if (i == 0) {
      out.at_design.resize(v.rows(), numerator.size());
    }
    const Eigen::VectorXd h = -numerator / denominator;
    if (!h.allFinite()) {
      fail(ErrorKind::InvalidInput, "non-finite least favorable direction");
    }
    out.at_design.row(i) = h.transpose();
  }
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite_normal(int nodes) {
  if (nodes < 1) {
    fail(ErrorKind::InvalidInput, "Gauss-Hermite rule needs at least one node");
  }
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(nodes, nodes);
  for (int k = 1; k < nodes; ++k) {
    jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
    jacobi(k - 1, k) = jacobi(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  Eigen::VectorXd weights = eig.eigenvectors().row(0).transpose().array().square();
  weights /= weights.sum();
  return {eig.eigenvalues(), weights};
}

ConditionalSupport gaussian_conditional_support(ConditionalMean mean, double sd,
                                                int nodes) {
  auto [x, w] = gauss_hermite_normal(nodes);
  return [mean = std::move(mean), sd, x = std::move(x),
          w = std::move(w)](const Eigen::VectorXd &v) {
    const Eigen::VectorXd m = mean(v);
    const Eigen::Index p = m.size();
    const auto k = x.size();
    Eigen::Index total = 1;
    for (Eigen::Index s = 0; s < p; ++s) {
      total *= k;
    }
    std::vector<WeightedPoint> support;
    support.reserve(static_cast<std::size_t>(total));
    for (Eigen::Index idx = 0; idx < total; ++idx) {
      Eigen::VectorXd u(p);
      double weight = 1.0;
      Eigen::Index rest = idx;
      for (Eigen::Index s = 0; s < p; ++s) {
        const Eigen::Index j = rest % k;
        rest /= k;
        u[s] = m[s] + sd * x[j];
        weight *= w[j];
      }
      support.push_back({std::move(u), weight});
    }
    return support;
  };
}

Eigen::VectorXd normal_reference_bandwidth(const Eigen::MatrixXd &v) {
  const auto n = static_cast<double>(v.rows());
  const auto d = static_cast<double>(v.cols());
  const double factor = std::pow(4.0 / ((d + 2.0) * n), 1.0 / (d + 4.0));
  Eigen::VectorXd b(v.cols());
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const double m = v.col(k).mean();
    const double sd = std::sqrt((v.col(k).array() - m).square().sum() / (n - 1.0));
    // Any positive bandwidth is equivalent when the column is constant.
    b[k] = sd > 0.0 ? sd * factor : 1.0;
  }
  return b;
}

LfdEstimate nadaraya_watson(const Eigen::MatrixXd &u, const Eigen::MatrixXd &v,
                            std::optional<double> bandwidth) {
  const Eigen::Index n = v.rows();
  if (n < 2) {
    fail(ErrorKind::InvalidInput, "Nadaraya-Watson needs at least two rows");
  }
  if (u.rows() != n) {
    fail(ErrorKind::InvalidInput, "U and V disagree in row count");
  }
  if (!u.allFinite() || !v.allFinite()) {
    fail(ErrorKind::InvalidInput, "Nadaraya-Watson inputs contain non-finite values");
  }
  Eigen::VectorXd b;
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) {
      fail(ErrorKind::InvalidInput, "Nadaraya-Watson bandwidth must be positive");
    }
    b = Eigen::VectorXd::Constant(v.cols(), *bandwidth);
  } else {
    b = normal_reference_bandwidth(v);
  }
  const Eigen::RowVectorXd inv_b = b.cwiseInverse().transpose();

  LfdEstimate out;
  out.at_design.resize(n, u.cols());
  out.bandwidth = b;
  // Gaussian density normalizers cancel in the ratio; the self term has
  // weight exp(0) = 1, so the denominator is at least 1.
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd numerator = Eigen::RowVectorXd::Zero(u.cols());
    double denominator = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dist2 = ((v.row(i) - v.row(j)).cwiseProduct(inv_b)).squaredNorm();
      const double w = std::exp(-0.5 * dist2);
      numerator += w * u.row(j);
      denominator += w;
    }
    if (!(denominator > 0.0)) {
      numerator = u.row(i);
      denominator = 1.0;
    }
    out.at_design.row(i) = -numerator / denominator;
  }
  return out;
}

} // namespace semibvm
