#include "geofilt/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <string>

namespace geofilt {

namespace {

void check_guard(std::size_t n, const char* where) {
  if (n > kOracleSizeGuard) {
    throw size_error(std::string(where) + ": size " + std::to_string(n) +
                     " exceeds the dense-oracle guard " +
                     std::to_string(kOracleSizeGuard));
  }
}

Eigen::MatrixXd densify(const CsrMatrix& s) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.n_rows),
                                            static_cast<Eigen::Index>(s.n_cols));
  for (std::size_t i = 0; i < s.n_rows; ++i) {
    for (std::size_t k = s.row_offsets[i]; k < s.row_offsets[i + 1]; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s.cols[k])) =
          s.vals[k];
    }
  }
  return m;
}

struct Decomposed {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
};

Decomposed eigendecompose(const FemOperator& op, const char* where) {
  check_guard(op.size(), where);
  const Eigen::MatrixXd s = densify(op.stiffness);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error(std::string(where) +
                             ": dense eigendecomposition failed");
  }
  return {solver.eigenvectors(), solver.eigenvalues()};
}

DenseCovariance scaled_matrix_function(const FemOperator& op,
                                       const std::function<double(double)>& g,
                                       bool inverse_mass_scaling) {
  const auto n = static_cast<Eigen::Index>(op.size());
  Decomposed dec = eigendecompose(op, "dense_covariance");

  Eigen::VectorXd gvals(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // clamp eigenvalue roundoff below zero
    gvals(i) = g(std::max(dec.values(i), 0.0));
  }
  Eigen::MatrixXd m =
      dec.vectors * gvals.asDiagonal() * dec.vectors.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double di = inverse_mass_scaling
                            ? op.c_inv_sqrt[static_cast<std::size_t>(i)]
                            : 1.0 / op.c_inv_sqrt[static_cast<std::size_t>(i)];
      const double dj = inverse_mass_scaling
                            ? op.c_inv_sqrt[static_cast<std::size_t>(j)]
                            : 1.0 / op.c_inv_sqrt[static_cast<std::size_t>(j)];
      m(i, j) *= di * dj;
    }
  }

  DenseCovariance out;
  out.n = static_cast<std::size_t>(n);
  out.matrix.assign(m.data(), m.data() + n * n);  // symmetric, layout moot
  out.eigenvalues.assign(dec.values.data(), dec.values.data() + n);
  return out;
}

}  // namespace

DenseCovariance dense_covariance(const FemOperator& op,
                                 const SpectralModel& model) {
  return dense_covariance(
      op, [&](double lambda) { return g_of_lambda(model, lambda); });
}

DenseCovariance dense_covariance(const FemOperator& op,
                                 const std::function<double(double)>& g) {
  return scaled_matrix_function(op, g, true);
}

std::vector<double> dense_precision(const FemOperator& op,
                                    std::span<const double> p0_coeffs) {
  const auto p0 = [&](double x) {
    double acc = 0.0;
    for (std::size_t k = p0_coeffs.size(); k-- > 0;) {
      acc = acc * x + p0_coeffs[k];
    }
    return acc;
  };
  return scaled_matrix_function(op, p0, false).matrix;
}

std::vector<double> dense_filter(const FilterProblem& problem) {
  validate_problem(problem);
  const std::size_t n = problem.data.size();
  check_guard(n, "dense_filter");
  const auto ni = static_cast<Eigen::Index>(n);

  const auto component_matrix = [&](const ComponentModel& c) {
    if (c.kind == ComponentKind::nugget) {
      return Eigen::MatrixXd(c.spectral.sill *
                             Eigen::MatrixXd::Identity(ni, ni));
    }
    const DenseCovariance cov = dense_covariance(c.op, c.spectral);
    return Eigen::MatrixXd(
        Eigen::Map<const Eigen::MatrixXd>(cov.matrix.data(), ni, ni));
  };

  const Eigen::MatrixXd sigma_s = component_matrix(*problem.signal);
  Eigen::MatrixXd total = sigma_s;
  for (const ComponentModel* c : problem.noises) {
    total += component_matrix(*c);
  }
  if (problem.jitter > 0.0) {
    total += problem.jitter * Eigen::MatrixXd::Identity(ni, ni);
  }

  const Eigen::Map<const Eigen::VectorXd> z(problem.data.data(), ni);
  Eigen::LLT<Eigen::MatrixXd> llt(total);
  if (llt.info() != Eigen::Success) {
    throw model_error(
        "dense_filter: summed covariance is not positive definite");
  }
  const Eigen::VectorXd y = llt.solve(z);
  const Eigen::VectorXd estimate = sigma_s * y;
  return std::vector<double>(estimate.data(), estimate.data() + ni);
}

double dense_lambda_max(const CsrMatrix& stiffness) {
  check_guard(stiffness.n_rows, "dense_lambda_max");
  const Eigen::MatrixXd s = densify(stiffness);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  return solver.eigenvalues().maxCoeff();
}

}  // namespace geofilt
