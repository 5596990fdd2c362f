#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include "contagion/error.hpp"
#include "contagion/graph.hpp"
#include "contagion/log.hpp"

namespace contagion {

namespace {

struct Tridiagonal {
  Eigen::VectorXd diag, sub;
};

// k smallest eigenpairs of the symmetric tridiagonal (diag, sub) via MRRR.
void tridiagonal_pairs(Tridiagonal t, std::size_t k, Eigen::VectorXd& vals, Eigen::MatrixXd& vecs) {
  const auto n = static_cast<lapack_int>(t.diag.size());
  const auto lk = static_cast<lapack_int>(k);
  Eigen::VectorXd e(n);
  e.head(n - 1) = t.sub;
  e(n - 1) = 0.0;
  Eigen::VectorXd w(n);
  vecs.resize(n, lk);
  std::vector<lapack_int> support(2 * k);
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', n, t.diag.data(), e.data(), 0.0, 0.0,
                                   1, lk, &found, w.data(), vecs.data(), n, lk, support.data(),
                                   &tryrac);
  if (info != 0 || found != lk) {
    throw std::runtime_error("tridiagonal eigensolver failed (info=" + std::to_string(info) + ")");
  }
  vals = w.head(lk);
}

// Householder reduction by LAPACK, back-transformation of only the k
// retained vectors on our side.
void smallest_pairs_lapack(Eigen::MatrixXd a, std::size_t k, Eigen::VectorXd& vals,
                           Eigen::MatrixXd& vecs) {
  const auto n = static_cast<lapack_int>(a.rows());
  Tridiagonal t{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  Eigen::VectorXd tau(n);
  lapack_int info =
      LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', n, a.data(), n, t.diag.data(), t.sub.data(), tau.data());
  if (info != 0) throw std::runtime_error("tridiagonal reduction failed (info=" + std::to_string(info) + ")");
  t.sub.conservativeResize(n - 1);
  tridiagonal_pairs(std::move(t), k, vals, vecs);
  if (n > 1) {
    Eigen::VectorXd coeffs = tau.head(n - 1);
    vecs.applyOnTheLeft(Eigen::HouseholderSequence<Eigen::MatrixXd, Eigen::VectorXd>(a, coeffs)
                            .setLength(n - 1)
                            .setShift(1));
  }
}

void smallest_pairs_eigen(const Eigen::MatrixXd& a, std::size_t k, Eigen::VectorXd& vals,
                          Eigen::MatrixXd& vecs) {
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(a);
  Tridiagonal t{tri.diagonal(), tri.subDiagonal()};
  tridiagonal_pairs(std::move(t), k, vals, vecs);
  vecs = tri.matrixQ() * vecs;
}

double max_residual(const RawGraph& g, const Eigen::VectorXd& vals, Eigen::MatrixXd& vecs) {
  const std::size_t n = g.node_count();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < vecs.cols(); ++j) {
    vecs.col(j).normalize();
    const double* q = vecs.col(j).data();
    double res = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double s = double(g.degree(NodeId(v))) * q[v];
      for (NodeId u : g.neighbors(NodeId(v))) s -= q[u];
      double r = s - vals(j) * q[v];
      res += r * r;
    }
    worst = std::max(worst, std::sqrt(res));
  }
  return worst;
}

}  // namespace

FeatureMatrix spectral_embed(const RawGraph& g, std::size_t k) {
  const std::size_t n = g.node_count();
  if (k < 1) throw ParamError("embed-dim", "must be at least 1");
  if (k > n) throw ParamError("embed-dim", "cannot exceed node count");

  FeatureMatrix out;
  out.rows = n;
  out.dim = k;

  const std::size_t components = connected_components(g);
  if (components > 1) {
    out.warnings.push_back("graph has " + std::to_string(components) +
                           " connected components; Laplacian nullspace is degenerate");
    log::warn(out.warnings.back());
  }

  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t v = 0; v < n; ++v) {
    lap(v, v) = double(g.degree(NodeId(v)));
    for (NodeId u : g.neighbors(NodeId(v))) lap(u, v) = -1.0;
  }

  const double tolerance = 1e-8 * double(n);
  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  smallest_pairs_lapack(lap, k, vals, vecs);
  out.max_residual = max_residual(g, vals, vecs);
  if (out.max_residual > tolerance) {
    log::warn("LAPACK eigenpairs failed the residual check; retrying with the reference reduction");
    smallest_pairs_eigen(lap, k, vals, vecs);
    out.max_residual = max_residual(g, vals, vecs);
  }
  if (out.max_residual > tolerance) {
    out.warnings.push_back("eigen residual " + std::to_string(out.max_residual) +
                           " exceeds 1e-8 n");
    log::warn(out.warnings.back());
  }
  out.eigenvalues.assign(vals.data(), vals.data() + vals.size());

  out.values.assign(n * k, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    double norm = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      double x = vecs(Eigen::Index(v), Eigen::Index(j));
      out.values[v * k + j] = x;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      out.warnings.push_back("node " + std::to_string(v) + " has a zero embedding row");
      log::warn(out.warnings.back());
      out.values[v * k] = 1.0;
      continue;
    }
    for (std::size_t j = 0; j < k; ++j) out.values[v * k + j] /= norm;
  }
  return out;
}

}  // namespace contagion
