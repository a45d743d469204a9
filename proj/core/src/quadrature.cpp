#include "bprec/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace bprec {

namespace {

constexpr int kMaxOrder = 2048;

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
// Hermite three-term recurrence (off-diagonal beta_k = sqrt(k/2)),
// weights are sqrt(pi) times the squared first eigenvector components.
GaussHermite compute_rule(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd subdiag(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) subdiag[k - 1] = std::sqrt(0.5 * k);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, subdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "gauss_hermite: eigen decomposition failed at order " << n;
    throw std::runtime_error(os.str());
  }

  GaussHermite rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double sqrt_pi = std::sqrt(M_PI);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()[i];
    const double q0 = solver.eigenvectors()(0, i);
    rule.weights[i] = sqrt_pi * q0 * q0;
  }

  // The rule is symmetric; enforce that exactly so odd integrands
  // cancel to rounding.
  for (int i = 0, j = n - 1; i < j; ++i, --j) {
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussHermite& gauss_hermite(int order) {
  if (order < 1 || order > kMaxOrder) {
    std::ostringstream os;
    os << "gauss_hermite order must be in [1, " << kMaxOrder << "], got "
       << order;
    throw std::domain_error(os.str());
  }
  static std::mutex mutex;
  static std::map<int, GaussHermite> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) {
    it = cache.emplace(order, compute_rule(order)).first;
  }
  return it->second;
}

}  // namespace bprec
