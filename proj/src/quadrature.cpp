#include "hyplab/quadrature.hpp"

#include <Eigen/Eigenvalues>

namespace hyplab {

namespace {

// Golub-Welsch eigenvalues of the symmetric Jacobi matrix with off-diagonal b.
Vec jacobi_nodes(const Vec& b) {
  const Eigen::Index n = b.size() + 1;
  Mat J = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = b[i];
  Eigen::SelfAdjointEigenSolver<Mat> es(J, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw InvalidInput("gauss_legendre: n must be >= 1");
  Vec b(n - 1);
  for (int k = 1; k < n; ++k) b[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  Vec x = n > 1 ? jacobi_nodes(b) : Vec::Zero(1);
  Vec w(n);
  for (int i = 0; i < n; ++i) {
    // Newton polish on P_n, then w = 2 / ((1 - x^2) P_n'(x)^2)
    double dp = 0.0;
    for (int it = 0; it < 3; ++it) {
      double p0 = 1.0, p1 = x[i];
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x[i] * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x[i] * p1 - p0) / (x[i] * x[i] - 1.0);
      x[i] -= p1 / dp;
    }
    w[i] = 2.0 / ((1.0 - x[i] * x[i]) * dp * dp);
  }
  return {x, w, w};
}

GaussRule gauss_hermite(int n) {
  if (n < 1) throw InvalidInput("gauss_hermite: n must be >= 1");
  Vec b(n - 1);
  for (int k = 1; k < n; ++k) b[k - 1] = std::sqrt(0.5 * k);
  Vec x = n > 1 ? jacobi_nodes(b) : Vec::Zero(1);
  Vec w(n), sw(n);
  for (int i = 0; i < n; ++i) {
    // Hermite functions psi_k; Newton on p_n (p_n' = sqrt(2n) p_{n-1}),
    // Christoffel sum for the weight
    double sum = 0.0;
    for (int it = 0; it < 3; ++it) {
      double pm = 0.0;
      double pk = std::pow(M_PI, -0.25) * std::exp(-0.5 * x[i] * x[i]);
      sum = 0.0;
      for (int k = 1; k <= n; ++k) {
        sum += pk * pk;
        const double next = std::sqrt(2.0 / k) * x[i] * pk - std::sqrt((k - 1.0) / k) * pm;
        pm = pk;
        pk = next;
      }
      x[i] -= pk / (std::sqrt(2.0 * n) * pm);
    }
    sw[i] = 1.0 / sum;
    w[i] = sw[i] * std::exp(-x[i] * x[i]);
  }
  return {x, w, sw};
}

}  // namespace hyplab
