#include "kidecomp/rng.hpp"

#include <Eigen/QR>

namespace kid {

Matrix Rng::ginibre(int rows, int cols) {
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = cnormal();
  return g;
}

Matrix Rng::ginibre_density(int d) {
  Matrix g = ginibre(d, d);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

Matrix Rng::haar_unitary(int d) {
  Matrix g = ginibre(d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  Vector diag = qr.matrixQR().diagonal();
  for (int k = 0; k < d; ++k) {
    const double a = std::abs(diag[k]);
    q.col(k) *= (a > 0.0) ? diag[k] / a : Complex(1.0, 0.0);
  }
  return q;
}

Matrix Rng::hermitian(int d) {
  Matrix g = ginibre(d, d);
  return (g + g.adjoint()) / 2.0;
}

Matrix Rng::hermitian_probe(int d) {
  Matrix h = hermitian(d);
  const double n = h.norm();
  if (n > 0.0) h /= n;
  return h;
}

std::vector<double> Rng::prob_vector(int k, double floor) {
  std::vector<double> p(k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    p[i] = uniform(floor, 1.0);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

std::uint64_t Rng::derive(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace kid
