#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <numeric>

#include "smcmc/eigs.hpp"

namespace smcmc::detail {

// N > 2 double-only path: Hessenberg + shifted-QR iteration via
// Eigen::EigenSolver, then left factors from the inverse of the canonically
// normalized right-eigenvector matrix (rows of R^-1 are left eigenvectors,
// and the pairing products come out as c_k ~= 1).
EigenDecomp<double> eigen_qr(const SquareMat<double>& a) {
  const int n = a.n;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = a(i, j);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigen_decompose: QR iteration failed to converge");
  }
  Eigen::VectorXcd lam = solver.eigenvalues();
  Eigen::MatrixXcd r = solver.eigenvectors();

  // Deterministic ordering: descending real part, then descending imaginary.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (lam[i].real() != lam[j].real()) return lam[i].real() > lam[j].real();
    return lam[i].imag() > lam[j].imag();
  });

  Eigen::VectorXcd lam_sorted(n);
  Eigen::MatrixXcd r_sorted(n, n);
  for (int k = 0; k < n; ++k) {
    lam_sorted[k] = lam[order[k]];
    r_sorted.col(k) = r.col(order[k]);
  }

  double max_abs = 0.0;
  for (int k = 0; k < n; ++k) max_abs = std::max(max_abs, std::abs(lam_sorted[k]));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(lam_sorted[i] - lam_sorted[j]) <=
          kDegeneracyTol * std::max(max_abs, 1e-300)) {
        throw NumericalError(detail::msg(
            "eigen_decompose: repeated eigenvalues (relative spacing below ", kDegeneracyTol,
            "); the transfer decomposition requires a simple spectrum"));
      }
    }
  }

  // Canonical column phase: largest-magnitude component real and positive.
  for (int k = 0; k < n; ++k) {
    int p = 0;
    for (int i = 1; i < n; ++i) {
      if (std::norm(r_sorted(i, k)) > std::norm(r_sorted(p, k))) p = i;
    }
    std::complex<double> ph = r_sorted(p, k);
    r_sorted.col(k) *= std::conj(ph) / std::abs(ph);
    r_sorted.col(k) /= r_sorted.col(k).norm();
  }

  Eigen::MatrixXcd l = r_sorted.inverse();

  EigenDecomp<double> out;
  out.n = n;
  out.lambda.resize(n);
  out.right.resize(static_cast<std::size_t>(n) * n);
  out.left.resize(static_cast<std::size_t>(n) * n);
  out.c.resize(n);
  for (int k = 0; k < n; ++k) out.lambda[k] = {lam_sorted[k].real(), lam_sorted[k].imag()};
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      out.r(i, k) = {r_sorted(i, k).real(), r_sorted(i, k).imag()};
      out.l(i, k) = {l(i, k).real(), l(i, k).imag()};
    }
  }
  for (int k = 0; k < n; ++k) {
    std::complex<double> ck = 0.0;
    for (int j = 0; j < n; ++j) ck += l(k, j) * r_sorted(j, k);
    out.c[k] = {ck.real(), ck.imag()};
    if (std::norm(ck) < 1e-20) {
      throw NumericalError(
          "eigen_decompose: left/right eigenvector pairing product vanished (defective matrix)");
    }
  }
  return out;
}

}  // namespace smcmc::detail
