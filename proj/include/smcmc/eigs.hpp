#pragma once

#include <cmath>
#include <type_traits>
#include <vector>

#include "smcmc/complexof.hpp"
#include "smcmc/model.hpp"

namespace smcmc {

// ===== Eigendecomposition of a real square drift matrix =====
//
// Produces eigenvalues lambda_k, right eigenvectors (columns of R), left
// eigenvectors (rows of L) and the pairing products c_k = left_k . right_k
// (plain dot product, no conjugation), satisfying
//     A R = R diag(lambda),   L A = diag(lambda) L,   L R = diag(c),
// with |c_k| > 0 for every k (non-defective spectrum required).
//
// 2x2 matrices use a closed form that is generic over the scalar type, so
// dual numbers differentiate straight through it. Larger matrices are
// supported for plain double only, via an iterative QR solver behind
// detail::eigen_qr; dual-scalar callers with N > 2 must fall back to finite
// differences of whatever they are computing.

template <typename S>
struct EigenDecomp {
  int n = 0;
  std::vector<ComplexOf<S>> lambda;  // n eigenvalues
  std::vector<ComplexOf<S>> right;   // n*n row-major; column k = right eigenvector k
  std::vector<ComplexOf<S>> left;    // n*n row-major; row k = left eigenvector k
  std::vector<ComplexOf<S>> c;       // c_k = left_k . right_k

  const ComplexOf<S>& r(int i, int k) const { return right[static_cast<std::size_t>(i) * n + k]; }
  const ComplexOf<S>& l(int k, int j) const { return left[static_cast<std::size_t>(k) * n + j]; }
  ComplexOf<S>& r(int i, int k) { return right[static_cast<std::size_t>(i) * n + k]; }
  ComplexOf<S>& l(int k, int j) { return left[static_cast<std::size_t>(k) * n + j]; }
};

/// Relative eigenvalue spacing below which the spectrum counts as repeated.
inline constexpr double kDegeneracyTol = 1e-8;

namespace detail {

EigenDecomp<double> eigen_qr(const SquareMat<double>& a);  // defined in eigs.cpp

// Scale a 2-vector to unit Euclidean norm, then rotate its phase so the
// larger-magnitude component is real and positive. Keeps the decomposition
// deterministic and maps already-diagonal matrices to identity factors.
template <typename S>
void canonicalize2(ComplexOf<S>& z0, ComplexOf<S>& z1) {
  using std::sqrt;
  S norm = sqrt(abs2(z0) + abs2(z1));
  z0 = z0 / norm;
  z1 = z1 / norm;
  const bool first = primal(abs2(z0)) >= primal(abs2(z1));
  ComplexOf<S> ph = first ? z0 : z1;
  S mag = sqrt(abs2(ph));
  ComplexOf<S> rot = conj(ph) / mag;
  z0 = z0 * rot;
  z1 = z1 * rot;
}

template <typename S>
EigenDecomp<S> eigen_2x2(const SquareMat<S>& m) {
  const S& a = m(0, 0);
  const S& b = m(0, 1);
  const S& c = m(1, 0);
  const S& d = m(1, 1);
  S tr = a + d;
  S det = a * d - b * c;
  S disc = tr * tr - 4.0 * det;
  ComplexOf<S> sq = sqrt(ComplexOf<S>(disc));

  EigenDecomp<S> out;
  out.n = 2;
  out.lambda = {{(tr + sq.re) * 0.5, sq.im * 0.5}, {(tr - sq.re) * 0.5, sq.im * (-0.5)}};

  const double spread2 = primal(abs2(sq));
  const double scale2 =
      std::max({primal(abs2(out.lambda[0])), primal(abs2(out.lambda[1])), 1e-300});
  if (spread2 <= kDegeneracyTol * kDegeneracyTol * scale2) {
    throw NumericalError(detail::msg(
        "eigen_decompose: repeated eigenvalues (relative spacing below ", kDegeneracyTol,
        "); the transfer decomposition requires a simple spectrum"));
  }

  out.right.resize(4);
  out.left.resize(4);
  out.c.resize(2);
  for (int k = 0; k < 2; ++k) {
    const ComplexOf<S>& lam = out.lambda[k];
    // Right eigenvector: (b, lambda - a) from row one of (A - lambda I),
    // or (lambda - d, c) from row two; pick the better-conditioned one.
    ComplexOf<S> u0{b, S(0.0)};
    ComplexOf<S> u1{lam.re - a, lam.im};
    ComplexOf<S> w0{lam.re - d, lam.im};
    ComplexOf<S> w1{c, S(0.0)};
    if (primal(abs2(u0)) + primal(abs2(u1)) < primal(abs2(w0)) + primal(abs2(w1))) {
      u0 = w0;
      u1 = w1;
    }
    canonicalize2(u0, u1);
    out.r(0, k) = u0;
    out.r(1, k) = u1;

    // Left eigenvector: (c, lambda - a) or (lambda - d, b), same selection.
    ComplexOf<S> v0{c, S(0.0)};
    ComplexOf<S> v1{lam.re - a, lam.im};
    ComplexOf<S> x0{lam.re - d, lam.im};
    ComplexOf<S> x1{b, S(0.0)};
    if (primal(abs2(v0)) + primal(abs2(v1)) < primal(abs2(x0)) + primal(abs2(x1))) {
      v0 = x0;
      v1 = x1;
    }
    canonicalize2(v0, v1);
    out.l(k, 0) = v0;
    out.l(k, 1) = v1;

    out.c[k] = out.l(k, 0) * out.r(0, k) + out.l(k, 1) * out.r(1, k);
    if (primal(abs2(out.c[k])) < 1e-20) {
      throw NumericalError(
          "eigen_decompose: left/right eigenvector pairing product vanished (defective matrix)");
    }
  }
  return out;
}

}  // namespace detail

/// Spectral factorization of a real square matrix. 2x2 inputs take the
/// scalar-generic closed form; larger matrices are double-only.
template <typename S>
EigenDecomp<S> eigen_decompose(const SquareMat<S>& a) {
  if (a.n == 2) return detail::eigen_2x2(a);
  if constexpr (std::is_same_v<S, double>) {
    return detail::eigen_qr(a);
  } else {
    throw PreconditionError(
        "eigen_decompose: dual-scalar decomposition is only available for 2x2 matrices; "
        "use finite differences for larger models");
  }
}

}  // namespace smcmc
