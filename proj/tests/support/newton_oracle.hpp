#ifndef PARASURF_TESTS_NEWTON_ORACLE_HPP
#define PARASURF_TESTS_NEWTON_ORACLE_HPP

// Brute-force Newton solve of X_H(u) - X_xi u = 0 on the torus. It shares
// nothing with the library except Eigen: its own differentiation matrix, its
// own Hamiltonian derivatives, a dense LU.
//
// H = |eta|^2/2 + a cos(2 pi (x - y)) eta1 + d1 eta1 + d2 eta2.

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace oracle {

struct Problem {
  double a = 0.0, d1 = 0.0, d2 = 0.0;
  double xi1 = 1.0, xi2 = 0.0;
  double mean_w1x = 0.0, mean_w1y = 0.0;  // translation gauge
};

struct Solution {
  int N = 0;
  Eigen::MatrixXd w;  // 4 x N^2, node (i, j) -> j * N + i, x_i = (i + 1/2)/N
  double mu1 = 0.0, mu2 = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Fourier differentiation on N equispaced points of [0,1). N is odd so
// there is no Nyquist mode to leave the Jacobian singular.
inline Eigen::MatrixXd diff_matrix_1d(int N) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) {
      const int m = j - k;
      if (m == 0) continue;
      D(j, k) = M_PI * ((m % 2 == 0) ? 1.0 : -1.0) / std::sin(M_PI * m / N);
    }
  return D;
}

inline Solution newton(const Problem& pb, int N, int max_iter = 30) {
  if (N % 2 == 0) throw std::invalid_argument("oracle grid must be odd");
  const int n = N * N, nu = 4 * n + 2;
  const Eigen::MatrixXd D1 = diff_matrix_1d(N);
  const Eigen::MatrixXd I1 = Eigen::MatrixXd::Identity(N, N);
  // node index j*N + i: x derivative acts on i, y derivative on j
  Eigen::MatrixXd Dx = Eigen::MatrixXd::Zero(n, n), Dy = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k) {
        Dx(j * N + i, j * N + k) = D1(i, k);
        Dy(j * N + i, k * N + i) = D1(j, k);
      }
  const Eigen::MatrixXd Dxi = pb.xi1 * Dx + pb.xi2 * Dy;
  const double tp = 2.0 * M_PI;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(nu);  // w blocks then mu
  for (int k = 0; k < n; ++k) {
    z(k) = pb.mean_w1x;
    z(n + k) = pb.mean_w1y;
  }
  Solution sol;
  sol.N = N;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd R(nu);
    Eigen::MatrixXd Jac = Eigen::MatrixXd::Zero(nu, nu);
    Eigen::VectorXd w[4];
    for (int q = 0; q < 4; ++q) w[q] = z.segment(q * n, n);
    Eigen::VectorXd Xw[4];
    for (int q = 0; q < 4; ++q) Xw[q] = Dxi * w[q];
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        const int k = j * N + i;
        const double x = (i + 0.5) / N + w[0](k), y = (j + 0.5) / N + w[1](k);
        const double e1 = pb.xi1 + w[2](k), e2 = pb.xi2 + w[3](k);
        const double C = std::cos(tp * (x - y)), S = std::sin(tp * (x - y));
        // gradient (x, y, e1, e2)
        const double Hx = -tp * pb.a * S * e1, Hy = tp * pb.a * S * e1;
        const double He1 = e1 + pb.a * C + pb.d1, He2 = e2 + pb.d2;
        R(k) = He1 - pb.xi1 - Xw[0](k);
        R(n + k) = He2 - pb.xi2 - Xw[1](k);
        R(2 * n + k) = -Hx - Xw[2](k) + z(4 * n);
        R(3 * n + k) = -Hy - Xw[3](k) + z(4 * n + 1);
        // Hessian
        const double c2 = tp * tp * pb.a * C * e1;
        double Hs[4][4] = {{-c2, c2, -tp * pb.a * S, 0},
                           {c2, -c2, tp * pb.a * S, 0},
                           {-tp * pb.a * S, tp * pb.a * S, 1, 0},
                           {0, 0, 0, 1}};
        // rows of J Hess: (H_e1., H_e2., -H_x., -H_y.)
        const int rowmap[4] = {2, 3, 0, 1};
        const double sign[4] = {1, 1, -1, -1};
        for (int r = 0; r < 4; ++r)
          for (int c = 0; c < 4; ++c) Jac(r * n + k, c * n + k) += sign[r] * Hs[rowmap[r]][c];
      }
    for (int q = 0; q < 4; ++q) Jac.block(q * n, q * n, n, n) -= Dxi;
    for (int k = 0; k < n; ++k) {
      Jac(2 * n + k, 4 * n) = 1.0;
      Jac(3 * n + k, 4 * n + 1) = 1.0;
    }
    // pin the means of w1
    R(4 * n) = w[0].mean() - pb.mean_w1x;
    R(4 * n + 1) = w[1].mean() - pb.mean_w1y;
    Jac.block(4 * n, 0, 1, n).setConstant(1.0 / n);
    Jac.block(4 * n + 1, n, 1, n).setConstant(1.0 / n);
    sol.residual = R.norm() / std::sqrt(double(n));
    sol.iterations = it;
    if (sol.residual < 1e-15) break;
    z -= Jac.partialPivLu().solve(R);
  }
  sol.w = Eigen::MatrixXd(4, n);
  for (int q = 0; q < 4; ++q) sol.w.row(q) = z.segment(q * n, n).transpose();
  sol.mu1 = z(4 * n);
  sol.mu2 = z(4 * n + 1);
  return sol;
}

// Evaluates the trigonometric interpolant of values on the (odd) N-grid at
// the cell centres of an M-grid.
inline Eigen::MatrixXd interpolate(const Eigen::MatrixXd& vals, int N, int M) {
  using cd = std::complex<double>;
  const int K = (N + 1) / 2;
  // 1D operator from N samples to M samples
  Eigen::MatrixXcd E(M, N);
  for (int p = 0; p < M; ++p)
    for (int i = 0; i < N; ++i) {
      cd s = 0.0;
      const double xp = (p + 0.5) / M, xi = (i + 0.5) / N;
      for (int k = -K + 1; k <= K - 1; ++k) s += std::exp(cd(0.0, 2.0 * M_PI * k * (xp - xi)));
      E(p, i) = s / double(N);
    }
  const Eigen::MatrixXd Er = E.real();
  Eigen::MatrixXd out(vals.rows(), M * M);
  for (int q = 0; q < vals.rows(); ++q) {
    Eigen::MatrixXd grid(N, N);  // grid(j, i)
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) grid(j, i) = vals(q, j * N + i);
    const Eigen::MatrixXd fine = Er * grid * Er.transpose();
    for (int j = 0; j < M; ++j)
      for (int i = 0; i < M; ++i) out(q, j * M + i) = fine(j, i);
  }
  return out;
}

}  // namespace oracle

#endif  // PARASURF_TESTS_NEWTON_ORACLE_HPP
