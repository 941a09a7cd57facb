#ifndef PARASURF_DYNAMICS_LINEARIZATION_HPP
#define PARASURF_DYNAMICS_LINEARIZATION_HPP

#include <Eigen/Dense>

#include "parasurf/dynamics/embedding.hpp"

namespace parasurf {

using Mat2 = Eigen::Matrix2d;
using Mat42 = Eigen::Matrix<double, 4, 2>;

namespace detail {

template <int R, int C>
Eigen::Matrix<double, R, C> fixed_at(const Field& f, int node) {
  Eigen::Matrix<double, R, C> m;
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c) m(r, c) = f.data()(r * C + c, node);
  return m;
}

template <typename M>
void put_at(Field& f, int node, const M& m) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) f.data()(r * m.cols() + c, node) = m(r, c);
}

inline Mat4 J4() { return symplectic_J(); }

}  // namespace detail

/// Pointwise algebra of the linearized invariance equation along u.
struct LinAlgebra {
  Field Du;     // 4x2
  Field A;      // 4x4, J Hess H(u)
  Field N;      // 2x2, (Du^t Du)^{-1}
  Field M;      // 4x4, [Du, J Du N]
  Field M_inv;  // 4x4
  Field L;      // 2x2, Du^t J Du
  Field S;      // 2x2
  Field E;      // 4x1, F(H, u)
  Field DE;     // 4x2
  double max_condition = 1.0;
};

inline LinAlgebra linearization(const Hamiltonian& H, const Embedding& u, double cond_bound = 1e6) {
  const auto& disc = u.disc();
  LinAlgebra la;
  la.Du = u.Du();
  la.E = invariance_residual(H, u);
  la.DE = Field::hstack(la.E.dx(), la.E.dy());
  const JetField jets = hamiltonian_jets(H, u);
  la.A = Field(disc, 4, 4);
  la.N = Field(disc, 2, 2);
  la.M = Field(disc, 4, 4);
  la.M_inv = Field(disc, 4, 4);
  la.L = Field(disc, 2, 2);
  la.S = Field(disc, 2, 2);
  const Mat4 J = detail::J4();
  const Mat2 I2 = Mat2::Identity();
  for (int k = 0; k < disc->n_nodes(); ++k) {
    const Mat42 Du = detail::fixed_at<4, 2>(la.Du, k);
    const Mat4 A = J * detail::fixed_at<4, 4>(jets.hess, k);
    const Mat2 G = Du.transpose() * Du;
    Eigen::SelfAdjointEigenSolver<Mat2> es(G, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(1);
    const double cond = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
    la.max_condition = std::max(la.max_condition, cond);
    if (!(cond <= cond_bound))
      throw Error(ErrorCode::IllConditioned, "Du^t Du has condition number " + std::to_string(cond));
    const Mat2 N = G.inverse();
    // antisymmetric by construction
    Mat2 L = Mat2::Zero();
    L(0, 1) = Du.col(0).dot(J * Du.col(1));
    L(1, 0) = -L(0, 1);
    Mat4 M;
    M.leftCols<2>() = Du;
    M.rightCols<2>() = J * Du * N;
    const Mat4 comm = A * J - J * A;
    const Mat2 NL = N * L;
    const Mat2 S = (I2 + NL * NL).inverse() * N * Du.transpose() * comm * Du * N;
    detail::put_at(la.A, k, A);
    detail::put_at(la.N, k, N);
    detail::put_at(la.L, k, L);
    detail::put_at(la.M, k, M);
    detail::put_at(la.M_inv, k, M.inverse());
    detail::put_at(la.S, k, S);
  }
  return la;
}

/// The B operator as a 4x4 matrix field [B1 | B2] acting on v = (v1, v2).
/// B1 = DE; B2 = Du (P - S) + J Du N Q with the 2x2 P, Q obtained by
/// expanding the second block of A M - X_xi M in the frame M.
struct BOperator {
  Field B1, B2, P, Q;
  Field matrix() const { return Field::hstack(B1, B2); }
};

inline BOperator assemble_B(const LinAlgebra& la, const Direction& xi) {
  const auto& disc = la.Du.disc();
  const Field XN = la.N.lie(xi);
  BOperator b{la.DE, Field(disc, 4, 2), Field(disc, 2, 2), Field(disc, 2, 2)};
  const Mat4 J = detail::J4();
  const Mat2 I2 = Mat2::Identity();
  for (int k = 0; k < disc->n_nodes(); ++k) {
    const Mat42 Du = detail::fixed_at<4, 2>(la.Du, k);
    const Mat42 DE = detail::fixed_at<4, 2>(la.DE, k);
    const Mat4 A = detail::fixed_at<4, 4>(la.A, k);
    const Mat2 N = detail::fixed_at<2, 2>(la.N, k);
    const Mat2 L = detail::fixed_at<2, 2>(la.L, k);
    const Mat2 S = detail::fixed_at<2, 2>(la.S, k);
    const Mat2 xN = detail::fixed_at<2, 2>(XN, k);
    const Mat4 comm = A * J - J * A;
    const Mat2 R1 = -DE.transpose() * Du * N;
    const Mat2 R2 = N * Du.transpose() * comm * Du * N + N * Du.transpose() * J * DE * N - N * L * xN;
    const Mat2 NL = N * L, LN = L * N;
    const Mat2 P = (I2 + NL * NL).inverse() * (R2 + N * L * N * DE.transpose() * Du * N);
    const Mat2 Q = (I2 + LN * LN).inverse() * (R1 + L * R2);
    const Mat42 B2 = Du * (P - S) + J * Du * N * Q;
    detail::put_at(b.P, k, P);
    detail::put_at(b.Q, k, Q);
    detail::put_at(b.B2, k, B2);
  }
  return b;
}

/// Second block of B from the unexpanded expression
/// [A, J] Du N + J DE N - J Du X_xi N - Du S.
inline Field B2_direct(const LinAlgebra& la, const Direction& xi) {
  const Field J = Field::constant(la.Du.disc(), symplectic_J());
  const Field comm = matmul(la.A, J) - matmul(J, la.A);
  const Field JDu = matmul(J, la.Du);
  return matmul(matmul(comm, la.Du), la.N) + matmul(matmul(J, la.DE), la.N) - matmul(JDu, la.N.lie(xi)) -
         matmul(la.Du, la.S);
}

/// Z = [[0, S], [0, 0]].
inline Field Z_matrix(const LinAlgebra& la) {
  Field Z(la.S.disc(), 4, 4);
  Z.set_block(0, 2, la.S);
  return Z;
}

/// M Z v - M X_xi v + B v.
inline Field linearization_rhs(const LinAlgebra& la, const BOperator& B, const Direction& xi, const Field& v) {
  return matmul(la.M, matmul(Z_matrix(la), v)) - matmul(la.M, v.lie(xi)) + matmul(B.matrix(), v);
}

inline double relative_l2(const Field& a, const Field& b) {
  const double nb = b.l2();
  const double d = (a - b).l2();
  if (nb == 0.0) return d;
  return d / nb;
}

/// Compares a central difference of F along M v with the assembled right side.
inline double check_linearization_identity(const Hamiltonian& H, const Embedding& u, const Field& v, double h = 1e-5) {
  if (h < 1e-6 || h > 1e-4) throw Error(ErrorCode::ConfigError, "finite difference step must lie in [1e-6, 1e-4]");
  const LinAlgebra la = linearization(H, u);
  const BOperator B = assemble_B(la, u.xi);
  const Field Mv = matmul(la.M, v);
  const Field lhs = (1.0 / (2.0 * h)) * (invariance_residual(H, u.displaced(Mv, h)) -
                                         invariance_residual(H, u.displaced(Mv, -h)));
  const Field rhs = linearization_rhs(la, B, u.xi, v);
  return relative_l2(lhs, rhs);
}

/// sup |X_xi L + DF^t J Du + Du^t J DF|.
inline double lagrangian_identity_residual(const Hamiltonian& H, const Embedding& u) {
  const LinAlgebra la = linearization(H, u);
  const Field J = Field::constant(u.disc(), symplectic_J());
  const Field rhs = matmul(matmul(la.DE.transpose(), J), la.Du) + matmul(matmul(la.Du.transpose(), J), la.DE);
  return (la.L.lie(u.xi) + rhs).sup();
}

}  // namespace parasurf

#endif  // PARASURF_DYNAMICS_LINEARIZATION_HPP
