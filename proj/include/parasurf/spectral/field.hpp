#ifndef PARASURF_SPECTRAL_FIELD_HPP
#define PARASURF_SPECTRAL_FIELD_HPP

#include <functional>
#include <string>

#include "parasurf/spectral/discretization.hpp"

namespace parasurf {

/// Matrix-valued function sampled on a Discretization. Storage is
/// component-major: row r*cols + c of data() holds entry (r, c) at every node.
class Field {
 public:
  using Data = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Field() = default;
  Field(DiscPtr disc, int rows, int cols = 1) : disc_(std::move(disc)), rows_(rows), cols_(cols) {
    data_.setZero(rows * cols, disc_->n_nodes());
  }

  static Field scalar(DiscPtr disc, const Vec& values) {
    Field f(std::move(disc), 1, 1);
    if (values.size() != f.n_nodes()) throw Error(ErrorCode::ShapeMismatch, "scalar field size");
    f.data_.row(0) = values.transpose();
    return f;
  }

  static Field constant(DiscPtr disc, const Mat& m) {
    Field f(std::move(disc), static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int r = 0; r < f.rows_; ++r)
      for (int c = 0; c < f.cols_; ++c) f.data_.row(r * f.cols_ + c).setConstant(m(r, c));
    return f;
  }

  static Field from_function(DiscPtr disc, int rows, int cols, const std::function<Mat(const SurfacePoint&)>& fn) {
    Field f(std::move(disc), rows, cols);
    for (int k = 0; k < f.n_nodes(); ++k) f.set_at(k, fn(f.disc_->node_point(k)));
    return f;
  }

  const DiscPtr& disc() const { return disc_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int n_components() const { return rows_ * cols_; }
  int n_nodes() const { return static_cast<int>(data_.cols()); }
  Data& data() { return data_; }
  const Data& data() const { return data_; }

  Vec comp(int r, int c = 0) const { return data_.row(r * cols_ + c).transpose(); }
  void set_comp(int r, int c, const Vec& v) { data_.row(r * cols_ + c) = v.transpose(); }

  Mat at(int node) const {
    Mat m(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) m(r, c) = data_(r * cols_ + c, node);
    return m;
  }
  void set_at(int node, const Mat& m) {
    if (m.rows() != rows_ || m.cols() != cols_) throw Error(ErrorCode::ShapeMismatch, "set_at shape");
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) data_(r * cols_ + c, node) = m(r, c);
  }

  Field block(int r0, int c0, int nr, int nc) const {
    if (r0 < 0 || c0 < 0 || r0 + nr > rows_ || c0 + nc > cols_) throw Error(ErrorCode::ShapeMismatch, "block");
    Field out(disc_, nr, nc);
    for (int r = 0; r < nr; ++r)
      for (int c = 0; c < nc; ++c) out.data_.row(r * nc + c) = data_.row((r0 + r) * cols_ + c0 + c);
    return out;
  }
  void set_block(int r0, int c0, const Field& b) {
    if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) throw Error(ErrorCode::ShapeMismatch, "set_block");
    for (int r = 0; r < b.rows_; ++r)
      for (int c = 0; c < b.cols_; ++c) data_.row((r0 + r) * cols_ + c0 + c) = b.data_.row(r * b.cols_ + c);
  }

  static Field vstack(const Field& a, const Field& b) {
    if (a.cols_ != b.cols_) throw Error(ErrorCode::ShapeMismatch, "vstack");
    Field out(a.disc_, a.rows_ + b.rows_, a.cols_);
    out.set_block(0, 0, a);
    out.set_block(a.rows_, 0, b);
    return out;
  }
  static Field hstack(const Field& a, const Field& b) {
    if (a.rows_ != b.rows_) throw Error(ErrorCode::ShapeMismatch, "hstack");
    Field out(a.disc_, a.rows_, a.cols_ + b.cols_);
    out.set_block(0, 0, a);
    out.set_block(0, a.cols_, b);
    return out;
  }

  Field transpose() const {
    Field out(disc_, cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) out.data_.row(c * rows_ + r) = data_.row(r * cols_ + c);
    return out;
  }

  /// Applies a scalar linear map to every component.
  Field apply(const std::function<Vec(const Vec&)>& op) const {
    Field out(disc_, rows_, cols_);
    for (int q = 0; q < n_components(); ++q) out.data_.row(q) = op(data_.row(q).transpose()).transpose();
    return out;
  }
  Field dx() const { return apply([this](const Vec& v) { return disc_->dx(v); }); }
  Field dy() const { return apply([this](const Vec& v) { return disc_->dy(v); }); }
  Field lie(const Direction& d) const { return apply([&](const Vec& v) { return disc_->lie(v, d); }); }
  Field dealias() const { return apply([this](const Vec& v) { return disc_->dealias(v); }); }

  /// Area average of each entry.
  Mat mean() const {
    Mat m(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) m(r, c) = data_.row(r * cols_ + c).mean();
    return m;
  }
  double l2() const { return std::sqrt(disc_->cell_area() * data_.squaredNorm()); }
  double sup() const { return data_.size() ? data_.cwiseAbs().maxCoeff() : 0.0; }

  Field& operator+=(const Field& o) {
    check_same(o, "+=");
    data_ += o.data_;
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o, "-=");
    data_ -= o.data_;
    return *this;
  }
  Field& operator*=(double s) {
    data_ *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator-(Field a) {
    a.data_ = -a.data_;
    return a;
  }

  void check_same(const Field& o, const char* what) const {
    if (rows_ != o.rows_ || cols_ != o.cols_ || n_nodes() != o.n_nodes())
      throw Error(ErrorCode::ShapeMismatch, std::string(what) + ": " + shape_str() + " vs " + o.shape_str());
  }
  std::string shape_str() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  DiscPtr disc_;
  int rows_ = 0;
  int cols_ = 0;
  Data data_;
};

/// Pointwise matrix product a(x) b(x); a 1x1 factor acts as a scalar.
inline Field matmul(const Field& a, const Field& b) {
  if (a.rows() == 1 && a.cols() == 1 && !(b.rows() == 1 && b.cols() == 1)) {
    Field out = b;
    for (int q = 0; q < out.n_components(); ++q) out.data().row(q) = out.data().row(q).cwiseProduct(a.data().row(0));
    return out;
  }
  if (a.cols() != b.rows() || a.n_nodes() != b.n_nodes())
    throw Error(ErrorCode::ShapeMismatch, "matmul " + a.shape_str() + " * " + b.shape_str());
  Field out(a.disc(), a.rows(), b.cols());
  const int L = a.cols(), C = b.cols();
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < C; ++c)
      for (int l = 0; l < L; ++l)
        out.data().row(r * C + c) += a.data().row(r * L + l).cwiseProduct(b.data().row(l * C + c));
  return out;
}

inline Field matmul(const Mat& a, const Field& b) { return matmul(Field::constant(b.disc(), a), b); }
inline Field matmul(const Field& a, const Mat& b) { return matmul(a, Field::constant(a.disc(), b)); }

inline Field pointwise_inverse(const Field& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::ShapeMismatch, "inverse of non-square field");
  Field out(a.disc(), a.rows(), a.cols());
  for (int k = 0; k < a.n_nodes(); ++k) out.set_at(k, a.at(k).inverse());
  return out;
}

inline Mat identity(int n) { return Mat::Identity(n, n); }

/// The standard symplectic matrix [[0, I], [-I, 0]].
inline Mat symplectic_J() {
  Mat J = Mat::Zero(4, 4);
  J.block(0, 2, 2, 2) = identity(2);
  J.block(2, 0, 2, 2) = -identity(2);
  return J;
}

}  // namespace parasurf

#endif  // PARASURF_SPECTRAL_FIELD_HPP
