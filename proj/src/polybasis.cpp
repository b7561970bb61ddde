#include "egadv/polybasis.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace egadv {
namespace {

constexpr std::array<std::array<int, 2>, 6> kMonomialPowers{
    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void monomials(const Point& xi, int n, Eigen::VectorXd& v, Eigen::MatrixX2d& g) {
  const double x = xi.x(), y = xi.y();
  const double val[6] = {1.0, x, y, x * x, x * y, y * y};
  const double dx[6] = {0.0, 1.0, 0.0, 2.0 * x, y, 0.0};
  const double dy[6] = {0.0, 0.0, 1.0, 0.0, x, 2.0 * y};
  v.resize(n);
  g.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    v[i] = val[i];
    g(i, 0) = dx[i];
    g(i, 1) = dy[i];
  }
}

// Gram-Schmidt against the exact reference inner product.
Eigen::MatrixXd orthonormal_monomials(int degree) {
  const int n = poly_dim(degree);
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gram(i, j) = reference_monomial_integral(kMonomialPowers[i][0] + kMonomialPowers[j][0],
                                               kMonomialPowers[i][1] + kMonomialPowers[j][1]);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd ci = Eigen::VectorXd::Unit(n, i);
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < i; ++j) {
        const double proj = c.row(j).dot(gram * ci);
        ci -= proj * c.row(j).transpose();
      }
    }
    ci /= std::sqrt(ci.dot(gram * ci));
    c.row(i) = ci.transpose();
  }
  return c;
}

}  // namespace

double reference_monomial_integral(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

ReferenceBasis::ReferenceBasis(BasisKind kind, int degree) : kind_(kind), degree_(degree) {
  if (kind == BasisKind::modal) {
    if (degree < 0 || degree > kMaxDegree)
      throw std::invalid_argument("modal basis degree " + std::to_string(degree) + " unsupported");
    modal_coeffs_ = orthonormal_monomials(degree);
  } else {
    if (degree < 1 || degree > kMaxDegree)
      throw std::invalid_argument("lagrange basis degree " + std::to_string(degree) +
                                  " unsupported");
    nodes_ = {Point(0, 0), Point(1, 0), Point(0, 1)};
    if (degree == 2) {
      nodes_.emplace_back(0.5, 0.0);
      nodes_.emplace_back(0.5, 0.5);
      nodes_.emplace_back(0.0, 0.5);
    }
  }
}

Eigen::VectorXd ReferenceBasis::eval(const Point& xi) const {
  const int n = size();
  if (kind_ == BasisKind::modal) {
    Eigen::VectorXd m;
    Eigen::MatrixX2d g;
    monomials(xi, n, m, g);
    return modal_coeffs_ * m;
  }
  const double l1 = xi.x(), l2 = xi.y(), l0 = 1.0 - l1 - l2;
  Eigen::VectorXd v(n);
  if (degree_ == 1) {
    v << l0, l1, l2;
  } else {
    v << l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), 4 * l0 * l1, 4 * l1 * l2,
        4 * l2 * l0;
  }
  return v;
}

Eigen::MatrixX2d ReferenceBasis::eval_grad(const Point& xi) const {
  const int n = size();
  if (kind_ == BasisKind::modal) {
    Eigen::VectorXd m;
    Eigen::MatrixX2d g;
    monomials(xi, n, m, g);
    return modal_coeffs_ * g;
  }
  const double l1 = xi.x(), l2 = xi.y(), l0 = 1.0 - l1 - l2;
  // d(l0) = (-1,-1), d(l1) = (1,0), d(l2) = (0,1)
  const Eigen::RowVector2d d0(-1, -1), d1(1, 0), d2(0, 1);
  Eigen::MatrixX2d g(n, 2);
  if (degree_ == 1) {
    g.row(0) = d0;
    g.row(1) = d1;
    g.row(2) = d2;
  } else {
    g.row(0) = (4 * l0 - 1) * d0;
    g.row(1) = (4 * l1 - 1) * d1;
    g.row(2) = (4 * l2 - 1) * d2;
    g.row(3) = 4 * (l1 * d0 + l0 * d1);
    g.row(4) = 4 * (l2 * d1 + l1 * d2);
    g.row(5) = 4 * (l0 * d2 + l2 * d0);
  }
  return g;
}

Eigen::MatrixXd ReferenceBasis::tabulate(const QuadratureRule& rule) const {
  Eigen::MatrixXd t(static_cast<Eigen::Index>(rule.size()), size());
  for (std::size_t q = 0; q < rule.size(); ++q)
    t.row(static_cast<Eigen::Index>(q)) = eval(rule.points[q]).transpose();
  return t;
}

const ReferenceBasis& modal_basis(int degree) {
  static const std::array<ReferenceBasis, kMaxDegree + 1> bases{
      ReferenceBasis(BasisKind::modal, 0), ReferenceBasis(BasisKind::modal, 1),
      ReferenceBasis(BasisKind::modal, 2)};
  if (degree < 0 || degree > kMaxDegree)
    throw std::invalid_argument("modal basis degree " + std::to_string(degree) + " unsupported");
  return bases[static_cast<std::size_t>(degree)];
}

const ReferenceBasis& lagrange_basis(int degree) {
  static const std::array<ReferenceBasis, kMaxDegree> bases{
      ReferenceBasis(BasisKind::lagrange, 1), ReferenceBasis(BasisKind::lagrange, 2)};
  if (degree < 1 || degree > kMaxDegree)
    throw std::invalid_argument("lagrange basis degree " + std::to_string(degree) +
                                " unsupported");
  return bases[static_cast<std::size_t>(degree - 1)];
}

}  // namespace egadv
