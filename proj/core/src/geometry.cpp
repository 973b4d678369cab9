#include "wickfield/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wickfield {

ComplexPoint complexify(const Point& x) {
  ComplexPoint z(x.size());
  for (int i = 0; i < x.size(); ++i) z[i] = x[i];
  return z;
}

Point real_part(const ComplexPoint& z) {
  Point x(z.size());
  for (int i = 0; i < z.size(); ++i) x[i] = z[i].real();
  return x;
}

Point imag_part(const ComplexPoint& z) {
  Point x(z.size());
  for (int i = 0; i < z.size(); ++i) x[i] = z[i].imag();
  return x;
}

ComplexPoint conj(const ComplexPoint& z) {
  ComplexPoint w(z.size());
  for (int i = 0; i < z.size(); ++i) w[i] = std::conj(z[i]);
  return w;
}

Complex bilinear_dot(const ComplexPoint& a, const ComplexPoint& b) {
  if (a.size() != b.size()) throw ValidationError("bilinear_dot: dimension mismatch");
  Complex s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dot(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw ValidationError("dot: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double distance(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw ValidationError("distance: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double max_abs_diff(const ComplexPoint& a, const ComplexPoint& b) {
  if (a.size() != b.size()) throw ValidationError("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool lex_less(const ComplexPoint& a, const ComplexPoint& b) {
  auto key_less = [](const Complex& u, const Complex& v) {
    if (u.real() != v.real()) return u.real() < v.real();
    return u.imag() < v.imag();
  };
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), key_less);
}

// ---------------------------------------------------------------------------
// Space and Window

Space Space::euclidean(int d) {
  Space s{Kind::Euclidean, d, 1.0};
  s.validate();
  return s;
}

Space Space::sphere(int d, double radius) {
  Space s{Kind::Sphere, d, radius};
  s.validate();
  return s;
}

void Space::validate() const {
  if (dim < 1) throw ValidationError("space: dim must be >= 1");
  if (ambient_dim() > kMaxAmbientDim) throw ValidationError("space: dimension exceeds supported ambient size");
  if (is_sphere() && !(radius > 0.0 && std::isfinite(radius)))
    throw ValidationError("space: sphere radius must be positive");
}

bool Space::on_space(const Point& x) const {
  if (x.size() != ambient_dim()) return false;
  if (!is_sphere()) return true;
  const double r2 = radius * radius;
  return std::abs(dot(x, x) - r2) <= 1e-12 * r2;
}

Window Window::box(std::vector<Interval> bounds) {
  if (bounds.empty()) throw ValidationError("window: box needs at least one axis");
  for (const auto& iv : bounds) {
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw ValidationError("window: each axis needs a < b");
  }
  Window w;
  w.space_ = Space::euclidean(static_cast<int>(bounds.size()));
  w.bounds_ = std::move(bounds);
  return w;
}

Window Window::whole_sphere(const Space& sphere) {
  if (!sphere.is_sphere()) throw ValidationError("window: whole_sphere needs a sphere space");
  sphere.validate();
  Window w;
  w.space_ = sphere;
  return w;
}

double Window::volume() const {
  if (space_.is_sphere()) {
    const double d = space_.dim;
    return 2.0 * std::pow(std::numbers::pi, (d + 1.0) / 2.0) * std::pow(space_.radius, d) /
           std::tgamma((d + 1.0) / 2.0);
  }
  double v = 1.0;
  for (const auto& iv : bounds_) v *= iv.length();
  return v;
}

bool Window::contains(const Point& x) const {
  if (space_.is_sphere()) return space_.on_space(x);
  if (x.size() != static_cast<int>(bounds_.size())) return false;
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] < bounds_[i].lo || x[i] > bounds_[i].hi) return false;
  }
  return true;
}

Point Window::center() const {
  if (space_.is_sphere()) {
    Point p(space_.ambient_dim());
    p[space_.ambient_dim() - 1] = space_.radius;
    return p;
  }
  Point p(static_cast<int>(bounds_.size()));
  for (std::size_t i = 0; i < bounds_.size(); ++i) p[static_cast<int>(i)] = 0.5 * (bounds_[i].lo + bounds_[i].hi);
  return p;
}

Point Window::sample_uniform(std::mt19937_64& rng) const {
  if (space_.is_sphere()) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = space_.ambient_dim();
    Point p(n);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int i = 0; i < n; ++i) {
        p[i] = normal(rng);
        norm2 += p[i] * p[i];
      }
    } while (norm2 < 1e-24);
    const double scale = space_.radius / std::sqrt(norm2);
    for (int i = 0; i < n; ++i) p[i] *= scale;
    return p;
  }
  Point p(static_cast<int>(bounds_.size()));
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    std::uniform_real_distribution<double> u(bounds_[i].lo, bounds_[i].hi);
    p[static_cast<int>(i)] = u(rng);
  }
  return p;
}

double Window::distance_to_boundary(const Point& x) const {
  if (space_.is_sphere()) return std::numeric_limits<double>::infinity();
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x.size(); ++i) d = std::min({d, x[i] - bounds_[i].lo, bounds_[i].hi - x[i]});
  return d;
}

Window Window::padded(double r) const {
  if (space_.is_sphere()) return *this;
  auto b = bounds_;
  for (auto& iv : b) {
    iv.lo -= r;
    iv.hi += r;
  }
  return box(std::move(b));
}

Window Window::inset(double r) const { return padded(-r); }

// ---------------------------------------------------------------------------
// Matrices and group elements

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m;
  m.n = n;
  for (int i = 0; i < n; ++i) m.a[i][i] = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& o) const {
  if (n != o.n) throw ValidationError("matrix product: dimension mismatch");
  ComplexMatrix r;
  r.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (int k = 0; k < n; ++k) s += a[i][k] * o.a[k][j];
      r.a[i][j] = s;
    }
  return r;
}

ComplexPoint ComplexMatrix::operator*(const ComplexPoint& z) const {
  if (n != z.size()) throw ValidationError("matrix action: dimension mismatch");
  ComplexPoint w(n);
  for (int i = 0; i < n; ++i) {
    Complex s = 0.0;
    for (int k = 0; k < n; ++k) s += a[i][k] * z[k];
    w[i] = s;
  }
  return w;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix t;
  t.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t.a[i][j] = a[j][i];
  return t;
}

bool ComplexMatrix::is_real(double tol) const {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(a[i][j].imag()) > tol) return false;
  return true;
}

double ComplexMatrix::orthogonality_defect() const {
  const ComplexMatrix p = transpose() * (*this);
  return p.max_abs_diff(identity(n));
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& o) const {
  if (n != o.n) throw ValidationError("matrix compare: dimension mismatch");
  double m = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m = std::max(m, std::abs(a[i][j] - o.a[i][j]));
  return m;
}

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxAmbientDim) throw ValidationError("group element: unsupported dimension");
}

}  // namespace

GroupElement GroupElement::identity(int dim) {
  check_dim(dim);
  GroupElement g;
  g.kind_ = Kind::EuclideanIsometry;
  g.m_ = ComplexMatrix::identity(dim);
  g.shift_ = ComplexPoint(dim);
  return g;
}

GroupElement GroupElement::isometry(const ComplexMatrix& orthogonal, const Point& shift) {
  check_dim(orthogonal.n);
  if (shift.size() != orthogonal.n) throw ValidationError("isometry: dimension mismatch");
  if (!orthogonal.is_real()) throw ValidationError("isometry: matrix must be real");
  if (orthogonal.orthogonality_defect() > 1e-12) throw ValidationError("isometry: matrix is not orthogonal");
  GroupElement g;
  g.kind_ = Kind::EuclideanIsometry;
  g.m_ = orthogonal;
  g.shift_ = complexify(shift);
  return g;
}

GroupElement GroupElement::translation(const Point& shift) {
  return isometry(ComplexMatrix::identity(shift.size()), shift);
}

GroupElement GroupElement::rotation(int dim, int i, int j, double angle) {
  check_dim(dim);
  if (i < 0 || j < 0 || i >= dim || j >= dim || i == j) throw ValidationError("rotation: bad plane indices");
  ComplexMatrix m = ComplexMatrix::identity(dim);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  m(i, i) = c;
  m(i, j) = -s;
  m(j, i) = s;
  m(j, j) = c;
  return isometry(m, Point(dim));
}

GroupElement GroupElement::complex_orthogonal(const ComplexMatrix& m, const ComplexPoint& shift) {
  check_dim(m.n);
  if (shift.size() != m.n) throw ValidationError("complex orthogonal: dimension mismatch");
  if (m.orthogonality_defect() > 1e-12) throw ValidationError("complex orthogonal: M^T M != 1");
  GroupElement g;
  g.kind_ = Kind::ComplexOrthogonal;
  g.m_ = m;
  g.shift_ = shift;
  return g;
}

GroupElement GroupElement::lorentz_boost(double chi, int dim) {
  check_dim(dim);
  if (dim < 2) throw ValidationError("lorentz boost: needs at least two coordinates");
  if (!std::isfinite(chi)) throw ValidationError("lorentz boost: rapidity must be finite");
  const Complex i(0.0, 1.0);
  ComplexMatrix m = ComplexMatrix::identity(dim);
  m(0, 0) = std::cosh(chi);
  m(0, 1) = i * std::sinh(chi);
  m(1, 0) = -i * std::sinh(chi);
  m(1, 1) = std::cosh(chi);
  GroupElement g;
  g.kind_ = Kind::LorentzBoost;
  g.m_ = m;
  g.shift_ = ComplexPoint(dim);
  g.rapidity_ = chi;
  return g;
}

GroupElement GroupElement::time_reflection(int dim) {
  check_dim(dim);
  GroupElement g;
  g.kind_ = Kind::TimeReflection;
  g.m_ = ComplexMatrix::identity(dim);
  g.m_(0, 0) = -1.0;
  g.shift_ = ComplexPoint(dim);
  return g;
}

GroupElement GroupElement::random_isometry(int dim, double max_shift, bool allow_reflection, std::mt19937_64& rng) {
  check_dim(dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Gram-Schmidt on a Gaussian matrix gives a Haar-distributed orthogonal matrix.
  std::array<std::array<double, kMaxAmbientDim>, kMaxAmbientDim> q{};
  for (int col = 0; col < dim; ++col) {
    double norm = 0.0;
    do {
      for (int r = 0; r < dim; ++r) q[col][r] = normal(rng);
      for (int prev = 0; prev < col; ++prev) {
        double proj = 0.0;
        for (int r = 0; r < dim; ++r) proj += q[col][r] * q[prev][r];
        for (int r = 0; r < dim; ++r) q[col][r] -= proj * q[prev][r];
      }
      norm = 0.0;
      for (int r = 0; r < dim; ++r) norm += q[col][r] * q[col][r];
      norm = std::sqrt(norm);
    } while (norm < 1e-8);
    for (int r = 0; r < dim; ++r) q[col][r] /= norm;
  }
  ComplexMatrix m;
  m.n = dim;
  for (int r = 0; r < dim; ++r)
    for (int col = 0; col < dim; ++col) m(r, col) = q[col][r];
  // determinant sign via the 3x3 (or smaller) formula
  auto det = [&]() {
    if (dim == 1) return m(0, 0).real();
    if (dim == 2) return (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
    return (m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
            m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)))
        .real();
  };
  if (!allow_reflection && det() < 0.0) {
    for (int r = 0; r < dim; ++r) m(r, 0) = -m(r, 0);
  }
  std::uniform_real_distribution<double> u(-max_shift, max_shift);
  Point shift(dim);
  for (int r = 0; r < dim; ++r) shift[r] = max_shift > 0.0 ? u(rng) : 0.0;
  return isometry(m, shift);
}

GroupElement GroupElement::compose(const GroupElement& other) const {
  if (dim() != other.dim()) throw ValidationError("compose: dimension mismatch");
  GroupElement g;
  g.m_ = m_ * other.m_;
  ComplexPoint s = m_ * other.shift_;
  for (int i = 0; i < dim(); ++i) s[i] += shift_[i];
  g.shift_ = s;
  const bool real = is_real() && other.is_real();
  g.kind_ = real ? Kind::EuclideanIsometry : Kind::ComplexOrthogonal;
  return g;
}

GroupElement GroupElement::inverse() const {
  GroupElement g;
  g.m_ = m_.transpose();
  ComplexPoint s = g.m_ * shift_;
  for (int i = 0; i < dim(); ++i) s[i] = -s[i];
  g.shift_ = s;
  g.kind_ = kind_;
  g.rapidity_ = -rapidity_;
  return g;
}

GroupElement GroupElement::as_complex_orthogonal() const {
  GroupElement g = *this;
  g.kind_ = Kind::ComplexOrthogonal;
  return g;
}

bool GroupElement::is_real() const {
  if (!m_.is_real()) return false;
  for (int i = 0; i < shift_.size(); ++i)
    if (shift_[i].imag() != 0.0) return false;
  return true;
}

ComplexPoint GroupElement::apply(const ComplexPoint& z) const {
  if (z.size() != dim()) throw ValidationError("apply_group: dimension mismatch");
  ComplexPoint w = m_ * z;
  for (int i = 0; i < dim(); ++i) w[i] += shift_[i];
  return w;
}

Point GroupElement::apply_real(const Point& x) const {
  if (!is_real()) throw ValidationError("apply_real: element is not real");
  return real_part(apply(complexify(x)));
}

ComplexPoint apply_group(const GroupElement& g, const ComplexPoint& z) { return g.apply(z); }

Point minkowski_boost(double chi, const Point& y) {
  if (y.size() < 2) throw ValidationError("minkowski_boost: needs at least two coordinates");
  Point r = y;
  const double c = std::cosh(chi);
  const double s = std::sinh(chi);
  r[0] = c * y[0] + s * y[1];
  r[1] = s * y[0] + c * y[1];
  return r;
}

Point minkowski_time_reflection(const Point& y) {
  Point r = y;
  r[0] = -r[0];
  return r;
}

ComplexPoint wick_embed(const Point& y) {
  ComplexPoint z = complexify(y);
  if (y.size() >= 1) z[0] = Complex(0.0, y[0]);
  return z;
}

ComplexPoint wick_embed_de_sitter(double t, double radius, int d) {
  if (d != 1) throw ValidationError("wick_embed_de_sitter: only d = 1 is supported");
  if (!(radius > 0.0)) throw ValidationError("wick_embed_de_sitter: radius must be positive");
  return ComplexPoint{Complex(0.0, radius * std::sinh(t)), Complex(radius * std::cosh(t), 0.0)};
}

GroupElement boost_as_complex_rotation(double chi, int dim) { return GroupElement::lorentz_boost(chi, dim); }

}  // namespace wickfield
