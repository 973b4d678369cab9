#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include "wickfield/errors.hpp"

namespace wickfield {

/// Largest ambient coordinate count supported (the 2-sphere lives in R^3).
inline constexpr int kMaxAmbientDim = 3;

using Complex = std::complex<double>;

/// Fixed-capacity coordinate tuple. Unused slots stay zero so that
/// defaulted comparison is exact.
template <class T>
struct Coords {
  std::array<T, kMaxAmbientDim> c{};
  int n = 0;

  Coords() = default;
  explicit Coords(int size) : n(size) {
    if (size < 0 || size > kMaxAmbientDim) throw ValidationError("coordinate count out of range");
  }
  Coords(std::initializer_list<T> values) : n(static_cast<int>(values.size())) {
    if (n > kMaxAmbientDim) throw ValidationError("coordinate count out of range");
    int i = 0;
    for (const T& v : values) c[i++] = v;
  }

  int size() const { return n; }
  T& operator[](int i) { return c[i]; }
  const T& operator[](int i) const { return c[i]; }
  T* begin() { return c.data(); }
  T* end() { return c.data() + n; }
  const T* begin() const { return c.data(); }
  const T* end() const { return c.data() + n; }

  bool operator==(const Coords&) const = default;
};

using Point = Coords<double>;
using ComplexPoint = Coords<Complex>;

ComplexPoint complexify(const Point& x);
Point real_part(const ComplexPoint& z);
Point imag_part(const ComplexPoint& z);
ComplexPoint conj(const ComplexPoint& z);

/// Bilinear (not Hermitian) extension of the Euclidean dot product.
Complex bilinear_dot(const ComplexPoint& a, const ComplexPoint& b);
double dot(const Point& a, const Point& b);
double distance(const Point& a, const Point& b);
double max_abs_diff(const ComplexPoint& a, const ComplexPoint& b);

/// Lexicographic order on coordinates; used for canonical forms.
bool lex_less(const Point& a, const Point& b);
bool lex_less(const ComplexPoint& a, const ComplexPoint& b);

struct Space {
  enum class Kind { Euclidean, Sphere };

  Kind kind = Kind::Euclidean;
  int dim = 1;
  double radius = 1.0;  // only meaningful for spheres

  static Space euclidean(int d);
  static Space sphere(int d, double radius);

  bool is_sphere() const { return kind == Kind::Sphere; }
  int ambient_dim() const { return is_sphere() ? dim + 1 : dim; }
  void validate() const;
  /// Sphere points must satisfy x.x = R^2 to 1e-12 relative.
  bool on_space(const Point& x) const;

  bool operator==(const Space&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// A finite region of the space: an axis-aligned box in R^d or a whole sphere.
class Window {
 public:
  static Window box(std::vector<Interval> bounds);
  static Window whole_sphere(const Space& sphere);

  const Space& space() const { return space_; }
  bool is_box() const { return !space_.is_sphere(); }
  int dim() const { return space_.dim; }
  std::span<const Interval> bounds() const { return bounds_; }

  double volume() const;
  bool contains(const Point& x) const;
  Point center() const;
  Point sample_uniform(std::mt19937_64& rng) const;
  /// Distance from x to the complement of the box; +inf for spheres.
  double distance_to_boundary(const Point& x) const;

  Window padded(double r) const;
  Window inset(double r) const;

  bool operator==(const Window&) const = default;

 private:
  Space space_;
  std::vector<Interval> bounds_;
};

/// Small dense complex matrix acting on ambient coordinates.
struct ComplexMatrix {
  int n = 0;
  std::array<std::array<Complex, kMaxAmbientDim>, kMaxAmbientDim> a{};

  static ComplexMatrix identity(int n);
  Complex& operator()(int i, int j) { return a[i][j]; }
  const Complex& operator()(int i, int j) const { return a[i][j]; }

  ComplexMatrix operator*(const ComplexMatrix& o) const;
  ComplexPoint operator*(const ComplexPoint& z) const;
  ComplexMatrix transpose() const;
  bool is_real(double tol = 0.0) const;
  /// max |M^T M - 1|
  double orthogonality_defect() const;
  double max_abs_diff(const ComplexMatrix& o) const;
};

/// Affine holomorphic map z -> M z + c with M complex orthogonal. The kind
/// tag records where the element came from; the action is uniform.
class GroupElement {
 public:
  enum class Kind { EuclideanIsometry, ComplexOrthogonal, LorentzBoost, TimeReflection };

  static GroupElement identity(int dim);
  /// Real orthogonal O (given as a complex matrix with zero imaginary part) and real shift.
  static GroupElement isometry(const ComplexMatrix& orthogonal, const Point& shift);
  static GroupElement translation(const Point& shift);
  /// Rotation by `angle` in the (i, j) coordinate plane.
  static GroupElement rotation(int dim, int i, int j, double angle);
  static GroupElement complex_orthogonal(const ComplexMatrix& m, const ComplexPoint& shift);
  /// Boost of rapidity chi in the (0, 1) plane, acting on the complexified
  /// space so that it maps Wick-embedded points to Wick-embedded points.
  static GroupElement lorentz_boost(double chi, int dim);
  /// theta(y0, yhat) = (-y0, yhat).
  static GroupElement time_reflection(int dim);
  /// Uniformly random rotation (det +1) composed with a random reflection
  /// when `allow_reflection` and a random shift of size up to `max_shift`.
  static GroupElement random_isometry(int dim, double max_shift, bool allow_reflection, std::mt19937_64& rng);

  Kind kind() const { return kind_; }
  int dim() const { return m_.n; }
  double rapidity() const { return rapidity_; }
  const ComplexMatrix& matrix() const { return m_; }
  const ComplexPoint& shift() const { return shift_; }

  /// (*this) o other
  GroupElement compose(const GroupElement& other) const;
  GroupElement inverse() const;
  GroupElement as_complex_orthogonal() const;
  bool is_real() const;

  ComplexPoint apply(const ComplexPoint& z) const;
  /// Real action; only valid for real elements (isometries, reflections).
  Point apply_real(const Point& x) const;

 private:
  Kind kind_ = Kind::ComplexOrthogonal;
  ComplexMatrix m_;
  ComplexPoint shift_;
  double rapidity_ = 0.0;
};

ComplexPoint apply_group(const GroupElement& g, const ComplexPoint& z);

/// Real Lorentz boost on Minkowski coordinates (y0, y1, ...).
Point minkowski_boost(double chi, const Point& y);
/// Time reflection on Minkowski coordinates.
Point minkowski_time_reflection(const Point& y);

/// (y0, yhat) -> (i y0, yhat).
ComplexPoint wick_embed(const Point& y);
/// de Sitter slice of the complex circle of radius R (d = 1 only):
/// t -> (i R sinh t, R cosh t). `d` other than 1 is rejected.
ComplexPoint wick_embed_de_sitter(double t, double radius, int d = 1);

/// Complex rotation M with wick_embed(boost(y)) = M wick_embed(y).
GroupElement boost_as_complex_rotation(double chi, int dim);

}  // namespace wickfield
