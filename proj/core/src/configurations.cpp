#include "wickfield/configurations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wickfield {

Configuration::Configuration(std::vector<Point> points) : points_(std::move(points)) {}

Configuration::Configuration(std::vector<Point> points, std::vector<double> charges)
    : points_(std::move(points)), charges_(std::move(charges)) {
  if (!charges_.empty() && charges_.size() != points_.size())
    throw ValidationError("configuration: charges must parallel points");
  for (double s : charges_) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("configuration: charges must be positive");
  }
}

double Configuration::total_charge() const {
  if (charges_.empty()) return static_cast<double>(points_.size());
  return std::accumulate(charges_.begin(), charges_.end(), 0.0);
}

void Configuration::add(const Point& x, double charge) {
  if (!(charge > 0.0)) throw ValidationError("configuration: charges must be positive");
  if (charge != 1.0 && charges_.empty()) charges_.assign(points_.size(), 1.0);
  points_.push_back(x);
  if (!charges_.empty()) charges_.push_back(charge);
}

void Configuration::remove(std::size_t i) {
  if (i >= points_.size()) throw ValidationError("configuration: remove index out of range");
  points_[i] = points_.back();
  points_.pop_back();
  if (!charges_.empty()) {
    charges_[i] = charges_.back();
    charges_.pop_back();
  }
}

Configuration Configuration::operator+(const Configuration& other) const {
  Configuration r = *this;
  for (std::size_t i = 0; i < other.size(); ++i) r.add(other.point(i), other.charge(i));
  return r;
}

// ---------------------------------------------------------------------------

TestFunction TestFunction::zero(int ambient_dim) {
  TestFunction h;
  h.kind_ = Kind::Zero;
  h.support_.assign(ambient_dim, Interval{0.0, 0.0});
  return h;
}

TestFunction TestFunction::bump(const Point& center, const Point& half_widths, double amplitude) {
  if (center.size() != half_widths.size()) throw ValidationError("bump: dimension mismatch");
  if (!(amplitude >= 0.0)) throw ValidationError("bump: amplitude must be non-negative");
  TestFunction h;
  h.kind_ = Kind::Bump;
  h.center_ = center;
  h.half_widths_ = half_widths;
  h.amplitude_ = amplitude;
  for (int k = 0; k < center.size(); ++k) {
    if (!(half_widths[k] > 0.0)) throw ValidationError("bump: half widths must be positive");
    h.support_.push_back({center[k] - half_widths[k], center[k] + half_widths[k]});
  }
  return h;
}

TestFunction TestFunction::custom(Rule rule, std::vector<Interval> support) {
  TestFunction h;
  h.kind_ = Kind::Custom;
  h.rule_ = std::move(rule);
  h.support_ = std::move(support);
  return h;
}

double TestFunction::operator()(const Point& x) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Bump: {
      double v = amplitude_;
      for (int k = 0; k < x.size(); ++k) {
        const double u = (x[k] - center_[k]) / half_widths_[k];
        if (std::abs(u) >= 1.0) return 0.0;
        const double s = 1.0 - u * u;
        v *= s * s;
      }
      return v;
    }
    case Kind::Custom: {
      for (int k = 0; k < x.size() && k < static_cast<int>(support_.size()); ++k) {
        if (x[k] < support_[k].lo || x[k] > support_[k].hi) return 0.0;
      }
      return std::max(0.0, rule_(x));
    }
  }
  return 0.0;
}

TestFunction TestFunction::scaled(double t) const {
  if (!(t >= 0.0)) throw ValidationError("test function: scale must be non-negative");
  TestFunction h = *this;
  if (kind_ == Kind::Bump) {
    h.amplitude_ *= t;
  } else if (kind_ == Kind::Custom) {
    h.rule_ = [rule = rule_, t](const Point& x) { return t * rule(x); };
  }
  return h;
}

std::vector<double> TestFunction::breakpoints(int axis) const {
  if (kind_ == Kind::Zero || axis >= static_cast<int>(support_.size())) return {};
  std::vector<double> b{support_[axis].lo, support_[axis].hi};
  if (kind_ == Kind::Bump) b.insert(b.begin() + 1, center_[axis]);
  return b;
}

// ---------------------------------------------------------------------------

double pair(const Configuration& eta, const TestFunction& h) {
  double s = 0.0;
  for (std::size_t j = 0; j < eta.size(); ++j) s += eta.charge(j) * h(eta.point(j));
  return s;
}

namespace {

struct Mass {
  Point x;
  double charge;
};

std::vector<Mass> grouped_masses(const Configuration& eta) {
  std::vector<Mass> m;
  m.reserve(eta.size());
  for (std::size_t j = 0; j < eta.size(); ++j) m.push_back({eta.point(j), eta.charge(j)});
  std::sort(m.begin(), m.end(), [](const Mass& a, const Mass& b) { return lex_less(a.x, b.x); });
  std::vector<Mass> out;
  for (const auto& e : m) {
    if (!out.empty() && out.back().x == e.x) {
      out.back().charge += e.charge;
    } else {
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace

bool leq(const Configuration& eta, const Configuration& gamma) {
  const auto a = grouped_masses(eta);
  const auto b = grouped_masses(gamma);
  std::size_t j = 0;
  for (const auto& e : a) {
    while (j < b.size() && lex_less(b[j].x, e.x)) ++j;
    if (j == b.size() || !(b[j].x == e.x)) return false;
    if (e.charge > b[j].charge) return false;
  }
  return true;
}

Configuration sample_poisson(const Window& window, double intensity, std::mt19937_64& rng) {
  if (!(intensity >= 0.0)) throw ValidationError("sample_poisson: intensity must be non-negative");
  const double mean = intensity * window.volume();
  if (mean == 0.0) return {};
  std::poisson_distribution<long> count(mean);
  const long n = count(rng);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) pts.push_back(window.sample_uniform(rng));
  return Configuration(std::move(pts));
}

std::size_t count_in(const Configuration& eta, const Window& region) {
  std::size_t c = 0;
  for (const auto& x : eta.points()) c += region.contains(x) ? 1 : 0;
  return c;
}

Configuration canonical(const Configuration& eta) {
  std::vector<std::size_t> idx(eta.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (eta.point(a) == eta.point(b)) return eta.charge(a) < eta.charge(b);
    return lex_less(eta.point(a), eta.point(b));
  });
  std::vector<Point> pts;
  std::vector<double> ch;
  for (auto i : idx) {
    pts.push_back(eta.point(i));
    if (eta.has_charges()) ch.push_back(eta.charge(i));
  }
  return Configuration(std::move(pts), std::move(ch));
}

nlohmann::json to_json(const Configuration& eta) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& x : eta.points()) pts.push_back(std::vector<double>(x.begin(), x.end()));
  nlohmann::json j{{"points", pts}};
  if (eta.has_charges()) j["charges"] = std::vector<double>(eta.charges().begin(), eta.charges().end());
  return j;
}

Configuration configuration_from_json(const nlohmann::json& j) {
  std::vector<Point> pts;
  for (const auto& p : j.at("points")) {
    Point x(static_cast<int>(p.size()));
    for (int k = 0; k < x.size(); ++k) x[k] = p.at(k).get<double>();
    pts.push_back(x);
  }
  std::vector<double> ch;
  if (j.contains("charges")) ch = j.at("charges").get<std::vector<double>>();
  return Configuration(std::move(pts), std::move(ch));
}

}  // namespace wickfield
