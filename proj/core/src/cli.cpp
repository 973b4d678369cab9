#include "wickfield/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "wickfield/analysis.hpp"
#include "wickfield/stats.hpp"

namespace wickfield {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

template <class T>
T get_or(const json& sec, const std::string& section, const std::string& key, T fallback) {
  if (!sec.contains(key)) return fallback;
  try {
    return sec.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(section + "." + key + ": wrong type");
  }
}

void check_keys(const json& sec, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!sec.is_object()) throw ValidationError(section + ": must be an object");
  for (const auto& [key, _] : sec.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(section + "." + key + ": unknown key");
  }
}

Point parse_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || j.size() > kMaxAmbientDim) throw ValidationError(where + ": expected 1-3 numbers");
  Point p(static_cast<int>(j.size()));
  for (int a = 0; a < p.size(); ++a) {
    if (!j[a].is_number()) throw ValidationError(where + ": expected numbers");
    p[a] = j[a].get<double>();
  }
  return p;
}

ComplexPoint parse_complex_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || j.size() > kMaxAmbientDim) throw ValidationError(where + ": expected 1-3 coordinates");
  ComplexPoint z(static_cast<int>(j.size()));
  for (int a = 0; a < z.size(); ++a) {
    const json& c = j[a];
    if (c.is_number()) {
      z[a] = c.get<double>();
    } else if (c.is_object()) {
      z[a] = Complex(get_or<double>(c, where, "re", 0.0), get_or<double>(c, where, "im", 0.0));
    } else {
      throw ValidationError(where + ": coordinates must be numbers or {re, im}");
    }
  }
  return z;
}

json point_to_json(const Point& p) { return std::vector<double>(p.begin(), p.end()); }

LaplaceSpec parse_laplace(const json& j, const std::string& where) {
  check_keys(j, where, {"center", "half_widths", "amplitude"});
  LaplaceSpec s;
  s.center = parse_point(j.at("center"), where + ".center");
  s.half_widths = parse_point(j.at("half_widths"), where + ".half_widths");
  s.amplitude = get_or<double>(j, where, "amplitude", 1.0);
  if (s.center.size() != s.half_widths.size()) throw ValidationError(where + ": center and half_widths differ in length");
  if (!(s.amplitude >= 0.0)) throw ValidationError(where + ".amplitude: must be non-negative");
  for (double w : s.half_widths) {
    if (!(w > 0.0)) throw ValidationError(where + ".half_widths: must be positive");
  }
  return s;
}

MomentQuery parse_moment(const json& j, const std::string& where) {
  check_keys(j, where, {"points", "conj"});
  MomentQuery q;
  if (!j.contains("points") || !j.at("points").is_array()) throw ValidationError(where + ".points: expected a list");
  for (std::size_t i = 0; i < j.at("points").size(); ++i) {
    q.points.push_back(parse_complex_point(j.at("points")[i], where + ".points[" + std::to_string(i) + "]"));
  }
  if (j.contains("conj")) {
    for (const auto& c : j.at("conj")) {
      if (!c.is_boolean()) throw ValidationError(where + ".conj: expected booleans");
      q.conj.push_back(c.get<bool>());
    }
  } else {
    q.conj.assign(q.points.size(), false);
  }
  if (q.conj.size() != q.points.size()) throw ValidationError(where + ".conj: length differs from points");
  return q;
}

void write_json(const fs::path& path, const json& j) {
  require_finite(j, path.string());
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

json read_json_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::vector<Configuration> load_samples(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read samples " + path.string());
  std::vector<Configuration> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(configuration_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ": malformed sample line: " + e.what());
    }
  }
  return out;
}

std::vector<Configuration> obtain_samples(const RunConfig& cfg, const PotentialSpec& p, long n, Diagnostics* diag) {
  if (!cfg.samples_from.empty()) return load_samples(cfg.samples_from);
  return sample(p, cfg.sampler, n, diag, cfg.workers);
}

Point default_point(const Window& w, double offset) {
  Point c = w.center();
  if (w.is_box()) {
    c[0] += offset;
    return c;
  }
  const double r = w.space().radius;
  Point x(w.space().ambient_dim());
  x[0] = r * std::cos(offset);
  x[1] = r * std::sin(offset);
  return x;
}

std::vector<Profile::Charge> potential_charges(const RunConfig& cfg) {
  std::vector<Profile::Charge> out;
  if (cfg.potential.contains("charges")) {
    for (const auto& c : cfg.potential.at("charges")) out.push_back({c.at("s").get<double>(), c.at("w").get<double>()});
  } else {
    out.push_back({1.0, 1.0});
  }
  return out;
}

TestReport from_conditions(const ConditionsReport& c, int trials, std::uint64_t seed) {
  TestReport r;
  r.name = "conditions";
  r.pass = c.pass();
  r.tolerance = c.tolerance;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& x : c.conditions) worst = std::max(worst, x.worst_margin);
  r.margin = worst;
  r.samples = static_cast<std::size_t>(trials);
  r.seed = seed;
  r.details = c.to_json();
  return r;
}

TestFunction default_bump(const RunConfig& cfg, const Window& w) {
  if (!cfg.laplace.empty()) return cfg.laplace.front().function();
  if (!w.is_box()) throw ValidationError("verify: sphere windows need an explicit estimate.laplace entry");
  Point c = w.center();
  Point hw(c.size());
  for (int a = 0; a < c.size(); ++a) hw[a] = std::min(0.5, 0.4 * w.bounds()[a].length());
  return TestFunction::bump(c, hw, 1.0);
}

std::vector<TestReport> run_verify(const RunConfig& cfg, std::uint64_t& used_seed) {
  const Window w = cfg.sampling_window();
  const Kernel k = cfg.make_kernel();
  const PotentialSpec p = cfg.make_potential();
  const VerifySpec& v = cfg.verify;
  used_seed = cfg.seed;
  std::vector<Configuration> samples;
  auto need_samples = [&]() -> const std::vector<Configuration>& {
    if (samples.empty()) samples = obtain_samples(cfg, p, v.samples, nullptr);
    return samples;
  };
  const Point x1 = v.points.size() > 0 ? v.points[0] : default_point(w, 0.0);
  const Point x2 = v.points.size() > 1 ? v.points[1] : default_point(w, 0.3);
  std::vector<TestReport> out;
  for (const auto& name : v.tests) {
    if (name == "conditions") {
      std::mt19937_64 rng(chain_seed(cfg.seed, 0xC0));
      out.push_back(from_conditions(verify_conditions(p, v.trials, rng), v.trials, cfg.seed));
    } else if (name == "oracle_agreement") {
      const auto& s = need_samples();
      std::vector<double> n(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) n[i] = static_cast<double>(s[i].size());
      SeriesSpec spec = cfg.series;
      const OracleValue o = expect(spec, p, count_functional(w.dim()));
      out.push_back(agreement_test("oracle_agreement_count", estimate_from_values(n, cfg.batches), o.value, o.error()));
    } else if (name == "null") {
      if (p.beta() != 0.0) throw ValidationError("verify.tests: 'null' needs potential.beta = 0");
      const auto r = poisson_null_suite(need_samples(), k, w, cfg.sampler.intensity, default_bump(cfg, w), x1, x2,
                                        cfg.batches);
      out.insert(out.end(), r.begin(), r.end());
    } else if (name == "fkg" || name == "dominance") {
      if (!w.is_box()) throw ValidationError("verify.tests: '" + name + "' needs a box window");
      const Point c = w.center();
      std::vector<Interval> a;
      std::vector<Interval> b;
      for (int ax = 0; ax < w.dim(); ++ax) {
        if (ax == 0) {
          a.push_back({c[0] - 1.0, c[0]});
          b.push_back({c[0], c[0] + 1.0});
        } else {
          a.push_back({c[ax] - 0.5, c[ax] + 0.5});
          b.push_back({c[ax] - 0.5, c[ax] + 0.5});
        }
      }
      const std::vector<Window> regions{Window::box(a), Window::box(b)};
      const auto& s = need_samples();
      if (name == "fkg") {
        out.push_back(fkg_test("fkg_counts", region_counts(s, regions[0]), region_counts(s, regions[1]), cfg.batches));
        out.push_back(fkg_test("fkg_field", field_values(s, k, x1), field_values(s, k, x2), cfg.batches));
      } else {
        const auto r = dominance_panel(s, p.rho(), cfg.sampler.intensity, regions, 20, default_bump(cfg, w), cfg.batches);
        out.insert(out.end(), r.begin(), r.end());
      }
    } else if (name == "euclidean_invariance") {
      GroupElement g = GroupElement::identity(k.ambient_dim());
      if (w.is_box()) {
        Point shift = v.shift;
        if (shift.size() == 0) {
          shift = Point(w.dim());
          shift[0] = 0.5;
        }
        g = GroupElement::translation(shift);
      } else {
        std::mt19937_64 rng(chain_seed(cfg.seed, 0xE0));
        g = GroupElement::random_isometry(k.ambient_dim(), 0.0, false, rng);
      }
      out.push_back(euclidean_invariance_test(need_samples(), k, w, p.rho(), x1, x2, g, cfg.batches));
    } else if (name == "lorentz" || name == "lorentz_exact" || name == "mixed" || name == "mixed_null") {
      if (w.dim() != 2 || !w.is_box()) throw ValidationError("verify.tests: '" + name + "' needs a 2-dimensional box");
      const Point y1 = v.minkowski.size() > 0 ? v.minkowski[0] : Point{0.2, 0.0};
      const Point y2 = v.minkowski.size() > 1 ? v.minkowski[1] : Point{-0.1, 0.3};
      if (name == "lorentz") {
        out.push_back(lorentz_invariance_test(need_samples(), k, w, p.rho(), y1, y2, v.chi, cfg.batches));
      } else if (name == "lorentz_exact") {
        out.push_back(lorentz_invariance_exact(k, cfg.sampler.intensity, y1, y2, v.chi));
      } else if (name == "mixed") {
        out.push_back(mixed_noninvariance_exact(k, cfg.sampler.intensity, y1, y2, v.chi));
      } else {
        out.push_back(mixed_null_control(k, cfg.sampler.intensity, Point{0.0, 0.0}, Point{0.0, 0.3}, v.chi));
      }
    } else if (name == "projection") {
      const ProjectionReport pr =
          two_species_projection_check(cfg.series, k, potential_charges(cfg), p.beta(), default_bump(cfg, w));
      TestReport r;
      r.name = "projection";
      r.pass = pr.pass();
      for (const auto& c : pr.checks) {
        r.margin = std::max(r.margin, std::abs(c.coupled.value - c.projected.value));
        r.tolerance = std::max(r.tolerance, c.coupled.error() + c.projected.error());
      }
      r.quad_order = cfg.series.quad_nodes;
      r.details = pr.to_json();
      out.push_back(std::move(r));
    } else if (name == "laplace_monotonicity") {
      out.push_back(laplace_monotonicity_exact(cfg.series, p, default_bump(cfg, w), 0.5 * cfg.series.intensity,
                                               cfg.series.intensity));
    } else if (name == "moment_bound") {
      ComplexBox box;
      for (int a = 0; a < x1.size(); ++a) {
        box.re.push_back({x1[a] - 1.0, x1[a] + 1.0});
        box.im.push_back({-1.0, 1.0});
      }
      const Window integ = w.is_box() ? w.padded(k.decay_radius(1e-12) + 2.0) : w;
      const MomentBoundReport m = moment_bound_check(need_samples(), k, box, v.moment_order, p.rho(), integ, cfg.batches);
      TestReport r;
      r.name = "moment_bound";
      r.pass = m.pass;
      r.margin = m.mean;
      r.tolerance = m.bound + 3.0 * m.std_error;
      r.samples = need_samples().size();
      r.details = m.to_json();
      out.push_back(std::move(r));
    } else {
      throw ValidationError("verify.tests: unknown test '" + name + "'");
    }
  }
  for (auto& r : out) {
    if (r.samples > 0 && r.seed == 0) r.seed = cfg.seed;
  }
  return out;
}

json estimate_records(const RunConfig& cfg) {
  json records = json::array();
  if (cfg.moments.empty() && cfg.laplace.empty()) return records;
  const Kernel k = cfg.make_kernel();
  const PotentialSpec p = cfg.make_potential();
  const auto samples = obtain_samples(cfg, p, cfg.samples, nullptr);
  std::vector<double> n(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) n[i] = static_cast<double>(samples[i].size());
  json c = estimate_from_values(n, cfg.batches).to_json();
  c["name"] = "count";
  records.push_back(c);
  const auto ms = estimate_moments(samples, k, cfg.moments, cfg.batches);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    json r = ms[i].to_json();
    r["name"] = "moment_" + std::to_string(i);
    records.push_back(r);
  }
  for (std::size_t i = 0; i < cfg.laplace.size(); ++i) {
    json r = estimate_laplace(samples, cfg.laplace[i].function(), cfg.batches).to_json();
    r["name"] = "laplace_" + std::to_string(i);
    r["metadata"] = cfg.laplace[i].to_json();
    records.push_back(r);
  }
  return records;
}

json oracle_values(const RunConfig& cfg) {
  const PotentialSpec p = cfg.make_potential();
  const Kernel k = cfg.make_kernel();
  std::vector<SeriesFunctional> fs;
  std::vector<std::string> names;
  int nl = 0;
  int nm = 0;
  for (const auto& f : cfg.functionals) {
    if (f.kind == "count") {
      fs.push_back(count_functional(cfg.sampling_window().dim()));
      names.push_back("count");
    } else if (f.kind == "laplace") {
      fs.push_back(laplace_functional(f.laplace.function()));
      names.push_back("laplace_" + std::to_string(nl++));
    } else {
      f.moment.validate(k);
      std::vector<bool> conj = f.moment.conj;
      std::unique_ptr<bool[]> flags(new bool[conj.size()]);
      for (std::size_t i = 0; i < conj.size(); ++i) flags[i] = conj[i];
      fs.push_back(moment_functional(k, f.moment.points, std::span<const bool>(flags.get(), conj.size())));
      names.push_back("moment_" + std::to_string(nm++));
    }
  }
  json values = json::array();
  if (fs.empty()) return values;
  const auto v = expect_many(cfg.series, gibbs_model(p), fs);
  for (std::size_t i = 0; i < v.size(); ++i) {
    json r = v[i].to_json();
    r["name"] = names[i];
    values.push_back(r);
  }
  return values;
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(10) << x;
  return s.str();
}

int report(const RunConfig& cfg) {
  const fs::path dir(cfg.out);
  const json est = read_json_file(dir / "estimates.json");
  const json orc = read_json_file(dir / "oracle.json");
  std::map<std::string, json> oracle_by_name;
  for (const auto& v : orc.at("values")) oracle_by_name[v.at("name").get<std::string>()] = v;
  const PotentialSpec p = cfg.make_potential();
  const double bound = p.rho() * cfg.sampler.intensity * cfg.sampling_window().volume();

  std::ostringstream csv;
  csv << "name,estimate_re,estimate_im,stderr_re,stderr_im,oracle_re,oracle_im,oracle_error,z,bound\n";
  std::ostringstream txt;
  auto row = [&txt](std::initializer_list<std::string> cells) {
    std::string line;
    for (const auto& c : cells) {
      std::string cell = c.empty() ? "-" : c;
      cell.resize(std::max<std::size_t>(cell.size() + 1, 19), ' ');
      line += cell;
    }
    line.erase(line.find_last_not_of(' ') + 1);
    txt << line << '\n';
  };
  row({"name", "estimate", "stderr", "oracle", "oracle_err", "z", "bound"});
  for (const auto& r : est.at("records")) {
    const std::string name = r.at("name").get<std::string>();
    const double er = r.at("value").at("re").get<double>();
    const double ei = r.at("value").at("im").get<double>();
    const double sr = r.at("stderr_re").get<double>();
    const double si = r.at("stderr_im").get<double>();
    std::string ore, oim, oerr, z;
    if (auto it = oracle_by_name.find(name); it != oracle_by_name.end()) {
      const double vr = it->second.at("value").at("re").get<double>();
      const double vi = it->second.at("value").at("im").get<double>();
      const double e = it->second.at("tail_bound").get<double>() + it->second.at("quad_bound").get<double>() +
                       it->second.at("rounding_bound").get<double>();
      const double se = std::hypot(sr, si);
      ore = fmt(vr);
      oim = fmt(vi);
      oerr = fmt(e);
      z = se > 0.0 ? fmt(std::hypot(er - vr, ei - vi) / se) : "";
    }
    const std::string b = name == "count" ? fmt(bound) : "";
    csv << name << ',' << fmt(er) << ',' << fmt(ei) << ',' << fmt(sr) << ',' << fmt(si) << ',' << ore << ',' << oim
        << ',' << oerr << ',' << z << ',' << b << '\n';
    row({name, fmt(er), fmt(std::hypot(sr, si)), ore, oerr, z, b});
  }
  std::ofstream f(dir / "report.csv");
  if (!f) throw ValidationError("cannot write " + (dir / "report.csv").string());
  f << csv.str();
  std::cout << txt.str();
  return kExitOk;
}

}  // namespace

TestFunction LaplaceSpec::function() const { return TestFunction::bump(center, half_widths, amplitude); }

json LaplaceSpec::to_json() const {
  return {{"center", point_to_json(center)}, {"half_widths", point_to_json(half_widths)}, {"amplitude", amplitude}};
}

json OracleFunctionalSpec::to_json() const {
  json j{{"kind", kind}};
  if (kind == "laplace") j["laplace"] = laplace.to_json();
  if (kind == "moment") j["moment"] = moment.to_json();
  return j;
}

json VerifySpec::to_json() const {
  json pts = json::array();
  for (const auto& p : points) pts.push_back(point_to_json(p));
  json mk = json::array();
  for (const auto& p : minkowski) mk.push_back(point_to_json(p));
  return {{"tests", tests},   {"trials", trials}, {"samples", samples}, {"points", pts},
          {"shift", point_to_json(shift)}, {"minkowski", mk}, {"chi", chi}, {"moment_order", moment_order}};
}

Window RunConfig::sampling_window() const {
  if (space.is_sphere()) return Window::whole_sphere(space);
  return Window::box(window);
}

Kernel RunConfig::make_kernel() const {
  const std::string kind = kernel.at("kind").get<std::string>();
  if (kind == "gaussian") {
    return Kernel::gaussian(space.dim, kernel.at("amplitude").get<double>(), kernel.at("rate").get<double>());
  }
  if (kind == "sphere_exp") return Kernel::sphere_exp(space);
  return Kernel::mollified_bessel(space.dim, kernel.at("epsilon").get<double>(), kernel.at("mass").get<double>(),
                                  kernel.at("quad_tol").get<double>(), kernel.at("im_budget").get<double>());
}

PotentialSpec RunConfig::make_potential() const {
  const std::string prof = potential.at("profile").get<std::string>();
  const double beta = potential.at("beta").get<double>();
  Profile profile = Profile::linear();
  if (prof == "widom_rowlinson") {
    profile = Profile::widom_rowlinson();
  } else if (prof == "charge_mix") {
    std::vector<Profile::Charge> ch;
    for (const auto& c : potential.at("charges")) ch.push_back({c.at("s").get<double>(), c.at("w").get<double>()});
    profile = Profile::charge_mix(std::move(ch), beta);
  }
  PotentialSpec::Options opt;
  opt.grid_h = potential.at("grid_h").get<double>();
  opt.padding_tol = potential.at("padding_tol").get<double>();
  return PotentialSpec(profile, beta, make_kernel(), sampling_window(), opt);
}

json RunConfig::to_json() const {
  json win = json::array();
  for (const auto& iv : window) win.push_back({iv.lo, iv.hi});
  json ms = json::array();
  for (const auto& m : moments) ms.push_back(m.to_json());
  json ls = json::array();
  for (const auto& l : laplace) ls.push_back(l.to_json());
  json fsj = json::array();
  for (const auto& f : functionals) fsj.push_back(f.to_json());
  json sam = sampler.to_json();
  sam.erase("seed");
  sam["samples"] = samples;
  sam["batches"] = batches;
  sam["samples_from"] = samples_from;
  json orc = series.to_json();
  orc.erase("window");
  orc.erase("intensity");
  orc["functionals"] = fsj;
  return {{"seed", seed},
          {"space", {{"kind", space.is_sphere() ? "sphere" : "euclidean"}, {"dim", space.dim}, {"radius", space.radius}}},
          {"window", space.is_sphere() ? json::array() : win},
          {"kernel", kernel},
          {"potential", potential},
          {"sampler", sam},
          {"estimate", {{"moments", ms}, {"laplace", ls}}},
          {"oracle", orc},
          {"verify", verify.to_json()}};
}

RunConfig parse_config(const json& j) {
  check_keys(j, "config", {"seed", "out", "workers", "space", "window", "kernel", "potential", "sampler", "estimate",
                           "oracle", "verify"});
  RunConfig c;
  c.seed = get_or<std::uint64_t>(j, "config", "seed", 0);
  c.out = get_or<std::string>(j, "config", "out", "out");
  c.workers = get_or<int>(j, "config", "workers", 1);
  if (c.workers < 1) throw ValidationError("config.workers: must be at least 1");

  const json sp = j.value("space", json::object());
  check_keys(sp, "space", {"kind", "dim", "radius"});
  const std::string skind = get_or<std::string>(sp, "space", "kind", "euclidean");
  const int dim = get_or<int>(sp, "space", "dim", 1);
  try {
    if (skind == "euclidean") {
      c.space = Space::euclidean(dim);
    } else if (skind == "sphere") {
      c.space = Space::sphere(dim, get_or<double>(sp, "space", "radius", 1.0));
    } else {
      throw ValidationError("space.kind: expected 'euclidean' or 'sphere'");
    }
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("space: ") + e.what());
  }

  if (!c.space.is_sphere()) {
    c.window.clear();
    const json win = j.value("window", json::array());
    if (win.empty()) {
      for (int a = 0; a < dim; ++a) c.window.push_back({0.0, 1.0});
    } else {
      if (!win.is_array() || static_cast<int>(win.size()) != dim) {
        throw ValidationError("window: expected " + std::to_string(dim) + " [lo, hi] pairs");
      }
      for (const auto& iv : win) {
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
          throw ValidationError("window: each entry must be [lo, hi]");
        }
        const Interval i{iv[0].get<double>(), iv[1].get<double>()};
        if (!(i.hi > i.lo)) throw ValidationError("window: need lo < hi");
        c.window.push_back(i);
      }
    }
  } else {
    c.window.clear();
  }

  json kn = j.value("kernel", json::object());
  if (kn.is_string()) kn = {{"kind", kn.get<std::string>()}};
  check_keys(kn, "kernel", {"kind", "amplitude", "rate", "epsilon", "mass", "quad_tol", "im_budget"});
  const std::string kkind = get_or<std::string>(kn, "kernel", "kind", c.space.is_sphere() ? "sphere_exp" : "gaussian");
  if (kkind == "gaussian") {
    const double amp = get_or<double>(kn, "kernel", "amplitude", 1.0);
    const double rate = get_or<double>(kn, "kernel", "rate", 1.0);
    if (!(amp > 0.0)) throw ValidationError("kernel.amplitude: must be positive");
    if (!(rate > 0.0)) throw ValidationError("kernel.rate: must be positive");
    if (c.space.is_sphere()) throw ValidationError("kernel.kind: gaussian needs a euclidean space");
    c.kernel = {{"kind", kkind}, {"amplitude", amp}, {"rate", rate}};
  } else if (kkind == "sphere_exp") {
    if (!c.space.is_sphere()) throw ValidationError("kernel.kind: sphere_exp needs a sphere space");
    c.kernel = {{"kind", kkind}};
  } else if (kkind == "mollified_bessel") {
    const double eps = get_or<double>(kn, "kernel", "epsilon", 0.1);
    const double mass = get_or<double>(kn, "kernel", "mass", 1.0);
    const double qt = get_or<double>(kn, "kernel", "quad_tol", 1e-8);
    const double ib = get_or<double>(kn, "kernel", "im_budget", 3.0);
    if (!(eps > 0.0)) throw ValidationError("kernel.epsilon: must be positive");
    if (!(mass > 0.0)) throw ValidationError("kernel.mass: must be positive");
    if (!(qt > 0.0)) throw ValidationError("kernel.quad_tol: must be positive");
    if (!(ib >= 0.0)) throw ValidationError("kernel.im_budget: must be non-negative");
    if (c.space.is_sphere()) throw ValidationError("kernel.kind: mollified_bessel needs a euclidean space");
    c.kernel = {{"kind", kkind}, {"epsilon", eps}, {"mass", mass}, {"quad_tol", qt}, {"im_budget", ib}};
  } else {
    throw ValidationError("kernel.kind: expected gaussian, sphere_exp or mollified_bessel");
  }

  const json po = j.value("potential", json::object());
  check_keys(po, "potential", {"profile", "beta", "charges", "grid_h", "padding_tol"});
  const std::string prof = get_or<std::string>(po, "potential", "profile", "widom_rowlinson");
  const double beta = get_or<double>(po, "potential", "beta", 1.0);
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("potential.beta: must be finite and non-negative");
  const double gh = get_or<double>(po, "potential", "grid_h", 0.0);
  const double pt = get_or<double>(po, "potential", "padding_tol", 1e-8);
  if (!(gh >= 0.0)) throw ValidationError("potential.grid_h: must be non-negative");
  if (!(pt > 0.0 && pt < 1.0)) throw ValidationError("potential.padding_tol: must be in (0, 1)");
  c.potential = {{"profile", prof}, {"beta", beta}, {"grid_h", gh}, {"padding_tol", pt}};
  if (prof == "charge_mix") {
    if (!po.contains("charges") || !po.at("charges").is_array() || po.at("charges").empty()) {
      throw ValidationError("potential.charges: charge_mix needs a non-empty list of {s, w}");
    }
    json ch = json::array();
    for (const auto& x : po.at("charges")) {
      const bool pair_form = x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number();
      if (!pair_form && !x.is_object()) throw ValidationError("potential.charges: entries must be [s, w] or {s, w}");
      const double s = pair_form ? x[0].get<double>() : get_or<double>(x, "potential.charges", "s", 1.0);
      const double w = pair_form ? x[1].get<double>() : get_or<double>(x, "potential.charges", "w", 0.0);
      if (!(s > 0.0)) throw ValidationError("potential.charges.s: must be positive");
      if (!(w > 0.0)) throw ValidationError("potential.charges.w: must be positive");
      ch.push_back({{"s", s}, {"w", w}});
    }
    c.potential["charges"] = ch;
  } else if (prof != "widom_rowlinson" && prof != "linear") {
    throw ValidationError("potential.profile: expected widom_rowlinson, linear or charge_mix");
  }

  const json sa = j.value("sampler", json::object());
  check_keys(sa, "sampler", {"intensity", "burnin", "thin", "drift_check", "drift_limit", "chains", "samples", "batches",
                             "samples_from"});
  c.sampler.intensity = get_or<double>(sa, "sampler", "intensity", 1.0);
  c.sampler.burnin = get_or<long>(sa, "sampler", "burnin", 1000);
  c.sampler.thin = get_or<long>(sa, "sampler", "thin", 10);
  c.sampler.drift_check = get_or<long>(sa, "sampler", "drift_check", 10000);
  c.sampler.drift_limit = get_or<double>(sa, "sampler", "drift_limit", 1e-6);
  c.sampler.chains = get_or<int>(sa, "sampler", "chains", 1);
  c.sampler.seed = c.seed;
  c.samples = get_or<long>(sa, "sampler", "samples", 1000);
  c.batches = get_or<int>(sa, "sampler", "batches", 32);
  c.samples_from = get_or<std::string>(sa, "sampler", "samples_from", "");
  try {
    c.sampler.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(e.what());
  }
  if (c.samples < 1) throw ValidationError("sampler.samples: must be at least 1");
  if (c.batches < 2) throw ValidationError("sampler.batches: must be at least 2");

  const json es = j.value("estimate", json::object());
  check_keys(es, "estimate", {"moments", "laplace"});
  const Kernel k = c.make_kernel();
  if (es.contains("moments")) {
    for (std::size_t i = 0; i < es.at("moments").size(); ++i) {
      c.moments.push_back(parse_moment(es.at("moments")[i], "estimate.moments[" + std::to_string(i) + "]"));
      c.moments.back().validate(k);
    }
  }
  if (es.contains("laplace")) {
    for (std::size_t i = 0; i < es.at("laplace").size(); ++i) {
      c.laplace.push_back(parse_laplace(es.at("laplace")[i], "estimate.laplace[" + std::to_string(i) + "]"));
      if (c.laplace.back().center.size() != k.ambient_dim()) {
        throw ValidationError("estimate.laplace[" + std::to_string(i) + "]: dimension mismatch");
      }
    }
  }

  const json orc = j.value("oracle", json::object());
  check_keys(orc, "oracle", {"nmax", "quad_nodes", "multiset_budget", "tail_tol", "functionals"});
  c.series.window = c.sampling_window();
  c.series.intensity = c.sampler.intensity;
  c.series.nmax = get_or<int>(orc, "oracle", "nmax", 12);
  c.series.quad_nodes = get_or<int>(orc, "oracle", "quad_nodes", 32);
  c.series.multiset_budget = get_or<long>(orc, "oracle", "multiset_budget", 100000);
  c.series.tail_tol = get_or<double>(orc, "oracle", "tail_tol", 1e-8);
  c.series.validate();
  if (orc.contains("functionals")) {
    for (std::size_t i = 0; i < orc.at("functionals").size(); ++i) {
      const json& f = orc.at("functionals")[i];
      const std::string where = "oracle.functionals[" + std::to_string(i) + "]";
      check_keys(f, where, {"kind", "center", "half_widths", "amplitude", "points", "conj"});
      OracleFunctionalSpec s;
      s.kind = get_or<std::string>(f, where, "kind", "count");
      if (s.kind == "laplace") {
        json l = f;
        l.erase("kind");
        s.laplace = parse_laplace(l, where);
      } else if (s.kind == "moment") {
        json m = f;
        m.erase("kind");
        s.moment = parse_moment(m, where);
        s.moment.validate(k);
      } else if (s.kind != "count") {
        throw ValidationError(where + ".kind: expected count, laplace or moment");
      }
      c.functionals.push_back(std::move(s));
    }
  }

  const json ve = j.value("verify", json::object());
  check_keys(ve, "verify", {"tests", "trials", "samples", "points", "shift", "minkowski", "chi", "moment_order"});
  c.verify.tests = get_or<std::vector<std::string>>(ve, "verify", "tests", {});
  c.verify.trials = get_or<int>(ve, "verify", "trials", 1000);
  c.verify.samples = get_or<long>(ve, "verify", "samples", 4000);
  c.verify.chi = get_or<double>(ve, "verify", "chi", 0.3);
  c.verify.moment_order = get_or<int>(ve, "verify", "moment_order", 2);
  if (c.verify.trials < 1) throw ValidationError("verify.trials: must be at least 1");
  if (c.verify.samples < c.batches) throw ValidationError("verify.samples: fewer samples than batches");
  if (c.verify.moment_order < 0) throw ValidationError("verify.moment_order: must be non-negative");
  if (ve.contains("points")) {
    for (const auto& p : ve.at("points")) c.verify.points.push_back(parse_point(p, "verify.points"));
  }
  if (ve.contains("shift") && !ve.at("shift").empty()) c.verify.shift = parse_point(ve.at("shift"), "verify.shift");
  if (ve.contains("minkowski")) {
    for (const auto& p : ve.at("minkowski")) c.verify.minkowski.push_back(parse_point(p, "verify.minkowski"));
  }
  // builds the potential once so grid and kernel errors surface before any run
  c.make_potential();
  return c;
}

void require_finite(const json& j, const std::string& where) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    throw NumericalError(where + ": non-finite value in output");
  }
  if (j.is_structured()) {
    for (const auto& x : j) require_finite(x, where);
  }
}

int run_command(const std::string& command, const CliOptions& options) {
  try {
    json raw = json::object();
    if (!options.config_path.empty()) raw = read_json_file(options.config_path);
    if (options.seed) raw["seed"] = *options.seed;
    if (options.out) raw["out"] = *options.out;
    if (options.workers) raw["workers"] = *options.workers;
    const RunConfig cfg = parse_config(raw);
    const json effective = cfg.to_json();
    const fs::path dir(cfg.out);
    fs::create_directories(dir);

    if (command == "sample") {
      const PotentialSpec p = cfg.make_potential();
      std::ofstream f(dir / "samples.jsonl");
      if (!f) throw ValidationError("cannot write " + (dir / "samples.jsonl").string());
      const Diagnostics d = run(
          p, cfg.sampler, cfg.samples, [&](const Configuration& eta) { f << wickfield::to_json(eta).dump() << '\n'; },
          cfg.workers);
      write_json(dir / "diagnostics.json", {{"config", effective}, {"diagnostics", d.to_json()}});
      return kExitOk;
    }
    if (command == "estimate") {
      write_json(dir / "estimates.json", {{"config", effective}, {"records", estimate_records(cfg)}});
      return kExitOk;
    }
    if (command == "oracle") {
      write_json(dir / "oracle.json", {{"config", effective}, {"values", oracle_values(cfg)}});
      return kExitOk;
    }
    if (command == "verify") {
      std::uint64_t seed = cfg.seed;
      const auto reports = run_verify(cfg, seed);
      const bool pass = all_pass(reports);
      write_json(dir / "verify.json", {{"config", effective}, {"pass", pass}, {"reports", to_json(reports)}});
      for (const auto& r : reports) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  margin=" << fmt(r.margin)
                  << "  tolerance=" << fmt(r.tolerance) << '\n';
      }
      return pass ? kExitOk : kExitVerification;
    }
    if (command == "report") return report(cfg);
    throw ValidationError("unknown command '" + command + "'");
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ValidationError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace wickfield
