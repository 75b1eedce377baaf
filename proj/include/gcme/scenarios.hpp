#pragma once

// Manufactured connection scenarios. Every scenario hands out coefficient
// triples in matrix pattern order (the (0,1), -(0,2), (1,2) entries of the
// antisymmetric pattern) together with exact closed-form derivatives, so
// discretization error enters only where a caller chooses finite differences.

#include <array>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gcme/algebra.hpp"
#include "gcme/core.hpp"
#include "gcme/expr.hpp"

namespace gcme {

/// Ordered key=value parameter list, as written by the user.
using ParamList = std::vector<std::pair<std::string, std::string>>;

/// Truncated real trigonometric series with coefficients drawn from a
/// counter-based generator. Values depend only on (seed, family, component,
/// mode), never on evaluation order or grid, so fields are reproducible
/// bit-for-bit and stay meaningful across resolutions.
class TrigSeries {
 public:
  TrigSeries(std::uint64_t seed, double amplitude, int bandwidth,
             std::uint64_t family, int components)
      : amplitude_(amplitude) {
    require_domain(std::isfinite(amplitude) && amplitude >= 0.0,
                   "TrigSeries: amplitude must be finite and >= 0");
    require_domain(bandwidth >= 0 && bandwidth <= 8,
                   "TrigSeries: bandwidth must lie in [0, 8]");
    require_domain(components >= 1, "TrigSeries: need at least one component");
    const int n = bandwidth + 1;
    modes_.reserve(static_cast<std::size_t>(n) * n * n);
    for (int mt = 0; mt <= bandwidth; ++mt)
      for (int my = 0; my <= bandwidth; ++my)
        for (int mx = 0; mx <= bandwidth; ++mx)
          modes_.push_back({mx, my, mt});
    norm_ = amplitude / static_cast<double>(modes_.size());
    coef_.resize(static_cast<std::size_t>(components));
    for (int c = 0; c < components; ++c) {
      coef_[c].resize(modes_.size());
      std::uint64_t hc = hash_combine(hash_combine(seed, family),
                                      static_cast<std::uint64_t>(c));
      for (std::size_t m = 0; m < modes_.size(); ++m) {
        const std::uint64_t hm = hash_combine(hc, m);
        coef_[c][m][0] = uniform_pm1(hash_combine(hm, 0));
        coef_[c][m][1] = uniform_pm1(hash_combine(hm, 1));
      }
    }
  }

  double value(int component, const std::array<double, 3>& pos) const {
    double v = 0.0;
    const auto& cs = coef_[static_cast<std::size_t>(component)];
    for (std::size_t m = 0; m < modes_.size(); ++m) {
      const double phase = phase_of(modes_[m], pos);
      v += cs[m][0] * std::cos(phase) + cs[m][1] * std::sin(phase);
    }
    return norm_ * v;
  }

  double derivative(int component, Axis wrt, const std::array<double, 3>& pos) const {
    double v = 0.0;
    const auto& cs = coef_[static_cast<std::size_t>(component)];
    const int w = static_cast<int>(wrt);
    for (std::size_t m = 0; m < modes_.size(); ++m) {
      const double rate = 2.0 * kPi * modes_[m][w];
      if (rate == 0.0) continue;
      const double phase = phase_of(modes_[m], pos);
      v += rate * (cs[m][1] * std::cos(phase) - cs[m][0] * std::sin(phase));
    }
    return norm_ * v;
  }

  double amplitude() const { return amplitude_; }

 private:
  static double phase_of(const std::array<int, 3>& m, const std::array<double, 3>& pos) {
    return 2.0 * kPi * (m[0] * pos[0] + m[1] * pos[1] + m[2] * pos[2]);
  }

  double amplitude_ = 0.0;
  double norm_ = 0.0;
  std::vector<std::array<int, 3>> modes_;
  std::vector<std::vector<std::array<double, 2>>> coef_;
};

/// A connection scenario: per-axis coefficient triples as functions of the
/// physical position, with exact derivatives. Axis y is only queried on
/// 2+1 grids.
class Scenario {
 public:
  virtual ~Scenario() = default;

  virtual std::string name() const = 0;

  /// Pattern-order coefficient triple of the matrix attached to `axis`.
  virtual CoeffTriple coeff(Axis axis, const std::array<double, 3>& pos) const = 0;

  /// Exact partial derivative of coeff(axis, .) along `wrt`.
  virtual CoeffTriple coeff_derivative(Axis axis, Axis wrt,
                                       const std::array<double, 3>& pos) const = 0;

  /// True when the scenario satisfies the zero-curvature equations exactly.
  virtual bool analytically_flat() const { return false; }

  /// Seed echoed into reports; 0 for deterministic scenarios.
  virtual std::uint64_t seed() const { return 0; }

  /// Canonical parameter echo (fixed order, round-trip formatted values).
  virtual ParamList params() const { return {}; }

  /// Reject grids the scenario cannot live on (e.g. y-dependence on a 1+1 grid).
  virtual void check_dim(int /*dim*/) const {}
};

/// "name(k1=v1, k2=v2)" echo used in reports and run identifiers.
inline std::string scenario_description(const Scenario& s) {
  std::string out = s.name();
  const ParamList ps = s.params();
  if (!ps.empty()) {
    out += "(";
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (i) out += ", ";
      out += ps[i].first + "=" + ps[i].second;
    }
    out += ")";
  }
  return out;
}

namespace detail {

/// Validates a user parameter list against a generator's documented keys and
/// converts values with full-string parses.
class ParamReader {
 public:
  ParamReader(std::string owner, const ParamList& given,
              std::initializer_list<const char*> allowed)
      : owner_(std::move(owner)), given_(given) {
    for (const auto& kv : given_) {
      bool known = false;
      for (const char* a : allowed)
        if (kv.first == a) { known = true; break; }
      if (!known) {
        std::string keys;
        for (const char* a : allowed) {
          if (!keys.empty()) keys += ", ";
          keys += a;
        }
        throw ConfigError("scenario " + owner_ + ": unknown parameter '" + kv.first +
                          "' (known: " + (keys.empty() ? "none" : keys) + ")");
      }
      int seen = 0;
      for (const auto& other : given_)
        if (other.first == kv.first) ++seen;
      if (seen > 1)
        throw ConfigError("scenario " + owner_ + ": duplicate parameter '" + kv.first + "'");
    }
  }

  bool has(const std::string& key) const { return find(key) != nullptr; }

  std::string text(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
  }

  double number(const std::string& key, double fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    return parse_number(key, *v);
  }

  int integer(const std::string& key, int fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    const double d = parse_number(key, *v);
    if (d != std::floor(d) || std::abs(d) > 1e9)
      throw ConfigError("scenario " + owner_ + ": parameter '" + key +
                        "' must be an integer, got '" + *v + "'");
    return static_cast<int>(d);
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    const std::string& s = *v;
    if (s.empty() || s[0] == '-' || s.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("scenario " + owner_ + ": parameter '" + key +
                        "' must be a non-negative integer, got '" + s + "'");
    errno = 0;
    char* end = nullptr;
    const unsigned long long u = std::strtoull(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size())
      throw ConfigError("scenario " + owner_ + ": parameter '" + key +
                        "' is out of range: '" + s + "'");
    return static_cast<std::uint64_t>(u);
  }

  std::optional<CoeffTriple> maybe_triple(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) return std::nullopt;
    std::string s = *v;
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')')
      s = s.substr(1, s.size() - 2);
    std::array<double, 3> vals{};
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      const std::size_t comma = s.find(',', start);
      const bool last = i == 2;
      if (last != (comma == std::string::npos))
        throw ConfigError("scenario " + owner_ + ": parameter '" + key +
                          "' must be three comma-separated numbers, got '" + *v + "'");
      vals[static_cast<std::size_t>(i)] =
          parse_number(key, s.substr(start, last ? std::string::npos : comma - start));
      start = comma + 1;
    }
    return CoeffTriple(vals[0], vals[1], vals[2]);
  }

 private:
  const std::string* find(const std::string& key) const {
    for (const auto& kv : given_)
      if (kv.first == key) return &kv.second;
    return nullptr;
  }

  double parse_number(const std::string& key, const std::string& raw) const {
    std::string s = raw;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    char* end = nullptr;
    const double d = s.empty() ? 0.0 : std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(d))
      throw ConfigError("scenario " + owner_ + ": parameter '" + key +
                        "' must be a finite number, got '" + raw + "'");
    return d;
  }

  std::string owner_;
  ParamList given_;
};

inline std::string format_triple(const CoeffTriple& c) {
  return format_double(c[0]) + "," + format_double(c[1]) + "," + format_double(c[2]);
}

}  // namespace detail

class ZeroScenario final : public Scenario {
 public:
  std::string name() const override { return "zero"; }
  CoeffTriple coeff(Axis, const std::array<double, 3>&) const override {
    return CoeffTriple::Zero();
  }
  CoeffTriple coeff_derivative(Axis, Axis, const std::array<double, 3>&) const override {
    return CoeffTriple::Zero();
  }
  bool analytically_flat() const override { return true; }
};

class ConstantsScenario final : public Scenario {
 public:
  explicit ConstantsScenario(const ParamList& params) {
    detail::ParamReader r("constants", params,
                          {"k", "sigma", "tau", "m1", "m2", "m3", "w1", "w2", "w3"});
    // Pattern order: x = (k, sigma, tau); y = (m3, m2, m1); t = (w3, w2, w1).
    triple_[0] = CoeffTriple(r.number("k", 0), r.number("sigma", 0), r.number("tau", 0));
    triple_[1] = CoeffTriple(r.number("m3", 0), r.number("m2", 0), r.number("m1", 0));
    triple_[2] = CoeffTriple(r.number("w3", 0), r.number("w2", 0), r.number("w1", 0));
  }

  std::string name() const override { return "constants"; }
  CoeffTriple coeff(Axis axis, const std::array<double, 3>&) const override {
    return triple_[static_cast<int>(axis)];
  }
  CoeffTriple coeff_derivative(Axis, Axis, const std::array<double, 3>&) const override {
    return CoeffTriple::Zero();
  }
  ParamList params() const override {
    return {{"k", format_double(triple_[0][0])},     {"sigma", format_double(triple_[0][1])},
            {"tau", format_double(triple_[0][2])},   {"m1", format_double(triple_[1][2])},
            {"m2", format_double(triple_[1][1])},    {"m3", format_double(triple_[1][0])},
            {"w1", format_double(triple_[2][2])},    {"w2", format_double(triple_[2][1])},
            {"w3", format_double(triple_[2][0])}};
  }
  void check_dim(int dim) const override {
    if (dim == 2 && triple_[1].norm() != 0.0)
      throw ConfigError("scenario constants: m-coefficients require a 2+1 grid");
  }

 private:
  std::array<CoeffTriple, 3> triple_;  // indexed by Axis
};

/// Gradient connection inside a fixed one-parameter subalgebra: the first
/// pattern component of each axis matrix is the corresponding partial of a
/// scalar potential, every other component is zero. Exactly flat: the
/// derivative part is a symmetric mixed partial and all brackets vanish.
class AbelianScenario final : public Scenario {
 public:
  explicit AbelianScenario(const ParamList& params) {
    detail::ParamReader r("abelian", params, {"theta"});
    theta_ = Expr::parse(r.text("theta", "sin(x)cos(t)"));
    for (int a = 0; a < 3; ++a) {
      d1_[a] = theta_.derivative(static_cast<Axis>(a));
      for (int b = 0; b < 3; ++b)
        d2_[a][b] = d1_[a].derivative(static_cast<Axis>(b));
    }
  }

  std::string name() const override { return "abelian"; }
  CoeffTriple coeff(Axis axis, const std::array<double, 3>& pos) const override {
    return CoeffTriple(d1_[static_cast<int>(axis)].eval(pos), 0.0, 0.0);
  }
  CoeffTriple coeff_derivative(Axis axis, Axis wrt,
                               const std::array<double, 3>& pos) const override {
    return CoeffTriple(d2_[static_cast<int>(axis)][static_cast<int>(wrt)].eval(pos), 0.0, 0.0);
  }
  bool analytically_flat() const override { return true; }
  ParamList params() const override { return {{"theta", theta_.source()}}; }
  void check_dim(int dim) const override {
    if (dim == 2 && theta_.uses_axis(Axis::Y))
      throw ConfigError("scenario abelian: theta depends on y but the grid is 1+1");
  }

 private:
  Expr theta_;
  std::array<Expr, 3> d1_;
  std::array<std::array<Expr, 3>, 3> d2_;
};

/// Connection of a product-of-exponentials group path. The coefficient
/// fields are conjugation orbits of the constant generators and satisfy the
/// zero-curvature system exactly; their derivatives are commutators with the
/// already-sampled fields, which is what makes the discrete cancellation in
/// tests tight.
class PureGaugeScenario final : public Scenario {
 public:
  explicit PureGaugeScenario(const ParamList& params) {
    detail::ParamReader r("pure-gauge", params, {"gen_x", "gen_y", "gen_t"});
    const auto gx = r.maybe_triple("gen_x");
    const auto gt = r.maybe_triple("gen_t");
    if (!gx || !gt)
      throw ConfigError("scenario pure-gauge: gen_x and gen_t are required");
    gen_x_ = *gx;
    gen_t_ = *gt;
    gen_y_ = r.maybe_triple("gen_y");
    for (const CoeffTriple* g : {&gen_x_, &gen_t_})
      require_domain(algebra::finite_triple(*g), "scenario pure-gauge: non-finite generator");
    if (gen_y_) require_domain(algebra::finite_triple(*gen_y_),
                               "scenario pure-gauge: non-finite generator");
  }

  std::string name() const override { return "pure-gauge"; }

  CoeffTriple coeff(Axis axis, const std::array<double, 3>& pos) const override {
    switch (axis) {
      case Axis::X:
        return gen_x_;
      case Axis::Y: {
        require_domain(gen_y_.has_value(), "pure-gauge: y axis has no generator");
        const Mat3 e1 = algebra::expm(Mat3(pos[0] * algebra::so3_from_coeffs(gen_x_)));
        return algebra::so3_coeffs(
            Mat3(e1 * algebra::so3_from_coeffs(*gen_y_) * e1.transpose()));
      }
      case Axis::T: {
        Mat3 e = algebra::expm(Mat3(pos[0] * algebra::so3_from_coeffs(gen_x_)));
        if (gen_y_)
          e = Mat3(e * algebra::expm(Mat3(pos[1] * algebra::so3_from_coeffs(*gen_y_))));
        return algebra::so3_coeffs(Mat3(e * algebra::so3_from_coeffs(gen_t_) * e.transpose()));
      }
    }
    return CoeffTriple::Zero();
  }

  CoeffTriple coeff_derivative(Axis axis, Axis wrt,
                               const std::array<double, 3>& pos) const override {
    if (axis == Axis::X) return CoeffTriple::Zero();
    // Conjugation orbits differentiate to commutators with the sampled fields.
    auto bracket = [&](Axis left, Axis right) {
      const Mat3 l = algebra::so3_from_coeffs(coeff(left, pos));
      const Mat3 r = algebra::so3_from_coeffs(coeff(right, pos));
      return algebra::so3_coeffs(algebra::commutator(l, r));
    };
    if (axis == Axis::Y) {
      if (wrt == Axis::X) return bracket(Axis::X, Axis::Y);
      return CoeffTriple::Zero();
    }
    if (wrt == Axis::X) return bracket(Axis::X, Axis::T);
    if (wrt == Axis::Y && gen_y_) return bracket(Axis::Y, Axis::T);
    return CoeffTriple::Zero();
  }

  bool analytically_flat() const override { return true; }

  ParamList params() const override {
    ParamList out{{"gen_x", detail::format_triple(gen_x_)}};
    if (gen_y_) out.emplace_back("gen_y", detail::format_triple(*gen_y_));
    out.emplace_back("gen_t", detail::format_triple(gen_t_));
    return out;
  }

  void check_dim(int dim) const override {
    if (dim == 3 && !gen_y_)
      throw ConfigError("scenario pure-gauge: a 2+1 grid needs gen_y");
    if (dim == 2 && gen_y_)
      throw ConfigError("scenario pure-gauge: gen_y given but the grid is 1+1");
  }

  /// Generator coefficient triples, for callers that rebuild the group path.
  CoeffTriple generator(Axis axis) const {
    switch (axis) {
      case Axis::X: return gen_x_;
      case Axis::Y:
        require_domain(gen_y_.has_value(), "pure-gauge: y axis has no generator");
        return *gen_y_;
      case Axis::T: return gen_t_;
    }
    return CoeffTriple::Zero();
  }

  bool has_y_generator() const { return gen_y_.has_value(); }

 private:
  CoeffTriple gen_x_ = CoeffTriple::Zero();
  CoeffTriple gen_t_ = CoeffTriple::Zero();
  std::optional<CoeffTriple> gen_y_;
};

class RandomSmoothScenario final : public Scenario {
 public:
  RandomSmoothScenario(std::uint64_t seed, double amplitude, int bandwidth)
      : seed_(seed), bandwidth_(bandwidth),
        series_(seed, amplitude, bandwidth, /*family=*/0, /*components=*/9) {}

  explicit RandomSmoothScenario(const ParamList& params)
      : RandomSmoothScenario(Parsed(params)) {}

  std::string name() const override { return "random-smooth"; }
  CoeffTriple coeff(Axis axis, const std::array<double, 3>& pos) const override {
    const int base = static_cast<int>(axis) * 3;
    return CoeffTriple(series_.value(base, pos), series_.value(base + 1, pos),
                       series_.value(base + 2, pos));
  }
  CoeffTriple coeff_derivative(Axis axis, Axis wrt,
                               const std::array<double, 3>& pos) const override {
    const int base = static_cast<int>(axis) * 3;
    return CoeffTriple(series_.derivative(base, wrt, pos),
                       series_.derivative(base + 1, wrt, pos),
                       series_.derivative(base + 2, wrt, pos));
  }
  std::uint64_t seed() const override { return seed_; }
  ParamList params() const override {
    return {{"seed", std::to_string(seed_)},
            {"amplitude", format_double(series_.amplitude())},
            {"bandwidth", std::to_string(bandwidth_)}};
  }

 private:
  struct Parsed {
    explicit Parsed(const ParamList& params) {
      detail::ParamReader r("random-smooth", params, {"seed", "amplitude", "bandwidth"});
      seed = r.seed("seed", 1);
      amplitude = r.number("amplitude", 1.0);
      bandwidth = r.integer("bandwidth", 2);
    }
    std::uint64_t seed;
    double amplitude;
    int bandwidth;
  };
  explicit RandomSmoothScenario(const Parsed& p)
      : RandomSmoothScenario(p.seed, p.amplitude, p.bandwidth) {}

  std::uint64_t seed_ = 0;
  int bandwidth_ = 0;
  TrigSeries series_;
};

/// Pure gauge plus an eps-scaled random smooth field: flat at eps=0, leaves
/// flatness at a controlled rate as eps grows.
class PerturbedScenario final : public Scenario {
 public:
  explicit PerturbedScenario(const ParamList& params) {
    detail::ParamReader r("perturbed", params,
                          {"gen_x", "gen_y", "gen_t", "eps", "seed", "bandwidth"});
    eps_ = r.number("eps", 0.1);
    require_domain(std::isfinite(eps_) && eps_ >= 0.0,
                   "scenario perturbed: eps must be finite and >= 0");
    seed_ = r.seed("seed", 1);
    bandwidth_ = r.integer("bandwidth", 2);
    ParamList base_params;
    for (const auto& kv : params)
      if (kv.first == "gen_x" || kv.first == "gen_y" || kv.first == "gen_t")
        base_params.push_back(kv);
    try {
      base_.emplace(base_params);
    } catch (const ConfigError& e) {
      throw ConfigError("scenario perturbed: " + std::string(e.what()));
    }
    noise_.emplace(seed_, eps_, bandwidth_, /*family=*/0, /*components=*/9);
  }

  std::string name() const override { return "perturbed"; }
  CoeffTriple coeff(Axis axis, const std::array<double, 3>& pos) const override {
    const int base = static_cast<int>(axis) * 3;
    return base_->coeff(axis, pos) +
           CoeffTriple(noise_->value(base, pos), noise_->value(base + 1, pos),
                       noise_->value(base + 2, pos));
  }
  CoeffTriple coeff_derivative(Axis axis, Axis wrt,
                               const std::array<double, 3>& pos) const override {
    const int base = static_cast<int>(axis) * 3;
    return base_->coeff_derivative(axis, wrt, pos) +
           CoeffTriple(noise_->derivative(base, wrt, pos),
                       noise_->derivative(base + 1, wrt, pos),
                       noise_->derivative(base + 2, wrt, pos));
  }
  bool analytically_flat() const override { return eps_ == 0.0; }
  std::uint64_t seed() const override { return seed_; }
  ParamList params() const override {
    ParamList out = base_->params();
    out.emplace_back("eps", format_double(eps_));
    out.emplace_back("seed", std::to_string(seed_));
    out.emplace_back("bandwidth", std::to_string(bandwidth_));
    return out;
  }
  void check_dim(int dim) const override { base_->check_dim(dim); }

 private:
  double eps_ = 0.0;
  std::uint64_t seed_ = 0;
  int bandwidth_ = 0;
  std::optional<PureGaugeScenario> base_;
  std::optional<TrigSeries> noise_;
};

inline std::unique_ptr<Scenario> make_scenario(const std::string& name,
                                               const ParamList& params) {
  if (name == "zero") {
    detail::ParamReader check("zero", params, {});
    (void)check;
    return std::make_unique<ZeroScenario>();
  }
  if (name == "constants") return std::make_unique<ConstantsScenario>(params);
  if (name == "abelian") return std::make_unique<AbelianScenario>(params);
  if (name == "pure-gauge") return std::make_unique<PureGaugeScenario>(params);
  if (name == "random-smooth") return std::make_unique<RandomSmoothScenario>(params);
  if (name == "perturbed") return std::make_unique<PerturbedScenario>(params);
  throw ConfigError(
      "unknown scenario '" + name +
      "' (known: zero, constants, abelian, pure-gauge, random-smooth, perturbed)");
}

/// Parses the compact call form "name" or "name(k=v, k=v)"; values may be
/// wrapped in parentheses to protect embedded commas, e.g. gen_x=(1,0,0).
inline std::unique_ptr<Scenario> make_scenario_from_spec(const std::string& spec) {
  std::size_t begin = 0, end = spec.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(spec[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(spec[end - 1]))) --end;
  const std::string body = spec.substr(begin, end - begin);
  if (body.empty()) throw ConfigError("empty scenario spec");

  const std::size_t open = body.find('(');
  if (open == std::string::npos) return make_scenario(body, {});
  if (body.back() != ')')
    throw ConfigError("scenario spec '" + spec + "': missing closing ')'");
  const std::string name = body.substr(0, open);
  const std::string args = body.substr(open + 1, body.size() - open - 2);

  ParamList params;
  int depth = 0;
  std::size_t start = 0;
  auto flush = [&](std::size_t stop) {
    std::string piece = args.substr(start, stop - start);
    std::size_t a = 0, b = piece.size();
    while (a < b && std::isspace(static_cast<unsigned char>(piece[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(piece[b - 1]))) --b;
    piece = piece.substr(a, b - a);
    if (piece.empty()) {
      if (!params.empty() || stop != args.size())
        throw ConfigError("scenario spec '" + spec + "': empty parameter");
      return;
    }
    const std::size_t eq = piece.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("scenario spec '" + spec + "': expected key=value, got '" + piece + "'");
    std::string key = piece.substr(0, eq);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
    std::string value = piece.substr(eq + 1);
    std::size_t v = 0;
    while (v < value.size() && std::isspace(static_cast<unsigned char>(value[v]))) ++v;
    params.emplace_back(key, value.substr(v));
  };
  for (std::size_t i = 0; i < args.size(); ++i) {
    const char c = args[i];
    if (c == '(') ++depth;
    else if (c == ')') --depth;
    else if (c == ',' && depth == 0) {
      flush(i);
      start = i + 1;
    }
    if (depth < 0)
      throw ConfigError("scenario spec '" + spec + "': unbalanced parentheses");
  }
  if (depth != 0) throw ConfigError("scenario spec '" + spec + "': unbalanced parentheses");
  flush(args.size());
  return make_scenario(name, params);
}

}  // namespace gcme
