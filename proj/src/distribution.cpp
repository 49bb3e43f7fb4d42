#include "regenbound/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "regenbound/error.hpp"
#include "regenbound/numeric.hpp"

namespace regenbound {

using numeric::kInf;

namespace {

constexpr double kQuadTol = 1e-10;
constexpr double kTailEps = 1e-14;

double quantile_tolerance(double scale) { return 1e-12 * std::max(1.0, scale); }

}  // namespace

namespace detail {

using NodePtr = std::shared_ptr<const DistributionNode>;

class DistributionNode : public std::enable_shared_from_this<DistributionNode> {
 public:
  virtual ~DistributionNode() = default;

  virtual double cdf(double s) const = 0;
  virtual double survival(double s) const { return 1.0 - cdf(s); }
  virtual std::optional<double> density(double s) const = 0;
  virtual double quantile(double y) const { return generic_quantile(y); }
  virtual double residual_quantile(double age, double y) const;
  virtual double integrated_survival(double s) const = 0;
  // int_s^inf (1 - F(u)) du, evaluated without cancellation where possible.
  virtual double tail_integral(double s) const { return std::max(0.0, mean() - integrated_survival(s)); }
  virtual Moment raw_moment(double k) const { return generic_raw_moment(k); }
  virtual Moment mgf(double a) const { return generic_mgf(a); }
  virtual double mgf_abscissa() const = 0;
  virtual double continuous_mass_above(double s) const { return survival(s); }
  virtual std::vector<Atom> atoms() const { return {}; }
  virtual std::vector<double> breakpoints() const { return {}; }
  virtual double support_end() const { return kInf; }
  virtual double scale() const = 0;
  virtual nlohmann::json to_json() const = 0;
  virtual NodePtr equilibrium() const;
  virtual NodePtr overshoot(double age) const;
  virtual bool is_exponential() const { return false; }

  double mean() const { return raw_moment(1.0).value; }
  NodePtr self() const { return shared_from_this(); }

  static const NodePtr& node_of(const Distribution& d) { return d.node_; }

 protected:
  double generic_quantile(double y) const;
  Moment generic_raw_moment(double k) const;
  Moment generic_mgf(double a) const;
  // Truncation point for improper integrals: the first doubling of the scale
  // at which `small(T)` holds, capped by the support.
  template <class P>
  double truncation(P&& small) const {
    const double end = support_end();
    if (std::isfinite(end)) return end;
    return numeric::grow_until(small, std::max(scale(), 1e-300));
  }
  double density_or_nan(double s) const {
    const auto f = density(s);
    return f ? *f : std::numeric_limits<double>::quiet_NaN();
  }
};

double DistributionNode::generic_quantile(double y) const {
  if (y <= 0.0) return 0.0;
  if (cdf(0.0) >= y) return 0.0;
  double hi = support_end();
  if (!std::isfinite(hi)) {
    hi = numeric::grow_until([&](double x) { return cdf(x) >= y; }, std::max(scale(), 1e-300));
    if (!std::isfinite(hi)) throw DomainError("quantile: level not reached within range");
  }
  return numeric::invert_nondecreasing([&](double x) { return cdf(x); },
                                       [&](double x) { return density_or_nan(x); }, y, 0.0, hi,
                                       quantile_tolerance(scale()));
}

double DistributionNode::residual_quantile(double age, double y) const {
  const double tail = survival(age);
  if (!(tail > 0.0)) throw DomainError("overshoot: age beyond support");
  if (y <= 0.0) return 0.0;
  const double target = cdf(age) + y * tail;
  if (tail >= 1e-6 && target < 1.0) return std::max(0.0, quantile(target) - age);
  // Deep in the tail: invert the survival ratio directly.
  auto g = [&](double x) { return 1.0 - survival(age + x) / tail; };
  auto dg = [&](double x) {
    const auto f = density(age + x);
    return f ? *f / tail : std::numeric_limits<double>::quiet_NaN();
  };
  double hi = support_end() - age;
  if (!std::isfinite(hi)) {
    hi = numeric::grow_until([&](double x) { return g(x) >= y; }, std::max(scale(), 1e-300));
    if (!std::isfinite(hi)) throw DomainError("overshoot quantile: level not reached");
  }
  return numeric::invert_nondecreasing(g, dg, y, 0.0, hi, quantile_tolerance(scale()));
}

Moment DistributionNode::generic_raw_moment(double k) const {
  // E X^k = int_0^inf k s^{k-1} (1 - F(s)) ds.
  const double upper = truncation([&](double t) {
    const double s = survival(t);
    return s < kTailEps && std::pow(t, k) * s < kTailEps;
  });
  if (!std::isfinite(upper)) return {kInf, kInf};
  const auto knots = numeric::make_knots(breakpoints(), 0.0, upper, scale());
  const auto integral = numeric::integrate_pieces(
      [&](double s) { return s <= 0.0 ? (k == 1.0 ? survival(0.0) : 0.0) : k * std::pow(s, k - 1.0) * survival(s); },
      knots, kQuadTol);
  return {integral.value, integral.error + kTailEps};
}

Moment DistributionNode::generic_mgf(double a) const {
  if (a == 0.0) return {1.0, 0.0};
  if (a >= mgf_abscissa()) return {kInf, kInf};
  // E e^{a X} = 1 + a int_0^inf e^{a s} (1 - F(s)) ds.
  const double upper = truncation([&](double t) {
    const double s = survival(t);
    return s < kTailEps && a * t + std::log(std::max(s, 1e-300)) < std::log(kTailEps);
  });
  if (!std::isfinite(upper)) return {kInf, kInf};
  const auto knots = numeric::make_knots(breakpoints(), 0.0, upper, scale());
  const auto integral =
      numeric::integrate_pieces([&](double s) { return std::exp(a * s) * survival(s); }, knots, kQuadTol);
  return {1.0 + a * integral.value, a * integral.error + kTailEps};
}

// --- Parametric families -------------------------------------------------

class ExponentialNode final : public DistributionNode {
 public:
  explicit ExponentialNode(double rate) : rate_(rate) {}

  double cdf(double s) const override { return -std::expm1(-rate_ * s); }
  double survival(double s) const override { return std::exp(-rate_ * s); }
  std::optional<double> density(double s) const override { return rate_ * std::exp(-rate_ * s); }
  double quantile(double y) const override { return -std::log1p(-y) / rate_; }
  double residual_quantile(double age, double y) const override {
    (void)age;
    return quantile(y);
  }
  double integrated_survival(double s) const override { return -std::expm1(-rate_ * s) / rate_; }
  double tail_integral(double s) const override { return std::exp(-rate_ * std::max(s, 0.0)) / rate_; }
  Moment raw_moment(double k) const override {
    return {std::exp(std::lgamma(k + 1.0) - k * std::log(rate_)), 0.0};
  }
  Moment mgf(double a) const override {
    if (a >= rate_) return {kInf, kInf};
    return {rate_ / (rate_ - a), 0.0};
  }
  double mgf_abscissa() const override { return rate_; }
  double scale() const override { return 1.0 / rate_; }
  nlohmann::json to_json() const override { return {{"kind", "exponential"}, {"rate", rate_}}; }
  NodePtr equilibrium() const override { return self(); }
  NodePtr overshoot(double age) const override {
    (void)age;
    return self();
  }
  bool is_exponential() const override { return true; }

 private:
  double rate_;
};

class GammaNode final : public DistributionNode {
 public:
  GammaNode(double shape, double rate) : shape_(shape), rate_(rate) {}

  double cdf(double s) const override {
    return s <= 0.0 ? 0.0 : boost::math::gamma_p(shape_, rate_ * s);
  }
  double survival(double s) const override {
    return s <= 0.0 ? 1.0 : boost::math::gamma_q(shape_, rate_ * s);
  }
  std::optional<double> density(double s) const override {
    if (s <= 0.0) {
      if (shape_ < 1.0) return std::nullopt;
      return shape_ == 1.0 ? rate_ : 0.0;
    }
    return rate_ * boost::math::gamma_p_derivative(shape_, rate_ * s);
  }
  double quantile(double y) const override {
    return y <= 0.0 ? 0.0 : boost::math::gamma_p_inv(shape_, y) / rate_;
  }
  double residual_quantile(double age, double y) const override {
    const double tail = survival(age);
    if (!(tail > 0.0)) throw DomainError("overshoot: age beyond support");
    if (y <= 0.0) return 0.0;
    return std::max(0.0, boost::math::gamma_q_inv(shape_, (1.0 - y) * tail) / rate_ - age);
  }
  double integrated_survival(double s) const override {
    if (s <= 0.0) return 0.0;
    const double x = rate_ * s;
    return s * boost::math::gamma_q(shape_, x) + shape_ / rate_ * boost::math::gamma_p(shape_ + 1.0, x);
  }
  double tail_integral(double s) const override {
    if (s <= 0.0) return shape_ / rate_ - s;
    const double x = rate_ * s;
    return std::max(0.0, shape_ / rate_ * boost::math::gamma_q(shape_ + 1.0, x) - s * boost::math::gamma_q(shape_, x));
  }
  Moment raw_moment(double k) const override {
    return {std::exp(std::lgamma(shape_ + k) - std::lgamma(shape_) - k * std::log(rate_)), 0.0};
  }
  Moment mgf(double a) const override {
    if (a >= rate_) return {kInf, kInf};
    return {std::pow(rate_ / (rate_ - a), shape_), 0.0};
  }
  double mgf_abscissa() const override { return rate_; }
  double scale() const override { return shape_ / rate_; }
  nlohmann::json to_json() const override {
    return {{"kind", "gamma"}, {"shape", shape_}, {"rate", rate_}};
  }

 private:
  double shape_;
  double rate_;
};

class WeibullNode final : public DistributionNode {
 public:
  WeibullNode(double shape, double scale) : shape_(shape), scale_(scale) {}

  double cdf(double s) const override { return s <= 0.0 ? 0.0 : -std::expm1(-power(s)); }
  double survival(double s) const override { return s <= 0.0 ? 1.0 : std::exp(-power(s)); }
  std::optional<double> density(double s) const override {
    if (s <= 0.0) {
      if (shape_ < 1.0) return std::nullopt;
      return shape_ == 1.0 ? 1.0 / scale_ : 0.0;
    }
    return shape_ / scale_ * std::pow(s / scale_, shape_ - 1.0) * std::exp(-power(s));
  }
  double quantile(double y) const override {
    return scale_ * std::pow(-std::log1p(-y), 1.0 / shape_);
  }
  double residual_quantile(double age, double y) const override {
    const double x = scale_ * std::pow(power(age) - std::log1p(-y), 1.0 / shape_) - age;
    return std::max(0.0, x);
  }
  double integrated_survival(double s) const override {
    if (s <= 0.0) return 0.0;
    const double inv = 1.0 / shape_;
    return scale_ * std::tgamma(inv) * inv * boost::math::gamma_p(inv, power(s));
  }
  double tail_integral(double s) const override {
    if (s <= 0.0) return raw_moment(1.0).value - s;
    const double inv = 1.0 / shape_;
    const double z = power(s);
    return std::max(0.0, scale_ * std::tgamma(1.0 + inv) * boost::math::gamma_q(1.0 + inv, z) - s * std::exp(-z));
  }
  Moment raw_moment(double k) const override {
    return {std::pow(scale_, k) * std::tgamma(1.0 + k / shape_), 0.0};
  }
  Moment mgf(double a) const override {
    if (a == 0.0) return {1.0, 0.0};
    if (shape_ == 1.0) {
      const double rate = 1.0 / scale_;
      return a >= rate ? Moment{kInf, kInf} : Moment{rate / (rate - a), 0.0};
    }
    return generic_mgf(a);
  }
  double mgf_abscissa() const override {
    if (shape_ > 1.0) return kInf;
    return shape_ == 1.0 ? 1.0 / scale_ : 0.0;
  }
  double scale() const override { return scale_; }
  nlohmann::json to_json() const override {
    return {{"kind", "weibull"}, {"shape", shape_}, {"scale", scale_}};
  }

 private:
  double power(double s) const { return std::pow(s / scale_, shape_); }

  double shape_;
  double scale_;
};

class UniformNode final : public DistributionNode {
 public:
  UniformNode(double lo, double hi) : lo_(lo), hi_(hi) {}

  double cdf(double s) const override {
    if (s <= lo_) return 0.0;
    if (s >= hi_) return 1.0;
    return (s - lo_) / (hi_ - lo_);
  }
  double survival(double s) const override {
    if (s <= lo_) return 1.0;
    if (s >= hi_) return 0.0;
    return (hi_ - s) / (hi_ - lo_);
  }
  std::optional<double> density(double s) const override {
    const double height = 1.0 / (hi_ - lo_);
    if (s == hi_ || (s == lo_ && lo_ > 0.0)) return std::nullopt;
    return (s >= lo_ && s < hi_) ? height : 0.0;
  }
  double quantile(double y) const override { return y <= 0.0 ? 0.0 : lo_ + y * (hi_ - lo_); }
  double integrated_survival(double s) const override {
    if (s <= lo_) return std::max(s, 0.0);
    const double x = std::min(s, hi_) - lo_;
    return lo_ + x - x * x / (2.0 * (hi_ - lo_));
  }
  double tail_integral(double s) const override {
    if (s <= lo_) return 0.5 * (lo_ + hi_) - s;
    if (s >= hi_) return 0.0;
    return (hi_ - s) * (hi_ - s) / (2.0 * (hi_ - lo_));
  }
  Moment raw_moment(double k) const override {
    return {(std::pow(hi_, k + 1.0) - std::pow(lo_, k + 1.0)) / ((k + 1.0) * (hi_ - lo_)), 0.0};
  }
  Moment mgf(double a) const override {
    if (a == 0.0) return {1.0, 0.0};
    const double w = hi_ - lo_;
    return {std::exp(a * lo_) * std::expm1(a * w) / (a * w), 0.0};
  }
  double mgf_abscissa() const override { return kInf; }
  std::vector<double> breakpoints() const override {
    if (lo_ > 0.0) return {lo_, hi_};
    return {hi_};
  }
  double support_end() const override { return hi_; }
  double scale() const override { return hi_; }
  nlohmann::json to_json() const override { return {{"kind", "uniform"}, {"lo", lo_}, {"hi", hi_}}; }
  NodePtr overshoot(double age) const override {
    if (age >= hi_) throw DomainError("overshoot: age beyond support");
    if (age <= 0.0) return self();
    if (age < lo_) return std::make_shared<UniformNode>(lo_ - age, hi_ - age);
    return std::make_shared<UniformNode>(0.0, hi_ - age);
  }

 private:
  double lo_;
  double hi_;
};

class HyperExponentialNode final : public DistributionNode {
 public:
  HyperExponentialNode(std::vector<double> weights, std::vector<double> rates)
      : weights_(std::move(weights)), rates_(std::move(rates)) {}

  double cdf(double s) const override { return s <= 0.0 ? 0.0 : 1.0 - survival(s); }
  double survival(double s) const override {
    if (s <= 0.0) return 1.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i) acc += weights_[i] * std::exp(-rates_[i] * s);
    return acc;
  }
  std::optional<double> density(double s) const override {
    double acc = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i)
      acc += weights_[i] * rates_[i] * std::exp(-rates_[i] * std::max(s, 0.0));
    return acc;
  }
  double integrated_survival(double s) const override {
    double acc = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i)
      acc += weights_[i] * -std::expm1(-rates_[i] * s) / rates_[i];
    return acc;
  }
  double tail_integral(double s) const override {
    double acc = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i)
      acc += weights_[i] * std::exp(-rates_[i] * std::max(s, 0.0)) / rates_[i];
    return acc;
  }
  Moment raw_moment(double k) const override {
    double acc = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i)
      acc += weights_[i] * std::exp(std::lgamma(k + 1.0) - k * std::log(rates_[i]));
    return {acc, 0.0};
  }
  Moment mgf(double a) const override {
    if (a >= mgf_abscissa()) return {kInf, kInf};
    double acc = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i) acc += weights_[i] * rates_[i] / (rates_[i] - a);
    return {acc, 0.0};
  }
  double mgf_abscissa() const override { return *std::min_element(rates_.begin(), rates_.end()); }
  double scale() const override { return mean(); }
  nlohmann::json to_json() const override {
    return {{"kind", "hyperexponential"}, {"weights", weights_}, {"rates", rates_}};
  }
  NodePtr equilibrium() const override {
    const double mu = mean();
    std::vector<double> w(weights_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = weights_[i] / (rates_[i] * mu);
    return std::make_shared<HyperExponentialNode>(std::move(w), rates_);
  }
  NodePtr overshoot(double age) const override {
    std::vector<double> w(weights_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) total += w[i] = weights_[i] * std::exp(-rates_[i] * age);
    if (!(total > 0.0)) throw DomainError("overshoot: age beyond support");
    for (double& x : w) x /= total;
    return std::make_shared<HyperExponentialNode>(std::move(w), rates_);
  }

 private:
  std::vector<double> weights_;
  std::vector<double> rates_;
};

class TabulatedNode final : public DistributionNode {
 public:
  explicit TabulatedNode(Tabulated table) : table_(std::move(table)) {
    const auto& p = table_.points;
    cum_is_.resize(p.size());
    cum_is_[0] = p[0].s;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      const double width = p[i + 1].s - p[i].s;
      cum_is_[i + 1] = cum_is_[i] + width * (1.0 - 0.5 * (p[i].right + p[i + 1].left));
    }
    last_tail_ = 1.0 - p.back().right;
  }

  double cdf(double s) const override { return 1.0 - survival(s); }

  double survival(double s) const override {
    const auto& p = table_.points;
    if (s < p[0].s) return 1.0;
    const std::size_t i = segment(s);
    if (s == p[i].s) return 1.0 - p[i].right;
    if (i + 1 < p.size()) {
      const double frac = (s - p[i].s) / (p[i + 1].s - p[i].s);
      return 1.0 - (p[i].right + (p[i + 1].left - p[i].right) * frac);
    }
    return tail_survival(s);
  }

  std::optional<double> density(double s) const override {
    const auto& p = table_.points;
    if (s < p[0].s) return 0.0;
    const std::size_t i = segment(s);
    if (s == p[i].s) return std::nullopt;
    if (i + 1 < p.size()) return (p[i + 1].left - p[i].right) / (p[i + 1].s - p[i].s);
    switch (table_.tail.kind) {
      case TailKind::exponential:
        return table_.tail.parameter * tail_survival(s);
      case TailKind::pareto:
        return table_.tail.parameter * tail_survival(s) / s;
      case TailKind::none:
        break;
    }
    return 0.0;
  }

  double quantile(double y) const override {
    const auto& p = table_.points;
    if (y <= 0.0) return 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i].left >= y) {
        // i > 0 here since p[0].left == 0 < y.
        const double lo = p[i - 1].right;
        return p[i - 1].s + (y - lo) / (p[i].left - lo) * (p[i].s - p[i - 1].s);
      }
      if (p[i].right >= y) return p[i].s;
    }
    const double s_m = p.back().s;
    switch (table_.tail.kind) {
      case TailKind::exponential:
        return s_m + std::log(last_tail_ / (1.0 - y)) / table_.tail.parameter;
      case TailKind::pareto:
        return s_m * std::pow(last_tail_ / (1.0 - y), 1.0 / table_.tail.parameter);
      case TailKind::none:
        break;
    }
    return s_m;
  }

  double integrated_survival(double s) const override {
    const auto& p = table_.points;
    if (s <= p[0].s) return std::max(s, 0.0);
    const std::size_t i = segment(s);
    const double x = s - p[i].s;
    if (i + 1 < p.size()) {
      const double slope = (p[i + 1].left - p[i].right) / (p[i + 1].s - p[i].s);
      return cum_is_[i] + x * (1.0 - p[i].right) - 0.5 * slope * x * x;
    }
    const double alpha = table_.tail.parameter;
    switch (table_.tail.kind) {
      case TailKind::exponential:
        return cum_is_[i] - last_tail_ * std::expm1(-alpha * x) / alpha;
      case TailKind::pareto: {
        const double s_m = p.back().s;
        if (alpha == 1.0) return cum_is_[i] + last_tail_ * s_m * std::log(s / s_m);
        return cum_is_[i] +
               last_tail_ * std::pow(s_m, alpha) * (std::pow(s, 1.0 - alpha) - std::pow(s_m, 1.0 - alpha)) /
                   (1.0 - alpha);
      }
      case TailKind::none:
        break;
    }
    return cum_is_[i];
  }

  double tail_integral(double s) const override {
    const auto& p = table_.points;
    const double s_m = p.back().s;
    const double beyond = tail_integral_from(std::max(s, s_m));
    if (s >= s_m) return beyond;
    return beyond + cum_is_.back() - integrated_survival(s);
  }

  Moment raw_moment(double k) const override {
    const auto& p = table_.points;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      const double slope = (p[i + 1].left - p[i].right) / (p[i + 1].s - p[i].s);
      acc += slope * (std::pow(p[i + 1].s, k + 1.0) - std::pow(p[i].s, k + 1.0)) / (k + 1.0);
    }
    for (const Atom& a : atoms()) acc += a.mass * std::pow(a.at, k);
    if (last_tail_ <= 0.0) return {acc, 0.0};
    const double s_m = p.back().s;
    const double alpha = table_.tail.parameter;
    if (table_.tail.kind == TailKind::pareto) {
      if (k >= alpha) return {kInf, kInf};
      return {acc + alpha * last_tail_ * std::pow(s_m, k) / (alpha - k), 0.0};
    }
    // Exponential tail: E[X^k; X > s_m] = s_m^k S(s_m) + int_{s_m}^inf k x^{k-1} S(x) dx.
    const double upper =
        s_m + numeric::grow_until([&](double t) { return std::pow(s_m + t, k) * tail_survival(s_m + t) < kTailEps; },
                                  1.0 / alpha);
    const auto knots = numeric::make_knots({}, s_m, upper, 1.0 / alpha);
    const auto integral = numeric::integrate_pieces(
        [&](double x) { return k * std::pow(x, k - 1.0) * tail_survival(x); }, knots, kQuadTol);
    return {acc + std::pow(s_m, k) * last_tail_ + integral.value, integral.error + kTailEps};
  }

  Moment mgf(double a) const override {
    if (a == 0.0) return {1.0, 0.0};
    if (a >= mgf_abscissa()) return {kInf, kInf};
    const auto& p = table_.points;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      const double width = p[i + 1].s - p[i].s;
      const double slope = (p[i + 1].left - p[i].right) / width;
      acc += slope * std::exp(a * p[i].s) * std::expm1(a * width) / a;
    }
    for (const Atom& atom : atoms()) acc += atom.mass * std::exp(a * atom.at);
    if (last_tail_ > 0.0) {
      const double r = table_.tail.parameter;
      acc += last_tail_ * r * std::exp(a * p.back().s) / (r - a);
    }
    return {acc, 0.0};
  }

  double mgf_abscissa() const override {
    if (last_tail_ <= 0.0) return kInf;
    return table_.tail.kind == TailKind::exponential ? table_.tail.parameter : 0.0;
  }

  double continuous_mass_above(double s) const override {
    const auto& p = table_.points;
    double acc = last_tail_ > 0.0 ? tail_survival(std::max(s, p.back().s)) : 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      if (p[i + 1].s <= s) continue;
      const double lo_value = s > p[i].s ? cdf(s) : p[i].right;
      acc += p[i + 1].left - lo_value;
    }
    return acc;
  }

  std::vector<Atom> atoms() const override {
    std::vector<Atom> out;
    for (const auto& pt : table_.points)
      if (pt.right > pt.left) out.push_back({pt.s, pt.right - pt.left});
    return out;
  }

  std::vector<double> breakpoints() const override {
    std::vector<double> out;
    for (const auto& pt : table_.points)
      if (pt.s > 0.0) out.push_back(pt.s);
    return out;
  }

  double support_end() const override { return last_tail_ > 0.0 ? kInf : table_.points.back().s; }
  double scale() const override {
    const double s = table_.points.back().s;
    return s > 0.0 ? s : 1.0;
  }

  nlohmann::json to_json() const override {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& pt : table_.points) {
      if (pt.left == pt.right)
        pts.push_back({pt.s, pt.right});
      else
        pts.push_back({pt.s, pt.left, pt.right});
    }
    nlohmann::json j = {{"kind", "tabulated"}, {"points", pts}};
    if (table_.tail.kind == TailKind::exponential)
      j["tail"] = {{"kind", "exponential"}, {"rate", table_.tail.parameter}};
    else if (table_.tail.kind == TailKind::pareto)
      j["tail"] = {{"kind", "pareto"}, {"index", table_.tail.parameter}};
    return j;
  }

 private:
  // Index of the last breakpoint with abscissa <= s (s >= points[0].s).
  std::size_t segment(double s) const {
    const auto& p = table_.points;
    auto it = std::upper_bound(p.begin(), p.end(), s, [](double v, const CdfPoint& pt) { return v < pt.s; });
    return static_cast<std::size_t>(std::distance(p.begin(), it)) - 1;
  }

  double tail_integral_from(double s) const {
    if (last_tail_ <= 0.0) return 0.0;
    const double alpha = table_.tail.parameter;
    if (table_.tail.kind == TailKind::exponential) return tail_survival(s) / alpha;
    return alpha > 1.0 ? tail_survival(s) * s / (alpha - 1.0) : kInf;
  }

  double tail_survival(double s) const {
    const double s_m = table_.points.back().s;
    switch (table_.tail.kind) {
      case TailKind::exponential:
        return last_tail_ * std::exp(-table_.tail.parameter * (s - s_m));
      case TailKind::pareto:
        return last_tail_ * std::pow(s / s_m, -table_.tail.parameter);
      case TailKind::none:
        break;
    }
    return 0.0;
  }

  Tabulated table_;
  std::vector<double> cum_is_;
  double last_tail_ = 0.0;
};

// --- Derived laws ------------------------------------------------------------

class EquilibriumNode final : public DistributionNode {
 public:
  EquilibriumNode(NodePtr base, double mean) : base_(std::move(base)), mean_(mean) {}

  double cdf(double s) const override {
    if (s <= 0.0) return 0.0;
    const double head = base_->integrated_survival(s) / mean_;
    return head < 0.5 ? head : 1.0 - survival(s);
  }
  double survival(double s) const override {
    return s <= 0.0 ? 1.0 : std::clamp(base_->tail_integral(s) / mean_, 0.0, 1.0);
  }
  std::optional<double> density(double s) const override {
    if (s < 0.0) return 0.0;
    for (const Atom& a : base_->atoms())
      if (a.at == s) return std::nullopt;
    return base_->survival(s) / mean_;
  }
  double integrated_survival(double s) const override {
    if (s <= 0.0) return 0.0;
    const auto knots = numeric::make_knots(base_->breakpoints(), 0.0, s, scale());
    return numeric::integrate_pieces([&](double u) { return survival(u); }, knots, kQuadTol).value;
  }
  Moment raw_moment(double k) const override {
    if (!base_->raw_moment(k + 1.0).finite()) return {kInf, kInf};
    return generic_raw_moment(k);
  }
  Moment mgf(double a) const override { return generic_mgf(a); }
  double mgf_abscissa() const override { return base_->mgf_abscissa(); }
  std::vector<double> breakpoints() const override { return base_->breakpoints(); }
  double support_end() const override { return base_->support_end(); }
  double scale() const override { return base_->scale(); }
  nlohmann::json to_json() const override { return {{"kind", "equilibrium"}, {"of", base_->to_json()}}; }

 private:
  NodePtr base_;
  double mean_;
};

class OvershootNode final : public DistributionNode {
 public:
  OvershootNode(NodePtr base, double age) : base_(std::move(base)), age_(age), tail_(base_->survival(age)) {}

  double cdf(double s) const override {
    if (s <= 0.0) return 0.0;
    if (tail_ > 0.5) return (base_->cdf(s + age_) - base_->cdf(age_)) / tail_;
    return 1.0 - base_->survival(s + age_) / tail_;
  }
  double survival(double s) const override {
    return s <= 0.0 ? 1.0 : base_->survival(s + age_) / tail_;
  }
  std::optional<double> density(double s) const override {
    if (s < 0.0) return 0.0;
    const auto f = base_->density(s + age_);
    if (!f) return std::nullopt;
    return *f / tail_;
  }
  double quantile(double y) const override { return base_->residual_quantile(age_, y); }
  double residual_quantile(double age, double y) const override {
    return base_->residual_quantile(age_ + age, y);
  }
  double integrated_survival(double s) const override {
    if (s <= 0.0) return 0.0;
    return (base_->integrated_survival(s + age_) - base_->integrated_survival(age_)) / tail_;
  }
  double tail_integral(double s) const override { return base_->tail_integral(std::max(s, 0.0) + age_) / tail_; }
  Moment raw_moment(double k) const override {
    if (!base_->raw_moment(k).finite()) return {kInf, kInf};
    return generic_raw_moment(k);
  }
  Moment mgf(double a) const override { return generic_mgf(a); }
  double mgf_abscissa() const override { return base_->mgf_abscissa(); }
  double continuous_mass_above(double s) const override {
    return base_->continuous_mass_above(std::max(s, 0.0) + age_) / tail_;
  }
  std::vector<Atom> atoms() const override {
    std::vector<Atom> out;
    for (const Atom& a : base_->atoms())
      if (a.at > age_) out.push_back({a.at - age_, a.mass / tail_});
    return out;
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> out;
    for (double b : base_->breakpoints())
      if (b > age_) out.push_back(b - age_);
    return out;
  }
  double support_end() const override { return base_->support_end() - age_; }
  double scale() const override { return base_->scale(); }
  nlohmann::json to_json() const override {
    return {{"kind", "overshoot"}, {"age", age_}, {"of", base_->to_json()}};
  }
  NodePtr overshoot(double age) const override {
    if (!(survival(age) > 0.0)) throw DomainError("overshoot: age beyond support");
    return std::make_shared<OvershootNode>(base_, age_ + age);
  }

 private:
  NodePtr base_;
  double age_;
  double tail_;
};

NodePtr DistributionNode::equilibrium() const {
  const Moment mu = raw_moment(1.0);
  if (!mu.finite() || !(mu.value > 0.0))
    throw ConditionViolated("equilibrium law needs a finite positive mean");
  return std::make_shared<EquilibriumNode>(self(), mu.value);
}

NodePtr DistributionNode::overshoot(double age) const {
  if (age < 0.0) throw InvalidArgument("overshoot: age must be nonnegative");
  if (!(survival(age) > 0.0)) throw DomainError("overshoot: age beyond support");
  if (age == 0.0 && cdf(0.0) == 0.0) return self();
  return std::make_shared<OvershootNode>(self(), age);
}

}  // namespace detail

// --- Distribution handle -------------------------------------------------------

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

detail::NodePtr make_node(DistributionSpec spec) {
  return std::visit(
      [](auto&& s) -> detail::NodePtr {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          require(positive_finite(s.rate), "exponential.rate must be positive");
          return std::make_shared<detail::ExponentialNode>(s.rate);
        } else if constexpr (std::is_same_v<T, Gamma>) {
          require(positive_finite(s.shape), "gamma.shape must be positive");
          require(positive_finite(s.rate), "gamma.rate must be positive");
          return std::make_shared<detail::GammaNode>(s.shape, s.rate);
        } else if constexpr (std::is_same_v<T, Weibull>) {
          require(positive_finite(s.shape), "weibull.shape must be positive");
          require(positive_finite(s.scale), "weibull.scale must be positive");
          return std::make_shared<detail::WeibullNode>(s.shape, s.scale);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          require(std::isfinite(s.lo) && s.lo >= 0.0, "uniform.lo must be >= 0");
          require(std::isfinite(s.hi) && s.hi > s.lo, "uniform.hi must exceed uniform.lo");
          return std::make_shared<detail::UniformNode>(s.lo, s.hi);
        } else if constexpr (std::is_same_v<T, HyperExponential>) {
          require(!s.weights.empty() && s.weights.size() == s.rates.size(),
                  "hyperexponential.weights and rates must be nonempty and of equal length");
          double total = 0.0;
          for (std::size_t i = 0; i < s.weights.size(); ++i) {
            require(std::isfinite(s.weights[i]) && s.weights[i] >= 0.0,
                    "hyperexponential.weights must be nonnegative");
            require(positive_finite(s.rates[i]), "hyperexponential.rates must be positive");
            total += s.weights[i];
          }
          require(std::abs(total - 1.0) < 1e-9, "hyperexponential.weights must sum to 1");
          std::vector<double> w = s.weights;
          for (double& x : w) x /= total;
          return std::make_shared<detail::HyperExponentialNode>(std::move(w), s.rates);
        } else {
          const auto& p = s.points;
          require(!p.empty(), "tabulated.points must be nonempty");
          require(p[0].left == 0.0, "tabulated: F(s0-) must be 0");
          for (std::size_t i = 0; i < p.size(); ++i) {
            require(std::isfinite(p[i].s) && p[i].s >= 0.0, "tabulated.points abscissae must be >= 0");
            require(p[i].left >= 0.0 && p[i].left <= p[i].right && p[i].right <= 1.0,
                    "tabulated.points CDF values must lie in [0,1] and be nondecreasing");
            if (i > 0) {
              require(p[i].s > p[i - 1].s, "tabulated.points abscissae must be strictly increasing");
              require(p[i].left >= p[i - 1].right, "tabulated.points CDF values must be nondecreasing");
            }
          }
          const bool complete = p.back().right >= 1.0;
          if (complete) {
            require(s.tail.kind == TailKind::none, "tabulated.tail given but the CDF already reaches 1");
          } else {
            require(s.tail.kind != TailKind::none, "tabulated: CDF below 1 at the last point needs a tail");
            require(positive_finite(s.tail.parameter), "tabulated.tail parameter must be positive");
            require(s.tail.kind != TailKind::pareto || p.back().s > 0.0,
                    "tabulated: pareto tail needs a positive last abscissa");
          }
          return std::make_shared<detail::TabulatedNode>(s);
        }
      },
      std::move(spec));
}

double get_number(const nlohmann::json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) throw InvalidArgument(ctx + "." + key + ": missing");
  if (!j.at(key).is_number()) throw InvalidArgument(ctx + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

std::vector<double> get_numbers(const nlohmann::json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j.at(key).is_array()) throw InvalidArgument(ctx + "." + key + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw InvalidArgument(ctx + "." + key + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

Distribution::Distribution(DistributionSpec spec) : node_(make_node(std::move(spec))) {}

Distribution::Distribution(std::shared_ptr<const detail::DistributionNode> node) : node_(std::move(node)) {}

Distribution Distribution::from_json(const nlohmann::json& j) {
  const std::string ctx = "distribution";
  if (!j.is_object()) throw InvalidArgument(ctx + ": expected an object");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw InvalidArgument(ctx + ".kind: missing");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "exponential") return Distribution(Exponential{get_number(j, "rate", ctx)});
  if (kind == "gamma") return Distribution(Gamma{get_number(j, "shape", ctx), get_number(j, "rate", ctx)});
  if (kind == "weibull") return Distribution(Weibull{get_number(j, "shape", ctx), get_number(j, "scale", ctx)});
  if (kind == "uniform") return Distribution(Uniform{get_number(j, "lo", ctx), get_number(j, "hi", ctx)});
  if (kind == "hyperexponential")
    return Distribution(HyperExponential{get_numbers(j, "weights", ctx), get_numbers(j, "rates", ctx)});
  if (kind == "tabulated") {
    if (!j.contains("points") || !j.at("points").is_array())
      throw InvalidArgument(ctx + ".points: expected an array of [s, F] or [s, F(s-), F(s)]");
    Tabulated t;
    for (const auto& row : j.at("points")) {
      if (!row.is_array() || (row.size() != 2 && row.size() != 3))
        throw InvalidArgument(ctx + ".points: each row must be [s, F] or [s, F(s-), F(s)]");
      for (const auto& v : row)
        if (!v.is_number()) throw InvalidArgument(ctx + ".points: expected numbers");
      CdfPoint p{row[0].get<double>(), row[1].get<double>(), row[row.size() - 1].get<double>()};
      if (row.size() == 2 && t.points.empty()) p.left = 0.0;
      t.points.push_back(p);
    }
    if (j.contains("tail")) {
      const auto& tail = j.at("tail");
      const std::string tctx = ctx + ".tail";
      if (!tail.contains("kind") || !tail.at("kind").is_string()) throw InvalidArgument(tctx + ".kind: missing");
      const std::string tk = tail.at("kind").get<std::string>();
      if (tk == "exponential") {
        t.tail = {TailKind::exponential, get_number(tail, "rate", tctx)};
      } else if (tk == "pareto") {
        t.tail = {TailKind::pareto, get_number(tail, "index", tctx)};
      } else {
        throw InvalidArgument(tctx + ".kind: unknown tail '" + tk + "'");
      }
    }
    return Distribution(std::move(t));
  }
  if (kind == "equilibrium") {
    if (!j.contains("of")) throw InvalidArgument(ctx + ".of: missing");
    return from_json(j.at("of")).equilibrium();
  }
  if (kind == "overshoot") {
    if (!j.contains("of")) throw InvalidArgument(ctx + ".of: missing");
    return from_json(j.at("of")).overshoot(get_number(j, "age", ctx));
  }
  throw InvalidArgument(ctx + ".kind: unknown kind '" + kind + "'");
}

nlohmann::json Distribution::to_json() const { return node_->to_json(); }
std::string Distribution::describe() const { return node_->to_json().dump(); }

double Distribution::cdf(double s) const { return s < 0.0 ? 0.0 : std::clamp(node_->cdf(s), 0.0, 1.0); }
double Distribution::survival(double s) const {
  return s < 0.0 ? 1.0 : std::clamp(node_->survival(s), 0.0, 1.0);
}
std::optional<double> Distribution::density(double s) const {
  if (s < 0.0) return 0.0;
  return node_->density(s);
}

double Distribution::quantile(double y) const {
  if (!(y >= 0.0)) throw InvalidArgument("quantile: level must be in [0, 1)");
  if (y >= 1.0) throw DomainError("quantile: level must be below 1");
  return node_->quantile(y);
}

double Distribution::residual_quantile(double age, double y) const {
  if (!(y >= 0.0)) throw InvalidArgument("quantile: level must be in [0, 1)");
  if (y >= 1.0) throw DomainError("quantile: level must be below 1");
  if (!(age >= 0.0)) throw InvalidArgument("overshoot: age must be nonnegative");
  return node_->residual_quantile(age, y);
}

double Distribution::integrated_survival(double s) const {
  return s <= 0.0 ? 0.0 : node_->integrated_survival(s);
}

Moment Distribution::raw_moment(double k) const {
  if (!(k > 0.0)) throw InvalidArgument("raw_moment: order must be positive");
  return node_->raw_moment(k);
}

Moment Distribution::mgf(double a) const {
  if (!(a >= 0.0)) throw InvalidArgument("mgf: rate must be >= 0");
  if (a == 0.0) return {1.0, 0.0};
  return node_->mgf(a);
}

double Distribution::mgf_abscissa() const { return node_->mgf_abscissa(); }
double Distribution::mean() const { return node_->mean(); }
double Distribution::continuous_mass_above(double s) const { return node_->continuous_mass_above(s); }
std::vector<Atom> Distribution::atoms() const { return node_->atoms(); }
std::vector<double> Distribution::breakpoints() const { return node_->breakpoints(); }
double Distribution::support_end() const { return node_->support_end(); }
double Distribution::scale() const { return node_->scale(); }
bool Distribution::is_exponential() const { return node_->is_exponential(); }

Distribution Distribution::equilibrium() const { return Distribution(node_->equilibrium()); }
Distribution Distribution::overshoot(double age) const { return Distribution(node_->overshoot(age)); }

ValidatedDistribution validate(const Distribution& d) {
  if (!(d.absolutely_continuous_mass() > 0.0))
    throw ConditionViolated("distribution has no absolutely continuous component");
  const Moment mu = d.raw_moment(1.0);
  if (!mu.finite()) throw ConditionViolated("distribution mean diverges");
  if (!(mu.value > 0.0)) throw ConditionViolated("distribution mean must be positive");
  return ValidatedDistribution(d, mu.value);
}

MomentSummary summarize_moments(const Distribution& d, const std::vector<double>& ks,
                                const std::vector<double>& rates) {
  MomentSummary out;
  out.mean = d.mean();
  for (double k : ks) out.raw_moments[k] = d.raw_moment(k);
  for (double a : rates) out.mgf_values[a] = d.mgf(a);
  return out;
}

// --- Delay ---------------------------------------------------------------------

namespace {

Distribution resolve_first(const Distribution& period, const DelaySpec& spec) {
  return std::visit(
      [&](auto&& s) -> Distribution {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FixedAge>) {
          if (!(s.age >= 0.0)) throw InvalidArgument("delay.age must be >= 0");
          if (!(period.survival(s.age) > 0.0)) throw DomainError("fixed_age delay requires F(a) < 1");
          return period.overshoot(s.age);
        } else if constexpr (std::is_same_v<T, DelayLaw>) {
          return s.law;
        } else {
          return period.equilibrium();
        }
      },
      spec);
}

}  // namespace

Delay::Delay(const Distribution& period, DelaySpec spec)
    : period_(period), spec_(std::move(spec)), first_(resolve_first(period_, spec_)) {}

double Delay::initial_age(double first_period, double u) const {
  if (const auto* fixed = std::get_if<FixedAge>(&spec_)) return fixed->age;
  if (std::holds_alternative<DelayLaw>(spec_)) return 0.0;
  return period_.residual_quantile(first_period, u);
}

nlohmann::json Delay::to_json() const {
  return std::visit(
      [](auto&& s) -> nlohmann::json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FixedAge>) {
          return {{"kind", "fixed_age"}, {"age", s.age}};
        } else if constexpr (std::is_same_v<T, DelayLaw>) {
          return {{"kind", "law"}, {"law", s.law.to_json()}};
        } else {
          return {{"kind", "stationary"}};
        }
      },
      spec_);
}

DelaySpec delay_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw InvalidArgument("delay.kind: missing");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "fixed_age") {
    if (!j.contains("age") || !j.at("age").is_number()) throw InvalidArgument("delay.age: missing");
    return FixedAge{j.at("age").get<double>()};
  }
  if (kind == "law") {
    if (!j.contains("law")) throw InvalidArgument("delay.law: missing");
    return DelayLaw{Distribution::from_json(j.at("law"))};
  }
  if (kind == "stationary") return StationaryDelay{};
  throw InvalidArgument("delay.kind: unknown kind '" + kind + "'");
}

}  // namespace regenbound
