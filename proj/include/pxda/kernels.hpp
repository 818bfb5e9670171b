#pragma once

#include <cmath>
#include <concepts>
#include <type_traits>
#include <vector>

#include "pxda/group_action.hpp"
#include "pxda/models.hpp"
#include "pxda/numeric.hpp"
#include "pxda/random.hpp"

namespace pxda {

// ---------------------------------------------------------------------------
// Probability measures r on the group
// ---------------------------------------------------------------------------

/// r = Exp(rate) on the multiplicative group.
struct ExponentialScale {
  double rate = 1.0;

  Scale sample(Rng& rng) const { return {exponential(rate, rng)}; }
  double log_density(Scale g) const { return std::log(rate) - rate * g.value; }
  ScaleLaw scale_law() const { return {0.0, rate, 0.0}; }
};

/// r(g) proportional to g^{a-1} exp(-b g^2) on (0, inf); g^2 ~ Gamma(a/2, rate b).
struct GammaSquaredScale {
  double a = 1.0;
  double b = 0.5;

  GammaSquaredScale() = default;
  GammaSquaredScale(double shape_a, double rate_b) : a(shape_a), b(rate_b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("GammaSquaredScale: a and b must be positive");
  }

  Scale sample(Rng& rng) const { return {std::sqrt(gamma_rate(0.5 * a, b, rng))}; }
  double log_density(Scale g) const {
    return std::log(2.0) + 0.5 * a * std::log(b) - std::lgamma(0.5 * a) + (a - 1.0) * std::log(g.value) -
           b * g.value * g.value;
  }
  ScaleLaw scale_law() const { return {a - 1.0, 0.0, b}; }
};

template <class R, class G>
concept RMeasure = requires(const R& r, typename G::Element g, Rng& rng) {
  { r.sample(rng) } -> std::same_as<typename G::Element>;
  { r.log_density(g) } -> std::convertible_to<double>;
};

/// Whether the inner group draw may use an exact gamma shortcut.
enum class InnerDraw { automatic, generic };

namespace detail {

template <class M, class G, class Law>
constexpr bool conjugate_possible = std::is_same_v<G, MultiplicativeGroup> && ScaleConjugate<M>;

/// Draws from the density exp(log_w) (w.r.t. the group's coordinate measure), using the
/// exact gamma draw when `law` is available and conjugate. Throws NullSetError when the
/// density cannot be normalized.
template <class G, class LogW>
typename G::Element draw_group_element(const G& action, LogW&& log_w, const ScaleLaw* law, InnerDraw mode,
                                       Rng& rng) {
  if constexpr (std::is_same_v<G, MultiplicativeGroup>) {
    if (law != nullptr) {
      if (!law->normalizable()) throw NullSetError("inner group density is not normalizable");
      if (mode == InnerDraw::automatic && law->gamma_conjugate()) return Scale{law->sample(rng)};
    }
  }
  return action.sample(log_w, rng);
}

template <class M>
typename M::YPoint null_set_fallback(const M& model, Rng& rng, const NullSetError& err) {
  if constexpr (ExactMarginalSampler<M>) {
    return model.sample_fy(rng);
  } else {
    throw err;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Normalizers m_r(y) and m(y)
// ---------------------------------------------------------------------------

/// m_r(y) = int f_Y(g y) j(g, y) r(dg), by quadrature over the group chart.
template <class M, class G, class R>
  requires NormalizedMarginal<M>
double m_r(const M& model, const G& action, const R& r, const typename M::YPoint& y,
           const QuadratureOptions& opts = {1e-14, 1e-12, 6, 24}) {
  return action.integrate(
      [&](typename G::Element g) {
        return std::exp(model.log_fy(action.act(g, y)) + action.log_j(g, y) + r.log_density(g));
      },
      opts);
}

/// m(y) = int f_Y(g y) j(g, y) nu_l(dg), by quadrature over the group chart.
template <class M, class G>
  requires NormalizedMarginal<M>
double m_haar(const M& model, const G& action, const typename M::YPoint& y,
              const QuadratureOptions& opts = {1e-14, 1e-12, 6, 24}) {
  return action.integrate(
      [&](typename G::Element g) {
        return std::exp(model.log_fy(action.act(g, y)) + action.log_j(g, y) + action.haar_log_density(g));
      },
      opts);
}

// ---------------------------------------------------------------------------
// Y-moves
// ---------------------------------------------------------------------------

/// Draw g from the density proportional to f_Y(g y) j(g, y) with respect to left-Haar measure.
template <class M, class G>
typename G::Element haar_group_draw(const M& model, const G& action, const typename M::YPoint& y, Rng& rng,
                                    InnerDraw mode = InnerDraw::automatic) {
  auto log_w = [&](typename G::Element g) {
    return model.log_fy_unnorm(action.act(g, y)) + action.log_j(g, y) + action.haar_log_density(g);
  };
  if constexpr (detail::conjugate_possible<M, G, ScaleLaw>) {
    const ScaleLaw law = model.scale_law(y) + ScaleLaw{-1.0, 0.0, 0.0};
    return detail::draw_group_element(action, log_w, &law, mode, rng);
  } else {
    return detail::draw_group_element(action, log_w, nullptr, mode, rng);
  }
}

/// One step of the Haar move Q: y -> g y with g drawn from f_Y(g y) j(g, y) / m(y) (w.r.t. nu_l).
/// If y lies in the null set (m(y) infinite) the next state is an exact draw from f_Y when the
/// model provides one.
template <class M, class G>
typename M::YPoint haar_ystep(const M& model, const G& action, const typename M::YPoint& y, Rng& rng,
                              InnerDraw mode = InnerDraw::automatic) {
  try {
    const auto g = haar_group_draw(model, action, y, rng, mode);
    return action.act(g, y);
  } catch (const NullSetError& err) {
    return detail::null_set_fallback(model, rng, err);
  }
}

/// One step of Q_r: draw g ~ r, then g' with density proportional to
/// r(g') j(g', g^{-1} y) f_Y(g' g^{-1} y), and move to g' g^{-1} y.
template <class M, class G, class R>
typename M::YPoint qr_ystep(const M& model, const G& action, const R& r, const typename M::YPoint& y, Rng& rng,
                            InnerDraw mode = InnerDraw::automatic) {
  const auto g = r.sample(rng);
  const typename M::YPoint u = action.act(action.inverse(g), y);
  auto log_w = [&](typename G::Element h) {
    return r.log_density(h) + action.log_j(h, u) + model.log_fy_unnorm(action.act(h, u));
  };
  try {
    if constexpr (detail::conjugate_possible<M, G, ScaleLaw> && requires { r.scale_law(); }) {
      const ScaleLaw law = r.scale_law() + model.scale_law(u);
      if (!std::isfinite(law.linear) || !std::isfinite(law.quadratic)) {
        throw DomainError("qr_ystep: inner density overflows");
      }
      return action.act(detail::draw_group_element(action, log_w, &law, mode, rng), u);
    } else {
      return action.act(detail::draw_group_element(action, log_w, nullptr, mode, rng), u);
    }
  } catch (const NullSetError& err) {
    return detail::null_set_fallback(model, rng, err);
  }
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

/// Point mass at y; the sandwich kernel is then plain DA.
struct IdentityRule {
  template <class M, class G>
  typename M::YPoint step(const M&, const G&, const typename M::YPoint& y, Rng&) const {
    return y;
  }
};

/// Q_r built from a probability measure r on the group (PX-DA middle step).
template <class R>
struct QrRule {
  R r;
  InnerDraw mode = InnerDraw::automatic;

  template <class M, class G>
  typename M::YPoint step(const M& model, const G& action, const typename M::YPoint& y, Rng& rng) const {
    return qr_ystep(model, action, r, y, rng, mode);
  }
};

/// Q built from left-Haar measure (Haar PX-DA middle step).
struct HaarRule {
  InnerDraw mode = InnerDraw::automatic;

  template <class M, class G>
  typename M::YPoint step(const M& model, const G& action, const typename M::YPoint& y, Rng& rng) const {
    return haar_ystep(model, action, y, rng, mode);
  }
};

/// Two consecutive steps of a rule reversible with respect to f_Y.
template <class Half>
struct ComposedRule {
  Half half;

  template <class M, class G>
  typename M::YPoint step(const M& model, const G& action, const typename M::YPoint& y, Rng& rng) const {
    return half.step(model, action, half.step(model, action, y, rng), rng);
  }
};

template <class Half>
ComposedRule<Half> compose_rule(Half half) {
  return {std::move(half)};
}

/// A point mass composed with itself is the point mass.
inline IdentityRule compose_rule(IdentityRule) { return {}; }

// ---------------------------------------------------------------------------
// Chains on X
// ---------------------------------------------------------------------------

/// One DA transition x' -> x: y ~ f_{Y|X}(.|x'), x ~ f_{X|Y}(.|y).
template <AugmentedModel M>
typename M::XPoint da_step(const M& model, const typename M::XPoint& x_prev, Rng& rng) {
  const auto y = model.sample_y_given_x(x_prev, rng);
  return model.sample_x_given_y(y, rng);
}

/// One transition of the sandwich kernel p_R: y ~ f_{Y|X}(.|x'), y' = rule.step(y), x ~ f_{X|Y}(.|y').
template <AugmentedModel M, class G, class Rule>
typename M::XPoint sandwich_step(const M& model, const G& action, const Rule& rule, const typename M::XPoint& x_prev,
                                 Rng& rng) {
  const auto y = model.sample_y_given_x(x_prev, rng);
  const auto y_next = rule.step(model, action, y, rng);
  return model.sample_x_given_y(y_next, rng);
}

/// State of the chain on X x G whose X-marginal is the Haar PX-DA chain.
template <class X, class E>
struct JointState {
  X x;
  E g;
};

/// One step of the DA-type chain on X x G:
///   y ~ f_{Y|X}(g' y | x') j(g', y)  (draw w ~ f_{Y|X}(.|x'), set y = g'^{-1} w)
///   (x, g) ~ f(x, g y) j(g, y) / m(y) (g from the Haar inner density at y, then x ~ f_{X|Y}(.|g y)).
/// At a null-set y the group draw is skipped: g resets to the identity and x is drawn given an exact f_Y draw.
template <AugmentedModel M, class G>
JointState<typename M::XPoint, typename G::Element> joint_xg_step(
    const M& model, const G& action, const JointState<typename M::XPoint, typename G::Element>& state, Rng& rng,
    InnerDraw mode = InnerDraw::automatic) {
  const auto w = model.sample_y_given_x(state.x, rng);
  const typename M::YPoint y = action.act(action.inverse(state.g), w);
  try {
    const auto g = haar_group_draw(model, action, y, rng, mode);
    return {model.sample_x_given_y(action.act(g, y), rng), g};
  } catch (const NullSetError& err) {
    const auto fresh = detail::null_set_fallback(model, rng, err);
    return {model.sample_x_given_y(fresh, rng), action.identity()};
  }
}

/// Runs `iterations` transitions from x0 and returns every `thin`-th state (iterations 1..n).
template <class X, class Step>
std::vector<X> simulate(X x0, long iterations, long thin, Step&& step) {
  if (thin < 1) throw std::invalid_argument("simulate: thin must be >= 1");
  std::vector<X> out;
  out.reserve(static_cast<std::size_t>(iterations / thin) + 1);
  X x = std::move(x0);
  for (long it = 1; it <= iterations; ++it) {
    x = step(x);
    if (it % thin == 0) out.push_back(x);
  }
  return out;
}

}  // namespace pxda
