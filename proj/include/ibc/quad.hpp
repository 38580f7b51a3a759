#ifndef IBC_QUAD_HPP
#define IBC_QUAD_HPP

// Deterministic adaptive quadrature over semi-infinite, finite-singular and
// nested domains. Globally adaptive 15-point Gauss-Kronrod with a worst-first
// interval heap; semi-infinite domains are mapped onto (0,1) by s = u/(1-u).
// Real and complex integrands share the same node machinery.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

#include "ibc/errors.hpp"

namespace ibc {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_depth = 12;          // interval budget = 2^max_depth
    double truncation_sigma = 12.0;
    int nested_budget = 4;
    double eps_floor = 1e-9;     // denominator floor for relative residuals
    double edge_tol = 1e-12;     // admissible field magnitude at grid edges (spectral ops)

    QuadratureConfig tightened(double factor) const {
        QuadratureConfig c = *this;
        c.abs_tol *= factor;
        c.rel_tol *= factor;
        return c;
    }
};

template <class T>
struct BasicIntegralResult {
    T value{};
    double abs_error_estimate = 0.0;
    long nodes_used = 0;
    bool converged = false;
};

using IntegralResult = BasicIntegralResult<double>;
using ComplexIntegralResult = BasicIntegralResult<std::complex<double>>;

namespace quad_detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <class T>
inline double norm_of(const T& v) {
    if constexpr (std::is_same_v<T, std::complex<double>>) {
        return std::abs(v);
    } else {
        return std::fabs(v);
    }
}

template <class T>
inline bool finite(const T& v) {
    if constexpr (std::is_same_v<T, std::complex<double>>) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    } else {
        return std::isfinite(v);
    }
}

template <class T, class F>
void gk15(F&& f, double a, double b, T& integral, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    for (int i = 0; i < 15; ++i) {
        if (!finite(fv[i]))
            throw NonFinite("integrand returned a non-finite value inside the domain");
    }
    T resk{};
    for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
    resk += kWgk[7] * fv[7];
    T resg{};
    for (int i = 0; i < 3; ++i) resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    resg += kWg[3] * fv[7];
    integral = resk * h;
    err = norm_of<T>((resk - resg) * h);
}

template <class T>
struct Segment {
    double a, b;
    T value;
    double err;
    bool operator<(const Segment& o) const { return err < o.err; }
};

template <class T, class F>
BasicIntegralResult<T> adaptive(F&& f, double a, double b, const QuadratureConfig& cfg) {
    BasicIntegralResult<T> out;
    if (!(b > a)) {
        out.converged = true;
        return out;
    }
    const long max_intervals = 1L << std::clamp(cfg.max_depth, 1, 24);
    std::priority_queue<Segment<T>> heap;
    Segment<T> s0{a, b, T{}, 0.0};
    gk15<T>(f, a, b, s0.value, s0.err);
    heap.push(s0);
    out.nodes_used = 15;
    long intervals = 1;
    T total = s0.value;
    double total_err = s0.err;
    while (true) {
        const double tol = std::max(cfg.abs_tol, cfg.rel_tol * norm_of<T>(total));
        if (total_err <= tol) {
            out.converged = true;
            break;
        }
        if (intervals >= max_intervals) break;
        Segment<T> worst = heap.top();
        heap.pop();
        total -= worst.value;
        total_err -= worst.err;
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval exhausted at floating-point resolution; keep its estimate
            total += worst.value;
            total_err += worst.err;
            out.converged = total_err <= std::max(cfg.abs_tol, cfg.rel_tol * norm_of<T>(total));
            break;
        }
        Segment<T> left{worst.a, mid, T{}, 0.0};
        Segment<T> right{mid, worst.b, T{}, 0.0};
        gk15<T>(f, left.a, left.b, left.value, left.err);
        gk15<T>(f, right.a, right.b, right.value, right.err);
        out.nodes_used += 30;
        ++intervals;
        total += left.value + right.value;
        total_err += left.err + right.err;
        heap.push(left);
        heap.push(right);
    }
    out.value = total;
    out.abs_error_estimate = total_err;
    return out;
}

}  // namespace quad_detail

/// Adaptive integral of f over the finite interval (a,b).
template <class F>
auto integrate_finite(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
    using T = std::invoke_result_t<F, double>;
    return quad_detail::adaptive<T>(std::forward<F>(f), a, b, cfg);
}

/// Adaptive integral of f over (0, inf); f must eventually decay monotonically.
/// The domain is folded onto (0,1) twice: s in (0,1) directly and s = 1/v for
/// the tail, so both endpoint singularities and algebraic tails sit at v -> 0
/// where the subdivision has full floating-point resolution.
template <class F>
auto integrate_semi_infinite(F&& f, const QuadratureConfig& cfg = {}) {
    using T = std::invoke_result_t<F, double>;
    auto half = cfg.tightened(0.5);
    auto near = quad_detail::adaptive<T>([&f](double s) -> T { return f(s); }, 0.0, 1.0, half);
    auto far = quad_detail::adaptive<T>(
        [&f](double v) -> T { return f(1.0 / v) / (v * v); }, 0.0, 1.0, half);
    BasicIntegralResult<T> out;
    out.value = near.value + far.value;
    out.abs_error_estimate = near.abs_error_estimate + far.abs_error_estimate;
    out.nodes_used = near.nodes_used + far.nodes_used;
    out.converged = near.converged && far.converged;
    return out;
}

/// Adaptive integral of f over (a, inf).
template <class F>
auto integrate_from(F&& f, double a, const QuadratureConfig& cfg = {}) {
    using T = std::invoke_result_t<F, double>;
    auto g = [&f, a](double s) -> T { return f(a + s); };
    return integrate_semi_infinite(g, cfg);
}

/// Truncated whole-line integral; the cut sits at truncation_sigma * scale
/// on both sides of center. Intended for integrands with Gaussian-type tails.
template <class F>
auto integrate_real_line(F&& f, const QuadratureConfig& cfg = {}, double center = 0.0,
                         double scale = 1.0) {
    const double half = cfg.truncation_sigma * scale;
    return integrate_finite(std::forward<F>(f), center - half, center + half, cfg);
}

enum class SingularEnd { Lower, Upper };

/// Integral over (a,b) where f behaves like C*(s-a)^(-gamma) at the singular
/// endpoint (or mirrored at b). The power substitution u = (s-a)^(1-gamma)
/// removes the singularity before the adaptive pass.
template <class F>
auto integrate_singular_endpoint(F&& f, double a, double b, double gamma,
                                 const QuadratureConfig& cfg = {},
                                 SingularEnd end = SingularEnd::Lower) {
    using T = std::invoke_result_t<F, double>;
    if (!(gamma > 0.0 && gamma < 1.0))
        throw InvalidParameter("singular exponent must lie in (0,1)");
    if (!(b > a)) return BasicIntegralResult<T>{T{}, 0.0, 0, true};
    const double q = 1.0 / (1.0 - gamma);
    const double top = std::pow(b - a, 1.0 - gamma);
    if (end == SingularEnd::Lower) {
        auto g = [&f, a, q](double u) -> T {
            return f(a + std::pow(u, q)) * q * std::pow(u, q - 1.0);
        };
        return quad_detail::adaptive<T>(g, 0.0, top, cfg);
    }
    auto g = [&f, b, q](double u) -> T {
        return f(b - std::pow(u, q)) * q * std::pow(u, q - 1.0);
    };
    return quad_detail::adaptive<T>(g, 0.0, top, cfg);
}

/// Iterated integral of a kernel chain over (0,inf)^depth:
///   I(x) = int K_0(x,w_0) int K_1(w_0,w_1) ... int K_{d-1}(w_{d-2},w_{d-1}) dw...
/// Each level's tolerance is one decade tighter than the one above it.
inline IntegralResult integrate_nested(
    const std::vector<std::function<double(double, double)>>& levels, double outer_arg,
    const QuadratureConfig& cfg = {}) {
    const int depth = static_cast<int>(levels.size());
    if (depth < 1) throw InvalidParameter("nested integral needs at least one level");
    if (depth > cfg.nested_budget)
        throw DepthUnsupported("nested depth exceeds the configured budget");

    struct Rec {
        const std::vector<std::function<double(double, double)>>& ls;
        long nodes = 0;
        bool converged = true;
        double eval(int level, double prev, const QuadratureConfig& c) {
            auto inner_cfg = c.tightened(0.1);
            auto f = [&](double w) {
                double k = ls[level](prev, w);
                if (level + 1 == static_cast<int>(ls.size())) return k;
                return k == 0.0 ? 0.0 : k * eval(level + 1, w, inner_cfg);
            };
            auto r = integrate_semi_infinite(f, c);
            nodes += r.nodes_used;
            converged = converged && r.converged;
            return r.value;
        }
    } rec{levels};

    IntegralResult out;
    auto outer_cfg = cfg;
    auto f = [&](double w) {
        double k = levels[0](outer_arg, w);
        if (depth == 1) return k;
        return k == 0.0 ? 0.0 : k * rec.eval(1, w, outer_cfg.tightened(0.1));
    };
    auto r = integrate_semi_infinite(f, cfg);
    out.value = r.value;
    out.abs_error_estimate = r.abs_error_estimate;
    out.nodes_used = r.nodes_used + rec.nodes;
    out.converged = r.converged && rec.converged;
    return out;
}

/// Final subdivision of (a,b) reached by the adaptive pass for g.
template <class G>
std::vector<double> adaptive_partition(G&& g, double a, double b,
                                       const QuadratureConfig& cfg = {}) {
    const long max_intervals = 1L << std::clamp(cfg.max_depth, 1, 24);
    std::priority_queue<quad_detail::Segment<double>> heap;
    quad_detail::Segment<double> s0{a, b, 0.0, 0.0};
    quad_detail::gk15<double>(g, a, b, s0.value, s0.err);
    heap.push(s0);
    long intervals = 1;
    double total = s0.value, total_err = s0.err;
    while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total)) &&
           intervals < max_intervals) {
        auto worst = heap.top();
        heap.pop();
        total -= worst.value;
        total_err -= worst.err;
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            total += worst.value;
            total_err += worst.err;
            break;
        }
        quad_detail::Segment<double> l{worst.a, mid, 0.0, 0.0}, r{mid, worst.b, 0.0, 0.0};
        quad_detail::gk15<double>(g, l.a, l.b, l.value, l.err);
        quad_detail::gk15<double>(g, r.a, r.b, r.value, r.err);
        total += l.value + r.value;
        total_err += l.err + r.err;
        heap.push(l);
        heap.push(r);
        ++intervals;
    }
    std::vector<double> cuts;
    cuts.reserve(intervals + 1);
    while (!heap.empty()) {
        cuts.push_back(heap.top().a);
        cuts.push_back(heap.top().b);
        heap.pop();
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

/// Fixed quadrature nodes and weights on (0,inf), shared across batched
/// evaluations. Built from the two unit pieces used by
/// integrate_semi_infinite (direct and inverted).
struct SharedNodes {
    std::vector<double> s;
    std::vector<double> w;
};

inline SharedNodes shared_nodes_two_piece(const std::vector<double>& cuts_near,
                                          const std::vector<double>& cuts_far) {
    SharedNodes out;
    auto emit = [&out](const std::vector<double>& cuts, bool inverted) {
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double a = cuts[i], b = cuts[i + 1];
            const double c = 0.5 * (a + b), h = 0.5 * (b - a);
            for (int j = 0; j < 15; ++j) {
                const int k = j < 8 ? j : 14 - j;
                const double u =
                    j < 8 ? c - h * quad_detail::kXgk[k] : c + h * quad_detail::kXgk[k];
                if (u <= 0.0 || u >= 1.0) continue;
                if (inverted) {
                    out.s.push_back(1.0 / u);
                    out.w.push_back(h * quad_detail::kWgk[k] / (u * u));
                } else {
                    out.s.push_back(u);
                    out.w.push_back(h * quad_detail::kWgk[k]);
                }
            }
        }
    };
    emit(cuts_near, false);
    emit(cuts_far, true);
    return out;
}

/// Throws QuadratureFailure unless the result converged.
template <class T>
const BasicIntegralResult<T>& require_converged(const BasicIntegralResult<T>& r,
                                                const char* what = "integral") {
    if (!r.converged)
        throw QuadratureFailure(std::string(what) + " did not converge within the node budget");
    return r;
}

}  // namespace ibc

#endif
