#include "ibc/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ibc {

ProcessKind ProcessKind::brownian(double mu, double diffusion) {
    ProcessKind p;
    p.family = ProcessFamily::Brownian;
    p.drift = mu;
    p.diffusion = diffusion;
    return p;
}

ProcessKind ProcessKind::fractional_brownian(double hurst) {
    ProcessKind p;
    p.family = ProcessFamily::FractionalBrownian;
    p.hurst = hurst;
    return p;
}

ProcessKind ProcessKind::cauchy(double location, double scale) {
    ProcessKind p;
    p.family = ProcessFamily::Cauchy;
    p.location = location;
    p.scale = scale;
    return p;
}

bool ProcessKind::standard() const {
    switch (family) {
        case ProcessFamily::Brownian: return drift == 0.0 && diffusion == 1.0;
        case ProcessFamily::FractionalBrownian: return true;
        case ProcessFamily::Cauchy: return location == 0.0 && scale == 1.0;
    }
    return false;
}

InnerClock InnerClock::none() { return InnerClock{}; }

InnerClock InnerClock::of(const ProcessKind& p) {
    InnerClock c;
    c.kind = InnerKind::Process;
    c.process = p;
    return c;
}

InnerClock InnerClock::iterated_brownian(int n) {
    InnerClock c;
    c.kind = InnerKind::IteratedBrownian;
    c.n = n;
    return c;
}

InnerClock InnerClock::frac_time_product(int n) {
    InnerClock c;
    c.kind = InnerKind::FracTimeProduct;
    c.n = n;
    return c;
}

namespace {

void check_process(const ProcessKind& p) {
    switch (p.family) {
        case ProcessFamily::Brownian:
            if (!(p.diffusion > 0.0) || !std::isfinite(p.diffusion) || !std::isfinite(p.drift))
                throw InvalidParameter("Brownian diffusion must be finite and positive");
            break;
        case ProcessFamily::FractionalBrownian:
            if (!(p.hurst > 0.0 && p.hurst < 1.0))
                throw InvalidParameter("Hurst parameter must lie strictly inside (0,1)");
            break;
        case ProcessFamily::Cauchy:
            if (!(p.scale > 0.0) || !std::isfinite(p.scale) || !std::isfinite(p.location))
                throw InvalidParameter("Cauchy scale must be finite and positive");
            break;
    }
}

}  // namespace

CompositionSpec validate_spec(const CompositionSpec& spec, const ValidationLimits& limits) {
    CompositionSpec s = spec;
    if (s.outer.empty()) throw InvalidParameter("composition needs at least one outer process");
    if (!(s.time_scale > 0.0) || !std::isfinite(s.time_scale))
        throw InvalidParameter("time scale must be finite and positive");
    for (const auto& p : s.outer) check_process(p);

    const auto family = s.outer.front().family;
    for (const auto& p : s.outer) {
        if (p.family != family)
            throw UnsupportedComposition("outer coordinates must share one process variant");
    }
    const int d = static_cast<int>(s.outer.size());
    const bool outer_all_standard =
        std::all_of(s.outer.begin(), s.outer.end(), [](const auto& p) { return p.standard(); });

    switch (s.inner.kind) {
        case InnerKind::None:
            if (d != 1)
                throw UnsupportedComposition("plain marginals are one-dimensional");
            break;

        case InnerKind::Process: {
            const ProcessKind& in = s.inner.process;
            check_process(in);
            switch (in.family) {
                case ProcessFamily::Brownian: {
                    const bool drifted_clock = in.drift != 0.0;
                    if (in.diffusion != 1.0)
                        throw UnsupportedComposition("inner Brownian clock must be standard");
                    if (drifted_clock) {
                        if (d != 1 || family != ProcessFamily::Brownian ||
                            !s.outer.front().standard() || s.time_scale != 1.0)
                            throw UnsupportedComposition(
                                "a drifted clock is supported only under a single standard "
                                "Brownian coordinate (density evaluation only)");
                        break;
                    }
                    if (family == ProcessFamily::Brownian) {
                        if (d == 1) {
                            // drifted outer coordinate is the one studied configuration
                            if (s.outer.front().diffusion != 1.0)
                                throw UnsupportedComposition("outer Brownian must have unit diffusion");
                        } else if (!outer_all_standard) {
                            throw UnsupportedComposition(
                                "multidimensional Brownian coordinates must be standard");
                        }
                    } else if (family == ProcessFamily::Cauchy) {
                        if (!outer_all_standard)
                            throw UnsupportedComposition("Cauchy coordinates over a Brownian clock must be standard");
                        if (s.time_scale != 1.0)
                            throw UnsupportedComposition("time scale applies only to Brownian-in-Brownian compositions");
                    } else {
                        throw UnsupportedComposition("fractional Brownian over a Brownian clock is not covered");
                    }
                    if (family != ProcessFamily::Brownian && s.time_scale != 1.0)
                        throw UnsupportedComposition("time scale applies only to Brownian-in-Brownian compositions");
                    break;
                }
                case ProcessFamily::Cauchy: {
                    if (!in.standard())
                        throw UnsupportedComposition("inner Cauchy clock must be standard");
                    if (s.time_scale != 1.0)
                        throw UnsupportedComposition("time scale applies only to Brownian-in-Brownian compositions");
                    if (family == ProcessFamily::Brownian) {
                        if (!outer_all_standard)
                            throw UnsupportedComposition("Brownian coordinates over a Cauchy clock must be standard");
                    } else if (family == ProcessFamily::FractionalBrownian) {
                        if (d != 1)
                            throw UnsupportedComposition("fractional Brownian over a Cauchy clock is one-dimensional");
                    } else {  // Cauchy outer
                        const bool shifted =
                            std::any_of(s.outer.begin(), s.outer.end(),
                                        [](const auto& p) { return p.location != 0.0; });
                        if (shifted && d != 1)
                            throw UnsupportedComposition("a position parameter is supported only for d = 1");
                        for (const auto& p : s.outer)
                            if (p.scale != 1.0)
                                throw UnsupportedComposition("Cauchy coordinates must have unit scale");
                    }
                    break;
                }
                case ProcessFamily::FractionalBrownian:
                    throw UnsupportedComposition("fractional Brownian motion is not supported as a clock");
            }
            break;
        }

        case InnerKind::IteratedBrownian: {
            if (s.inner.n < 1) throw InvalidParameter("iterated clock needs n >= 1");
            if (s.inner.n > limits.max_iterated_n)
                throw UnsupportedComposition("iterated clock depth exceeds the configured cap");
            if (d != 1 || !outer_all_standard)
                throw UnsupportedComposition("iterated clocks take a single standard coordinate");
            if (family == ProcessFamily::FractionalBrownian)
                throw UnsupportedComposition("fractional Brownian over an iterated clock is not covered");
            if (s.time_scale != 1.0)
                throw UnsupportedComposition("time scale applies only to Brownian-in-Brownian compositions");
            break;
        }

        case InnerKind::FracTimeProduct: {
            if (s.inner.n < 2) throw InvalidParameter("product clock needs n >= 2");
            if (s.inner.n > limits.max_frac_time_n)
                throw UnsupportedComposition("product clock order exceeds the configured cap");
            if (d != 1 || family != ProcessFamily::Brownian || !outer_all_standard)
                throw UnsupportedComposition("product clocks take a single standard Brownian coordinate");
            if (s.time_scale != 1.0)
                throw UnsupportedComposition("time scale applies only to Brownian-in-Brownian compositions");
            break;
        }
    }

    if (s.time_scale != 1.0) {
        const bool lambda_config = family == ProcessFamily::Brownian &&
                                   s.inner.kind == InnerKind::Process &&
                                   s.inner.process.family == ProcessFamily::Brownian &&
                                   s.inner.process.drift == 0.0 && outer_all_standard;
        if (!lambda_config)
            throw UnsupportedComposition("time scale applies only to Brownian-in-Brownian compositions");
    }
    return s;
}

// ---------------------------------------------------------------------------

namespace {

const std::map<EquationId, std::pair<std::string, std::string>>& registry() {
    static const std::map<EquationId, std::pair<std::string, std::string>> reg = {
        {EquationId::E1, {"E1", "time-fractional diffusion of order 1/2 for the iterated Brownian density: D^(1/2)_t p = 2^(-3/2) p_xx"}},
        {EquationId::E2, {"E2", "fourth-order heat-type equation for the iterated Brownian density: p_t = 2^(-3) p_xxxx (x != 0)"}},
        {EquationId::E3, {"E3", "time-fractional diffusion of order 1/2^n for the n-iterated Brownian density: D^(1/2^n)_t p = 2^(1/2^n - 2) p_xx"}},
        {EquationId::E4, {"E4", "order-1/2 fractional diffusion with scale parameter: D^(1/2)_t p = lambda^2 Laplace(p), clock variance 8 lambda^4 t"}},
        {EquationId::E5, {"E5", "squared-Laplacian heat-type equation for the d-dim iterated Brownian density: p_t = 2^(-3) Laplace^2 p (off axes)"}},
        {EquationId::E6, {"E6", "fourth-order equation for the drifted iterated Brownian density: p_t = (1/2)((1/2) d_xx - mu d_x)^2 p (x != 0)"}},
        {EquationId::E7, {"E7", "order-1/2 fractional equation with drift: D^(1/2)_t p = 2^(-3/2) p_xx - (mu/sqrt(2)) p_x"}},
        {EquationId::E8, {"E8", "higher-order heat-type equation p_t = c (d_xx)^m p at m = 2 under the coefficient anchor c = 2^(-3)"}},
        {EquationId::E9, {"E9", "time-fractional diffusion of order 1/n for the product-clock density: D^(1/n)_t p = (1/2) p_xx"}},
        {EquationId::E10, {"E10", "rod-vibration equation for the Brownian-over-Cauchy density: p_tt = -2^(-2) p_xxxx (x != 0)"}},
        {EquationId::E11, {"E11", "Euler-type equation for the fBm-over-Cauchy density: t^2 p_tt = -[H(H-1) d_x x - H^2 d_xx x^2] p (x != 0)"}},
        {EquationId::E12, {"E12", "squared-Laplacian wave-type equation for the d-dim Brownian-over-Cauchy density: p_tt = -2^(-2) Laplace^2 p (off axes)"}},
        {EquationId::E13, {"E13", "non-homogeneous backward heat equation for the Cauchy-over-Brownian density: p_t = -(1/2) p_xx + 1/(pi x^2 sqrt(2 pi t))"}},
        {EquationId::E14, {"E14", "non-homogeneous fractional equation for the Cauchy-over-iterated-Brownian density: D^(1/2^n)_t p = -2^(1/2^n - 2) p_xx + forcing/x^2"}},
        {EquationId::E15, {"E15", "mixed-Riesz equation for the d-dim Cauchy-over-Brownian density: p_t = sum_{k<j} d2 p / d|x_k| d|x_j| - (1/2) sum_k p_{x_k x_k}"}},
        {EquationId::E16, {"E16", "non-homogeneous wave equation for the shifted iterated Cauchy density: p_tt = p_xx - 2/(pi^2 t (x-a)^2)"}},
        {EquationId::E17, {"E17", "mixed-Riesz wave-type equation for the d-dim iterated Cauchy density: p_tt = sum_k p_{x_k x_k} - 2 sum_{k<j} d2 p / d|x_k| d|x_j|"}},
        {EquationId::I1, {"I1", "Fourier-Laplace transform of the drifted iterated Brownian density equals eta^(-1/2)/(beta^2/2^(3/2) - i beta mu/sqrt(2) + sqrt(eta))"}},
        {EquationId::I2, {"I2", "first-passage subordination: t/(pi(t^2+s^2)) = int gauss(s,w) first_passage(t,w) dw"}},
        {EquationId::I3, {"I3", "peak value of the n-iterated Brownian density equals its gamma-product constant times t^(-1/2^(n+1))"}},
        {EquationId::I4, {"I4", "harmonicity of the Cauchy kernel: d_xx + d_ss annihilates s/(pi(s^2+x^2))"}},
        {EquationId::I5, {"I5", "Riesz/time identity for the Cauchy density: d_t p = -d/d|x| p"}},
        {EquationId::I6, {"I6", "commutativity of the iterated first-order Riesz derivatives in two coordinates"}},
        {EquationId::I7, {"I7", "closed form of the iterated Cauchy density: (2/pi^2) t ln(t/|x-a|)/(t^2-(x-a)^2) equals the clock integral"}},
    };
    return reg;
}

}  // namespace

std::vector<EquationId> all_equations() {
    std::vector<EquationId> v;
    for (int i = 0; i < kEquationCount; ++i) v.push_back(static_cast<EquationId>(i));
    return v;
}

std::vector<EquationId> all_identities() {
    std::vector<EquationId> v;
    for (int i = 0; i < kIdentityCount; ++i)
        v.push_back(static_cast<EquationId>(kEquationCount + i));
    return v;
}

std::string to_string(EquationId id) { return registry().at(id).first; }

EquationId equation_from_string(const std::string& tag) {
    for (const auto& [id, entry] : registry())
        if (entry.first == tag) return id;
    throw InvalidParameter("unknown equation tag: " + tag);
}

std::string equation_description(EquationId id) { return registry().at(id).second; }

// ---------------------------------------------------------------------------

long Grid::total_points() const {
    long n = 1;
    for (const auto& a : axes) n *= a.n_points;
    return n;
}

bool Grid::excluded(const std::vector<double>& x) const {
    for (const auto& b : bands) {
        if (b.axis < 0 || b.axis >= dim()) continue;
        if (std::fabs(x[b.axis] - b.center) <= b.half_width) return true;
    }
    return false;
}

std::vector<std::vector<double>> Grid::included_points() const {
    for (const auto& a : axes) {
        if (!(a.lo < a.hi)) throw InvalidParameter("grid axis needs lo < hi");
        if (a.n_points < 2) throw InvalidParameter("grid axis needs at least two points");
    }
    std::vector<std::vector<double>> pts;
    std::vector<int> idx(axes.size(), 0);
    std::vector<double> x(axes.size(), 0.0);
    while (true) {
        for (size_t k = 0; k < axes.size(); ++k)
            x[k] = axes[k].lo + idx[k] * axes[k].spacing();
        if (!excluded(x)) pts.push_back(x);
        size_t k = 0;
        for (; k < axes.size(); ++k) {
            if (++idx[k] < axes[k].n_points) break;
            idx[k] = 0;
        }
        if (k == axes.size()) break;
    }
    return pts;
}

double Grid::excluded_fraction() const {
    const long total = total_points();
    if (total == 0) return 0.0;
    const long kept = static_cast<long>(included_points().size());
    return 1.0 - static_cast<double>(kept) / static_cast<double>(total);
}

Grid make_grid_1d(double lo, double hi, int n, std::vector<ExclusionBand> bands) {
    Grid g;
    g.axes.push_back({lo, hi, n});
    g.bands = std::move(bands);
    return g;
}

}  // namespace ibc
