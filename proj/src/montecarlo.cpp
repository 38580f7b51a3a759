#include "ibc/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ibc/densities.hpp"
#include "ibc/parallel.hpp"

namespace ibc::montecarlo {

namespace {

constexpr double kPi = M_PI;

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double coordinate_cdf(const ProcessKind& p, double x, double s) {
    switch (p.family) {
        case ProcessFamily::Brownian:
            return normal_cdf((x - p.drift * s) / std::sqrt(s));
        case ProcessFamily::FractionalBrownian:
            return normal_cdf(x / std::pow(s, p.hurst));
        case ProcessFamily::Cauchy:
            return 0.5 + std::atan((x - p.location) / s) / kPi;
    }
    return 0.0;
}

}  // namespace

DrawStream::DrawStream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ 0x6a09e667f3bcc908ULL;
    splitmix64(s);
    s ^= index * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL;
    splitmix64(s);
    key_ = s;
}

double DrawStream::uniform() {
    std::uint64_t s = key_ + (++counter_) * 0xd1342543de82ef95ULL;
    const std::uint64_t bits = splitmix64(s) >> 11;  // 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double DrawStream::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double DrawStream::cauchy_standard() { return std::tan(kPi * (uniform() - 0.5)); }

SampleBatch sample_marginal(const CompositionSpec& raw, double t, long n, std::uint64_t seed,
                            int threads) {
    const CompositionSpec spec = validate_spec(raw);
    if (!(t > 0.0)) throw InvalidParameter("sampling needs t > 0");
    if (n <= 0) throw InvalidParameter("sampling needs n > 0");
    if (spec.inner.kind == InnerKind::Process &&
        spec.inner.process.family == ProcessFamily::Brownian && spec.inner.process.drift != 0.0)
        throw UnsupportedComposition("drifted clocks are density-only");
    if (spec.inner.kind == InnerKind::FracTimeProduct && spec.inner.n != 2)
        throw UnsupportedComposition("product clocks are sampleable for n = 2 only");

    SampleBatch batch;
    batch.spec = spec;
    batch.t = t;
    batch.n = n;
    batch.seed = seed;
    batch.d = static_cast<int>(spec.outer.size());
    batch.values.assign(static_cast<size_t>(n) * batch.d, 0.0);

    parallel_for(
        n,
        [&](long i) {
            DrawStream rng(seed, static_cast<std::uint64_t>(i));
            double clock = t;
            switch (spec.inner.kind) {
                case InnerKind::None:
                    break;
                case InnerKind::Process:
                    if (spec.inner.process.family == ProcessFamily::Brownian) {
                        const double lam = spec.time_scale;
                        const double rate =
                            lam == 1.0 ? 1.0 : 8.0 * lam * lam * lam * lam;
                        clock = std::fabs(std::sqrt(rate * t) * rng.normal());
                    } else {
                        clock = std::fabs(t * rng.cauchy_standard());
                    }
                    break;
                case InnerKind::IteratedBrownian:
                    // the clock |I_n(t)| chains n+1 reflected Gaussians
                    for (int level = 0; level <= spec.inner.n; ++level)
                        clock = std::fabs(std::sqrt(clock) * rng.normal());
                    break;
                case InnerKind::FracTimeProduct:
                    clock = std::fabs(std::sqrt(2.0 * t) * rng.normal());
                    break;
            }
            for (int j = 0; j < batch.d; ++j) {
                const ProcessKind& p = spec.outer[j];
                double v = 0.0;
                if (spec.inner.kind == InnerKind::None) {
                    switch (p.family) {
                        case ProcessFamily::Brownian:
                            v = p.drift * t + std::sqrt(p.diffusion * t) * rng.normal();
                            break;
                        case ProcessFamily::FractionalBrownian:
                            v = std::pow(t, p.hurst) * rng.normal();
                            break;
                        case ProcessFamily::Cauchy:
                            v = p.location + p.scale * t * rng.cauchy_standard();
                            break;
                    }
                } else {
                    switch (p.family) {
                        case ProcessFamily::Brownian:
                            v = p.drift * clock + std::sqrt(clock) * rng.normal();
                            break;
                        case ProcessFamily::FractionalBrownian:
                            v = std::pow(clock, p.hurst) * rng.normal();
                            break;
                        case ProcessFamily::Cauchy:
                            v = p.location + clock * rng.cauchy_standard();
                            break;
                    }
                }
                batch.values[static_cast<size_t>(i) * batch.d + j] = v;
            }
        },
        threads);
    return batch;
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                 double alpha) {
    if (samples.empty()) throw InvalidParameter("KS test needs samples");
    std::sort(samples.begin(), samples.end());
    const long n = static_cast<long>(samples.size());
    double d = 0.0;
    double prev = -1.0;
    for (long i = 0; i < n; ++i) {
        const double f = cdf(samples[i]);
        if (f < prev - 1e-12)
            throw NonMonotoneCdf("reference CDF decreases over the sample range");
        if (f < -1e-12 || f > 1.0 + 1e-12)
            throw NonMonotoneCdf("reference CDF leaves [0,1]");
        prev = f;
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    double c = 1.628;
    if (alpha == 0.05) c = 1.358;
    else if (alpha == 0.10) c = 1.224;
    else if (alpha != 0.01) throw InvalidParameter("supported KS levels: 0.01, 0.05, 0.10");
    KsResult r;
    r.statistic = d;
    r.alpha = alpha;
    r.n = n;
    r.critical_value = c / std::sqrt(static_cast<double>(n));
    r.pass = d <= r.critical_value;
    return r;
}

CompositionCdf::CompositionCdf(const CompositionSpec& raw, double t,
                               const QuadratureConfig& cfg) {
    const CompositionSpec spec = validate_spec(raw);
    if (spec.outer.size() != 1)
        throw UnsupportedDimension("composition CDF covers one coordinate");
    const ProcessKind& p = spec.outer[0];
    tau_ = std::max(t, 0.25);
    shift_ = p.family == ProcessFamily::Cauchy ? p.location : p.drift * t;

    const int m = 4097;
    cdf_.assign(m, 0.0);

    if (spec.inner.kind == InnerKind::None) {
        for (int i = 0; i < m; ++i) {
            const double v = -kPi / 2.0 + kPi * i / (m - 1);
            if (i == 0) { cdf_[i] = 0.0; continue; }
            if (i == m - 1) { cdf_[i] = 1.0; continue; }
            const double x = shift_ + tau_ * std::tan(v);
            switch (p.family) {
                case ProcessFamily::Brownian:
                    cdf_[i] = normal_cdf((x - p.drift * t) / std::sqrt(p.diffusion * t));
                    break;
                case ProcessFamily::FractionalBrownian:
                    cdf_[i] = normal_cdf(x / std::pow(t, p.hurst));
                    break;
                case ProcessFamily::Cauchy:
                    cdf_[i] = 0.5 + std::atan((x - p.location) / (p.scale * t)) / kPi;
                    break;
            }
        }
        return;
    }

    // shared clock nodes from the adaptive partition of the clock mass
    auto clock0 = [&](double s) { return densities::clock_density(spec, s, t, 0, cfg); };
    auto refine = [](std::vector<double> cuts) {
        std::vector<double> out;
        out.reserve(cuts.size() * 2);
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            out.push_back(cuts[i]);
            out.push_back(0.5 * (cuts[i] + cuts[i + 1]));
        }
        out.push_back(cuts.back());
        return out;
    };
    auto cuts_near = refine(adaptive_partition([&](double s) { return clock0(s); }, 0.0, 1.0, cfg));
    auto cuts_far = refine(adaptive_partition(
        [&](double v) { return clock0(1.0 / v) / (v * v); }, 0.0, 1.0, cfg));
    SharedNodes nodes = shared_nodes_two_piece(cuts_near, cuts_far);
    std::vector<double> w(nodes.s.size());
    double mass = 0.0;
    for (size_t k = 0; k < nodes.s.size(); ++k) {
        w[k] = nodes.w[k] * clock0(nodes.s[k]);
        mass += w[k];
    }
    if (std::fabs(mass - 1.0) > 1e-6)
        throw QuadratureFailure("clock node set does not resolve the clock mass");

    for (int i = 0; i < m; ++i) {
        if (i == 0) { cdf_[i] = 0.0; continue; }
        if (i == m - 1) { cdf_[i] = 1.0; continue; }
        const double v = -kPi / 2.0 + kPi * i / (m - 1);
        const double x = shift_ + tau_ * std::tan(v);
        double acc = 0.0;
        for (size_t k = 0; k < nodes.s.size(); ++k)
            acc += w[k] * coordinate_cdf(p, x, nodes.s[k]);
        cdf_[i] = std::min(1.0, std::max(0.0, acc / mass));
    }
    for (int i = 1; i < m; ++i)
        if (cdf_[i] < cdf_[i - 1]) throw NonMonotoneCdf("tabulated CDF is not monotone");
}

double CompositionCdf::operator()(double x) const {
    const int m = static_cast<int>(cdf_.size());
    const double v = std::atan((x - shift_) / tau_);
    const double pos = (v + kPi / 2.0) / kPi * (m - 1);
    if (pos <= 0.0) return 0.0;
    if (pos >= m - 1) return 1.0;
    const int i = static_cast<int>(pos);
    const double frac = pos - i;
    return cdf_[i] * (1.0 - frac) + cdf_[i + 1] * frac;
}

double sample_quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw InvalidParameter("quantile of an empty sample");
    const double pos = p * (static_cast<double>(sorted.size()) - 1.0);
    const size_t i = static_cast<size_t>(pos);
    if (i + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(i);
    return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
}

std::string spec_tag(const CompositionSpec& spec) {
    auto proc = [](const ProcessKind& p) {
        switch (p.family) {
            case ProcessFamily::Brownian: {
                std::string s = "brownian";
                if (p.drift != 0.0) s += ":mu=" + std::to_string(p.drift);
                if (p.diffusion != 1.0) s += ":sigma2=" + std::to_string(p.diffusion);
                return s;
            }
            case ProcessFamily::FractionalBrownian:
                return "fbm:" + std::to_string(p.hurst);
            case ProcessFamily::Cauchy: {
                std::string s = "cauchy";
                if (p.location != 0.0) s += ":a=" + std::to_string(p.location);
                if (p.scale != 1.0) s += ":scale=" + std::to_string(p.scale);
                return s;
            }
        }
        return std::string("unknown");
    };
    std::string tag = std::to_string(spec.outer.size()) + "x" + proc(spec.outer[0]);
    switch (spec.inner.kind) {
        case InnerKind::None: tag += "|plain"; break;
        case InnerKind::Process: tag += "|" + proc(spec.inner.process); break;
        case InnerKind::IteratedBrownian:
            tag += "|iterated:" + std::to_string(spec.inner.n);
            break;
        case InnerKind::FracTimeProduct:
            tag += "|product:" + std::to_string(spec.inner.n);
            break;
    }
    if (spec.time_scale != 1.0) tag += "|lambda=" + std::to_string(spec.time_scale);
    return tag;
}

std::string batch_sidecar_json(const SampleBatch& batch, const std::string& manifest_ref) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["spec"] = spec_tag(batch.spec);
    j["t"] = batch.t;
    j["n"] = batch.n;
    j["seed"] = batch.seed;
    j["d"] = batch.d;
    j["manifest"] = manifest_ref;
    return j.dump(2);
}

void write_batch_csv(const SampleBatch& batch, const std::string& csv_path,
                     const std::string& manifest_ref) {
    std::ofstream out(csv_path);
    if (!out) throw Error("cannot open " + csv_path);
    out << "# manifest=" << manifest_ref << "\n";
    for (int j = 0; j < batch.d; ++j) out << (j ? "," : "") << "x" << j;
    out << "\n";
    out.precision(17);
    for (long i = 0; i < batch.n; ++i) {
        for (int j = 0; j < batch.d; ++j) out << (j ? "," : "") << batch.at(i, j);
        out << "\n";
    }
    std::ofstream side(csv_path + ".json");
    if (!side) throw Error("cannot open " + csv_path + ".json");
    side << batch_sidecar_json(batch, manifest_ref) << "\n";
}

}  // namespace ibc::montecarlo
