// Command-line driver: density evaluation, seeded simulation, and the
// equation/identity verification suites. Outputs are long-form CSV plus JSON
// reports, each referencing the manifest that produced it.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ibc/densities.hpp"
#include "ibc/kernels.hpp"
#include "ibc/model.hpp"
#include "ibc/montecarlo.hpp"
#include "ibc/verify.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct SpecFlags {
    std::string outer = "brownian";
    std::string inner = "none";
    int d = 1;
    double lambda = 1.0;
    std::string spec_file;
};

ibc::ProcessKind parse_process(const std::string& text) {
    std::string kind = text;
    std::map<std::string, double> kv;
    size_t pos = text.find(':');
    if (pos != std::string::npos) {
        kind = text.substr(0, pos);
        std::string rest = text.substr(pos + 1);
        // bare number after fbm: means the Hurst parameter
        if (kind == "fbm" && rest.find('=') == std::string::npos) {
            kv["h"] = std::stod(rest);
        } else {
            std::stringstream ss(rest);
            std::string item;
            while (std::getline(ss, item, ':')) {
                const size_t eq = item.find('=');
                if (eq == std::string::npos)
                    throw ibc::InvalidParameter("cannot parse process option: " + item);
                kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
            }
        }
    }
    auto get = [&](const std::string& k, double fallback) {
        auto it = kv.find(k);
        return it == kv.end() ? fallback : it->second;
    };
    if (kind == "brownian")
        return ibc::ProcessKind::brownian(get("mu", 0.0), get("sigma2", 1.0));
    if (kind == "fbm") return ibc::ProcessKind::fractional_brownian(get("h", 0.5));
    if (kind == "cauchy") return ibc::ProcessKind::cauchy(get("a", 0.0), get("scale", 1.0));
    throw ibc::InvalidParameter("unknown process kind: " + kind);
}

ibc::CompositionSpec spec_from_json(const nlohmann::json& j) {
    ibc::CompositionSpec spec;
    auto proc = [](const nlohmann::json& p) {
        const std::string kind = p.at("kind");
        if (kind == "brownian")
            return ibc::ProcessKind::brownian(p.value("mu", 0.0), p.value("sigma2", 1.0));
        if (kind == "fbm") return ibc::ProcessKind::fractional_brownian(p.value("hurst", 0.5));
        if (kind == "cauchy")
            return ibc::ProcessKind::cauchy(p.value("a", 0.0), p.value("scale", 1.0));
        throw ibc::InvalidParameter("unknown process kind: " + kind);
    };
    const int d = j.value("d", 1);
    for (int i = 0; i < d; ++i) spec.outer.push_back(proc(j.at("outer")));
    const auto& inner = j.at("inner");
    const std::string kind = inner.at("kind");
    if (kind == "none") spec.inner = ibc::InnerClock::none();
    else if (kind == "iterated")
        spec.inner = ibc::InnerClock::iterated_brownian(inner.value("n", 1));
    else if (kind == "product")
        spec.inner = ibc::InnerClock::frac_time_product(inner.value("n", 2));
    else
        spec.inner = ibc::InnerClock::of(proc(inner));
    spec.time_scale = j.value("lambda", 1.0);
    return spec;
}

ibc::CompositionSpec build_spec(const SpecFlags& flags) {
    if (!flags.spec_file.empty()) {
        std::ifstream in(flags.spec_file);
        if (!in) throw ibc::InvalidParameter("cannot open spec file " + flags.spec_file);
        nlohmann::json j;
        in >> j;
        return ibc::validate_spec(spec_from_json(j));
    }
    ibc::CompositionSpec spec;
    for (int i = 0; i < flags.d; ++i) spec.outer.push_back(parse_process(flags.outer));
    if (flags.inner == "none") {
        spec.inner = ibc::InnerClock::none();
    } else if (flags.inner.rfind("iterated", 0) == 0) {
        const size_t pos = flags.inner.find(':');
        spec.inner = ibc::InnerClock::iterated_brownian(
            pos == std::string::npos ? 1 : std::stoi(flags.inner.substr(pos + 1)));
    } else if (flags.inner.rfind("product", 0) == 0) {
        const size_t pos = flags.inner.find(':');
        spec.inner = ibc::InnerClock::frac_time_product(
            pos == std::string::npos ? 2 : std::stoi(flags.inner.substr(pos + 1)));
    } else {
        spec.inner = ibc::InnerClock::of(parse_process(flags.inner));
    }
    spec.time_scale = flags.lambda;
    return ibc::validate_spec(spec);
}

std::vector<ibc::AxisSpec> parse_grid(const std::string& text) {
    std::vector<ibc::AxisSpec> axes;
    std::stringstream ss(text);
    std::string axis;
    while (std::getline(ss, axis, ',')) {
        ibc::AxisSpec a;
        // lo:hi:n with a possibly negative lo
        const size_t p1 = axis.find(':', 1);
        const size_t p2 = axis.find(':', p1 + 1);
        if (p1 == std::string::npos || p2 == std::string::npos)
            throw ibc::InvalidParameter("grid axis must be lo:hi:n");
        a.lo = std::stod(axis.substr(0, p1));
        a.hi = std::stod(axis.substr(p1 + 1, p2 - p1 - 1));
        a.n_points = std::stoi(axis.substr(p2 + 1));
        axes.push_back(a);
    }
    if (axes.empty()) throw ibc::InvalidParameter("empty grid specification");
    return axes;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct Manifest {
    std::string command;
    std::string spec_tag;
    std::string digest;
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;

    void write(const std::string& path) const {
        nlohmann::json j;
        j["tool"] = "ibc";
        j["version"] = kVersion;
        j["command"] = command;
        j["spec"] = spec_tag;
        j["config_digest"] = digest;
        j["wall_seconds"] = wall_seconds;
        j["outputs"] = outputs;
        std::ofstream out(path);
        out << j.dump(2) << "\n";
    }
};

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

bool is_cc_pair(const ibc::CompositionSpec& spec) {
    return spec.outer.size() == 1 && spec.outer[0].family == ibc::ProcessFamily::Cauchy &&
           spec.inner.kind == ibc::InnerKind::Process &&
           spec.inner.process.family == ibc::ProcessFamily::Cauchy;
}

int cmd_density(const SpecFlags& flags, double t, const std::string& grid_text,
                const std::string& deriv_text, bool closed_form, const std::string& prefix,
                int threads, const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    const auto spec = build_spec(flags);
    ibc::Grid grid;
    grid.axes = parse_grid(grid_text);
    if (static_cast<int>(grid.axes.size()) != static_cast<int>(spec.outer.size()))
        throw ibc::InvalidParameter("grid dimension does not match the composition");
    std::vector<int> derivs;
    if (!deriv_text.empty())
        for (double v : parse_list(deriv_text)) derivs.push_back(static_cast<int>(v));

    auto field = ibc::densities::density_grid(spec, grid, t, {}, derivs, threads);

    const std::string manifest_path = prefix + ".manifest.json";
    std::ofstream csv(prefix + ".csv");
    if (!csv) throw ibc::Error("cannot open " + prefix + ".csv");
    csv << "# manifest=" << manifest_path << "\n";
    const int d = grid.dim();
    for (int k = 0; k < d; ++k) csv << "x" << k << ",";
    csv << "value";
    for (int k : derivs) csv << ",d" << k;
    if (closed_form) csv << ",closed_form";
    csv << "\n";
    csv.precision(17);

    double closed_max_diff = 0.0;
    const long total = grid.total_points();
    for (long lin = 0; lin < total; ++lin) {
        std::vector<double> x(d);
        long rem = lin;
        for (int k = d - 1; k >= 0; --k) {
            x[k] = grid.axes[k].lo +
                   static_cast<double>(rem % grid.axes[k].n_points) * grid.axes[k].spacing();
            rem /= grid.axes[k].n_points;
        }
        for (int k = 0; k < d; ++k) csv << x[k] << ",";
        csv << field.values[lin];
        for (int k : derivs) csv << "," << field.x_derivatives.at(k)[lin];
        if (closed_form) {
            if (!is_cc_pair(spec))
                throw ibc::UnsupportedComposition(
                    "the closed-form column exists for the 1-d Cauchy pair");
            const double a = spec.outer[0].location;
            double cf = std::numeric_limits<double>::quiet_NaN();
            if (std::fabs(x[0] - a) > 1e-12) cf = ibc::densities::cc_closed_form(x[0], t, a);
            csv << "," << cf;
            if (!std::isnan(cf) && !std::isnan(field.values[lin]) &&
                std::fabs(std::fabs(x[0] - a) - t) > 1e-3 * t)
                closed_max_diff = std::max(closed_max_diff, std::fabs(cf - field.values[lin]));
        }
        csv << "\n";
    }

    nlohmann::json j;
    j["schema_version"] = 1;
    j["spec"] = ibc::montecarlo::spec_tag(spec);
    j["t"] = t;
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& a : grid.axes)
        axes.push_back({{"lo", a.lo}, {"hi", a.hi}, {"n", a.n_points}});
    j["grid"] = axes;
    j["values"] = field.values;
    for (const auto& [k, arr] : field.x_derivatives) j["d" + std::to_string(k)] = arr;
    j["manifest"] = manifest_path;
    std::ofstream jf(prefix + ".json");
    jf << j.dump() << "\n";

    if (closed_form)
        std::cout << "closed-form column: max |difference| off the removable point = "
                  << closed_max_diff << "\n";
    std::cout << "wrote " << prefix << ".csv (" << total << " rows)\n";

    Manifest m;
    m.command = command;
    m.spec_tag = ibc::montecarlo::spec_tag(spec);
    m.digest = std::to_string(fnv1a(command + "|" + m.spec_tag + "|" + std::to_string(t)));
    m.outputs = {prefix + ".csv", prefix + ".json"};
    m.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m.write(manifest_path);
    return 0;
}

int cmd_simulate(const SpecFlags& flags, double t, long n, std::uint64_t seed, bool with_ks,
                 double alpha, const std::string& prefix, int threads,
                 const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    const auto spec = build_spec(flags);
    auto batch = ibc::montecarlo::sample_marginal(spec, t, n, seed, threads);

    const std::string manifest_path = prefix + ".manifest.json";
    ibc::montecarlo::write_batch_csv(batch, prefix + ".csv", manifest_path);

    const bool heavy = spec.outer[0].family == ibc::ProcessFamily::Cauchy;
    if (heavy) {
        std::cout << "warning: heavy-tailed coordinates; reporting quantiles only\n";
        std::vector<double> v(batch.n);
        for (long i = 0; i < batch.n; ++i) v[i] = batch.at(i, 0);
        std::sort(v.begin(), v.end());
        std::cout << "quantiles q25=" << ibc::montecarlo::sample_quantile(v, 0.25)
                  << " q50=" << ibc::montecarlo::sample_quantile(v, 0.5)
                  << " q75=" << ibc::montecarlo::sample_quantile(v, 0.75) << "\n";
    } else {
        double mean = 0.0, m2 = 0.0;
        for (long i = 0; i < batch.n; ++i) mean += batch.at(i, 0);
        mean /= static_cast<double>(batch.n);
        for (long i = 0; i < batch.n; ++i) {
            const double d0 = batch.at(i, 0) - mean;
            m2 += d0 * d0;
        }
        std::cout << "mean=" << mean << " var=" << m2 / static_cast<double>(batch.n - 1)
                  << "\n";
    }

    int rc = 0;
    if (with_ks) {
        if (batch.d != 1)
            throw ibc::UnsupportedDimension("the KS check covers one-coordinate batches");
        ibc::montecarlo::CompositionCdf cdf(spec, t);
        std::vector<double> v(batch.n);
        for (long i = 0; i < batch.n; ++i) v[i] = batch.at(i, 0);
        auto ks = ibc::montecarlo::ks_test(std::move(v), [&](double x) { return cdf(x); }, alpha);
        std::cout << "KS " << (ks.pass ? "pass" : "FAIL") << " D=" << ks.statistic
                  << " critical=" << ks.critical_value << " (alpha=" << ks.alpha << ")\n";
        if (!ks.pass) rc = 4;
    }

    Manifest m;
    m.command = command;
    m.spec_tag = ibc::montecarlo::spec_tag(spec);
    m.digest = std::to_string(
        fnv1a(command + "|" + m.spec_tag + "|" + std::to_string(t) + "|" + std::to_string(seed)));
    m.outputs = {prefix + ".csv", prefix + ".csv.json"};
    m.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m.write(manifest_path);
    std::cout << "wrote " << prefix << ".csv (" << n << " draws)\n";
    return rc;
}

std::string param_suffix(const ibc::verify::Params& params) {
    std::string s;
    for (const auto& [k, v] : params) {
        std::ostringstream os;
        os << "_" << k << v;
        s += os.str();
    }
    for (auto& c : s)
        if (c == '.') c = 'p';
    return s;
}

int cmd_verify(std::vector<std::string> ids, const std::string& t_text, double threshold,
               double perturb, int coeff, const std::string& out_dir, int threads,
               const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    const auto ts = parse_list(t_text);
    std::filesystem::create_directories(out_dir);

    std::vector<ibc::EquationId> eqs;
    std::vector<ibc::EquationId> identities;
    if (ids.size() == 1 && ids[0] == "all") {
        eqs = ibc::all_equations();
        identities = ibc::all_identities();
    } else {
        for (const auto& tag : ids) {
            const auto id = ibc::equation_from_string(tag);
            if (static_cast<int>(id) < ibc::kEquationCount) eqs.push_back(id);
            else identities.push_back(id);
        }
    }

    ibc::verify::PerturbSpec pert;
    if (perturb != 1.0) {
        pert.coeff_index = coeff;
        pert.factor = perturb;
    }

    bool ok = true;
    Manifest m;
    const std::string manifest_path = out_dir + "/manifest.json";
    for (const auto eq : eqs) {
        for (const auto& params : ibc::verify::verification_matrix(eq)) {
            for (double t : ts) {
                auto rep = ibc::verify::residual(eq, params, t, {}, pert, threads);
                const bool pass = rep.max_rel_residual <= threshold;
                ok = ok && pass;
                std::ostringstream name;
                name << ibc::to_string(eq) << param_suffix(params) << "_t" << t;
                std::string fname = name.str();
                for (auto& c : fname)
                    if (c == '.') c = 'p';
                const std::string path = out_dir + "/" + fname + ".json";
                std::ofstream out(path);
                out << ibc::verify::report_to_json(rep) << "\n";
                m.outputs.push_back(path);
                std::cout << ibc::to_string(eq) << param_suffix(params) << " t=" << t
                          << " max_rel_residual=" << rep.max_rel_residual << " "
                          << (pass ? "PASS" : "FAIL") << "\n";
            }
        }
    }
    for (const auto id : identities) {
        auto rep = ibc::verify::run_identity(id);
        ok = ok && rep.pass;
        const std::string path = out_dir + "/" + ibc::to_string(id) + ".json";
        std::ofstream out(path);
        out << ibc::verify::report_to_json(rep) << "\n";
        m.outputs.push_back(path);
        std::cout << ibc::to_string(id) << " max_abs_err=" << rep.max_abs_err
                  << " tolerance=" << rep.tolerance << " " << (rep.pass ? "PASS" : "FAIL")
                  << "\n";
    }

    m.command = command;
    m.spec_tag = "verification";
    m.digest = std::to_string(fnv1a(command + "|" + t_text + "|" + std::to_string(threshold)));
    m.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m.write(manifest_path);
    std::cout << (ok ? "all reports pass" : "verification failures present") << " ("
              << m.wall_seconds << " s)\n";
    return ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"densities and governing-equation checks for composed Brownian/Cauchy processes"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker pool size (0 = hardware)");

    SpecFlags flags;
    auto add_spec_flags = [&](CLI::App* sub) {
        sub->add_option("--outer", flags.outer,
                        "coordinate process: brownian[:mu=..][:sigma2=..], fbm:H, "
                        "cauchy[:a=..][:scale=..]");
        sub->add_option("--inner", flags.inner,
                        "clock: none, brownian[:mu=..], cauchy, iterated:n, product:n");
        sub->add_option("--d", flags.d, "number of coordinates");
        sub->add_option("--lambda", flags.lambda,
                        "clock scale; values != 1 select the scaled clock family");
        sub->add_option("--spec-file", flags.spec_file, "JSON spec (overrides flags)");
    };

    auto* density = app.add_subcommand("density", "evaluate a density on a grid");
    add_spec_flags(density);
    double t = 1.0;
    std::string grid_text = "-4:4:81";
    std::string deriv_text;
    bool closed_form = false;
    std::string out_prefix = "density";
    density->add_option("--t", t, "time");
    density->add_option("--grid", grid_text, "lo:hi:n per axis, comma separated");
    density->add_option("--deriv", deriv_text, "derivative orders, e.g. 1,2,4");
    density->add_flag("--closed-form", closed_form, "add the iterated-Cauchy closed form column");
    density->add_option("-o,--output", out_prefix, "output prefix");

    auto* simulate = app.add_subcommand("simulate", "draw a seeded sample batch");
    add_spec_flags(simulate);
    long n = 10000;
    std::uint64_t seed = 1;
    bool with_ks = false;
    double alpha = 0.01;
    double sim_t = 1.0;
    std::string sim_prefix = "samples";
    simulate->add_option("--t", sim_t, "time");
    simulate->add_option("--n", n, "number of draws");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_flag("--ks", with_ks, "KS test against the quadrature CDF");
    simulate->add_option("--alpha", alpha, "KS level (0.01, 0.05, 0.1)");
    simulate->add_option("-o,--output", sim_prefix, "output prefix");

    auto* verify = app.add_subcommand("verify", "equation and identity residual suites");
    std::vector<std::string> ids{"all"};
    std::string t_list = "0.5,1,2";
    double threshold = 1e-5;
    double perturb = 1.0;
    int coeff = 0;
    std::string out_dir = "reports";
    verify->add_option("ids", ids, "equation/identity tags or 'all'");
    verify->add_option("--t", t_list, "comma-separated times");
    verify->add_option("--threshold", threshold, "max relative residual accepted");
    verify->add_option("--perturb", perturb, "multiply one coefficient (negative control)");
    verify->add_option("--coeff", coeff, "index of the perturbed coefficient");
    verify->add_option("--out", out_dir, "report directory");

    CLI11_PARSE(app, argc, argv);

    const std::string command = join_args(argc, argv);
    try {
        if (density->parsed())
            return cmd_density(flags, t, grid_text, deriv_text, closed_form, out_prefix, threads,
                               command);
        if (simulate->parsed())
            return cmd_simulate(flags, sim_t, n, seed, with_ks, alpha, sim_prefix, threads,
                                command);
        if (verify->parsed())
            return cmd_verify(ids, t_list, threshold, perturb, coeff, out_dir, threads, command);
    } catch (const ibc::InvalidParameter& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const ibc::UnsupportedComposition& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const ibc::UnsupportedDimension& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const ibc::Error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
