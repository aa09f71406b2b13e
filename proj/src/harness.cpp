#include "uir/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "uir/rng.hpp"

namespace uir {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

    ExperimentConfig cfg;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "function")
                cfg.function = value.get<std::string>();
            else if (key == "f_lo")
                cfg.f_lo = value.get<double>();
            else if (key == "f_hi")
                cfg.f_hi = value.get<double>();
            else if (key == "f_steps")
                cfg.f_steps = value.get<int>();
            else if (key == "f_rate")
                cfg.f_rate = value.get<double>();
            else if (key == "V")
                cfg.V = value.get<double>();
            else if (key == "noise_family")
                cfg.noise_family = value.get<std::string>();
            else if (key == "noise_param")
                cfg.noise_param = value.get<double>();
            else if (key == "sizes")
                cfg.sizes = value.get<std::vector<int>>();
            else if (key == "replications")
                cfg.replications = value.get<int>();
            else if (key == "seed")
                cfg.seed = value.get<std::uint64_t>();
            else if (key == "p_list")
                cfg.p_list = value.get<std::vector<double>>();
            else if (key == "max_iterations")
                cfg.max_iterations = value.get<int>();
            else if (key == "fw_gap_tolerance")
                cfg.fw_gap_tolerance = value.get<double>();
            else if (key == "line_search")
                cfg.line_search = value.get<bool>();
            else
                throw std::invalid_argument("config: unknown key \"" + key + "\"");
        } catch (const nlohmann::json::exception&) {
            throw std::invalid_argument("config: bad value for key \"" + key + "\"");
        }
    }
    validate(cfg);
    return cfg;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.function != "linear" && cfg.function != "step" && cfg.function != "clipped_exp")
        throw std::invalid_argument("config: unknown function family \"" + cfg.function + "\"");
    if (!(cfg.V > 0.0)) throw std::invalid_argument("config: V must be positive");
    if (!(cfg.f_lo <= cfg.f_hi)) throw std::invalid_argument("config: need f_lo <= f_hi");
    if (std::fabs(cfg.f_lo) > cfg.V || std::fabs(cfg.f_hi) > cfg.V)
        throw std::invalid_argument("config: function range must stay inside [-V, V]");
    if (cfg.function == "step" && cfg.f_steps < 1)
        throw std::invalid_argument("config: f_steps must be >= 1");
    if (cfg.function == "clipped_exp" && !(cfg.f_rate > 0.0))
        throw std::invalid_argument("config: f_rate must be positive");
    if (cfg.sizes.empty()) throw std::invalid_argument("config: sizes must be nonempty");
    for (int n : cfg.sizes)
        if (n < 3) throw std::invalid_argument("config: every size must be >= 3");
    if (cfg.replications < 1) throw std::invalid_argument("config: replications must be >= 1");
    if (cfg.p_list.empty()) throw std::invalid_argument("config: p_list must be nonempty");
    for (double p : cfg.p_list)
        if (!(p >= 1.0)) throw std::invalid_argument("config: every p must be >= 1");
    if (cfg.max_iterations < 0) throw std::invalid_argument("config: negative max_iterations");
    make_noise(cfg);  // validates family name and parameter
}

NoiseModel make_noise(const ExperimentConfig& cfg) {
    NoiseFamily family;
    if (cfg.noise_family == "gaussian")
        family = NoiseFamily::gaussian;
    else if (cfg.noise_family == "laplace")
        family = NoiseFamily::laplace;
    else if (cfg.noise_family == "uniform")
        family = NoiseFamily::uniform;
    else if (cfg.noise_family == "point_mass")
        family = NoiseFamily::point_mass;
    else
        throw std::invalid_argument("config: unknown noise family \"" + cfg.noise_family + "\"");
    return make_noise(family, cfg.noise_param);
}

namespace {

double regression_value(const ExperimentConfig& cfg, double x) {
    const double lo = cfg.f_lo, hi = cfg.f_hi;
    if (cfg.function == "linear") return lo + (hi - lo) * x;
    if (cfg.function == "step") {
        const int J = cfg.f_steps;
        if (J == 1) return 0.5 * (lo + hi);
        int j = static_cast<int>(x * J);
        j = std::min(j, J - 1);
        return lo + (hi - lo) * j / (J - 1);
    }
    // clipped_exp: grows like an exponential from lo, saturating at hi
    // (reached at x = 0.7 and clipped beyond).
    const double c = cfg.f_rate;
    const double kappa = (hi - lo) / std::expm1(0.7 * c);
    return std::min(hi, lo + kappa * std::expm1(c * x));
}

}  // namespace

IsotonicFn true_function(const ExperimentConfig& cfg, const DesignPoints& design) {
    std::vector<double> values;
    values.reserve(design.size());
    for (double x : design.x()) values.push_back(regression_value(cfg, x));
    return IsotonicFn(design, std::move(values), cfg.V);
}

Dataset generate_dataset(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_dataset: n must be >= 1");
    DesignPoints x = DesignPoints::equispaced(static_cast<std::size_t>(n));
    IsotonicFn truth = true_function(cfg, x);
    const NoiseModel noise = make_noise(cfg);

    Rng rng(seed);
    std::vector<double> coupled(truth.values().begin(), truth.values().end());
    for (double& v : coupled) v += noise.sample(rng);

    std::vector<double> shuffled = coupled;
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.below(i)]);

    return Dataset{std::move(x), std::move(shuffled), std::move(coupled), std::move(truth)};
}

std::vector<BenchmarkRow> run_benchmark(const ExperimentConfig& cfg) {
    validate(cfg);
    const NoiseModel noise = make_noise(cfg);

    EstimatorConfig est;
    est.max_iterations = cfg.max_iterations;
    if (cfg.fw_gap_tolerance >= 0.0) est.fw_gap_tolerance = cfg.fw_gap_tolerance;
    est.line_search = cfg.line_search;

    std::vector<BenchmarkRow> rows;
    rows.reserve(cfg.sizes.size() * static_cast<std::size_t>(cfg.replications) * 3 *
                 cfg.p_list.size());

    for (int n : cfg.sizes) {
        for (int rep = 0; rep < cfg.replications; ++rep) {
            const std::uint64_t rep_seed = cfg.seed + static_cast<std::uint64_t>(rep);
            const Dataset data = generate_dataset(cfg, n, rep_seed);

            using clock = std::chrono::steady_clock;
            auto emit = [&](const std::string& method, const IsotonicFn* fit, double seconds) {
                for (double p : cfg.p_list) {
                    BenchmarkRow row;
                    row.n = n;
                    row.method = method;
                    row.p = p;
                    row.rep = rep;
                    row.error = fit ? empirical_lp(*fit, data.truth, p)
                                    : std::numeric_limits<double>::infinity();
                    row.seconds = seconds;
                    row.seed = rep_seed;
                    rows.push_back(std::move(row));
                }
            };

            {
                auto t0 = clock::now();
                try {
                    DeconvResult r = estimate(data.x, data.y, noise, cfg.V, est);
                    std::chrono::duration<double> dt = clock::now() - t0;
                    emit("deconv", &r.g_hat, dt.count());
                } catch (const std::exception&) {
                    std::chrono::duration<double> dt = clock::now() - t0;
                    emit("deconv", nullptr, dt.count());
                }
            }
            {
                auto t0 = clock::now();
                IsotonicFn fit = naive_sorted(data.x, data.y);
                std::chrono::duration<double> dt = clock::now() - t0;
                emit("naive_sorted", &fit, dt.count());
            }
            {
                auto t0 = clock::now();
                IsotonicFn fit = pava(data.x, data.y_coupled, cfg.V);
                std::chrono::duration<double> dt = clock::now() - t0;
                emit("pava_coupled", &fit, dt.count());
            }
        }
    }
    return rows;
}

std::string to_csv(const std::vector<BenchmarkRow>& rows) {
    std::string out = "n,method,p,rep,error,seconds,seed\n";
    for (const BenchmarkRow& r : rows) {
        out += std::to_string(r.n);
        out += ',';
        out += r.method;
        out += ',';
        out += fmt_double(r.p);
        out += ',';
        out += std::to_string(r.rep);
        out += ',';
        out += fmt_double(r.error);
        out += ',';
        out += fmt_double(r.seconds);
        out += ',';
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& s, int lineno) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::invalid_argument("csv line " + std::to_string(lineno) + ": bad number \"" + s +
                                    "\"");
    return v;
}

long long parse_int(const std::string& s, int lineno) {
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw std::invalid_argument("csv line " + std::to_string(lineno) + ": bad integer \"" + s +
                                    "\"");
    return v;
}

}  // namespace

std::vector<BenchmarkRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "n,method,p,rep,error,seconds,seed")
        throw std::invalid_argument("csv: unexpected header \"" + line + "\"");

    std::vector<BenchmarkRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> f = split(line, ',');
        if (f.size() != 7)
            throw std::invalid_argument("csv line " + std::to_string(lineno) +
                                        ": expected 7 fields");
        BenchmarkRow r;
        r.n = static_cast<int>(parse_int(f[0], lineno));
        r.method = f[1];
        r.p = parse_double(f[2], lineno);
        r.rep = static_cast<int>(parse_int(f[3], lineno));
        r.error = parse_double(f[4], lineno);
        r.seconds = parse_double(f[5], lineno);
        char* end = nullptr;
        r.seed = std::strtoull(f[6].c_str(), &end, 10);
        if (end == f[6].c_str() || *end != '\0')
            throw std::invalid_argument("csv line " + std::to_string(lineno) + ": bad seed");
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string to_svg(const std::vector<BenchmarkRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("to_svg: no rows");

    // Series key (method, p) -> n -> errors across reps.
    std::map<std::pair<std::string, double>, std::map<int, std::vector<double>>> series;
    for (const BenchmarkRow& r : rows) series[{r.method, r.p}][r.n].push_back(r.error);

    struct Pt {
        double lx, ly;
    };
    std::map<std::pair<std::string, double>, std::vector<Pt>> lines;
    double lx_min = 1e300, lx_max = -1e300, ly_min = 1e300, ly_max = -1e300;
    for (const auto& [key, by_n] : series) {
        std::vector<Pt>& pts = lines[key];
        for (const auto& [n, errs] : by_n) {
            const double med = median(errs);
            if (!std::isfinite(med) || med <= 0.0) continue;  // off the log scale
            const Pt pt{std::log10(static_cast<double>(n)), std::log10(med)};
            pts.push_back(pt);
            lx_min = std::min(lx_min, pt.lx);
            lx_max = std::max(lx_max, pt.lx);
            ly_min = std::min(ly_min, pt.ly);
            ly_max = std::max(ly_max, pt.ly);
        }
    }
    if (lx_min > lx_max) {  // nothing plottable: emit an empty frame
        lx_min = 0.0;
        lx_max = 1.0;
        ly_min = 0.0;
        ly_max = 1.0;
    }
    if (lx_max - lx_min < 1e-9) {
        lx_min -= 0.5;
        lx_max += 0.5;
    }
    if (ly_max - ly_min < 1e-9) {
        ly_min -= 0.5;
        ly_max += 0.5;
    }

    const double W = 640, H = 480, L = 70, R = 24, T = 24, B = 56;
    auto sx = [&](double lx) { return L + (lx - lx_min) / (lx_max - lx_min) * (W - L - R); };
    auto sy = [&](double ly) { return H - B - (ly - ly_min) / (ly_max - ly_min) * (H - T - B); };

    static const char* palette[] = {"#1b6ca8", "#c0392b", "#27ae60", "#8e44ad",
                                    "#d35400", "#16a085", "#7f8c8d", "#2c3e50"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";

    std::set<int> ns;
    for (const BenchmarkRow& r : rows) ns.insert(r.n);
    for (int n : ns) {
        const double x = sx(std::log10(static_cast<double>(n)));
        svg << "<line x1=\"" << x << "\" y1=\"" << H - B << "\" x2=\"" << x << "\" y2=\""
            << H - B + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << H - B + 20
            << "\" text-anchor=\"middle\" font-size=\"12\">" << n << "</text>\n";
    }
    for (int e = static_cast<int>(std::ceil(ly_min)); e <= static_cast<int>(std::floor(ly_max));
         ++e) {
        const double y = sy(e);
        svg << "<line x1=\"" << L - 5 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << L - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-size=\"12\">1e" << e << "</text>\n";
    }
    svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">n</text>\n";
    svg << "<text x=\"16\" y=\"" << (T + H - B) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (T + H - B) / 2 << ")\">median error</text>\n";

    int idx = 0;
    for (const auto& [key, pts] : lines) {
        const char* color = palette[idx % 8];
        if (!pts.empty()) {
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (const Pt& pt : pts) svg << sx(pt.lx) << "," << sy(pt.ly) << " ";
            svg << "\"/>\n";
            for (const Pt& pt : pts)
                svg << "<circle cx=\"" << sx(pt.lx) << "\" cy=\"" << sy(pt.ly)
                    << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        }
        svg << "<text x=\"" << W - R - 6 << "\" y=\"" << T + 16 + 16 * idx
            << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">" << key.first
            << " p=" << key.second << "</text>\n";
        ++idx;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace uir
