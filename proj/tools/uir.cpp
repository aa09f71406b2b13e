#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uir/deconv.hpp"
#include "uir/diagnostics.hpp"
#include "uir/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct XyData {
    std::vector<double> x;
    std::vector<double> y;
};

XyData parse_xy_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("input csv: empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,y") throw std::invalid_argument("input csv: expected header \"x,y\"");
    XyData data;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("input csv line " + std::to_string(lineno) +
                                        ": expected two fields");
        char* end = nullptr;
        const std::string xs = line.substr(0, comma), ys = line.substr(comma + 1);
        const double xv = std::strtod(xs.c_str(), &end);
        if (end == xs.c_str() || *end != '\0')
            throw std::invalid_argument("input csv line " + std::to_string(lineno) + ": bad x");
        const double yv = std::strtod(ys.c_str(), &end);
        if (end == ys.c_str() || *end != '\0')
            throw std::invalid_argument("input csv line " + std::to_string(lineno) + ": bad y");
        data.x.push_back(xv);
        data.y.push_back(yv);
    }
    return data;
}

uir::ExperimentConfig base_config(const std::string& function, double f_lo, double f_hi,
                                  int f_steps, double f_rate, double V,
                                  const std::string& noise_family, double noise_param) {
    uir::ExperimentConfig cfg;
    cfg.function = function;
    cfg.f_lo = f_lo;
    cfg.f_hi = f_hi;
    cfg.f_steps = f_steps;
    cfg.f_rate = f_rate;
    cfg.V = V;
    cfg.noise_family = noise_family;
    cfg.noise_param = noise_param;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum-Wasserstein deconvolution toolkit for uncoupled isotonic regression"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand(
        "simulate", "Draw a synthetic uncoupled dataset and emit it as x,y CSV.\n"
                    "The y column is a shuffled multiset; rows do NOT pair x with its response.");
    int sim_n = 100;
    std::string sim_function = "linear";
    double sim_f_lo = -1.0, sim_f_hi = 1.0, sim_f_rate = 5.0;
    int sim_f_steps = 4;
    double sim_V = 1.0, sim_noise_param = 0.3;
    std::string sim_noise = "gaussian", sim_out = "-";
    std::uint64_t sim_seed = 1;
    sim->add_option("--n", sim_n, "sample size")->capture_default_str();
    sim->add_option("--function", sim_function, "linear | step | clipped_exp")
        ->capture_default_str();
    sim->add_option("--f-lo", sim_f_lo, "f(0)")->capture_default_str();
    sim->add_option("--f-hi", sim_f_hi, "upper value of f")->capture_default_str();
    sim->add_option("--f-steps", sim_f_steps, "pieces of the step function")
        ->capture_default_str();
    sim->add_option("--f-rate", sim_f_rate, "growth rate of clipped_exp")->capture_default_str();
    sim->add_option("--V", sim_V, "bound on |f|")->capture_default_str();
    sim->add_option("--noise-family", sim_noise, "gaussian | laplace | uniform | point_mass")
        ->capture_default_str();
    sim->add_option("--noise-param", sim_noise_param, "family parameter")->capture_default_str();
    sim->add_option("--seed", sim_seed, "rng seed")->capture_default_str();
    sim->add_option("--out", sim_out, "output path, - for stdout")->capture_default_str();

    // estimate
    auto* est = app.add_subcommand(
        "estimate", "Fit the deconvolution estimator to an x,y CSV.\n"
                    "Row pairing is ignored by contract: only the multiset of y values and the\n"
                    "set of x locations enter the fit.");
    std::string est_in, est_noise = "gaussian", est_out = "-";
    double est_noise_param = 0.3, est_V = 1.0, est_tol = -1.0;
    int est_max_iter = 2000;
    std::uint64_t est_seed = 1;
    est->add_option("--in", est_in, "input CSV path, - for stdin")->required();
    est->add_option("--noise-family", est_noise, "gaussian | laplace | uniform | point_mass")
        ->capture_default_str();
    est->add_option("--noise-param", est_noise_param, "family parameter")->capture_default_str();
    est->add_option("--V", est_V, "bound on |f|")->capture_default_str();
    est->add_option("--max-iter", est_max_iter, "iteration budget")->capture_default_str();
    est->add_option("--tol", est_tol, "duality-gap stop, negative for the default")
        ->capture_default_str();
    est->add_option("--seed", est_seed,
                    "accepted for interface symmetry; the fit itself is deterministic")
        ->capture_default_str();
    est->add_option("--out", est_out, "output path, - for stdout")->capture_default_str();

    // bench
    auto* bench = app.add_subcommand("bench", "Run the benchmark grid from a JSON config.");
    std::string bench_config, bench_out = "-", bench_svg;
    bench->add_option("--config", bench_config, "JSON config path")->required();
    bench->add_option("--out", bench_out, "CSV output path, - for stdout")->capture_default_str();
    bench->add_option("--svg", bench_svg, "also write a log-log median-error plot here");

    // diagnose
    auto* diag = app.add_subcommand(
        "diagnose", "Verify the numerical inequalities behind the estimator; exit 2 on failure.");
    std::string diag_out = "-";
    diag->add_option("--out", diag_out, "report path, - for stdout")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            uir::ExperimentConfig cfg = base_config(sim_function, sim_f_lo, sim_f_hi, sim_f_steps,
                                                    sim_f_rate, sim_V, sim_noise, sim_noise_param);
            uir::validate(cfg);
            if (sim_n < 1) throw std::invalid_argument("simulate: n must be >= 1");
            const uir::Dataset data = uir::generate_dataset(cfg, sim_n, sim_seed);
            std::string out = "x,y\n";
            for (std::size_t i = 0; i < data.x.size(); ++i)
                out += fmt(data.x.x()[i]) + "," + fmt(data.y[i]) + "\n";
            write_file(sim_out, out);
        } else if (est->parsed()) {
            const XyData data = parse_xy_csv(read_file(est_in));
            std::vector<double> xs = data.x;
            std::sort(xs.begin(), xs.end());
            const uir::DesignPoints design(std::move(xs));
            const uir::NoiseModel noise = [&] {
                uir::ExperimentConfig c;
                c.noise_family = est_noise;
                c.noise_param = est_noise_param;
                return uir::make_noise(c);
            }();
            uir::EstimatorConfig ec;
            ec.max_iterations = est_max_iter;
            if (est_tol >= 0.0) ec.fw_gap_tolerance = est_tol;
            const uir::DeconvResult r = uir::estimate(design, data.y, noise, est_V, ec);

            std::string out = "x,g_hat\n";
            for (std::size_t i = 0; i < r.g_hat.size(); ++i)
                out += fmt(r.g_hat.design().x()[i]) + "," + fmt(r.g_hat.values()[i]) + "\n";
            write_file(est_out, out);

            const uir::IterationStat last = r.trace.back();
            std::cerr << "iterations " << r.trace.size() - 1 << "\n"
                      << "objective " << fmt(last.objective) << "\n"
                      << "fw_gap " << fmt(last.fw_gap) << "\n"
                      << "stopped_by "
                      << (r.terminated_by == uir::StopReason::gap ? "gap" : "iterations") << "\n"
                      << "noise_sigma " << fmt(noise.sigma()) << "\n";
        } else if (bench->parsed()) {
            const uir::ExperimentConfig cfg = uir::parse_config(read_file(bench_config));
            const std::vector<uir::BenchmarkRow> rows = uir::run_benchmark(cfg);
            write_file(bench_out, uir::to_csv(rows));
            if (!bench_svg.empty()) write_file(bench_svg, uir::to_svg(rows));
        } else if (diag->parsed()) {
            const uir::DiagnosticReport report = uir::diagnose();
            write_file(diag_out, report.to_table());
            if (!report.all_pass()) return 2;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
