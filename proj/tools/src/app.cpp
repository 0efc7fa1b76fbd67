#include "app.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "checks.hpp"
#include "fbmm/discrete_model.hpp"
#include "fbmm/errors.hpp"
#include "fbmm/kernel.hpp"
#include "fbmm/minimax_solver.hpp"
#include "fbmm/structure.hpp"
#include "svg.hpp"

namespace fbmm::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";
const std::vector<std::string> kCommands = {"solve", "table", "curve", "profile", "kernel", "check"};

double hurst_or_default(const RunConfig& c) { return c.hurst.value_or(0.75); }

long n_or_default(const RunConfig& c) {
    if (c.n) {
        return *c.n;
    }
    if (c.command == "profile") {
        return 500;
    }
    if (c.command == "kernel") {
        return 20;
    }
    return 200;
}

std::vector<std::string> allowed_formats(const std::string& command) {
    if (command == "solve") return {"json"};
    if (command == "table") return {"csv", "json"};
    if (command == "curve" || command == "profile") return {"csv", "svg"};
    if (command == "kernel") return {"csv"};
    return {};
}

bool wants(const RunConfig& c, const std::string& format) {
    return !c.format || *c.format == format;
}

unsigned worker_count(unsigned requested) {
    if (requested != 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, count) on at most `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    const unsigned workers = std::min<std::size_t>(worker_count(threads), std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            body(i);
        }
    };
    if (workers <= 1) {
        work();
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
}

fs::path prepare_output(const RunConfig& c, const std::string& name) {
    const fs::path dir(c.output_dir);
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& path, const std::string& content, std::ostream& out) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    file << content;
    if (!file) {
        throw std::runtime_error("failed writing " + path.string());
    }
    out << "wrote " << path.string() << '\n';
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

SolverOptions solver_options(const RunConfig& c) {
    SolverOptions opts;
    opts.gap_tol = c.gap_tol;
    return opts;
}

// Solve that hands back the best pair instead of throwing.
struct Attempt {
    SolveResult result;
    bool converged;
};

Attempt attempt_solve(const DiscreteModel& m, const SolverOptions& opts) {
    try {
        return {solve(m, opts), true};
    } catch (const NonConvergenceError& e) {
        return {e.best(), false};
    }
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

struct SweepRow {
    double hurst;
    Attempt attempt;
};

std::vector<SweepRow> sweep(const std::vector<double>& hs, long n, const RunConfig& c) {
    std::vector<std::optional<Attempt>> slots(hs.size());
    const SolverOptions opts = solver_options(c);
    parallel_for(hs.size(), c.threads, [&](std::size_t i) {
        slots[i] = attempt_solve(DiscreteModel::build(hs[i], n), opts);
    });
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        rows.push_back({hs[i], std::move(*slots[i])});
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string csv = "H,minF,dual,gap,iters\n";
    for (const auto& row : rows) {
        const SolveResult& r = row.attempt.result;
        csv += fmt::format("{:.2f},{:.10f},{:.10f},{:.3e},{}\n", row.hurst, r.primal, r.dual, r.gap, r.iterations);
    }
    return csv;
}

ExitCode report_unconverged(const std::vector<SweepRow>& rows, std::ostream& err) {
    ExitCode code = ExitCode::ok;
    for (const auto& row : rows) {
        if (!row.attempt.converged) {
            err << fmt::format("H={:.2f}: solver did not converge (gap {:.3e})\n", row.hurst,
                               row.attempt.result.gap);
            code = ExitCode::failure;
        }
    }
    return code;
}

ExitCode run_table(const RunConfig& c, std::ostream& out, std::ostream& err) {
    std::vector<double> hs;
    for (int i = 55; i <= 95; i += 5) {
        hs.push_back(i / 100.0);
    }
    const auto rows = sweep(hs, n_or_default(c), c);
    if (c.format.value_or("csv") == "csv") {
        write_file(prepare_output(c, "table.csv"), sweep_csv(rows), out);
    } else {
        json doc = json::array();
        for (const auto& row : rows) {
            const SolveResult& r = row.attempt.result;
            doc.push_back({{"H", row.hurst}, {"minF", r.primal}, {"dual", r.dual}, {"gap", r.gap},
                           {"iters", r.iterations}, {"converged", row.attempt.converged}});
        }
        write_file(prepare_output(c, "table.json"), doc.dump(2) + "\n", out);
    }
    return report_unconverged(rows, err);
}

ExitCode run_curve(const RunConfig& c, std::ostream& out, std::ostream& err) {
    std::vector<double> hs;
    for (int i = 51; i <= 99; ++i) {
        hs.push_back(i / 100.0);
    }
    const long n = n_or_default(c);
    const auto rows = sweep(hs, n, c);
    if (wants(c, "csv")) {
        write_file(prepare_output(c, "curve.csv"), sweep_csv(rows), out);
    }
    if (wants(c, "svg")) {
        Series s{"min F", "#1f4fbf", {}, {}};
        for (const auto& row : rows) {
            s.x.push_back(row.hurst);
            s.y.push_back(row.attempt.result.primal);
        }
        const LineChart chart{fmt::format("min F against H, N = {}", n), "H", "min F", {s}};
        write_file(prepare_output(c, "curve.svg"), render_svg(chart), out);
    }
    return report_unconverged(rows, err);
}

ExitCode run_profile(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const double hurst = hurst_or_default(c);
    const long n = n_or_default(c);
    const DiscreteModel m = DiscreteModel::build(hurst, n);
    const Attempt a = attempt_solve(m, solver_options(c));
    const SolveResult& r = a.result;
    const Vector h = h_profile(m, r.a);
    const Matrix& k = m.kernel().matrix();

    if (wants(c, "csv")) {
        std::string csv = "s,a_s,k_Ns,lambda_s,h_s\n";
        for (Index s = 0; s < n; ++s) {
            csv += fmt::format("{},{:.12g},{:.12g},{:.12g},{:.12g}\n", s + 1, r.a(s), k(n - 1, s), r.lambda[s], h(s));
        }
        write_file(prepare_output(c, "profile.csv"), csv, out);
    }
    if (wants(c, "svg")) {
        const double scale = h.maxCoeff() > 0.0 ? r.a.maxCoeff() / h.maxCoeff() : 1.0;
        Series minimizer{"minimizer a", "#1f4fbf", {}, {}};
        Series distance{"scaled distance R(t)", "#c8202a", {}, {}};
        for (Index s = 0; s < n; ++s) {
            minimizer.x.push_back(static_cast<double>(s + 1));
            minimizer.y.push_back(r.a(s));
            distance.x.push_back(static_cast<double>(s + 1));
            distance.y.push_back(h(s) * scale);
        }
        const LineChart chart{fmt::format("Minimizer and scaled distance, H = {:.2f}, N = {}", hurst, n), "index",
                              "value", {minimizer, distance}};
        write_file(prepare_output(c, "profile.svg"), render_svg(chart), out);
    }
    if (!a.converged) {
        err << fmt::format("solver did not converge (gap {:.3e})\n", r.gap);
        return ExitCode::failure;
    }
    return ExitCode::ok;
}

json structure_json(const StructureReport& s) {
    json sizes = json::object();
    const char* labels[] = {"1e-3", "1e-4", "1e-5", "1e-6"};
    for (std::size_t i = 0; i < s.support_size_by_threshold.size() && i < 4; ++i) {
        sizes[labels[i]] = s.support_size_by_threshold[i];
    }
    std::vector<Index> support1;
    for (Index t : s.xi_support) {
        support1.push_back(t + 1);
    }
    return {{"support_threshold", s.support_threshold},
            {"xi_support", support1},
            {"support_size_by_threshold", sizes},
            {"atom_at_end", s.atom_at_end},
            {"t_star", s.t_star ? json(*s.t_star + 1) : json(nullptr)},
            {"tail_residual", s.tail_residual},
            {"endpoint_gap", s.endpoint_gap},
            {"lower_bound", s.lower_bound},
            {"lower_bound_index", s.lower_bound_index + 1},
            {"implied_time", to_std(s.implied_time)},
            {"plateau_spread", s.plateau_spread},
            {"monotonicity_violations", s.monotonicity_violations}};
}

ExitCode run_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const double hurst = hurst_or_default(c);
    const long n = n_or_default(c);
    const DiscreteModel m = DiscreteModel::build(hurst, n);
    const Attempt a = attempt_solve(m, solver_options(c));
    const SolveResult& r = a.result;

    json doc;
    doc["config"] = {{"command", c.command}, {"H", hurst},       {"N", n},
                     {"gap_tol", c.gap_tol}, {"seed", c.seed},   {"paths", c.paths},
                     {"format", "json"}};
    doc["result"] = {{"primal", r.primal},
                     {"dual", r.dual},
                     {"gap", r.gap},
                     {"iterations", r.iterations},
                     {"converged", a.converged},
                     {"polished", r.polished},
                     {"a", to_std(r.a)},
                     {"lambda", to_std(r.lambda.values())},
                     {"h", to_std(h_profile(m, r.a))}};
    ExitCode code = ExitCode::ok;
    if (a.converged) {
        try {
            doc["structure"] = structure_json(analyze(m, r));
        } catch (const InvariantViolation& e) {
            doc["structure"] = {{"error", e.what()}};
            err << "structure check failed: " << e.what() << '\n';
            code = ExitCode::failure;
        }
    } else {
        doc["structure"] = nullptr;
        err << fmt::format("solver did not converge (gap {:.3e})\n", r.gap);
        code = ExitCode::failure;
    }
    doc["meta"] = {{"version", kVersion}, {"timestamp", iso_timestamp()}};
    write_file(prepare_output(c, "solve.json"), doc.dump(2) + "\n", out);
    return code;
}

ExitCode run_kernel(const RunConfig& c, std::ostream& out) {
    const KernelParams p(hurst_or_default(c));
    const long n = n_or_default(c);
    std::string csv = "t,s,K\n";
    for (long i = 1; i <= n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n);
        for (long j = 1; j <= i; ++j) {
            const double s = static_cast<double>(j) / static_cast<double>(n);
            csv += fmt::format("{:.6g},{:.6g},{:.12g}\n", t, s, eval_K(p, t, s));
        }
    }
    write_file(prepare_output(c, "kernel.csv"), csv, out);
    return ExitCode::ok;
}

ExitCode run_check(const RunConfig& c, std::ostream& out) {
    CheckSettings s;
    s.hurst = hurst_or_default(c);
    s.n = n_or_default(c);
    s.gap_tol = c.gap_tol;
    s.seed = c.seed;
    s.paths = c.paths;
    s.threads = c.threads;
    bool all = true;
    for (const auto& o : run_checks(s)) {
        out << (o.passed ? "PASS " : "FAIL ") << o.name << ": " << o.detail << '\n';
        all = all && o.passed;
    }
    return all ? ExitCode::ok : ExitCode::failure;
}

}  // namespace

void validate(const RunConfig& c) {
    if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
        throw ConfigError("unknown command '" + c.command + "'");
    }
    if (c.hurst && !(*c.hurst > 0.5 && *c.hurst < 1.0)) {
        throw ConfigError(fmt::format("--H must lie in the open interval (0.5, 1), got {}", *c.hurst));
    }
    if (c.n && *c.n < 1) {
        throw ConfigError(fmt::format("--N must be at least 1, got {}", *c.n));
    }
    if (c.n && *c.n > DiscreteModel::kMaxSize) {
        throw ConfigError(fmt::format("--N must be at most {}, got {}", DiscreteModel::kMaxSize, *c.n));
    }
    if (!(c.gap_tol > 0.0) || !std::isfinite(c.gap_tol)) {
        throw ConfigError("--gap-tol must be positive");
    }
    if (c.paths < 1) {
        throw ConfigError("--paths must be positive");
    }
    if (c.format) {
        const auto ok = allowed_formats(c.command);
        if (std::find(ok.begin(), ok.end(), *c.format) == ok.end()) {
            throw ConfigError(fmt::format("command '{}' cannot write format '{}'", c.command, *c.format));
        }
    }
}

unsigned threads_from_env() {
    const char* raw = std::getenv("FBM_THREADS");
    if (raw == nullptr || *raw == '\0') {
        return 0;
    }
    try {
        std::size_t used = 0;
        const long value = std::stol(raw, &used);
        if (used != std::strlen(raw) || value < 0) {
            throw ConfigError("");
        }
        return static_cast<unsigned>(value);
    } catch (const std::exception&) {
        throw ConfigError(fmt::format("FBM_THREADS must be a non-negative integer, got '{}'", raw));
    }
}

ExitCode run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        validate(config);
        if (config.command == "solve") return run_solve(config, out, err);
        if (config.command == "table") return run_table(config, out, err);
        if (config.command == "curve") return run_curve(config, out, err);
        if (config.command == "profile") return run_profile(config, out, err);
        if (config.command == "kernel") return run_kernel(config, out);
        return run_check(config, out);
    } catch (const ConfigError& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return ExitCode::invalid_config;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::failure;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Closest Gaussian martingale to fractional Brownian motion"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig config;
    double hurst = 0.0;
    long n = 0;
    std::string format;
    auto* h_opt = app.add_option("--H", hurst, "Hurst index in (0.5, 1)");
    auto* n_opt = app.add_option("--N", n, "number of grid points");
    app.add_option("--gap-tol", config.gap_tol, "relative duality gap tolerance")->capture_default_str();
    app.add_option("--seed", config.seed, "Monte Carlo seed")->capture_default_str();
    app.add_option("--paths", config.paths, "Monte Carlo paths")->capture_default_str();
    app.add_option("--out", config.output_dir, "output directory")->capture_default_str();
    auto* f_opt = app.add_option("--format", format, "csv, json or svg");

    app.add_subcommand("solve", "solve one instance and write result and structure as JSON");
    app.add_subcommand("table", "min F for H = 0.55..0.95 at N = 200");
    app.add_subcommand("curve", "min F for H = 0.51..0.99 at N = 200, CSV and SVG");
    app.add_subcommand("profile", "minimizer and distance profile, CSV and SVG");
    app.add_subcommand("kernel", "kernel values on a grid");
    app.add_subcommand("check", "run the invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int status = app.exit(e, out, err);
        return status == 0 ? 0 : static_cast<int>(ExitCode::invalid_config);
    }

    config.command = app.get_subcommands().front()->get_name();
    if (h_opt->count() > 0) config.hurst = hurst;
    if (n_opt->count() > 0) config.n = n;
    if (f_opt->count() > 0) config.format = format;
    try {
        config.threads = threads_from_env();
    } catch (const ConfigError& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return static_cast<int>(ExitCode::invalid_config);
    }
    return static_cast<int>(run(config, out, err));
}

}  // namespace fbmm::cli
