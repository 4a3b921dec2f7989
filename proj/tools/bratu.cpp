// bratu: command-line driver for the symmetric finite-difference Bratu solver.
//
// Exit codes: 0 success, 2 usage or invalid parameters, 3 numerical failure.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sfdm/sfdm.hpp"

using json = nlohmann::ordered_json;
using namespace sfdm;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    std::string hex;
    char buf[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

// Collects outputs so that each written file gets a digest in the manifest.
class Run {
public:
    explicit Run(std::string subcommand) : subcommand_(std::move(subcommand)), start_(std::chrono::steady_clock::now()) {}

    json& parameters() { return parameters_; }

    // "-" or empty means stdout, which is not recorded in the manifest.
    void emit(const std::string& path, const std::string& payload) {
        if (path.empty() || path == "-") {
            std::cout << payload;
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + path + " for writing");
        out << payload;
        if (!out) throw std::runtime_error("failed writing " + path);
        outputs_.push_back({path, sha256_hex(payload)});
    }

    void finish(const std::string& manifest_path) const {
        std::string path = manifest_path;
        if (path.empty() && !outputs_.empty()) path = outputs_.front().first + ".manifest.json";
        if (path.empty()) return;
        json m;
        m["subcommand"] = subcommand_;
        m["version"] = SFDM_VERSION;
        m["parameters"] = parameters_;
        m["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        m["outputs"] = json::array();
        for (const auto& [file, digest] : outputs_) m["outputs"].push_back({{"path", file}, {"sha256", digest}});
        std::ofstream out(path);
        out << m.dump(2) << '\n';
    }

private:
    std::string subcommand_;
    std::chrono::steady_clock::time_point start_;
    json parameters_ = json::object();
    std::vector<std::pair<std::string, std::string>> outputs_;
};

struct ProblemOptions {
    int dim = 3;
    long long n = 20;
    std::string domain = "cube";
    std::string scheme = "sfdm";

    void add(CLI::App* app) {
        app->add_option("--dim", dim, "spatial dimension")->required()->check(CLI::Range(1, 64));
        app->add_option("--n", n, "subintervals per axis (radial for the ball)")->required()->check(CLI::PositiveNumber);
        app->add_option("--domain", domain, "cube or ball")->check(CLI::IsMember({"cube", "ball"}));
        app->add_option("--scheme", scheme, "sfdm or fdm (cube only)")->check(CLI::IsMember({"sfdm", "fdm"}));
    }

    void record(json& p) const {
        p["dim"] = dim;
        p["n"] = n;
        p["domain"] = domain;
        if (domain == "cube") p["scheme"] = scheme;
    }

    SystemKind kind() const {
        if (domain == "ball") return SystemKind::ball;
        return scheme == "fdm" ? SystemKind::fdm : SystemKind::sfdm;
    }
};

using Problem = std::variant<AssembledSystem, BallSystem>;

Problem make_problem(const ProblemOptions& o, const Formulation& f) {
    if (o.domain == "ball") return assemble_ball(o.dim, o.n, f);
    if (o.dim > kMaxDim) throw DomainError("cube dimension must be at most " + std::to_string(kMaxDim));
    const GridSpec grid(o.dim, o.n);
    return o.scheme == "fdm" ? assemble_fdm(grid, f) : assemble_sfdm(grid, f);
}

struct ParameterChoice {
    std::optional<double> lambda;
    std::optional<double> amplitude;

    void add(CLI::App* app) {
        auto* l = app->add_option("--lambda", lambda, "fixed lambda");
        auto* a = app->add_option("--a", amplitude, "fixed amplitude ||u||_inf");
        l->excludes(a);
        a->excludes(l);
    }

    Formulation formulation() const {
        if (lambda.has_value() == amplitude.has_value()) throw CLI::ValidationError("exactly one of --lambda or --a is required");
        if (lambda) return FixedLambda{*lambda};
        return FixedAmplitude{*amplitude};
    }

    void record(json& p) const {
        if (lambda) p["lambda"] = *lambda;
        if (amplitude) p["a"] = *amplitude;
    }
};

struct SweepOptions {
    double a_start = 0.1;
    double a_step = 0.1;
    double a_end = 20.0;
    bool cold = false;

    void add(CLI::App* app, bool with_cold = true) {
        app->add_option("--a-start", a_start, "first amplitude");
        app->add_option("--a-step", a_step, "amplitude step");
        app->add_option("--a-end", a_end, "last amplitude");
        if (with_cold) app->add_flag("--cold", cold, "solve every point from zeros");
    }

    void record(json& p) const {
        p["a_start"] = a_start;
        p["a_step"] = a_step;
        p["a_end"] = a_end;
        p["cold"] = cold;
    }
};

std::string branch_payload(const Branch& b) {
    std::ostringstream s;
    write_branch_csv(s, b);
    return s.str();
}

json turning_json(const ProblemOptions& o, const TurningPointEstimate& t) {
    json j;
    j["dimension"] = o.dim;
    j["n"] = o.n;
    j["window"] = {{"center", t.a_center}, {"halfwidth", t.a_halfwidth}};
    j["samples"] = t.samples;
    j["A_star"] = t.a_star;
    j["lambda_star"] = round9(t.lambda_star);
    return j;
}

TurningPointEstimate run_turning(const Problem& problem, std::optional<double> center, std::optional<double> halfwidth,
                                 int samples, unsigned threads) {
    return std::visit(
        [&](const auto& sys) {
            AmplitudeWindow w{};
            if (center) {
                w = {*center, halfwidth.value_or(0.1)};
            } else {
                w = auto_window(sys);
                if (halfwidth) w.halfwidth = *halfwidth;
            }
            return locate_turning_point(sys, w.center, w.halfwidth, samples, NewtonConfig{}, threads);
        },
        problem);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symmetric finite-difference solver for the Bratu problem"};
    app.require_subcommand(1);
    int threads_flag = 0;
    std::string manifest;
    app.add_option("--threads", threads_flag, "worker threads (default: BRATU_THREADS or all cores)");
    app.add_option("--manifest", manifest, "manifest path (default: <first output>.manifest.json)");

    // count
    auto* count = app.add_subcommand("count", "number of unknowns for SFDM and full FDM");
    int count_dim = 0;
    long long count_n = 0;
    count->add_option("--dim", count_dim)->required()->check(CLI::Range(1, kMaxDim));
    count->add_option("--n", count_n)->required()->check(CLI::Range(2LL, 1LL << 40));

    // solve
    auto* solve = app.add_subcommand("solve", "solve one fixed-lambda or fixed-amplitude problem");
    ProblemOptions solve_problem;
    ParameterChoice solve_param;
    std::string solve_out, solve_field;
    solve_problem.add(solve);
    solve_param.add(solve);
    solve->add_option("--out", solve_out, "state file: one grid value per line");
    solve->add_option("--field", solve_field, "full lattice field file (cube only)");

    // branch
    auto* branch = app.add_subcommand("branch", "trace lambda(A) over an amplitude grid");
    ProblemOptions branch_problem;
    SweepOptions branch_sweep;
    std::string branch_out = "-";
    branch_problem.add(branch);
    branch_sweep.add(branch);
    branch->add_option("--out", branch_out, "CSV output");

    // turning
    auto* turning = app.add_subcommand("turning", "locate the first turning point by spline interpolation");
    ProblemOptions turning_problem;
    std::optional<double> turning_center, turning_halfwidth;
    int turning_samples = 101;
    std::string turning_out = "-";
    turning_problem.add(turning);
    turning->add_option("--a-center", turning_center, "window centre (auto when omitted)");
    turning->add_option("--a-halfwidth", turning_halfwidth, "window half-width (default 0.1)");
    turning->add_option("--samples", turning_samples, "amplitudes in the window")->check(CLI::Range(5, 100000));
    turning->add_option("--out", turning_out, "JSON output");

    // stability
    auto* stability = app.add_subcommand("stability", "largest real eigenvalue along a branch");
    ProblemOptions stab_problem;
    SweepOptions stab_sweep;
    std::string stab_out = "-";
    stab_problem.add(stability);
    stab_sweep.add(stability);
    stability->add_option("--out", stab_out, "CSV output");

    // ball
    auto* ball = app.add_subcommand("ball", "branch of the radial problem on the unit ball");
    int ball_dim = 2;
    long long ball_n = 1000;
    SweepOptions ball_sweep;
    std::string ball_out = "-", ball_turning_out;
    bool ball_turning = false;
    ball->add_option("--dim", ball_dim)->required()->check(CLI::Range(1, 64));
    ball->add_option("--n", ball_n)->required()->check(CLI::Range(3LL, 1LL << 40));
    ball_sweep.add(ball);
    ball->add_option("--out", ball_out, "CSV output");
    ball->add_flag("--turning", ball_turning, "also locate the first turning point");
    ball->add_option("--turning-out", ball_turning_out, "turning-point JSON (default: stderr)");

    // analytic1d
    auto* analytic = app.add_subcommand("analytic1d", "closed-form one-dimensional solution");
    double an_lambda = 1.0;
    std::string an_branch = "lower", an_out = "-";
    int an_points = 101;
    analytic->add_option("--lambda", an_lambda)->required();
    analytic->add_option("--branch", an_branch)->check(CLI::IsMember({"lower", "upper"}));
    analytic->add_option("--points", an_points)->check(CLI::Range(2, 100000000));
    analytic->add_option("--out", an_out, "CSV output");

    // compare
    auto* compare = app.add_subcommand("compare", "SFDM against full-grid FDM");
    int cmp_dim = 2;
    long long cmp_n = 10;
    ParameterChoice cmp_param;
    std::string cmp_out = "-";
    compare->add_option("--dim", cmp_dim)->required()->check(CLI::Range(1, kMaxDim));
    compare->add_option("--n", cmp_n)->required()->check(CLI::Range(2LL, 1LL << 20));
    cmp_param.add(compare);
    compare->add_option("--out", cmp_out, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    const unsigned threads = resolve_threads(threads_flag);
    try {
        if (*count) {
            Run run("count");
            run.parameters() = {{"dim", count_dim}, {"n", count_n}};
            char line[256];
            std::snprintf(line, sizeof line, "m=%lld\nfdm=%lld\nratio=%.2f\n",
                          static_cast<long long>(variable_count(count_dim, count_n)),
                          static_cast<long long>(full_count(count_dim, count_n)), reduction_ratio(count_dim, count_n));
            run.emit("-", line);
        } else if (*solve) {
            Run run("solve");
            solve_problem.record(run.parameters());
            solve_param.record(run.parameters());
            const Formulation f = solve_param.formulation();
            const Problem problem = make_problem(solve_problem, f);
            bool converged = false;
            std::visit(
                [&](const auto& sys) {
                    const SolutionState s = newton_solve(sys, sys.zero_state());
                    converged = s.converged;
                    json j;
                    j["converged"] = s.converged;
                    j["status"] = to_string(s.status);
                    j["iterations"] = s.iterations;
                    j["unknowns"] = sys.unknown_count();
                    if (s.unknowns.allFinite()) {
                        j["lambda"] = round9(sys.lambda(s.unknowns));
                        j["max_u"] = sys.max_value(s.unknowns);
                    }
                    j["residual_norm"] = s.residual_norm;
                    if (!s.converged) j["diagnostic"] = s.diagnostic;
                    run.emit("-", j.dump(2) + "\n");
                    if (!s.converged) return;
                    if (!solve_out.empty()) {
                        std::ostringstream o;
                        o.precision(17);
                        for (double v : sys.values(s.unknowns)) o << v << '\n';
                        run.emit(solve_out, o.str());
                    }
                    if (!solve_field.empty()) {
                        if constexpr (std::is_same_v<std::decay_t<decltype(sys)>, AssembledSystem>) {
                            std::ostringstream o;
                            write_field(o, full_field(sys, s.unknowns));
                            run.emit(solve_field, o.str());
                        } else {
                            throw DomainError("--field applies to cube domains only");
                        }
                    }
                },
                problem);
            run.finish(manifest);
            if (!converged) return kExitNumeric;
        } else if (*branch) {
            Run run("branch");
            branch_problem.record(run.parameters());
            branch_sweep.record(run.parameters());
            const Problem problem = make_problem(branch_problem, FixedAmplitude{branch_sweep.a_start});
            ContinuationConfig cfg;
            cfg.warm_start = !branch_sweep.cold;
            const Branch b = std::visit(
                [&](const auto& sys) {
                    return trace_branch(sys, branch_sweep.a_start, branch_sweep.a_step, branch_sweep.a_end, cfg);
                },
                problem);
            run.emit(branch_out, branch_payload(b));
            run.finish(manifest);
        } else if (*turning) {
            Run run("turning");
            turning_problem.record(run.parameters());
            run.parameters()["samples"] = turning_samples;
            if (turning_center) run.parameters()["a_center"] = *turning_center;
            if (turning_halfwidth) run.parameters()["a_halfwidth"] = *turning_halfwidth;
            const Problem problem = make_problem(turning_problem, FixedAmplitude{1.0});
            const auto t = run_turning(problem, turning_center, turning_halfwidth, turning_samples, threads);
            run.emit(turning_out, turning_json(turning_problem, t).dump(2) + "\n");
            run.finish(manifest);
        } else if (*stability) {
            Run run("stability");
            stab_problem.record(run.parameters());
            stab_sweep.record(run.parameters());
            const Problem problem = make_problem(stab_problem, FixedAmplitude{stab_sweep.a_start});
            ContinuationConfig cfg;
            cfg.warm_start = !stab_sweep.cold;
            cfg.keep_states = true;
            const StabilityResult r = std::visit(
                [&](const auto& sys) {
                    Branch b = trace_branch(sys, stab_sweep.a_start, stab_sweep.a_step, stab_sweep.a_end, cfg);
                    std::erase_if(b.points, [](const BranchPoint& p) { return !p.converged; });
                    return branch_stability(b, sys.with_formulation(FixedLambda{0.0}), stab_problem.kind(),
                                            EigenConfig{}, threads);
                },
                problem);
            std::ostringstream s;
            write_stability_csv(s, r);
            run.emit(stab_out, s.str());
            run.finish(manifest);
        } else if (*ball) {
            Run run("ball");
            run.parameters() = {{"dim", ball_dim}, {"n", ball_n}};
            ball_sweep.record(run.parameters());
            const BallSystem sys = assemble_ball(ball_dim, ball_n, FixedAmplitude{ball_sweep.a_start});
            ContinuationConfig cfg;
            cfg.warm_start = !ball_sweep.cold;
            const Branch b = trace_branch(sys, ball_sweep.a_start, ball_sweep.a_step, ball_sweep.a_end, cfg);
            run.emit(ball_out, branch_payload(b));
            if (ball_turning) {
                ProblemOptions o;
                o.dim = ball_dim;
                o.n = ball_n;
                o.domain = "ball";
                const auto t = run_turning(sys, std::nullopt, std::nullopt, 101, threads);
                const std::string payload = turning_json(o, t).dump(2) + "\n";
                if (ball_turning_out.empty())
                    std::cerr << payload;
                else
                    run.emit(ball_turning_out, payload);
            }
            run.finish(manifest);
        } else if (*analytic) {
            Run run("analytic1d");
            run.parameters() = {{"lambda", an_lambda}, {"branch", an_branch}, {"points", an_points}};
            const Analytic1D u =
                analytic_1d(an_lambda, an_branch == "upper" ? SolutionBranch::upper : SolutionBranch::lower);
            std::ostringstream s;
            s << "x,u\n";
            for (int i = 0; i < an_points; ++i) {
                const double x = static_cast<double>(i) / (an_points - 1);
                s << format_real(x) << ',' << format_real(u(x)) << '\n';
            }
            run.emit(an_out, s.str());
            run.finish(manifest);
        } else if (*compare) {
            Run run("compare");
            run.parameters() = {{"dim", cmp_dim}, {"n", cmp_n}};
            cmp_param.record(run.parameters());
            const ComparisonReport r = compare_sfdm_fdm(GridSpec(cmp_dim, cmp_n), cmp_param.formulation());
            json j;
            j["dimension"] = r.dim;
            j["n"] = r.n;
            j["fdm_unknowns"] = r.fdm_unknowns;
            j["sfdm_unknowns"] = r.sfdm_unknowns;
            j["ratio"] = r.ratio;
            j["sup_norm_difference"] = r.sup_norm_difference;
            j["max_location"] = r.max_location;
            j["lambda_sfdm"] = round9(r.lambda_sfdm);
            j["lambda_fdm"] = round9(r.lambda_fdm);
            run.emit(cmp_out, j.dump(2) + "\n");
            run.finish(manifest);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
