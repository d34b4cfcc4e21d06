// Command-line front end: simulate paths, run the substitution estimator,
// run Monte Carlo estimator comparisons, check the functional gradient,
// and self-test against tiny exact-enumeration oracles.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "linproc/constrained.hpp"
#include "linproc/innovations.hpp"
#include "linproc/plugin.hpp"
#include "linproc/process.hpp"
#include "linproc/rng.hpp"
#include "linproc/smooth_function.hpp"
#include "linproc/study.hpp"
#include "linproc/ustat.hpp"

namespace {

// Exit codes: 0 ok, 1 config error, 2 numerical failure, 3 selftest failure.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat "section.key" -> value store filled from an INI-style file plus
// command-line overrides (later writers win).
class RunConfig {
public:
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }
    std::string require(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing config key: " + key);
        return it->second;
    }
    double num(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + " is not a number: " + it->second);
        }
    }
    long integer(const std::string& key, long fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            return std::stol(it->second);
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + " is not an integer: " + it->second);
        }
    }

    const std::map<std::string, std::string>& entries() const { return values_; }

    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [k, v] : values_) j[k] = v;
        return j;
    }

private:
    std::map<std::string, std::string> values_;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

void load_ini(const std::string& path, RunConfig& config) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(path + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty() || section.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": key outside a [section]");
        config.set(section + "." + key, trim(line.substr(eq + 1)));
    }
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string field;
    while (std::getline(in, field, ',')) {
        field = trim(field);
        if (field.empty()) continue;
        out.push_back(std::stod(field));
    }
    return out;
}

linproc::CoefficientModel make_model(const RunConfig& config) {
    const std::string name = config.str("model.name", "ar1");
    if (name == "ar1") return linproc::CoefficientModel::ar1();
    if (name == "ma1") return linproc::CoefficientModel::ma1();
    if (name == "arma11") return linproc::CoefficientModel::arma11();
    throw ConfigError("unknown model.name: " + name);
}

linproc::Theta make_theta(const RunConfig& config, const linproc::CoefficientModel& model) {
    const auto theta = parse_list(config.require("model.theta"));
    if (static_cast<int>(theta.size()) != model.dim())
        throw ConfigError("model.theta has wrong dimension for " + model.name());
    return theta;
}

linproc::InnovationSpec make_spec(const RunConfig& config) {
    const std::string name = config.str("distribution.name", "normal");
    if (name == "normal") return linproc::InnovationSpec::standard_normal();
    if (name == "gamma")
        return linproc::InnovationSpec::centered_gamma(config.num("distribution.shape", 3.0));
    if (name == "laplace")
        return linproc::InnovationSpec::centered_laplace(config.num("distribution.scale", 1.0));
    if (name == "uniform")
        return linproc::InnovationSpec::centered_uniform(config.num("distribution.half_width", 1.0));
    if (name == "two-point")
        return linproc::InnovationSpec::two_point(config.num("distribution.p", 0.5),
                                                  config.num("distribution.hi", 1.0));
    throw ConfigError("unknown distribution.name: " + name);
}

linproc::SmoothFunction make_h(const RunConfig& config) {
    const std::string name = config.str("target.h", "square");
    if (name == "square") return linproc::SmoothFunction::square();
    if (name == "identity") return linproc::SmoothFunction::identity();
    if (name == "abs") return linproc::SmoothFunction::abs_value();
    if (name == "cos") return linproc::SmoothFunction::cos_t(config.num("target.t", 1.0));
    if (name == "constant") return linproc::SmoothFunction::constant(config.num("target.c", 0.0));
    if (name == "poly") return linproc::SmoothFunction::poly(parse_list(config.require("target.coeffs")));
    throw ConfigError("unknown target.h: " + name);
}

struct RunParams {
    std::size_t n;
    int r;
    std::uint64_t seed;
    int partitions;
    linproc::UStatConfig ustat;
};

RunParams make_run_params(RunConfig& config) {
    RunParams p;
    const long n = config.integer("run.n", 500);
    if (n < 1) throw ConfigError("run.n must be positive");
    p.n = static_cast<std::size_t>(n);
    long r = config.integer("run.r", -1);
    if (r < 0) r = linproc::default_prehistory(p.n);
    p.r = static_cast<int>(r);
    p.seed = static_cast<std::uint64_t>(config.integer("run.seed", 1));
    p.partitions = static_cast<int>(config.integer("run.partitions", 1));
    if (p.partitions < 1) throw ConfigError("run.partitions must be >= 1");
    p.ustat.m = static_cast<int>(config.integer("run.m", 0));
    p.ustat.B = static_cast<std::uint64_t>(config.integer("run.B", 0));
    p.ustat.partitions = p.partitions;
    // echo the resolved prehistory so artifacts carry the full run shape
    config.set("run.r", std::to_string(p.r));
    config.set("run.n", std::to_string(p.n));
    config.set("run.seed", std::to_string(p.seed));
    return p;
}

void write_text(const RunConfig& config, const std::string& text) {
    const std::string out = config.str("output.path", "");
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(out);
    if (!os) throw ConfigError("cannot open output file: " + out);
    os << text;
}

int cmd_simulate(RunConfig& config) {
    const auto model = make_model(config);
    const auto theta = make_theta(config, model);
    const auto spec = make_spec(config);
    const RunParams p = make_run_params(config);

    linproc::rng::Stream stream = linproc::rng::derive(p.seed, "path", 0);
    const linproc::ProcessPath path = linproc::simulate(model, theta, spec, p.n, p.r, stream);

    std::ostringstream os;
    for (const auto& [k, v] : config.entries()) os << "# " << k << " = " << v << '\n';
    path.to_csv(os);
    write_text(config, os.str());
    return 0;
}

linproc::ProcessPath load_or_simulate(RunConfig& config, const linproc::CoefficientModel& model,
                                      const linproc::InnovationSpec& spec, const RunParams& p) {
    const std::string input = config.str("run.input", "");
    if (!input.empty()) {
        std::ifstream in(input);
        if (!in) throw ConfigError("cannot open path CSV: " + input);
        return linproc::ProcessPath::from_csv(in);
    }
    if (!config.has("model.theta")) throw ConfigError("estimate needs run.input or model.theta");
    linproc::rng::Stream stream = linproc::rng::derive(p.seed, "path", 0);
    return linproc::simulate(model, make_theta(config, model), spec, p.n, p.r, stream);
}

int cmd_estimate(RunConfig& config) {
    const auto model = make_model(config);
    const auto spec = make_spec(config);
    const auto h = make_h(config);
    RunParams p = make_run_params(config);

    const linproc::ProcessPath path = load_or_simulate(config, model, spec, p);
    if (path.r < 1)
        throw std::domain_error("estimate: the path carries no pre-observations (r = " +
                                std::to_string(path.r) + "); innovation recovery needs r >= 1");
    config.set("run.n", std::to_string(path.n()));
    config.set("run.r", std::to_string(path.r));

    const std::string method = config.str("run.theta_method", "ls");
    linproc::SubstitutionOptions opts;
    opts.ustat = p.ustat;
    opts.ustat.seed = linproc::rng::derive_seed(p.seed, "tuples", 0);
    opts.spec = &spec;

    linproc::Theta theta_hat;
    if (method == "ls" || method == "moment") {
        opts.theta_method = method == "ls" && model.name() == "ar1"
                                ? linproc::ThetaMethod::LeastSquares
                                : linproc::ThetaMethod::MomentMatch;
        theta_hat = linproc::estimate_theta(path, model, linproc::ThetaMethod::LeastSquares);
    } else if (method == "onestep") {
        opts.theta_method = linproc::ThetaMethod::OneStep;
        const double ls = linproc::least_squares_ar1(path);
        theta_hat = {linproc::one_step_efficient_ar1(path, ls, spec)};
    } else {
        throw ConfigError("unknown run.theta_method: " + method);
    }

    const linproc::EstimateReport report = linproc::substitution_estimate(
        path, model, theta_hat, h, linproc::ConstraintSpec::identity(), opts);

    nlohmann::json j = nlohmann::json::parse(report.to_json());
    j["config"] = config.to_json();
    j["config"]["run.m"] = std::to_string(report.m);
    j["config"]["run.B"] = std::to_string(report.B);
    write_text(config, j.dump(2) + "\n");
    return 0;
}

std::vector<linproc::EstimatorId> parse_estimators(const std::string& list) {
    std::vector<linproc::EstimatorId> out;
    std::istringstream in(list);
    std::string field;
    while (std::getline(in, field, ',')) {
        field = trim(field);
        if (field.empty()) continue;
        if (field == "empirical") out.push_back(linproc::EstimatorId::Empirical);
        else if (field == "improved-empirical") out.push_back(linproc::EstimatorId::ImprovedEmpirical);
        else if (field == "ustat-ls") out.push_back(linproc::EstimatorId::UstatLs);
        else if (field == "ustat-onestep") out.push_back(linproc::EstimatorId::UstatOneStep);
        else if (field == "simple-efficient") out.push_back(linproc::EstimatorId::SimpleEfficient);
        else throw ConfigError("unknown estimator: " + field);
    }
    if (out.empty()) throw ConfigError("estimator list is empty");
    return out;
}

int cmd_study(RunConfig& config) {
    const auto model = make_model(config);
    const auto spec = make_spec(config);
    const RunParams p = make_run_params(config);

    linproc::StudyConfig sc;
    sc.theta0 = make_theta(config, model);
    sc.n = p.n;
    sc.r = p.r;
    const long reps = config.integer("run.replications", 200);
    if (reps < 2) throw ConfigError("run.replications must be >= 2");
    sc.replications = static_cast<std::size_t>(reps);
    sc.seed = p.seed;
    sc.ustat = p.ustat;
    if (config.has("run.estimators"))
        sc.estimators = parse_estimators(config.require("run.estimators"));
    sc.oracle_nuisance = config.integer("run.oracle_nuisance", 1) != 0;
    config.set("run.replications", std::to_string(sc.replications));

    const linproc::StudyResult result = linproc::monte_carlo_study(model, spec, sc);

    std::ostringstream os;
    for (const auto& [k, v] : config.entries()) os << "# " << k << " = " << v << '\n';
    result.to_csv(os);
    write_text(config, os.str());

    const std::string json_out = config.str("output.json", "");
    if (!json_out.empty()) {
        nlohmann::json j = nlohmann::json::parse(result.to_json());
        j["config"] = config.to_json();
        std::ofstream jf(json_out);
        if (!jf) throw ConfigError("cannot open output file: " + json_out);
        jf << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_gradient_check(RunConfig& config) {
    const auto model = make_model(config);
    const auto theta = make_theta(config, model);
    const auto spec = make_spec(config);
    const auto h = make_h(config);
    const RunParams p = make_run_params(config);

    linproc::CoefSeq beta = model.name() == "ar1"
                                ? linproc::CoefSeq::ar1_powers(theta[0])
                                : linproc::CoefSeq::finite(model.coefficients(theta, linproc::CoefKind::Delta, 32));

    // Bounded direction g, centered so that int g dP = 0 (centering constant
    // estimated once from a derived stream and frozen into the report).
    const std::string gname = config.str("run.direction", "square-clipped");
    std::function<double(double)> raw;
    if (gname == "square-clipped") raw = [](double x) { return std::min(x * x, 4.0); };
    else if (gname == "abs-clipped") raw = [](double x) { return std::min(std::abs(x), 3.0); };
    else throw ConfigError("unknown run.direction: " + gname);
    linproc::rng::Stream center_stream = linproc::rng::derive(p.seed, "center", 0);
    double center = 0.0;
    const std::size_t center_mc = 2000000;
    for (std::size_t i = 0; i < center_mc; ++i) center += raw(spec.sample(center_stream));
    center /= static_cast<double>(center_mc);
    auto g = [raw, center](double x) { return raw(x) - center; };

    const auto mc = static_cast<std::size_t>(config.integer("run.mc", 400000));
    std::vector<double> eps = config.has("run.eps_grid")
                                  ? parse_list(config.require("run.eps_grid"))
                                  : std::vector<double>{0.02, 0.04, 0.06, 0.08, 0.10};
    linproc::rng::Stream stream = linproc::rng::derive(p.seed, "gradient", 0);
    const linproc::GradientCheck check = linproc::gradient_check(spec, beta, h, g, eps, mc, stream);

    nlohmann::json j{{"slope", check.slope},
                     {"target", check.target},
                     {"rel_error", check.rel_error},
                     {"eps", check.eps},
                     {"kappa_eps", check.kappa_eps},
                     {"direction_center", center},
                     {"config", config.to_json()}};
    write_text(config, j.dump(2) + "\n");
    return 0;
}

// Tiny-instance oracle suite: exact enumeration cross-checks that must
// hold to round-off on any correct build.
int cmd_selftest() {
    using namespace linproc;
    int failures = 0;
    const auto check = [&failures](bool ok, const char* what) {
        std::cout << (ok ? "ok   " : "FAIL ") << what << '\n';
        if (!ok) ++failures;
    };

    const std::vector<double> X{1.0, -2.0, 0.5, 3.0, -1.0};
    const std::vector<double> beta{1.0, 0.5};
    const SmoothFunction h = SmoothFunction::square();

    // exact U-statistic equals a direct double loop over ordered pairs
    const UStatResult exact = ustat_exact(X, beta, h);
    double direct = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = 0; j < X.size(); ++j) {
            if (i == j) continue;
            direct += h(beta[0] * X[i] + beta[1] * X[j]);
            ++count;
        }
    direct /= static_cast<double>(count);
    check(std::abs(exact.kappa_tilde - direct) < 1e-12, "exact enumeration vs direct loop");

    // forced-enumeration incomplete mode reproduces the exact value
    const UStatResult forced = ustat_incomplete(X, beta, h, count, 7, 1, true);
    check(std::abs(forced.kappa_tilde - exact.kappa_tilde) < 1e-12,
          "forced enumeration vs exact");

    // slot sums against full conditional enumeration
    bool slots_ok = true;
    for (std::size_t j = 1; j <= X.size(); ++j) {
        double cond = 0.0;
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            if (i == j - 1) continue;
            cond += h(beta[0] * X[j - 1] + beta[1] * X[i]) +
                    h(beta[0] * X[i] + beta[1] * X[j - 1]);
            cnt += 2;
        }
        // sum_r H_{r,j} averages each slot over (n-1) tuples
        const double expect = cond / static_cast<double>(X.size() - 1);
        if (std::abs(exact.slot_sum(j) - expect) > 1e-12) slots_ok = false;
        (void)cnt;
    }
    check(slots_ok, "slot sums vs conditional enumeration");

    // sampling mode is within 6 standard errors of the exact value
    const UStatResult sampled = ustat_incomplete(X, beta, h, 200000, 11);
    check(std::abs(sampled.kappa_tilde - exact.kappa_tilde) < 6.0 * sampled.sampling_se,
          "sampled value near exact value");

    std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"invariant-law estimation for linear processes"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("-c,--config", config_path, "INI config file (sectioned key = value)");
    app.add_option("-D,--set", overrides, "override a config entry, e.g. -D run.n=2000");

    std::map<std::string, std::string> shortcuts; // flag -> config key
    const auto add_shortcut = [&](CLI::App* cmd, const char* flag, const char* key,
                                  const char* help) {
        cmd->add_option_function<std::string>(
            flag, [&shortcuts, key](const std::string& v) { shortcuts[key] = v; }, help);
    };

    CLI::App* simulate = app.add_subcommand("simulate", "simulate a stationary path to CSV");
    CLI::App* estimate = app.add_subcommand("estimate", "substitution estimate to JSON");
    CLI::App* study = app.add_subcommand("study", "Monte Carlo estimator comparison to CSV");
    CLI::App* gradient = app.add_subcommand("gradient-check", "functional gradient check to JSON");
    CLI::App* selftest = app.add_subcommand("selftest", "tiny exact-enumeration oracle suite");
    for (CLI::App* cmd : {simulate, estimate, study, gradient}) {
        cmd->fallthrough(); // let -c / -D appear after the subcommand name
        add_shortcut(cmd, "--model", "model.name", "model name: ar1, ma1, arma11");
        add_shortcut(cmd, "--theta", "model.theta", "model parameter(s), comma separated");
        add_shortcut(cmd, "--dist", "distribution.name", "innovation law name");
        add_shortcut(cmd, "--target", "target.h", "target function name");
        add_shortcut(cmd, "--n", "run.n", "series length");
        add_shortcut(cmd, "--r", "run.r", "pre-observation count (-1 = auto)");
        add_shortcut(cmd, "--m", "run.m", "U-statistic order (0 = auto)");
        add_shortcut(cmd, "--B", "run.B", "sampled tuple count (0 = auto)");
        add_shortcut(cmd, "--seed", "run.seed", "master seed");
        add_shortcut(cmd, "--partitions", "run.partitions", "tuple-seed partitions");
        add_shortcut(cmd, "--replications", "run.replications", "study replications");
        add_shortcut(cmd, "--out", "output.path", "output file (default stdout)");
        add_shortcut(cmd, "--in", "run.input", "input path CSV (estimate)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig config;
        if (!config_path.empty()) load_ini(config_path, config);
        for (const auto& [key, value] : shortcuts) config.set(key, value);
        for (const auto& entry : overrides) {
            const auto eq = entry.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value: " + entry);
            config.set(trim(entry.substr(0, eq)), trim(entry.substr(eq + 1)));
        }

        if (selftest->parsed()) return cmd_selftest();
        if (simulate->parsed()) return cmd_simulate(config);
        if (estimate->parsed()) return cmd_estimate(config);
        if (study->parsed()) return cmd_study(config);
        if (gradient->parsed()) return cmd_gradient_check(config);
        throw ConfigError("no command given");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
