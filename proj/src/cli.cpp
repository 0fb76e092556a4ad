#include "lmpred/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "lmpred/error.hpp"
#include "lmpred/experiments.hpp"
#include "lmpred/io.hpp"
#include "lmpred/model.hpp"
#include "lmpred/predict.hpp"
#include "lmpred/simulate.hpp"
#include "lmpred/theory.hpp"

namespace lmpred::cli {

namespace {

// Flag name -> raw text. Flags given on the command line win over --config.
using Values = std::map<std::string, std::string>;

const std::vector<std::pair<std::string, std::string>> kFlags = {
    {"d", "memory parameter in [0, 1/2)"},
    {"sigma-eps", "innovation standard deviation"},
    {"ar", "AR coefficients phi_1,...,phi_p"},
    {"ma", "MA coefficients theta_1,...,theta_q"},
    {"n", "sample size (comma list = grid for experiments)"},
    {"k", "predictor order"},
    {"Kn", "estimation lag K_n: integer, 'default', 'largest_t2' or 'power:<e>'"},
    {"J", "Wiener-Kolmogorov truncation (0 = n)"},
    {"replicates", "Monte Carlo replicates"},
    {"seed", "master seed"},
    {"q", "moment orders (comma list)"},
    {"format", "csv or json (simulate also takes bin)"},
    {"out", "output file (default: standard output)"},
    {"config", "JSON config file; flags override its keys"},
    {"threads", "worker threads (0 = auto, fallback LMPRED_THREADS)"},
    {"input", "path file (CSV or LMPRED01 binary)"},
    {"theorem", "T2 or T3"},
    {"qq", "clt: also write the QQ table CSV here"},
};

std::string config_key(const std::string& flag) {
    std::string k = flag;
    for (auto& ch : k)
        if (ch == '-') ch = '_';
    return k;
}

std::string json_to_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s;
        for (const auto& e : v) s += (s.empty() ? "" : ",") + json_to_text(e);
        return s;
    }
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
}

void merge_config(Values& values, const std::string& file) {
    std::ifstream in(file);
    require(in.good(), ErrorKind::Io, "cannot open config '" + file + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        fail(ErrorKind::Io, std::string("config is not valid JSON: ") + e.what());
    }
    require(j.is_object(), ErrorKind::Io, "config must be a JSON object");
    if (j.contains("spec")) {
        const auto spec = spec_from_json(j["spec"]);
        j.erase("spec");
        j["d"] = spec.d;
        j["sigma_eps"] = spec.sigma_eps;
        j["ar"] = spec.ar;
        j["ma"] = spec.ma;
    }
    for (const auto& [key, value] : j.items()) {
        std::string flag;
        for (const auto& f : kFlags)
            if (config_key(f.first) == key) flag = f.first;
        require(!flag.empty() && flag != "config", ErrorKind::Io, "unknown config key '" + key + "'");
        if (!values.count(flag)) values[flag] = json_to_text(value);
    }
}

double to_double(const std::string& flag, const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw CLI::ValidationError("--" + flag, "not a number: '" + s + "'");
    return v;
}

std::uint64_t to_u64(const std::string& flag, const std::string& s) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || s[0] == '-')
        throw CLI::ValidationError("--" + flag, "not a non-negative integer: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Ctx {
    std::string command;
    Values values;
    std::ostream* out = nullptr;

    bool has(const std::string& f) const { return values.count(f) > 0; }
    const std::string& get(const std::string& f) const {
        auto it = values.find(f);
        if (it == values.end()) throw CLI::RequiredError("--" + f);
        return it->second;
    }
    std::string get_or(const std::string& f, const std::string& fallback) const {
        return has(f) ? values.at(f) : fallback;
    }
    double num(const std::string& f) const { return to_double(f, get(f)); }
    std::size_t size(const std::string& f) const { return static_cast<std::size_t>(to_u64(f, get(f))); }
    std::size_t size_or(const std::string& f, std::size_t fallback) const { return has(f) ? size(f) : fallback; }
    std::vector<double> nums(const std::string& f) const {
        std::vector<double> v;
        for (const auto& s : split(get(f))) v.push_back(to_double(f, s));
        return v;
    }
    std::vector<std::size_t> sizes(const std::string& f) const {
        std::vector<std::size_t> v;
        for (const auto& s : split(get(f))) v.push_back(static_cast<std::size_t>(to_u64(f, s)));
        return v;
    }

    ProcessSpec spec() const {
        ProcessSpec s;
        s.d = num("d");
        if (has("sigma-eps")) s.sigma_eps = num("sigma-eps");
        if (has("ar")) s.ar = nums("ar");
        if (has("ma")) s.ma = nums("ma");
        check_spec(s);
        return s;
    }
    std::string format(bool allow_bin = false) const {
        const std::string f = get_or("format", "csv");
        if (f != "csv" && f != "json" && !(allow_bin && f == "bin"))
            throw CLI::ValidationError("--format", "expected csv or json, got '" + f + "'");
        return f;
    }
    int threads() const {
        if (has("threads")) return static_cast<int>(to_u64("threads", get("threads")));
        if (const char* env = std::getenv("LMPRED_THREADS"); env && *env)
            return static_cast<int>(to_u64("LMPRED_THREADS", env));
        return 0;
    }
    Json provenance() const {
        Json j{{"command", command}};
        for (const auto& [k, v] : values)
            if (k != "out" && k != "config") j[config_key(k)] = v;
        j["threads_resolved"] = threads();
        return j;
    }
};

// Opens --out (binary-safe) or returns the caller's stream.
struct Sink {
    std::unique_ptr<std::ofstream> file;
    std::ostream* os;
    explicit Sink(const Ctx& c) : os(c.out) {
        if (c.has("out")) {
            file = std::make_unique<std::ofstream>(c.get("out"), std::ios::binary);
            require(file->good(), ErrorKind::Io, "cannot write '" + c.get("out") + "'");
            os = file.get();
        }
    }
    std::ostream& operator*() { return *os; }
};

void csv_provenance(std::ostream& os, const Ctx& c) { os << "# config=" << c.provenance().dump() << '\n'; }

int cmd_simulate(const Ctx& c) {
    const auto spec = c.spec();
    const std::size_t n = c.size("n");
    const std::uint64_t seed = to_u64("seed", c.get_or("seed", "1"));
    const std::string fmt = c.format(true);
    const auto path = sample(spec, n, seed);
    Sink sink(c);
    if (fmt == "bin") {
        write_path_binary(*sink, path.values);
    } else if (fmt == "json") {
        *sink << Json{{"provenance", c.provenance()},
                      {"spec", to_json(spec)},
                      {"seed", seed},
                      {"method", to_string(path.method)},
                      {"x", path.values}}
                     .dump(2)
              << '\n';
    } else {
        csv_provenance(*sink, c);
        write_path_csv(*sink, path);
    }
    return kOk;
}

int cmd_acvf(const Ctx& c) {
    const auto spec = c.spec();
    const auto acvf = autocovariance(spec, c.size("n"));
    Sink sink(c);
    if (c.format() == "json") {
        *sink << Json{{"provenance", c.provenance()}, {"acvf", acvf}}.dump(2) << '\n';
    } else {
        csv_provenance(*sink, c);
        *sink << "h,sigma\n";
        for (std::size_t h = 0; h < acvf.size(); ++h) *sink << h << ',' << format_double(acvf[h]) << '\n';
    }
    return kOk;
}

std::vector<double> input_values(const Ctx& c) { return read_path_file(c.get("input")).values; }

int cmd_coeffs(const Ctx& c) {
    const std::size_t k = c.size("k");
    PredictorCoeffs coeffs;
    if (c.has("input")) {
        const auto x = input_values(c);
        coeffs = estimated_coefficients(x, k, c.size_or("Kn", k));
    } else {
        coeffs = theoretical_coefficients(c.spec(), k);
    }
    Sink sink(c);
    if (c.format() == "json") {
        auto j = to_json(coeffs);
        j["provenance"] = c.provenance();
        *sink << j.dump(2) << '\n';
    } else {
        csv_provenance(*sink, c);
        write_coeffs_csv(*sink, coeffs);
    }
    return kOk;
}

int cmd_predict(const Ctx& c) {
    const auto x = input_values(c);
    const std::size_t k = c.size("k");
    const std::size_t K = c.size_or("Kn", k);
    const double value = predict_same_realisation(x, k, K);
    Sink sink(c);
    if (c.format() == "json") {
        *sink << Json{{"provenance", c.provenance()}, {"n", x.size()}, {"k", k}, {"K_n", K}, {"prediction", value}}
                     .dump(2)
              << '\n';
    } else {
        csv_provenance(*sink, c);
        *sink << "n,k,K_n,prediction\n" << x.size() << ',' << k << ',' << K << ',' << format_double(value) << '\n';
    }
    return kOk;
}

KnRule kn_rule(const Ctx& c, KnRule fallback) {
    if (!c.has("Kn")) return fallback;
    const std::string& s = c.get("Kn");
    KnRule r = fallback;
    if (s == "default") r.kind = KnKind::Default;
    else if (s == "largest_t2") r.kind = KnKind::LargestT2;
    else if (s.rfind("power:", 0) == 0) {
        r.kind = KnKind::Power;
        r.exponent = to_double("Kn", s.substr(6));
    }
    else {
        r.kind = KnKind::Fixed;
        r.fixed = static_cast<std::size_t>(to_u64("Kn", s));
    }
    return r;
}

ExperimentConfig experiment_config(const Ctx& c, const std::string& default_grid) {
    ExperimentConfig cfg;
    cfg.spec = c.spec();
    cfg.n_grid = c.has("n") ? c.sizes("n") : [&] {
        std::vector<std::size_t> v;
        for (const auto& s : split(default_grid)) v.push_back(std::stoull(s));
        return v;
    }();
    cfg.replicates = c.size_or("replicates", cfg.replicates);
    cfg.master_seed = to_u64("seed", c.get_or("seed", "1"));
    cfg.threads = c.threads();
    if (c.has("q")) cfg.q_orders = c.nums("q");
    cfg.truncation_J = c.size_or("J", 0);
    return cfg;
}

int emit_report(const Ctx& c, const ExperimentReport& r) {
    {
        Sink sink(c);
        if (c.format() == "json") {
            auto j = to_json(r);
            j["provenance"]["cli"] = c.provenance();
            *sink << j.dump(2) << '\n';
        } else {
            csv_provenance(*sink, c);
            write_report_csv(*sink, r);
        }
    }
    if (c.has("qq")) {
        std::ofstream qq(c.get("qq"));
        require(qq.good(), ErrorKind::Io, "cannot write '" + c.get("qq") + "'");
        write_qq_csv(qq, r);
    }
    return r.passed() ? kOk : kVerdictFail;
}

int cmd_experiment(const Ctx& c) {
    if (c.command == "mse") {
        auto cfg = experiment_config(c, "512,2048,8192");
        cfg.kn_rule = kn_rule(c, KnRule{});
        if (c.has("k")) cfg.k_grid = c.sizes("k");
        return emit_report(c, mse_experiment(cfg));
    }
    if (c.command == "clt") {
        auto cfg = experiment_config(c, "1024,4096,16384");
        cfg.kn_rule = kn_rule(c, KnRule{KnKind::Fixed, 2, 0.08, {}});
        return emit_report(c, clt_experiment(cfg));
    }
    if (c.command == "covrate") {
        auto cfg = experiment_config(c, "256,1024,4096,16384,65536");
        cfg.k = c.size_or("k", c.size_or("Kn", 2));
        return emit_report(c, covariance_rate_experiment(cfg));
    }
    auto cfg = experiment_config(c, "256,1024,4096,16384");
    cfg.k = c.size_or("k", c.size_or("Kn", 2));
    return emit_report(c, moment_bound_experiment(cfg));
}

int cmd_validate(const Ctx& c) {
    const auto spec = c.spec();
    ValidationReport report = validate_assumptions(spec);
    if (c.has("n") || c.has("Kn")) {
        const std::string th = c.get_or("theorem", "T2");
        if (th != "T2" && th != "T3") throw CLI::ValidationError("--theorem", "expected T2 or T3");
        const std::size_t n = c.size("n");
        const std::size_t K = kn_rule(c, KnRule{}).resolve(spec, n);
        const auto sched = validate_schedule(spec, n, K, th == "T2" ? Theorem::T2 : Theorem::T3);
        report.checks.insert(report.checks.end(), sched.checks.begin(), sched.checks.end());
    }
    Sink sink(c);
    if (c.format() == "json") {
        Json checks = Json::array();
        for (const auto& ch : report.checks)
            checks.push_back({{"name", ch.name},
                              {"passed", ch.passed},
                              {"value", ch.value},
                              {"threshold", ch.threshold},
                              {"detail", ch.detail}});
        *sink << Json{{"provenance", c.provenance()}, {"passed", report.all_passed()}, {"checks", checks}}.dump(2)
              << '\n';
    } else {
        csv_provenance(*sink, c);
        *sink << "check,status,value,threshold,detail\n";
        for (const auto& ch : report.checks)
            *sink << ch.name << ',' << (ch.passed ? "PASS" : "FAIL") << ',' << format_double(ch.value) << ','
                  << format_double(ch.threshold) << ",\"" << ch.detail << "\"\n";
    }
    return report.all_passed() ? kOk : kVerdictFail;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Long-memory one-step prediction: simulation, coefficients, experiments", "lmpred"};
    app.require_subcommand(1);
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "draw one exact Gaussian path"},
        {"acvf", "autocovariance sigma(0..n)"},
        {"coeffs", "predictor coefficients (theoretical, or estimated with --input)"},
        {"predict", "same-realisation one-step prediction from a path file"},
        {"mse", "Monte Carlo MSE against L_n(k)"},
        {"clt", "normalised prediction-difference distribution"},
        {"covrate", "E||Sigma_hat - Sigma|| rate over an n-grid"},
        {"momentbound", "inverse-moment bounds of Sigma_hat"},
        {"validate", "assumption and K_n schedule checks"},
    };
    Values given;
    std::map<std::string, std::map<std::string, CLI::Option*>> opts;
    std::map<std::string, std::map<std::string, std::string>> raw;
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        for (const auto& [flag, fhelp] : kFlags) opts[name][flag] = sub->add_option("--" + flag, raw[name][flag], fhelp);
    }

    std::vector<const char*> cargv;
    for (const auto& a : argv) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        for (auto* s : app.get_subcommands()) out << s->help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    Ctx ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    ctx.out = &out;
    for (const auto& [flag, opt] : opts[ctx.command])
        if (opt->count() > 0) ctx.values[flag] = raw[ctx.command][flag];

    try {
        if (ctx.has("config")) merge_config(ctx.values, ctx.get("config"));
        if (ctx.command == "simulate") return cmd_simulate(ctx);
        if (ctx.command == "acvf") return cmd_acvf(ctx);
        if (ctx.command == "coeffs") return cmd_coeffs(ctx);
        if (ctx.command == "predict") return cmd_predict(ctx);
        if (ctx.command == "validate") return cmd_validate(ctx);
        return cmd_experiment(ctx);
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n" << app.get_subcommand(ctx.command)->help();
        return kUsage;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    }
}

int run(int argc, char** argv) {
    return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace lmpred::cli
