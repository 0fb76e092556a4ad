#include "lmpred/io.hpp"

#include <bit>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lmpred/error.hpp"

namespace lmpred {

namespace {
constexpr char kMagic[8] = {'L', 'M', 'P', 'R', 'E', 'D', '0', '1'};

const char* kn_name(KnKind k) {
    switch (k) {
        case KnKind::Fixed: return "fixed";
        case KnKind::Default: return "default";
        case KnKind::LargestT2: return "largest_t2";
        case KnKind::Power: return "power";
    }
    return "?";
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    require(is.gcount() == 8, ErrorKind::Io, "binary path truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}
}  // namespace

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
    return std::string(buf, res.ptr);
}

Json to_json(const ProcessSpec& spec) {
    return Json{{"d", spec.d}, {"sigma_eps", spec.sigma_eps}, {"ar", spec.ar}, {"ma", spec.ma}};
}

ProcessSpec spec_from_json(const Json& j) {
    require(j.is_object(), ErrorKind::Io, "process spec must be a JSON object");
    ProcessSpec s;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "d") s.d = value.get<double>();
            else if (key == "sigma_eps") s.sigma_eps = value.get<double>();
            else if (key == "ar") s.ar = value.get<std::vector<double>>();
            else if (key == "ma") s.ma = value.get<std::vector<double>>();
            else fail(ErrorKind::Io, "unknown process spec key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Io, std::string("bad process spec: ") + e.what());
    }
    return s;
}

Json to_json(const ExperimentConfig& c) {
    return Json{{"spec", to_json(c.spec)},
                {"n_grid", c.n_grid},
                {"k_grid", c.k_grid},
                {"kn_rule",
                 {{"kind", kn_name(c.kn_rule.kind)},
                  {"fixed", c.kn_rule.fixed},
                  {"exponent", c.kn_rule.exponent},
                  {"c", c.kn_rule.schedule.c},
                  {"delta0", c.kn_rule.schedule.delta0}}},
                {"replicates", c.replicates},
                {"master_seed", c.master_seed},
                {"q_orders", c.q_orders},
                {"k", c.k},
                {"truncation_J", c.truncation_J},
                {"normalization_scale", c.normalization_scale},
                {"weighted_fit", c.weighted_fit},
                {"tolerances",
                 {{"slope", c.slope_tolerance},
                  {"mse_final", c.mse_final_tolerance},
                  {"max_exclusion_fraction", c.max_exclusion_fraction},
                  {"ks_p", c.ks_p_threshold},
                  {"clt_variance", c.clt_variance_tolerance},
                  {"bound_terminal", c.bound_terminal_tolerance}}}};
    // threads deliberately left out: results do not depend on it
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    const std::string s = to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_path_csv(std::ostream& os, const SamplePath& path) {
    os << "# spec=" << to_json(path.spec).dump() << '\n';
    os << "# seed=" << path.seed << '\n';
    os << "# method=" << to_string(path.method) << '\n';
    os << "x\n";
    for (double v : path.values) os << format_double(v) << '\n';
}

SamplePath read_path_csv(std::istream& is) {
    SamplePath p;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            const std::string value = line.substr(eq + 1);
            try {
                if (key == "spec") p.spec = spec_from_json(Json::parse(value));
                else if (key == "seed") p.seed = std::stoull(value);
                else if (key == "method")
                    p.method = value == "cholesky" ? SampleMethod::Cholesky : SampleMethod::CirculantEmbedding;
            } catch (const Json::exception& e) {
                fail(ErrorKind::Io, std::string("bad path header: ") + e.what());
            } catch (const std::logic_error&) {
                fail(ErrorKind::Io, "bad path header line: " + line);
            }
            continue;
        }
        if (!header) {
            require(line == "x", ErrorKind::Io, "path CSV: expected header 'x', got '" + line + "'");
            header = true;
            continue;
        }
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        require(end != line.c_str() && *end == '\0', ErrorKind::Io, "path CSV: bad value '" + line + "'");
        p.values.push_back(v);
    }
    require(header, ErrorKind::Io, "path CSV: missing header");
    return p;
}

void write_path_binary(std::ostream& os, std::span<const double> values) {
    os.write(kMagic, 8);
    put_u64(os, values.size());
    for (double v : values) put_u64(os, std::bit_cast<std::uint64_t>(v));
}

std::vector<double> read_path_binary(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    require(is.gcount() == 8 && std::memcmp(magic, kMagic, 8) == 0, ErrorKind::Io, "binary path: bad magic");
    const std::uint64_t n = get_u64(is);
    require(n < (std::uint64_t{1} << 40), ErrorKind::Io, "binary path: implausible length");
    std::vector<double> out(n);
    for (auto& v : out) v = std::bit_cast<double>(get_u64(is));
    return out;
}

SamplePath read_path_file(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    require(in.good(), ErrorKind::Io, "cannot open '" + file + "'");
    char magic[8] = {};
    in.read(magic, 8);
    const bool binary = in.gcount() == 8 && std::memcmp(magic, kMagic, 8) == 0;
    in.clear();
    in.seekg(0);
    if (binary) {
        SamplePath p;
        p.values = read_path_binary(in);
        return p;
    }
    return read_path_csv(in);
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_double(m(i, j));
        os << '\n';
    }
}

void write_coeffs_csv(std::ostream& os, const PredictorCoeffs& c) {
    os << "j,a_jk\n";
    for (std::size_t j = 0; j < c.a.size(); ++j) os << j + 1 << ',' << format_double(c.a[j]) << '\n';
}

Json to_json(const PredictorCoeffs& c) {
    Json j{{"order", c.order},
           {"a", c.a},
           {"source",
            {{"kind", c.source.kind == CoeffSourceKind::Theoretical ? "theoretical" : "estimated"},
             {"n", c.source.n},
             {"K_n", c.source.K_n}}}};
    if (c.source.seed) j["source"]["seed"] = *c.source.seed;
    if (c.v) j["v"] = *c.v;
    if (!c.innovation_variances.empty()) j["innovation_variances"] = c.innovation_variances;
    if (!c.reflection.empty()) j["reflection"] = c.reflection;
    return j;
}

Json to_json(const ExperimentReport& r) {
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, r.config_hash);
    Json j{{"schema", "lmpred-report/1"},
           {"experiment", r.experiment},
           {"provenance", {{"config", to_json(r.config)}, {"config_hash", hash}}},
           {"attempted", r.attempted},
           {"excluded", r.excluded},
           {"warnings", r.warnings},
           {"passed", r.passed()}};
    auto& cells = j["cells"] = Json::array();
    for (const auto& c : r.cells)
        cells.push_back({{"statistic", c.statistic},
                         {"n", c.n},
                         {"k", c.k},
                         {"K_n", c.K_n},
                         {"value", c.value},
                         {"stderr", c.std_error}});
    auto& fits = j["fits"] = Json::array();
    for (const auto& f : r.fits)
        fits.push_back({{"name", f.name},
                        {"model", f.model},
                        {"slope", f.slope},
                        {"slope_se", f.slope_se},
                        {"intercept", f.intercept},
                        {"rss", f.rss},
                        {"aic", f.aic},
                        {"points", f.points},
                        {"expected_slope", f.expected_slope}});
    auto& verdicts = j["verdicts"] = Json::array();
    for (const auto& v : r.verdicts)
        verdicts.push_back({{"name", v.name},
                            {"passed", v.passed},
                            {"measured", v.measured},
                            {"tolerance", v.tolerance},
                            {"detail", v.detail}});
    if (!r.qq.empty()) {
        auto& qq = j["qq"] = Json::array();
        for (const auto& q : r.qq) qq.push_back({q.p, q.theoretical, q.empirical});
    }
    return j;
}

void write_report_csv(std::ostream& os, const ExperimentReport& r) {
    os << "experiment,d,n,k,K_n,statistic,value,stderr\n";
    for (const auto& c : r.cells)
        os << r.experiment << ',' << format_double(r.config.spec.d) << ',' << c.n << ',' << c.k << ',' << c.K_n
           << ',' << c.statistic << ',' << format_double(c.value) << ',' << format_double(c.std_error) << '\n';
}

void write_qq_csv(std::ostream& os, const ExperimentReport& r) {
    os << "p,theoretical,empirical\n";
    for (const auto& q : r.qq)
        os << format_double(q.p) << ',' << format_double(q.theoretical) << ',' << format_double(q.empirical) << '\n';
}

}  // namespace lmpred
