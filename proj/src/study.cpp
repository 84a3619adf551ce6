#include "stiga/study.hpp"

#include "stiga/error.hpp"
#include "stiga/linsolve.hpp"
#include "stiga/problems.hpp"
#include "stiga/simd/kernels.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace stiga {
namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

long parse_long(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(key, "expected an integer, got '" + text + "'");
    }
    return value;
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty() || !std::isfinite(value)) {
        throw ConfigError(key, "expected a number, got '" + text + "'");
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    throw ConfigError(key, "expected a boolean, got '" + text + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
    std::vector<int> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const long v = parse_long(key, item);
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
            throw ConfigError(key, "value out of range: " + trim(item));
        }
        values.push_back(static_cast<int>(v));
    }
    if (values.empty()) throw ConfigError(key, "empty list");
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", v);
    return buf;
}

std::string format_rate(const std::optional<double>& r) { return r ? format_double(*r) : std::string{}; }

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void dump_cell_matrices(const std::filesystem::path& dir, const std::string& stem, const DiscreteSystem& sys) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    sys.time.derivative.write_coordinate(dir / (stem + "_Wt.txt"));
    sys.time.mass.write_coordinate(dir / (stem + "_Mt.txt"));
    sys.spatial.stiffness.write_coordinate(dir / (stem + "_Ks.txt"));
    sys.spatial.mass.write_coordinate(dir / (stem + "_Ms.txt"));
    const auto load_path = dir / (stem + "_f.txt");
    std::ofstream out(load_path);
    if (!out) throw IoError("cannot write " + load_path.string());
    char buf[40];
    for (const double v : sys.load) {
        std::snprintf(buf, sizeof buf, "%.17e\n", v);
        out << buf;
    }
}

std::optional<double> RatePair::*measure_member(const std::string& m) {
    if (m == "u1") return &RatePair::u1;
    if (m == "u2") return &RatePair::u2;
    if (m == "v1") return &RatePair::v1;
    return &RatePair::v2;
}

}  // namespace

void set_config_value(StudyConfig& config, const std::string& raw_key, const std::string& value) {
    std::string key = trim(raw_key);
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "problem") {
        config.problem = trim(value);
    } else if (key == "degrees") {
        config.degrees = parse_int_list(key, value);
    } else if (key == "levels") {
        config.levels = parse_int_list(key, value);
    } else if (key == "quad_points" || key == "quadrature_points") {
        config.quad_points = static_cast<int>(parse_long(key, value));
    } else if (key == "tol") {
        config.tol = parse_double(key, value);
    } else if (key == "max_iter") {
        config.max_iter = static_cast<int>(parse_long(key, value));
    } else if (key == "out") {
        config.out = trim(value);
    } else if (key == "check_rates") {
        config.check_rates = parse_bool(key, value);
    } else if (key == "infsup") {
        config.infsup = parse_bool(key, value);
    } else if (key == "dump_matrices") {
        config.dump_matrices = trim(value);
    } else if (key == "max_dof") {
        config.max_dof = static_cast<long>(parse_double(key, value));
    } else {
        throw ConfigError(key, "unknown key");
    }
}

void validate_config(const StudyConfig& config) {
    if (config.problem != "example1" && config.problem != "example2") {
        throw ConfigError("problem", "unknown problem '" + config.problem + "'");
    }
    if (config.degrees.empty()) throw ConfigError("degrees", "no degrees given");
    for (const int p : config.degrees) {
        if (p < 1 || p > 10) throw ConfigError("degrees", "degree " + std::to_string(p) + " outside 1..10");
    }
    if (config.levels.empty()) throw ConfigError("levels", "no mesh levels given");
    for (const int n : config.levels) {
        if (n < 1) throw ConfigError("levels", "mesh level " + std::to_string(n) + " must be at least 1");
    }
    if (config.quad_points < 0 || config.quad_points > 16) {
        throw ConfigError("quad_points", "must be 0 (default) or between 1 and 16");
    }
    if (!(config.tol > 0.0) || config.tol >= 1.0) throw ConfigError("tol", "must lie in (0, 1)");
    if (config.max_iter < 0) throw ConfigError("max_iter", "must be nonnegative");
    if (config.out.empty()) throw ConfigError("out", "empty output path");
    if (config.max_dof < 1) throw ConfigError("max_dof", "must be positive");
}

StudyConfig parse_config_text(const std::string& text) {
    StudyConfig config;
    std::stringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(line, "line " + std::to_string(lineno) + " is not of the form key=value");
        }
        set_config_value(config, line.substr(0, eq), line.substr(eq + 1));
    }
    validate_config(config);
    return config;
}

StudyConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

StudyResult run_study(const StudyConfig& config, std::ostream* log) {
    validate_config(config);
    const ManufacturedProblem problem = problem_by_name(config.problem);
    StudyResult result;
    result.config = config;

    for (const int p : config.degrees) {
        const std::size_t first_row = result.rows.size();
        for (const int level : config.levels) {
            StudyRow row;
            row.problem = problem.name;
            row.p = p;
            row.level = level;
            row.h = 1.0 / level;
            const auto start = std::chrono::steady_clock::now();
            try {
                const auto space = SpaceTimeSpace::uniform(level, p, problem.geometry, problem.final_time);
                row.dof = 2L * space.dof_count();
                row.h = space.mesh_size();
                if (row.dof > config.max_dof) {
                    throw GuardError("2N = " + std::to_string(row.dof) + " exceeds max_dof = " +
                                     std::to_string(config.max_dof));
                }
                const auto sys = assemble_system(space, problem.forcing, config.quad_points);
                if (!config.dump_matrices.empty()) {
                    dump_cell_matrices(config.dump_matrices,
                                       problem.name + "_p" + std::to_string(p) + "_n" + std::to_string(level), sys);
                }
                SolveOptions options;
                options.tol = config.tol;
                options.max_iter = config.max_iter;
                auto solved = solve(make_block_system(sys), options);
                row.iterations = solved.report.iterations;
                row.residual = solved.report.relative_residual;
                const DiscreteSolution sol(space, std::move(solved.u), std::move(solved.v));
                const int eq = config.quad_points > 0 ? std::max(config.quad_points, p + 2) : 0;
                row.errors = error_norms(sol, problem, eq);
                row.seconds = seconds_since(start);
                if (config.infsup && space.dof_count() <= infsup_max_dofs) {
                    result.infsup.push_back({p, level, row.h, space.dof_count(), discrete_infsup_constant(space)});
                }
            } catch (const ConvergenceError& e) {
                row.failed = true;
                row.failure = e.what();
                row.iterations = e.iterations();
                row.residual = e.best_residual();
            } catch (const std::exception& e) {
                row.failed = true;
                row.failure = e.what();
            }
            if (row.failed) {
                row.seconds = seconds_since(start);
                const double nan = std::numeric_limits<double>::quiet_NaN();
                row.errors.e_u1 = row.errors.e_u2 = row.errors.e_v1 = row.errors.e_v2 = nan;
                if (row.iterations == 0) row.residual = nan;
            }
            row.errors.h = row.h;
            row.errors.p = p;
            row.errors.dof = row.dof;
            if (log) {
                char buf[256];
                if (row.failed) {
                    std::snprintf(buf, sizeof buf, "%s p=%d h=1/%d FAILED: ", problem.name.c_str(), p, level);
                    *log << buf << row.failure << '\n';
                } else {
                    std::snprintf(buf, sizeof buf,
                                  "%s p=%d h=1/%d dof=%ld E_u1=%.3e E_u2=%.3e E_v1=%.3e E_v2=%.3e iters=%d "
                                  "res=%.2e %.2fs",
                                  problem.name.c_str(), p, level, row.dof, row.errors.e_u1, row.errors.e_u2,
                                  row.errors.e_v1, row.errors.e_v2, row.iterations, row.residual, row.seconds);
                    *log << buf << '\n';
                }
                log->flush();
            }
            result.rows.push_back(std::move(row));
        }
        for (std::size_t i = first_row + 1; i < result.rows.size(); ++i) {
            const auto& prev = result.rows[i - 1];
            auto& cur = result.rows[i];
            if (prev.failed || cur.failed) continue;
            const ErrorReport pair[2] = {prev.errors, cur.errors};
            cur.rates = convergence_rates(pair).front();
        }
    }
    return result;
}

std::string format_results_csv(const StudyResult& result) {
    std::string out = results_header;
    out += '\n';
    for (const auto& r : result.rows) {
        out += r.problem + ',' + std::to_string(r.p) + ',' + format_double(r.h) + ',' + std::to_string(r.dof) + ',' +
               format_double(r.errors.e_u1) + ',' + format_double(r.errors.e_u2) + ',' +
               format_double(r.errors.e_v1) + ',' + format_double(r.errors.e_v2) + ',' + format_rate(r.rates.u1) +
               ',' + format_rate(r.rates.u2) + ',' + format_rate(r.rates.v1) + ',' + format_rate(r.rates.v2) + ',' +
               std::to_string(r.iterations) + ',' + format_double(r.residual) + ',' + format_double(r.seconds) +
               '\n';
    }
    return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".json");
    if (p == csv_path) p += ".json";
    return p;
}

void emit_results(const StudyResult& result, const std::filesystem::path& path) {
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write results file " + path.string());
        out << format_results_csv(result);
        if (!out) throw IoError("write failed for " + path.string());
    }

    using nlohmann::json;
    const auto& c = result.config;
    json doc;
    doc["config"] = {{"problem", c.problem},          {"degrees", c.degrees},
                     {"levels", c.levels},            {"quad_points", c.quad_points},
                     {"tol", c.tol},                  {"max_iter", c.max_iter},
                     {"out", c.out},                  {"check_rates", c.check_rates},
                     {"infsup", c.infsup},            {"dump_matrices", c.dump_matrices},
                     {"max_dof", c.max_dof}};
#if defined(__clang__)
    const std::string compiler = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
    const std::string compiler = std::string("gcc ") + __VERSION__;
#else
    const std::string compiler = "unknown";
#endif
    doc["environment"] = {{"compiler", compiler},
                          {"cxx_standard", static_cast<long>(__cplusplus)},
                          {"simd_isa", std::string(simd::isa_name(simd::active_isa()))},
                          {"threads", 1}};
    json failures = json::array();
    for (const auto& r : result.rows) {
        if (r.failed) failures.push_back({{"p", r.p}, {"level", r.level}, {"error", r.failure}});
    }
    doc["failures"] = failures;
    json infsup = json::array();
    for (const auto& e : result.infsup) {
        infsup.push_back({{"p", e.p}, {"level", e.level}, {"h", e.h}, {"N", e.dof_count}, {"constant", e.value}});
    }
    doc["infsup"] = infsup;
    if (c.check_rates) {
        json checks = json::array();
        for (const auto& rc : check_rates(result)) {
            checks.push_back({{"p", rc.p},
                              {"measure", rc.measure},
                              {"rate", rc.rate ? json(*rc.rate) : json(nullptr)},
                              {"window", {rc.window.lower, rc.window.upper}},
                              {"passed", rc.passed}});
        }
        doc["rate_checks"] = checks;
    }
    const auto side = sidecar_path(path);
    std::ofstream out(side);
    if (!out) throw IoError("cannot write sidecar " + side.string());
    out << doc.dump(2) << '\n';
}

std::vector<StudyRow> parse_results_csv(const std::string& text) {
    std::stringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != results_header) throw IoError("results CSV has an unexpected header");
    std::vector<StudyRow> rows;
    const auto num = [](const std::string& s) { return std::strtod(s.c_str(), nullptr); };
    const auto rate = [&](const std::string& s) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        return num(s);
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            f.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (f.size() != 15) throw IoError("results CSV row has " + std::to_string(f.size()) + " fields");
        StudyRow r;
        r.problem = f[0];
        r.p = std::stoi(f[1]);
        r.h = num(f[2]);
        r.dof = std::stol(f[3]);
        r.errors.e_u1 = num(f[4]);
        r.errors.e_u2 = num(f[5]);
        r.errors.e_v1 = num(f[6]);
        r.errors.e_v2 = num(f[7]);
        r.errors.h = r.h;
        r.errors.p = r.p;
        r.errors.dof = r.dof;
        r.rates = {rate(f[8]), rate(f[9]), rate(f[10]), rate(f[11])};
        r.iterations = std::stoi(f[12]);
        r.residual = num(f[13]);
        r.seconds = num(f[14]);
        r.failed = std::isnan(r.errors.e_u1);
        r.level = r.h > 0.0 ? static_cast<int>(std::lround(1.0 / r.h)) : 0;
        rows.push_back(std::move(r));
    }
    return rows;
}

RateWindow h1_rate_window(int p) { return {p - 0.25, p + 0.35}; }
RateWindow l2_rate_window(int p) { return {p + 1 - 0.3, p + 1 + 0.3}; }

std::vector<RateCheck> check_rates(const StudyResult& result) {
    std::vector<RateCheck> checks;
    for (const int p : result.config.degrees) {
        const StudyRow* finest = nullptr;
        for (const auto& r : result.rows) {
            if (r.p == p && (!finest || r.level > finest->level)) finest = &r;
        }
        for (const char* m : {"u1", "u2", "v1", "v2"}) {
            RateCheck c;
            c.p = p;
            c.measure = m;
            c.window = (m[1] == '1') ? h1_rate_window(p) : l2_rate_window(p);
            if (finest) c.rate = finest->rates.*measure_member(m);
            c.passed = c.rate && *c.rate >= c.window.lower && *c.rate <= c.window.upper;
            checks.push_back(std::move(c));
        }
    }
    return checks;
}

int study_exit_code(const StudyResult& result) {
    for (const auto& r : result.rows) {
        if (r.failed) return 1;
    }
    if (result.config.check_rates) {
        for (const auto& c : check_rates(result)) {
            if (!c.passed) return 1;
        }
    }
    return 0;
}

}  // namespace stiga
