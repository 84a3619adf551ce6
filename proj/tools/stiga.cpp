// Command-line front end: `stiga study ...` runs the convergence study.

#include "stiga/error.hpp"
#include "stiga/study.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>

int main(int argc, char** argv) {
    CLI::App app{"Space-time isogeometric solver for d_t u + Lap^2 u - Lap u = f"};
    app.require_subcommand(1);
    auto* study = app.add_subcommand("study", "Run a (p, h) convergence study and write CSV + JSON results");

    std::string config_path;
    std::map<std::string, std::string> given;
    std::string problem, degrees, levels, tol, max_iter, out, dump, quad, max_dof;
    bool check_rates = false;
    bool infsup = false;

    study->add_option("--config", config_path, "key=value file; flags override it")->check(CLI::ExistingFile);
    study->add_option("--problem", problem, "example1 (square) or example2 (ring)");
    study->add_option("--degrees", degrees, "comma-separated spline degrees, e.g. 1,2,3,4");
    study->add_option("--levels", levels, "comma-separated elements per direction, e.g. 4,8,16,32,64");
    study->add_option("--tol", tol, "relative block-residual tolerance");
    study->add_option("--max-iter", max_iter, "Krylov iteration cap (0 = 10 * 2N)");
    study->add_option("--out", out, "results CSV path");
    study->add_flag("--check-rates", check_rates, "fail unless finest-pair rates are in the expected windows");
    study->add_flag("--infsup", infsup, "compute discrete inf-sup constants on small meshes");
    study->add_option("--dump-matrices", dump, "directory for coordinate-format matrix dumps");
    study->add_option("--quad-points", quad, "Gauss points per span (0 = defaults)");
    study->add_option("--max-dof", max_dof, "refuse cells with more than this many unknowns");

    CLI11_PARSE(app, argc, argv);

    try {
        stiga::StudyConfig config = config_path.empty() ? stiga::StudyConfig{} : stiga::parse_config(config_path);
        const std::pair<const char*, const std::string*> flags[] = {
            {"problem", &problem}, {"degrees", &degrees},   {"levels", &levels},
            {"tol", &tol},         {"max_iter", &max_iter}, {"out", &out},
            {"dump_matrices", &dump}, {"quad_points", &quad}, {"max_dof", &max_dof}};
        for (const auto& [key, value] : flags) {
            if (!value->empty()) stiga::set_config_value(config, key, *value);
        }
        if (check_rates) config.check_rates = true;
        if (infsup) config.infsup = true;
        stiga::validate_config(config);

        const auto result = stiga::run_study(config, &std::cout);
        stiga::emit_results(result, config.out);
        std::cout << "wrote " << config.out << " and " << stiga::sidecar_path(config.out).string() << '\n';

        for (const auto& e : result.infsup) {
            std::printf("inf-sup p=%d h=1/%d N=%d: %.6e\n", e.p, e.level, e.dof_count, e.value);
        }
        if (config.check_rates) {
            for (const auto& c : stiga::check_rates(result)) {
                std::printf("rate p=%d %s: %s in [%.2f, %.2f] %s\n", c.p, c.measure.c_str(),
                            c.rate ? std::to_string(*c.rate).c_str() : "n/a", c.window.lower, c.window.upper,
                            c.passed ? "ok" : "OUT OF WINDOW");
            }
        }
        return stiga::study_exit_code(result);
    } catch (const stiga::Error& e) {
        std::cerr << "stiga: " << e.what() << '\n';
        return 2;
    }
}
