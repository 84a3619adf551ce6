#pragma once

// Convergence-study driver: configuration, the (p, h) cell loop, observed
// rates and CSV/JSON emission.

#include "stiga/errors.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stiga {

struct StudyConfig {
    std::string problem = "example1";
    std::vector<int> degrees{1, 2, 3, 4};
    std::vector<int> levels{4, 8, 16, 32, 64};  ///< elements per direction; h = 1/level
    int quad_points = 0;                        ///< 0 keeps the per-module defaults
    double tol = 1e-10;
    int max_iter = 0;
    std::string out = "results.csv";
    bool check_rates = false;
    bool infsup = false;
    std::string dump_matrices;  ///< directory, empty for none
    long max_dof = 2000000;     ///< refuse cells with 2N above this
};

/// Apply one key=value setting.  Keys match the long CLI flags with '-'
/// replaced by '_'.  Throws ConfigError naming the key.
void set_config_value(StudyConfig& config, const std::string& key, const std::string& value);

/// Parse key=value lines ('#' starts a comment) on top of the defaults.
[[nodiscard]] StudyConfig parse_config_text(const std::string& text);
[[nodiscard]] StudyConfig parse_config(const std::filesystem::path& path);

/// Throws ConfigError if the configuration cannot run.
void validate_config(const StudyConfig& config);

struct StudyRow {
    std::string problem;
    int p = 0;
    int level = 0;
    double h = 0.0;
    long dof = 0;
    ErrorReport errors;
    RatePair rates;  ///< against the previous level of the same degree
    int iterations = 0;
    double residual = 0.0;
    double seconds = 0.0;
    bool failed = false;
    std::string failure;
};

struct InfSupEntry {
    int p = 0;
    int level = 0;
    double h = 0.0;
    int dof_count = 0;
    double value = 0.0;
};

struct StudyResult {
    StudyConfig config;
    std::vector<StudyRow> rows;  ///< ordered by degree, then level
    std::vector<InfSupEntry> infsup;
};

/// Run every (p, h) cell; a failing cell is recorded and the loop continues.
/// Progress lines go to `log` when given.
[[nodiscard]] StudyResult run_study(const StudyConfig& config, std::ostream* log = nullptr);

inline constexpr const char* results_header =
    "problem,p,h,dof,E_u1,E_u2,E_v1,E_v2,rate_u1,rate_u2,rate_v1,rate_v2,iters,residual,seconds";

/// CSV text for the rows, header included.
[[nodiscard]] std::string format_results_csv(const StudyResult& result);

/// Write the CSV to `path` and a JSON sidecar next to it (extension .json).
/// Throws IoError naming the path.
void emit_results(const StudyResult& result, const std::filesystem::path& path);

[[nodiscard]] std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Parse CSV produced by format_results_csv; failure text is not recovered.
[[nodiscard]] std::vector<StudyRow> parse_results_csv(const std::string& text);

struct RateWindow {
    double lower;
    double upper;
};

/// Accepted finest-pair rate windows for degree p.
[[nodiscard]] RateWindow h1_rate_window(int p);
[[nodiscard]] RateWindow l2_rate_window(int p);

struct RateCheck {
    int p = 0;
    std::string measure;  ///< "u1", "u2", "v1", "v2"
    std::optional<double> rate;
    RateWindow window{};
    bool passed = false;
};

/// Finest-pair rate per degree and measure against the windows.
[[nodiscard]] std::vector<RateCheck> check_rates(const StudyResult& result);

/// 0 if every cell succeeded (and every rate check passed when
/// config.check_rates), 1 otherwise.
[[nodiscard]] int study_exit_code(const StudyResult& result);

}  // namespace stiga
