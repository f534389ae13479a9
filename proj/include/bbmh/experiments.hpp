#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bbmh/models.hpp"

namespace bbmh {

/// Setup shared by the experiment drivers: periodic grid, operator order
/// and the soliton used for initial and reference data.
struct DomainConfig {
    double x_min = -90.0;
    double x_max = 90.0;
    std::size_t n = 512;
    int order = 4;
    double c = 1.2;
};

struct ApTableConfig {
    std::string tableau = "ARS443";
    DomainConfig domain;
    double dt = 0.01;
    double t_end = 19.5;
    std::vector<double> eps_sq = {1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
    VInit v_init = VInit::consistent;
    WOperator w_op = WOperator::minus;
    /// 0 uses the hardware concurrency.
    unsigned workers = 0;
};

/// Errors are sqrt(sum_j h e_j^2) at t_end; EOC is with respect to eps^2.
struct ApTableRow {
    double eps_sq = 0.0;
    double err_u = 0.0;
    double err_v = 0.0;
    double err_w = 0.0;
    std::optional<double> eoc_u;
    std::optional<double> eoc_v;
    std::optional<double> eoc_w;
    bool failed = false;
    std::string failure;
};

/// Compares the hyperbolized solution with the limit scheme (explicit
/// submethod applied to the BBM semidiscretization) for each eps^2.
/// Rows are sorted by decreasing eps^2; blown-up cells are marked failed.
std::vector<ApTableRow> run_ap_table(const ApTableConfig& cfg);

/// Fills the EOC columns from consecutive non-failed rows.
void compute_eoc(std::vector<ApTableRow>& rows);

enum class GrowthMode { petviashvili, analytic };

struct ErrorGrowthConfig {
    GrowthMode mode = GrowthMode::petviashvili;
    double eps = 1e-3;
    std::string tableau = "ARS443";
    bool relaxation = true;
    DomainConfig domain{-90.0, 90.0, 256, 4, 1.2};
    double dt = 0.5;
    double t_end = 1071.0;
    /// Fourier grid for the Petviashvili reference.
    std::size_t reference_n = 1024;
    double petviashvili_tol = 1e-12;
    /// Fraction of the series skipped before fitting the slope.
    double window_start = 0.5;
    /// Analytic mode only: also integrate the BBM semidiscretization.
    bool with_bbm = true;
};

struct GrowthSeries {
    std::vector<double> times;
    std::vector<double> errors;
    double fitted_slope = 0.0;
};

struct ErrorGrowthResult {
    GrowthSeries bbmh;
    std::optional<GrowthSeries> bbm;
    double invariant_drift = 0.0;  // max |I(t) - I(0)| / I(0)
    double bbm_invariant_drift = 0.0;
};

ErrorGrowthResult run_error_growth(const ErrorGrowthConfig& cfg);

/// Least-squares slope of log(error) against log(time) over the samples
/// with index >= window_start * size. Non-positive samples are skipped.
double fit_slope(const std::vector<double>& times, const std::vector<double>& errors,
                 double window_start = 0.5);

// Output. CSV uses 17 significant digits; empty EOC cells and failed rows
// are written as empty fields and "nan" respectively.
void write_ap_table_csv(const std::vector<ApTableRow>& rows, const std::filesystem::path& path);
std::string ap_table_csv(const std::vector<ApTableRow>& rows);
void write_ap_table_json(const std::vector<ApTableRow>& rows, const std::filesystem::path& path);
std::vector<ApTableRow> read_ap_table_json(const std::filesystem::path& path);
void write_growth_csv(const ErrorGrowthResult& res, const std::filesystem::path& path);
void write_growth_json(const ErrorGrowthResult& res, const std::filesystem::path& path);

/// Picks the writer from the file extension (.json or anything else = CSV).
void emit(const std::vector<ApTableRow>& rows, const std::filesystem::path& path);
void emit(const ErrorGrowthResult& res, const std::filesystem::path& path);

/// Plain key=value file; '#' starts a comment, blank lines are ignored.
using KeyValueConfig = std::map<std::string, std::string>;
KeyValueConfig parse_key_value_config(const std::string& text);
KeyValueConfig read_key_value_config(const std::filesystem::path& path);

enum class ModelKind { bbm, bbmh };

struct SolveSummary {
    std::size_t steps = 0;
    double final_time = 0.0;
    double energy_drift = 0.0;
    double mass_drift = 0.0;
    double error_u = 0.0;  // against the translated soliton
};

/// Single run driven by a key=value config. Recognised keys: n, order,
/// x_min, x_max, c, dt, t_end, eps, tableau, relaxation, v_init, w_op,
/// delta1, delta2, delta3, out. Unknown keys raise ConfigError. When out is
/// set the final state is written as CSV (x,u[,v,w]).
SolveSummary run_solve(ModelKind model, const KeyValueConfig& cfg);

}  // namespace bbmh
