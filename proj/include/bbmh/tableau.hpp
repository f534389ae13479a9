#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace bbmh {

/// Paired explicit / diagonally implicit Butcher arrays of an additive
/// Runge-Kutta method. Nodes are row sums and are computed, not stored.
struct ImexTableau {
    std::string name;
    int declared_order = 0;
    std::string kind_hint;  // "type_I" or "type_II" as written in the file
    Eigen::MatrixXd a_expl;
    Eigen::VectorXd b_expl;
    Eigen::MatrixXd a_impl;
    Eigen::VectorXd b_impl;

    std::size_t stages() const { return static_cast<std::size_t>(b_expl.size()); }
    Eigen::VectorXd c_expl() const { return a_expl.rowwise().sum(); }
    Eigen::VectorXd c_impl() const { return a_impl.rowwise().sum(); }
};

enum class TableauKind { type_I, type_II };

std::string to_string(TableauKind kind);

struct TableauClassification {
    TableauKind kind = TableauKind::type_I;
    bool gsa = false;
    bool ars = false;               // only meaningful for type II
    bool fsal_explicit = false;     // last explicit row equals b_expl
    bool stiffly_accurate = false;  // last implicit row equals b_impl
};

/// Throws ConfigError for malformed arrays (wrong shapes, explicit part not
/// strictly lower triangular, implicit part not lower triangular) and for
/// tableaux that are neither type I nor type II.
TableauClassification classify(const ImexTableau& tab);

struct OrderCondition {
    std::string label;  // e.g. "b_E^T A_I c_E = 1/6"
    int order = 0;
    double residual = 0.0;
};

struct OrderReport {
    std::vector<OrderCondition> conditions;
    double max_residual(int up_to) const;
    /// Highest order p such that every condition of order <= p is below tol.
    int satisfied_order(double tol) const;
};

/// Additive Runge-Kutta order conditions, including the coupling
/// conditions between both arrays, for orders 1..up_to (up_to <= 3).
OrderReport check_order_conditions(const ImexTableau& tab, int up_to);

/// Plain-text tableau format:
///   name s declared_order kind_hint
///   s rows of explicit A, one row explicit b, s rows of implicit A, one row implicit b
/// Entries are decimals or rationals p/q; text after '#' is ignored.
ImexTableau parse_tableau(std::string_view text);
std::string write_tableau(const ImexTableau& tab);

ImexTableau read_tableau_file(const std::filesystem::path& path);

/// Directory searched for named tableaux: $BBMH_TABLEAU_DIR if set, else the
/// data directory of the source tree.
std::filesystem::path default_tableau_dir();

std::vector<std::string> builtin_tableau_names();

/// Loads a tableau by name (from default_tableau_dir()) or by file path and
/// validates it: classification must agree with the kind hint and the order
/// conditions must hold to 1e-12 up to the declared order.
ImexTableau load_tableau(const std::string& name_or_path);

}  // namespace bbmh
