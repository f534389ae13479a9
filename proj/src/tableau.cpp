#include "bbmh/tableau.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bbmh/errors.hpp"

namespace bbmh {

namespace {

constexpr double kZeroTol = 1e-12;
constexpr double kRowTol = 1e-14;

double parse_entry(std::string_view tok) {
    auto parse_double = [&](std::string_view s) {
        double value = 0.0;
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ConfigError("cannot parse tableau entry '" + std::string(tok) + "'");
        }
        return value;
    };
    const auto slash = tok.find('/');
    if (slash == std::string_view::npos) return parse_double(tok);
    const double p = parse_double(tok.substr(0, slash));
    const double q = parse_double(tok.substr(slash + 1));
    if (q == 0.0) throw ConfigError("zero denominator in tableau entry '" + std::string(tok) + "'");
    return p / q;
}

std::vector<std::vector<std::string>> tokenize_lines(std::string_view text) {
    std::vector<std::vector<std::string>> lines;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(t);
        if (!toks.empty()) lines.push_back(std::move(toks));
    }
    return lines;
}

bool rows_equal(const Eigen::MatrixXd& a, Eigen::Index row, const Eigen::VectorXd& b) {
    return (a.row(row).transpose() - b).cwiseAbs().maxCoeff() <= kRowTol;
}

std::string fmt_entry(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string to_string(TableauKind kind) { return kind == TableauKind::type_I ? "type_I" : "type_II"; }

TableauClassification classify(const ImexTableau& tab) {
    const Eigen::Index s = tab.b_expl.size();
    if (s == 0 || tab.b_impl.size() != s || tab.a_expl.rows() != s || tab.a_expl.cols() != s ||
        tab.a_impl.rows() != s || tab.a_impl.cols() != s) {
        throw ConfigError("tableau '" + tab.name + "' has inconsistent array shapes");
    }
    for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index j = i; j < s; ++j) {
            if (tab.a_expl(i, j) != 0.0) {
                throw ConfigError("explicit array of '" + tab.name + "' is not strictly lower triangular");
            }
            if (j > i && tab.a_impl(i, j) != 0.0) {
                throw ConfigError("implicit array of '" + tab.name + "' is not lower triangular");
            }
        }
    }

    TableauClassification c;
    const Eigen::VectorXd diag = tab.a_impl.diagonal();
    const bool implicit_invertible = diag.cwiseAbs().minCoeff() > kZeroTol;
    const bool first_rows_zero =
        tab.a_impl.row(0).cwiseAbs().maxCoeff() == 0.0 && tab.a_expl.row(0).cwiseAbs().maxCoeff() == 0.0;
    const bool trailing_invertible =
        s > 1 && diag.tail(s - 1).cwiseAbs().minCoeff() > kZeroTol;

    if (implicit_invertible) {
        c.kind = TableauKind::type_I;
    } else if (first_rows_zero && trailing_invertible) {
        c.kind = TableauKind::type_II;
    } else {
        throw ConfigError("tableau '" + tab.name + "' is neither of type I nor of type II");
    }

    c.fsal_explicit = rows_equal(tab.a_expl, s - 1, tab.b_expl);
    c.stiffly_accurate = rows_equal(tab.a_impl, s - 1, tab.b_impl);
    c.gsa = c.fsal_explicit && c.stiffly_accurate;
    if (c.kind == TableauKind::type_II) {
        const bool alpha_zero = s == 1 || tab.a_impl.col(0).tail(s - 1).cwiseAbs().maxCoeff() == 0.0;
        c.ars = alpha_zero && tab.b_impl(0) == 0.0;
    }
    return c;
}

double OrderReport::max_residual(int up_to) const {
    double m = 0.0;
    for (const auto& cond : conditions) {
        if (cond.order <= up_to) m = std::max(m, cond.residual);
    }
    return m;
}

int OrderReport::satisfied_order(double tol) const {
    int p = 0;
    for (int order = 1; order <= 3; ++order) {
        bool any = false;
        for (const auto& cond : conditions) {
            if (cond.order != order) continue;
            any = true;
            if (cond.residual > tol) return p;
        }
        if (!any) return p;
        p = order;
    }
    return p;
}

OrderReport check_order_conditions(const ImexTableau& tab, int up_to) {
    if (up_to < 1 || up_to > 3) throw ConfigError("order conditions are available for orders 1..3");
    struct Part {
        const char* tag;
        const Eigen::MatrixXd* a;
        const Eigen::VectorXd* b;
        Eigen::VectorXd c;
    };
    const std::array<Part, 2> parts{Part{"E", &tab.a_expl, &tab.b_expl, tab.c_expl()},
                                    Part{"I", &tab.a_impl, &tab.b_impl, tab.c_impl()}};
    OrderReport report;
    auto add = [&](std::string label, int order, double value, double target) {
        report.conditions.push_back({std::move(label), order, std::abs(value - target)});
    };

    for (const auto& x : parts) add(std::string("sum b_") + x.tag + " = 1", 1, x.b->sum(), 1.0);
    if (up_to >= 2) {
        for (const auto& x : parts) {
            for (const auto& y : parts) {
                add(std::string("b_") + x.tag + "^T c_" + y.tag + " = 1/2", 2, x.b->dot(y.c), 0.5);
            }
        }
    }
    if (up_to >= 3) {
        for (const auto& x : parts) {
            for (const auto& y : parts) {
                for (const auto& z : parts) {
                    add(std::string("b_") + x.tag + "^T (c_" + y.tag + " c_" + z.tag + ") = 1/3", 3,
                        x.b->dot(y.c.cwiseProduct(z.c)), 1.0 / 3.0);
                    add(std::string("b_") + x.tag + "^T A_" + y.tag + " c_" + z.tag + " = 1/6", 3,
                        x.b->dot(*y.a * z.c), 1.0 / 6.0);
                }
            }
        }
    }
    return report;
}

ImexTableau parse_tableau(std::string_view text) {
    const auto lines = tokenize_lines(text);
    if (lines.empty()) throw ConfigError("empty tableau description");
    const auto& head = lines.front();
    if (head.size() != 4) {
        throw ConfigError("tableau header must read 'name s declared_order kind_hint'");
    }
    ImexTableau tab;
    tab.name = head[0];
    int s = 0;
    try {
        s = std::stoi(head[1]);
        tab.declared_order = std::stoi(head[2]);
    } catch (const std::exception&) {
        throw ConfigError("tableau header of '" + tab.name + "' has non-integer fields");
    }
    tab.kind_hint = head[3];
    if (s <= 0) throw ConfigError("tableau '" + tab.name + "' must have at least one stage");
    const auto rows = static_cast<std::size_t>(s);
    if (lines.size() != 1 + 2 * (rows + 1)) {
        throw ConfigError("tableau '" + tab.name + "' needs " + std::to_string(2 * (rows + 1)) +
                          " coefficient rows, found " + std::to_string(lines.size() - 1));
    }
    auto read_row = [&](std::size_t line_index) {
        const auto& toks = lines[line_index];
        if (toks.size() != rows) {
            throw ConfigError("tableau '" + tab.name + "': row " + std::to_string(line_index) +
                              " has " + std::to_string(toks.size()) + " entries, expected " +
                              std::to_string(rows));
        }
        Eigen::VectorXd r(s);
        for (std::size_t j = 0; j < rows; ++j) r(static_cast<Eigen::Index>(j)) = parse_entry(toks[j]);
        return r;
    };
    tab.a_expl.resize(s, s);
    tab.a_impl.resize(s, s);
    std::size_t li = 1;
    for (Eigen::Index i = 0; i < s; ++i) tab.a_expl.row(i) = read_row(li++).transpose();
    tab.b_expl = read_row(li++);
    for (Eigen::Index i = 0; i < s; ++i) tab.a_impl.row(i) = read_row(li++).transpose();
    tab.b_impl = read_row(li++);
    return tab;
}

std::string write_tableau(const ImexTableau& tab) {
    std::ostringstream out;
    const Eigen::Index s = tab.b_expl.size();
    out << tab.name << ' ' << s << ' ' << tab.declared_order << ' '
        << (tab.kind_hint.empty() ? std::string("-") : tab.kind_hint) << '\n';
    auto row = [&](const auto& r) {
        for (Eigen::Index j = 0; j < s; ++j) out << (j ? " " : "") << fmt_entry(r(j));
        out << '\n';
    };
    for (Eigen::Index i = 0; i < s; ++i) row(tab.a_expl.row(i));
    row(tab.b_expl);
    for (Eigen::Index i = 0; i < s; ++i) row(tab.a_impl.row(i));
    row(tab.b_impl);
    return out.str();
}

ImexTableau read_tableau_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tableau file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_tableau(buf.str());
}

std::filesystem::path default_tableau_dir() {
    if (const char* env = std::getenv("BBMH_TABLEAU_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return BBMH_DEFAULT_TABLEAU_DIR;
}

std::vector<std::string> builtin_tableau_names() { return {"AGSA342", "SPIMEX322", "ARS443", "BPR343"}; }

ImexTableau load_tableau(const std::string& name_or_path) {
    std::filesystem::path path(name_or_path);
    if (!std::filesystem::exists(path)) path = default_tableau_dir() / (name_or_path + ".txt");
    if (!std::filesystem::exists(path)) {
        throw ConfigError("unknown tableau '" + name_or_path + "' (looked in " +
                          default_tableau_dir().string() + ")");
    }
    ImexTableau tab = read_tableau_file(path);
    const auto cls = classify(tab);
    if (!tab.kind_hint.empty() && tab.kind_hint != "-" && tab.kind_hint != to_string(cls.kind)) {
        throw ConfigError("tableau '" + tab.name + "' is declared " + tab.kind_hint +
                          " but classifies as " + to_string(cls.kind));
    }
    if (tab.declared_order < 1) throw ConfigError("tableau '" + tab.name + "' declares no order");
    const int check_up_to = std::min(tab.declared_order, 3);
    const double residual = check_order_conditions(tab, check_up_to).max_residual(check_up_to);
    if (residual > 1e-12) {
        throw ConfigError("tableau '" + tab.name + "' violates its order conditions (residual " +
                          std::to_string(residual) + ")");
    }
    return tab;
}

}  // namespace bbmh
