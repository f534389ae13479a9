#include "bbmh/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "bbmh/errors.hpp"
#include "bbmh/fourier.hpp"
#include "bbmh/imex.hpp"
#include "bbmh/relaxation.hpp"
#include "bbmh/sbp_ops.hpp"
#include "bbmh/waves.hpp"

namespace bbmh {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double l2_error(std::span<const double> a, std::span<const double> b, const OperatorSet& ops) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double e = a[j] - b[j];
        s += ops.mass_diag[j] * e * e;
    }
    return std::sqrt(s);
}

std::size_t step_count(double t_end, double dt) {
    const double steps = t_end / dt;
    const auto n = static_cast<std::size_t>(std::llround(steps));
    if (std::abs(steps - static_cast<double>(n)) > 1e-9 * std::max(1.0, steps)) {
        throw ConfigError("t_end must be an integer multiple of dt");
    }
    return n;
}

const CirculantOperator& w_operator(const OperatorSet& ops, WOperator w_op) {
    return w_op == WOperator::central ? ops.d_central : ops.d_minus;
}

/// v of the limit scheme at the end of the last step:
///   -sum_j alpha_sj (D eta(j) - D eta^n) / dt
/// with alpha the inverse of the implicit array (type I) or of its trailing
/// block over stages 2..s (type II).
std::vector<double> limit_v(const ImexStepper& stepper, const State& eta_n,
                            const std::vector<State>& stages, const CirculantOperator& d, double dt) {
    const auto& tab = stepper.tableau();
    const auto s = static_cast<Eigen::Index>(tab.stages());
    const Eigen::Index first = stepper.classification().kind == TableauKind::type_I ? 0 : 1;
    const Eigen::MatrixXd block = tab.a_impl.bottomRightCorner(s - first, s - first);
    const Eigen::MatrixXd alpha = block.inverse();
    const auto d_eta_n = d.apply(eta_n.u());
    std::vector<double> v(eta_n.n(), 0.0);
    for (Eigen::Index j = first; j < s; ++j) {
        const double a = alpha(s - first - 1, j - first);
        if (a == 0.0) continue;
        const auto d_eta_j = d.apply(stages[static_cast<std::size_t>(j)].u());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= a * (d_eta_j[k] - d_eta_n[k]) / dt;
    }
    return v;
}

ApTableRow run_ap_cell(const ApTableConfig& cfg, const OperatorSet& ops, const ImexStepper& stepper,
                       const State& limit_final, const std::vector<double>& v_ref,
                       const std::vector<double>& w_ref, const std::vector<double>& eta0,
                       double eps_sq) {
    ApTableRow row;
    row.eps_sq = eps_sq;
    try {
        const SplittingParams sp{0.0, 0.0, 1.0, std::sqrt(eps_sq)};
        const BbmhProblem problem(ops, sp);
        State q = well_prepared_init(eta0, ops, cfg.v_init, cfg.domain.c, cfg.w_op);
        const std::size_t steps = step_count(cfg.t_end, cfg.dt);
        for (std::size_t k = 0; k < steps; ++k) {
            q = stepper.step(problem, q, cfg.dt);
            if (!q.all_finite()) throw DivergenceError("non-finite state at step " + std::to_string(k + 1));
        }
        row.err_u = l2_error(q.u(), limit_final.u(), ops);
        row.err_v = l2_error(q.v(), v_ref, ops);
        row.err_w = l2_error(q.w(), w_ref, ops);
    } catch (const std::exception& e) {
        row.failed = true;
        row.failure = e.what();
        row.err_u = row.err_v = row.err_w = kNaN;
    }
    return row;
}

template <class Job>
void run_pool(std::size_t count, unsigned workers, Job&& job) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < workers; ++t) {
        threads.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) job(i);
        });
    }
    for (auto& th : threads) th.join();
}

OperatorSet make_ops(const DomainConfig& d) {
    return build_upwind_operators(GridSpec::make(d.x_min, d.x_max, d.n), d.order);
}

double max_relative_drift(const RunRecord& rec) {
    const double i0 = rec.invariants.front().energy;
    double m = 0.0;
    for (const auto& iv : rec.invariants) m = std::max(m, std::abs(iv.energy - i0) / std::abs(i0));
    return m;
}

/// Values of a periodic profile on `fop`'s grid translated by `shift` and
/// sampled at the nodes of `target`.
std::vector<double> translated(const FourierOperator& fop, std::span<const double> values, double shift,
                               const GridSpec& target) {
    const GridSpec& src = fop.grid();
    if (src.x_min == target.x_min && src.x_max == target.x_max && src.n % target.n == 0) {
        const std::complex<double> i(0.0, 1.0);
        const auto moved = fop.apply_symbol(values, [&](double k) { return std::exp(-i * k * shift); });
        const std::size_t stride = src.n / target.n;
        std::vector<double> out(target.n);
        for (std::size_t j = 0; j < target.n; ++j) out[j] = moved[j * stride];
        return out;
    }
    auto x = target.nodes();
    for (double& xj : x) xj -= shift;
    return fop.interpolate(values, x);
}

}  // namespace

void compute_eoc(std::vector<ApTableRow>& rows) {
    const ApTableRow* prev = nullptr;
    for (auto& row : rows) {
        row.eoc_u.reset();
        row.eoc_v.reset();
        row.eoc_w.reset();
        if (row.failed) continue;
        if (prev != nullptr) {
            const double denom = std::log(prev->eps_sq / row.eps_sq);
            row.eoc_u = std::log(prev->err_u / row.err_u) / denom;
            row.eoc_v = std::log(prev->err_v / row.err_v) / denom;
            row.eoc_w = std::log(prev->err_w / row.err_w) / denom;
        }
        prev = &row;
    }
}

std::vector<ApTableRow> run_ap_table(const ApTableConfig& cfg) {
    for (double e : cfg.eps_sq) {
        if (!(e > 0.0)) throw ConfigError("eps^2 values must be positive");
    }
    const OperatorSet ops = make_ops(cfg.domain);
    const ImexStepper stepper(load_tableau(cfg.tableau));
    const auto eta0 = bbm_soliton({cfg.domain.c, ops.grid}, ops.grid.nodes(), 0.0);

    // Limit scheme, shared by every cell.
    const BbmProblem bbm(ops);
    State eta = State::bbm(eta0);
    const std::size_t steps = step_count(cfg.t_end, cfg.dt);
    std::vector<State> stages;
    State eta_prev = eta;
    for (std::size_t k = 0; k < steps; ++k) {
        eta_prev = eta;
        eta = stepper.step(bbm, eta, cfg.dt, k + 1 == steps ? &stages : nullptr);
    }
    const auto& d = w_operator(ops, cfg.w_op);
    const auto w_ref = d.apply(eta.u());
    const auto v_ref = steps > 0 ? limit_v(stepper, eta_prev, stages, d, cfg.dt)
                                 : [&] {
                                       const auto v0 = well_prepared_init(eta0, ops, cfg.v_init, cfg.domain.c, cfg.w_op);
                                       return std::vector<double>(v0.v().begin(), v0.v().end());
                                   }();

    auto eps_sq = cfg.eps_sq;
    std::sort(eps_sq.begin(), eps_sq.end(), std::greater<>());
    std::vector<ApTableRow> rows(eps_sq.size());
    run_pool(eps_sq.size(), cfg.workers, [&](std::size_t i) {
        rows[i] = run_ap_cell(cfg, ops, stepper, eta, v_ref, w_ref, eta0, eps_sq[i]);
    });
    compute_eoc(rows);
    return rows;
}

double fit_slope(const std::vector<double>& times, const std::vector<double>& errors, double window_start) {
    if (times.size() != errors.size()) throw UsageError("fit_slope: series lengths differ");
    const auto first = static_cast<std::size_t>(std::floor(window_start * static_cast<double>(times.size())));
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (std::size_t i = first; i < times.size(); ++i) {
        if (!(times[i] > 0.0) || !(errors[i] > 0.0)) continue;
        const double x = std::log(times[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) throw UsageError("fit_slope: fewer than two usable samples in the window");
    const double md = static_cast<double>(m);
    return (md * sxy - sx * sy) / (md * sxx - sx * sx);
}

ErrorGrowthResult run_error_growth(const ErrorGrowthConfig& cfg) {
    const OperatorSet ops = make_ops(cfg.domain);
    const ImexStepper stepper(load_tableau(cfg.tableau));
    const double c = cfg.domain.c;
    const SplittingParams sp{0.0, 0.0, 1.0, cfg.eps};
    const BbmhProblem problem(ops, sp);
    EvolveOptions opt;
    opt.t_end = cfg.t_end;
    opt.dt = cfg.dt;
    opt.relaxation = cfg.relaxation;

    ErrorGrowthResult res;
    if (cfg.mode == GrowthMode::petviashvili) {
        const GridSpec ref_grid = GridSpec::make(cfg.domain.x_min, cfg.domain.x_max, cfg.reference_n);
        const FourierOperator fop(ref_grid);
        PetviashviliOptions popt;
        popt.tol = cfg.petviashvili_tol;
        const auto pet = petviashvili_solve(c, cfg.eps, fop, petviashvili_initial_guess(c, ref_grid), popt);
        const auto& prof = pet.profile;
        const State q0 = State::bbmh(translated(fop, prof.u, 0.0, ops.grid),
                                     translated(fop, prof.v, 0.0, ops.grid),
                                     translated(fop, prof.w, 0.0, ops.grid));
        opt.observer = [&](std::size_t step, double t, const State& q) {
            if (step == 0) return;
            const auto ru = translated(fop, prof.u, c * t, ops.grid);
            const auto rv = translated(fop, prof.v, c * t, ops.grid);
            const auto rw = translated(fop, prof.w, c * t, ops.grid);
            const double e = std::hypot(l2_error(q.u(), ru, ops), l2_error(q.v(), rv, ops),
                                        l2_error(q.w(), rw, ops));
            res.bbmh.times.push_back(t);
            res.bbmh.errors.push_back(e);
        };
        const auto rec = evolve(problem, stepper, q0, QuadraticInvariant::bbmh(ops, cfg.eps), opt);
        res.invariant_drift = max_relative_drift(rec);
        res.bbmh.fitted_slope = fit_slope(res.bbmh.times, res.bbmh.errors, cfg.window_start);
        return res;
    }

    const SolitonParams sol{c, ops.grid};
    const auto x = ops.grid.nodes();
    const auto eta0 = bbm_soliton(sol, x, 0.0);
    auto u_observer = [&](GrowthSeries& series) {
        return [&](std::size_t step, double t, const State& q) {
            if (step == 0) return;
            series.times.push_back(t);
            series.errors.push_back(l2_error(q.u(), bbm_soliton(sol, x, t), ops));
        };
    };
    const State q0 = well_prepared_init(eta0, ops, VInit::consistent, c, WOperator::minus);
    opt.observer = u_observer(res.bbmh);
    const auto rec = evolve(problem, stepper, q0, QuadraticInvariant::bbmh(ops, cfg.eps), opt);
    res.invariant_drift = max_relative_drift(rec);
    res.bbmh.fitted_slope = fit_slope(res.bbmh.times, res.bbmh.errors, cfg.window_start);
    if (cfg.with_bbm) {
        res.bbm.emplace();
        const BbmProblem bbm(ops);
        opt.observer = u_observer(*res.bbm);
        const auto rec_bbm = evolve(bbm, stepper, State::bbm(eta0), QuadraticInvariant::bbm(ops), opt);
        res.bbm_invariant_drift = max_relative_drift(rec_bbm);
        res.bbm->fitted_slope = fit_slope(res.bbm->times, res.bbm->errors, cfg.window_start);
    }
    return res;
}

KeyValueConfig parse_key_value_config(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        cfg[key] = value;
    }
    return cfg;
}

KeyValueConfig read_key_value_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_key_value_config(buf.str());
}

namespace {

double get_double(const KeyValueConfig& cfg, const std::string& key, double fallback) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a number: " + it->second);
    }
}

std::string get_string(const KeyValueConfig& cfg, const std::string& key, const std::string& fallback) {
    const auto it = cfg.find(key);
    return it == cfg.end() ? fallback : it->second;
}

template <class T>
T get_choice(const KeyValueConfig& cfg, const std::string& key, std::initializer_list<std::pair<const char*, T>> choices,
             T fallback) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    for (const auto& [name, value] : choices) {
        if (it->second == name) return value;
    }
    throw ConfigError("config key '" + key + "' has unsupported value '" + it->second + "'");
}

}  // namespace

SolveSummary run_solve(ModelKind model, const KeyValueConfig& cfg) {
    static const std::vector<std::string> known = {"n",      "order",   "x_min",  "x_max",      "c",
                                                   "dt",     "t_end",   "eps",    "tableau",    "relaxation",
                                                   "v_init", "w_op",    "delta1", "delta2",     "delta3",
                                                   "out"};
    for (const auto& [key, value] : cfg) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    DomainConfig d;
    d.n = static_cast<std::size_t>(get_double(cfg, "n", 256));
    d.order = static_cast<int>(get_double(cfg, "order", 4));
    d.x_min = get_double(cfg, "x_min", -90.0);
    d.x_max = get_double(cfg, "x_max", 90.0);
    d.c = get_double(cfg, "c", 1.2);
    const double dt = get_double(cfg, "dt", 0.5);
    const double t_end = get_double(cfg, "t_end", 10.0);
    const bool relaxation = get_choice<bool>(cfg, "relaxation", {{"on", true}, {"off", false}}, false);
    const std::string tableau = get_string(cfg, "tableau", "ARS443");

    const OperatorSet ops = make_ops(d);
    const ImexStepper stepper(load_tableau(tableau));
    const SolitonParams sol{d.c, ops.grid};
    const auto x = ops.grid.nodes();
    const auto eta0 = bbm_soliton(sol, x, 0.0);

    EvolveOptions opt;
    opt.dt = dt;
    opt.t_end = t_end;
    opt.relaxation = relaxation;

    RunRecord rec;
    if (model == ModelKind::bbmh) {
        SplittingParams sp;
        sp.eps = get_double(cfg, "eps", 1e-3);
        sp.delta1 = get_double(cfg, "delta1", 0.0);
        sp.delta2 = get_double(cfg, "delta2", 0.0);
        sp.delta3 = get_double(cfg, "delta3", 1.0);
        const auto v_init = get_choice<VInit>(cfg, "v_init", {{"consistent", VInit::consistent}, {"zero", VInit::zero}},
                                              VInit::consistent);
        const auto w_op = get_choice<WOperator>(cfg, "w_op", {{"central", WOperator::central}, {"minus", WOperator::minus}},
                                                WOperator::minus);
        const BbmhProblem problem(ops, sp);
        rec = evolve(problem, stepper, well_prepared_init(eta0, ops, v_init, d.c, w_op),
                     QuadraticInvariant::bbmh(ops, sp.eps), opt);
    } else {
        const BbmProblem problem(ops);
        rec = evolve(problem, stepper, State::bbm(eta0), QuadraticInvariant::bbm(ops), opt);
    }

    SolveSummary sum;
    sum.steps = rec.steps();
    sum.final_time = rec.times.back();
    sum.energy_drift = max_relative_drift(rec);
    const double m0 = rec.invariants.front().linear_u;
    for (const auto& iv : rec.invariants) sum.mass_drift = std::max(sum.mass_drift, std::abs(iv.linear_u - m0) / std::abs(m0));
    sum.error_u = l2_error(rec.final_state.u(), bbm_soliton(sol, x, sum.final_time), ops);

    if (const auto out = get_string(cfg, "out", ""); !out.empty()) {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot open " + out + " for writing");
        const auto& q = rec.final_state;
        f << (q.components() == 3 ? "x,u,v,w\n" : "x,u\n");
        char buf[160];
        for (std::size_t j = 0; j < q.n(); ++j) {
            if (q.components() == 3) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x[j], q.u()[j], q.v()[j], q.w()[j]);
            } else {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x[j], q.u()[j]);
            }
            f << buf;
        }
        if (!f) throw std::runtime_error("write to " + out + " failed");
    }
    return sum;
}

}  // namespace bbmh
