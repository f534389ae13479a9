// Command-line front end for the experiment drivers.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bbmh/errors.hpp"
#include "bbmh/experiments.hpp"
#include "bbmh/fourier.hpp"
#include "bbmh/waves.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw bbmh::UsageError("cannot parse list entry '" + item + "'");
        }
    }
    return out;
}

void print_ap_rows(const std::vector<bbmh::ApTableRow>& rows) {
    std::printf("%10s %11s %6s %11s %6s %11s %6s\n", "eps^2", "err u", "eoc", "err v", "eoc", "err w", "eoc");
    auto eoc = [](const std::optional<double>& x) {
        char buf[16];
        if (x) std::snprintf(buf, sizeof buf, "%6.2f", *x); else std::snprintf(buf, sizeof buf, "%6s", "");
        return std::string(buf);
    };
    for (const auto& r : rows) {
        if (r.failed) {
            std::printf("%10.2e  failed: %s\n", r.eps_sq, r.failure.c_str());
            continue;
        }
        std::printf("%10.2e %11.3e %s %11.3e %s %11.3e %s\n", r.eps_sq, r.err_u, eoc(r.eoc_u).c_str(), r.err_v,
                    eoc(r.eoc_v).c_str(), r.err_w, eoc(r.eoc_w).c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BBM / hyperbolized BBM solver laboratory"};
    app.require_subcommand(1);

    // ap-table
    auto* ap = app.add_subcommand("ap-table", "asymptotic-preserving error table over an eps^2 ladder");
    bbmh::ApTableConfig ap_cfg;
    std::string ap_eps = "1e-2,1e-4,1e-6,1e-8,1e-10";
    std::string ap_v = "consistent", ap_w = "minus", ap_out;
    ap->add_option("--tableau", ap_cfg.tableau, "tableau name or file")->capture_default_str();
    ap->add_option("--n", ap_cfg.domain.n, "grid points")->capture_default_str();
    ap->add_option("--dt", ap_cfg.dt, "time step")->capture_default_str();
    ap->add_option("--t-end", ap_cfg.t_end, "final time")->capture_default_str();
    ap->add_option("--eps2", ap_eps, "comma separated eps^2 values")->capture_default_str();
    ap->add_option("--v-init", ap_v, "initial v")->check(CLI::IsMember({"consistent", "zero"}))->capture_default_str();
    ap->add_option("--w-op", ap_w, "operator for w = D eta")->check(CLI::IsMember({"central", "minus"}))->capture_default_str();
    ap->add_option("--order", ap_cfg.domain.order, "SBP operator order")->capture_default_str();
    ap->add_option("--workers", ap_cfg.workers, "parallel cells (0 = all cores)")->capture_default_str();
    ap->add_option("--out", ap_out, "output file (.csv or .json)");

    // error-growth
    auto* eg = app.add_subcommand("error-growth", "long-time error growth against a traveling reference");
    bbmh::ErrorGrowthConfig eg_cfg;
    std::string eg_mode = "petviashvili", eg_relax = "on", eg_out;
    eg->add_option("--mode", eg_mode, "reference")->check(CLI::IsMember({"petviashvili", "analytic"}))->capture_default_str();
    eg->add_option("--eps", eg_cfg.eps, "relaxation parameter eps")->capture_default_str();
    eg->add_option("--tableau", eg_cfg.tableau, "tableau name or file")->capture_default_str();
    eg->add_option("--relaxation", eg_relax, "relaxation in time")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    eg->add_option("--n", eg_cfg.domain.n, "grid points")->capture_default_str();
    eg->add_option("--dt", eg_cfg.dt, "time step")->capture_default_str();
    eg->add_option("--t-end", eg_cfg.t_end, "final time")->capture_default_str();
    eg->add_option("--window", eg_cfg.window_start, "fraction of samples skipped before the slope fit")->capture_default_str();
    eg->add_option("--out", eg_out, "output file (.csv or .json)");

    // petviashvili
    auto* pv = app.add_subcommand("petviashvili", "solitary wave of the hyperbolized system");
    double pv_c = 1.2, pv_eps = 1e-3, pv_tol = 1e-12, pv_shift = 1.0;
    std::size_t pv_n = 1024;
    std::string pv_out;
    pv->add_option("--c", pv_c, "wave speed")->capture_default_str();
    pv->add_option("--eps", pv_eps, "eps")->capture_default_str();
    pv->add_option("--n", pv_n, "Fourier grid size (power of two)")->capture_default_str();
    pv->add_option("--tol", pv_tol, "increment tolerance")->capture_default_str();
    pv->add_option("--shift", pv_shift, "background added to u")->capture_default_str();
    pv->add_option("--out", pv_out, "profile CSV");

    // traveling-ode
    auto* tw = app.add_subcommand("traveling-ode", "integrate the reduced traveling-wave system");
    double tw_c = 0.5, tw_eps2 = 4.0 / 3.0, tw_step = 1e-3;
    std::size_t tw_steps = 100000;
    std::string tw_start = "0.99999999,-0.0000000089", tw_out;
    tw->add_option("--c", tw_c, "wave speed")->capture_default_str();
    tw->add_option("--eps2", tw_eps2, "eps^2")->capture_default_str();
    tw->add_option("--start", tw_start, "initial point u,w")->capture_default_str();
    tw->add_option("--step", tw_step, "step in xi (negative integrates backwards)")->capture_default_str();
    tw->add_option("--steps", tw_steps, "maximum number of steps")->capture_default_str();
    tw->add_option("--out", tw_out, "orbit CSV (xi,u,w)");

    // solve
    auto* sv = app.add_subcommand("solve", "single run from a key=value config file");
    std::string sv_model = "bbmh", sv_config;
    sv->add_option("--model", sv_model, "model")->check(CLI::IsMember({"bbm", "bbmh"}))->capture_default_str();
    sv->add_option("--config", sv_config, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*ap) {
            ap_cfg.eps_sq = parse_list(ap_eps);
            ap_cfg.v_init = ap_v == "zero" ? bbmh::VInit::zero : bbmh::VInit::consistent;
            ap_cfg.w_op = ap_w == "central" ? bbmh::WOperator::central : bbmh::WOperator::minus;
            const auto rows = bbmh::run_ap_table(ap_cfg);
            print_ap_rows(rows);
            if (!ap_out.empty()) bbmh::emit(rows, ap_out);
        } else if (*eg) {
            eg_cfg.mode = eg_mode == "analytic" ? bbmh::GrowthMode::analytic : bbmh::GrowthMode::petviashvili;
            eg_cfg.relaxation = eg_relax == "on";
            const auto res = bbmh::run_error_growth(eg_cfg);
            std::printf("samples %zu  final error %.6e  fitted slope %.4f  invariant drift %.3e\n",
                        res.bbmh.errors.size(), res.bbmh.errors.empty() ? 0.0 : res.bbmh.errors.back(),
                        res.bbmh.fitted_slope, res.invariant_drift);
            if (res.bbm) {
                std::printf("bbm: final error %.6e  fitted slope %.4f  invariant drift %.3e\n",
                            res.bbm->errors.back(), res.bbm->fitted_slope, res.bbm_invariant_drift);
            }
            if (!eg_out.empty()) bbmh::emit(res, eg_out);
        } else if (*pv) {
            const auto grid = bbmh::GridSpec::make(-90.0, 90.0, pv_n);
            const bbmh::FourierOperator fop(grid);
            bbmh::PetviashviliOptions opt;
            opt.tol = pv_tol;
            opt.background_shift = pv_shift;
            const auto res = bbmh::petviashvili_solve(pv_c, pv_eps, fop, bbmh::petviashvili_initial_guess(pv_c, grid), opt);
            const auto soliton = bbmh::bbm_soliton({pv_c, grid}, grid.nodes(), 0.0);
            double dev = 0.0;
            for (std::size_t j = 0; j < grid.n; ++j) dev = std::max(dev, std::abs(res.profile.u[j] - soliton[j]));
            std::printf("iterations %d  residual %.3e  max |u - soliton| %.6e\n", res.iterations, res.residual, dev);
            if (!pv_out.empty()) bbmh::write_profile_csv(res.profile, pv_out);
        } else if (*tw) {
            const auto start = parse_list(tw_start);
            if (start.size() != 2) throw bbmh::UsageError("--start expects two values u,w");
            if (!(tw_eps2 > 0.0)) throw bbmh::UsageError("--eps2 must be positive");
            const auto orbit = bbmh::integrate_phase_plane({start[0], start[1]}, tw_c, std::sqrt(tw_eps2), tw_step, tw_steps);
            std::printf("points %zu  end (u, w) = (%.10f, %.10f)  singular %s\n", orbit.xi.size(), orbit.u.back(),
                        orbit.w.back(), orbit.singular ? "yes" : "no");
            if (!tw_out.empty()) {
                std::ofstream out(tw_out);
                if (!out) throw std::runtime_error("cannot open " + tw_out);
                out << "xi,u,w\n";
                char buf[96];
                for (std::size_t i = 0; i < orbit.xi.size(); ++i) {
                    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", orbit.xi[i], orbit.u[i], orbit.w[i]);
                    out << buf;
                }
            }
        } else if (*sv) {
            const auto model = sv_model == "bbm" ? bbmh::ModelKind::bbm : bbmh::ModelKind::bbmh;
            const auto sum = bbmh::run_solve(model, bbmh::read_key_value_config(sv_config));
            std::printf("steps %zu  t %.6f  energy drift %.3e  mass drift %.3e  error u %.6e\n", sum.steps,
                        sum.final_time, sum.energy_drift, sum.mass_drift, sum.error_u);
        }
    } catch (const bbmh::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const bbmh::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
