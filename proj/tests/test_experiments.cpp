#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "bbmh/errors.hpp"
#include "bbmh/experiments.hpp"

using namespace bbmh;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_fields(const std::string& line) {
    return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

ApTableConfig small_ap(const std::string& tableau) {
    ApTableConfig cfg;
    cfg.tableau = tableau;
    cfg.domain = {-40.0, 40.0, 64, 4, 1.2};
    cfg.dt = 0.05;
    cfg.t_end = 1.0;
    cfg.eps_sq = {1e-4, 1e-2, 1e-6};
    cfg.workers = 1;
    return cfg;
}

}  // namespace

TEST_CASE("EOC is the rate with respect to eps^2") {
    std::vector<ApTableRow> rows(2);
    rows[0].eps_sq = 1e-2;
    rows[0].err_u = 3.82e-3;
    rows[0].err_v = rows[0].err_w = 1.0;
    rows[1].eps_sq = 1e-4;
    rows[1].err_u = 4.19e-5;
    rows[1].err_v = rows[1].err_w = 1.0;
    compute_eoc(rows);
    CHECK_FALSE(rows[0].eoc_u.has_value());
    REQUIRE(rows[1].eoc_u.has_value());
    CHECK(*rows[1].eoc_u == doctest::Approx(0.98).epsilon(0.005));
    CHECK(*rows[1].eoc_v == 0.0);

    // Failed rows are skipped; the next row refers to the last good one.
    std::vector<ApTableRow> gap(3);
    const double eps_sq[] = {1e-2, 1e-4, 1e-6};
    for (int i = 0; i < 3; ++i) {
        gap[i].eps_sq = eps_sq[i];
        gap[i].err_u = gap[i].err_v = gap[i].err_w = eps_sq[i];
    }
    gap[1].failed = true;
    compute_eoc(gap);
    CHECK_FALSE(gap[1].eoc_u.has_value());
    CHECK(*gap[2].eoc_u == doctest::Approx(1.0));
}

TEST_CASE("least-squares slope") {
    std::vector<double> t, e;
    for (int i = 1; i <= 40; ++i) {
        t.push_back(i);
        e.push_back(3.0 * std::pow(i, 1.5));
    }
    CHECK(fit_slope(t, e) == doctest::Approx(1.5));
    CHECK(fit_slope(t, e, 0.0) == doctest::Approx(1.5));
    e[30] = 0.0;  // skipped
    CHECK(fit_slope(t, e) == doctest::Approx(1.5));
    CHECK_THROWS_AS(fit_slope(t, std::vector<double>(3, 1.0)), UsageError);
}

TEST_CASE("AP table CSV and JSON output") {
    SUBCASE("header only for an empty table") {
        const auto csv = ap_table_csv({});
        CHECK(csv == "eps_sq,err_u,eoc_u,err_v,eoc_v,err_w,eoc_w\n");
    }
    SUBCASE("one row gives one line with seven fields") {
        ApTableRow r;
        r.eps_sq = 1e-2;
        r.err_u = 0.1;
        r.err_v = 0.2;
        r.err_w = 0.3;
        const auto csv = ap_table_csv({r});
        std::istringstream in(csv);
        std::string header, line, extra;
        std::getline(in, header);
        std::getline(in, line);
        CHECK_FALSE(std::getline(in, extra));
        CHECK(count_fields(line) == 7);
        CHECK(line == "0.01,0.10000000000000001,,0.20000000000000001,,0.29999999999999999,");
    }
    SUBCASE("failed rows print nan") {
        ApTableRow r;
        r.eps_sq = 1e-4;
        r.failed = true;
        r.err_u = r.err_v = r.err_w = std::numeric_limits<double>::quiet_NaN();
        const auto csv = ap_table_csv({r});
        CHECK(csv.find("0.0001,nan,,nan,,nan,") != std::string::npos);
    }
    SUBCASE("JSON round-trip is bitwise") {
        std::vector<ApTableRow> rows(3);
        for (int i = 0; i < 3; ++i) {
            rows[i].eps_sq = std::pow(10.0, -2.0 * (i + 1));
            rows[i].err_u = 1.0 / 3.0 * std::pow(0.01, i);
            rows[i].err_v = std::sqrt(2.0) * 1e-3;
            rows[i].err_w = std::exp(-10.0 * i);
        }
        rows[2].failed = true;
        rows[2].failure = "blew up";
        rows[2].err_v = std::numeric_limits<double>::quiet_NaN();
        compute_eoc(rows);
        const auto path = std::filesystem::temp_directory_path() / "bbmh_rows.json";
        write_ap_table_json(rows, path);
        const auto back = read_ap_table_json(path);
        REQUIRE(back.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(back[i].eps_sq == rows[i].eps_sq);
            CHECK(back[i].err_u == rows[i].err_u);
            CHECK(back[i].err_w == rows[i].err_w);
            CHECK(back[i].eoc_u == rows[i].eoc_u);
            CHECK(back[i].eoc_w == rows[i].eoc_w);
            CHECK(back[i].failed == rows[i].failed);
        }
        CHECK(std::isnan(back[2].err_v));
        CHECK(back[2].failure == "blew up");
        std::filesystem::remove(path);
    }
}

TEST_CASE("AP driver on a small grid") {
    const auto rows = run_ap_table(small_ap("ARS443"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].eps_sq == 1e-2);
    CHECK(rows[2].eps_sq == 1e-6);
    for (const auto& r : rows) CHECK_FALSE(r.failed);
    CHECK(rows[1].err_u < rows[0].err_u);
    CHECK(rows[2].err_u < rows[1].err_u);
    CHECK(rows[2].err_w < rows[1].err_w);
    CHECK(*rows[2].eoc_u == doctest::Approx(1.0).epsilon(0.25));

    auto bad = small_ap("ARS443");
    bad.t_end = 1.01;
    CHECK_THROWS_AS(run_ap_table(bad), ConfigError);
    bad = small_ap("ARS443");
    bad.eps_sq = {1e-2, 0.0};
    CHECK_THROWS_AS(run_ap_table(bad), ConfigError);
}

TEST_CASE("AP driver output is deterministic across worker counts") {
    auto cfg = small_ap("BPR343");
    const auto a = ap_table_csv(run_ap_table(cfg));
    cfg.workers = 4;
    const auto b = ap_table_csv(run_ap_table(cfg));
    CHECK(a == b);

    const auto dir = std::filesystem::temp_directory_path();
    const auto rows = run_ap_table(cfg);
    emit(rows, dir / "bbmh_det1.csv");
    emit(rows, dir / "bbmh_det2.csv");
    CHECK(slurp(dir / "bbmh_det1.csv") == slurp(dir / "bbmh_det2.csv"));
    CHECK(slurp(dir / "bbmh_det1.csv") == a);
    emit(rows, dir / "bbmh_det.json");
    CHECK(read_ap_table_json(dir / "bbmh_det.json").size() == 3);
    for (const char* f : {"bbmh_det1.csv", "bbmh_det2.csv", "bbmh_det.json"}) std::filesystem::remove(dir / f);
}

TEST_CASE("v initialization does not matter for small eps") {
    auto cfg = small_ap("ARS443");
    cfg.eps_sq = {1e-6, 1e-8};
    const auto consistent = run_ap_table(cfg);
    cfg.v_init = VInit::zero;
    const auto zero = run_ap_table(cfg);
    for (std::size_t i = 0; i < consistent.size(); ++i) {
        CHECK(zero[i].err_u == doctest::Approx(consistent[i].err_u).epsilon(0.01));
        CHECK(zero[i].err_w == doctest::Approx(consistent[i].err_w).epsilon(0.01));
    }
}

TEST_CASE("analytic error growth on a short horizon") {
    ErrorGrowthConfig cfg;
    cfg.mode = GrowthMode::analytic;
    cfg.eps = 1e-10;
    cfg.domain = {-40.0, 40.0, 128, 4, 1.2};
    cfg.dt = 0.25;
    cfg.t_end = 20.0;
    const auto res = run_error_growth(cfg);
    REQUIRE(res.bbm.has_value());
    REQUIRE(res.bbmh.times.size() == res.bbm->times.size());
    for (std::size_t i = 1; i < res.bbmh.times.size(); ++i) {
        CHECK(res.bbmh.times[i] > res.bbmh.times[i - 1]);
        CHECK(res.bbmh.errors[i] == doctest::Approx(res.bbm->errors[i]).epsilon(0.1));
    }
    CHECK(res.invariant_drift <= 1e-12);
    CHECK(res.bbm_invariant_drift <= 1e-12);

    const auto path = std::filesystem::temp_directory_path() / "bbmh_growth.csv";
    emit(res, path);
    const auto text = slurp(path);
    CHECK(text.rfind("t,error_bbmh,t_bbm,error_bbm\n", 0) == 0);
    std::filesystem::remove(path);
}

TEST_CASE("key=value configuration") {
    const auto cfg = parse_key_value_config("# run\n n = 64\n\ndt=0.1 # step\nmodel_note = x=y\n");
    CHECK(cfg.at("n") == "64");
    CHECK(cfg.at("dt") == "0.1");
    CHECK(cfg.at("model_note") == "x=y");
    CHECK_THROWS_AS(parse_key_value_config("novalue\n"), ConfigError);
    CHECK_THROWS_AS(parse_key_value_config("=3\n"), ConfigError);
    CHECK_THROWS_AS(read_key_value_config("/nonexistent/bbmh.cfg"), ConfigError);

    CHECK_THROWS_AS(run_solve(ModelKind::bbmh, {{"bogus", "1"}}), ConfigError);
    CHECK_THROWS_AS(run_solve(ModelKind::bbmh, {{"dt", "fast"}}), ConfigError);
    CHECK_THROWS_AS(run_solve(ModelKind::bbmh, {{"relaxation", "maybe"}}), ConfigError);
    CHECK_THROWS_AS(run_solve(ModelKind::bbmh, {{"delta2", "0.5"}}), ConfigError);
}

TEST_CASE("single runs from a configuration") {
    KeyValueConfig cfg = {{"n", "128"}, {"x_min", "-40"}, {"x_max", "40"}, {"dt", "0.25"},
                          {"t_end", "5"}, {"eps", "1e-2"}, {"relaxation", "on"}};
    const auto s = run_solve(ModelKind::bbmh, cfg);
    CHECK(s.steps == 20);
    CHECK(s.energy_drift <= 1e-12);
    CHECK(s.mass_drift <= 1e-12);
    CHECK(s.error_u < 0.05);

    cfg["relaxation"] = "off";
    const auto out = std::filesystem::temp_directory_path() / "bbmh_solve.csv";
    cfg["out"] = out.string();
    const auto b = run_solve(ModelKind::bbm, cfg);
    CHECK(b.final_time == 5.0);
    CHECK(b.error_u < 0.05);
    const auto text = slurp(out);
    CHECK(text.rfind("x,u\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 129);
    std::filesystem::remove(out);
}
