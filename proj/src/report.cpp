#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "bbmh/errors.hpp"
#include "bbmh/experiments.hpp"

namespace bbmh {

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

nlohmann::json opt_json(const std::optional<double>& x) {
    return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

nlohmann::json num_json(double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); }

double json_num(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::optional<double> json_opt(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

bool is_json(const std::filesystem::path& path) { return path.extension() == ".json"; }

}  // namespace

std::string ap_table_csv(const std::vector<ApTableRow>& rows) {
    std::ostringstream out;
    out << "eps_sq,err_u,eoc_u,err_v,eoc_v,err_w,eoc_w\n";
    for (const auto& r : rows) {
        out << num(r.eps_sq) << ',' << num(r.err_u) << ',' << opt_num(r.eoc_u) << ',' << num(r.err_v) << ','
            << opt_num(r.eoc_v) << ',' << num(r.err_w) << ',' << opt_num(r.eoc_w) << '\n';
    }
    return out.str();
}

void write_ap_table_csv(const std::vector<ApTableRow>& rows, const std::filesystem::path& path) {
    write_text(path, ap_table_csv(rows));
}

void write_ap_table_json(const std::vector<ApTableRow>& rows, const std::filesystem::path& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j;
        j["eps_sq"] = r.eps_sq;
        j["err_u"] = num_json(r.err_u);
        j["err_v"] = num_json(r.err_v);
        j["err_w"] = num_json(r.err_w);
        j["eoc_u"] = opt_json(r.eoc_u);
        j["eoc_v"] = opt_json(r.eoc_v);
        j["eoc_w"] = opt_json(r.eoc_w);
        j["failed"] = r.failed;
        if (r.failed) j["failure"] = r.failure;
        arr.push_back(std::move(j));
    }
    write_text(path, nlohmann::json{{"rows", arr}}.dump(2) + "\n");
}

std::vector<ApTableRow> read_ap_table_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    std::vector<ApTableRow> rows;
    for (const auto& j : doc.at("rows")) {
        ApTableRow r;
        r.eps_sq = j.at("eps_sq").get<double>();
        r.err_u = json_num(j.at("err_u"));
        r.err_v = json_num(j.at("err_v"));
        r.err_w = json_num(j.at("err_w"));
        r.eoc_u = json_opt(j.at("eoc_u"));
        r.eoc_v = json_opt(j.at("eoc_v"));
        r.eoc_w = json_opt(j.at("eoc_w"));
        r.failed = j.at("failed").get<bool>();
        if (j.contains("failure")) r.failure = j["failure"].get<std::string>();
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_growth_csv(const ErrorGrowthResult& res, const std::filesystem::path& path) {
    std::ostringstream out;
    const bool bbm = res.bbm.has_value();
    out << (bbm ? "t,error_bbmh,t_bbm,error_bbm\n" : "t,error\n");
    const std::size_t rows = std::max(res.bbmh.times.size(), bbm ? res.bbm->times.size() : 0);
    for (std::size_t i = 0; i < rows; ++i) {
        auto cell = [&](const std::vector<double>& v) { return i < v.size() ? num(v[i]) : std::string(); };
        out << cell(res.bbmh.times) << ',' << cell(res.bbmh.errors);
        if (bbm) out << ',' << cell(res.bbm->times) << ',' << cell(res.bbm->errors);
        out << '\n';
    }
    write_text(path, out.str());
}

void write_growth_json(const ErrorGrowthResult& res, const std::filesystem::path& path) {
    auto series = [](const GrowthSeries& s) {
        return nlohmann::json{{"times", s.times}, {"errors", s.errors}, {"fitted_slope", s.fitted_slope}};
    };
    nlohmann::json doc{{"bbmh", series(res.bbmh)}, {"invariant_drift", res.invariant_drift}};
    if (res.bbm) {
        doc["bbm"] = series(*res.bbm);
        doc["bbm_invariant_drift"] = res.bbm_invariant_drift;
    }
    write_text(path, doc.dump(2) + "\n");
}

void emit(const std::vector<ApTableRow>& rows, const std::filesystem::path& path) {
    if (is_json(path)) {
        write_ap_table_json(rows, path);
    } else {
        write_ap_table_csv(rows, path);
    }
}

void emit(const ErrorGrowthResult& res, const std::filesystem::path& path) {
    if (is_json(path)) {
        write_growth_json(res, path);
    } else {
        write_growth_csv(res, path);
    }
}

}  // namespace bbmh
