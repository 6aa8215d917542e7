#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgeweight/asymptotics.hpp"
#include "edgeweight/carmona.hpp"
#include "edgeweight/continuum.hpp"
#include "edgeweight/errors.hpp"
#include "edgeweight/params.hpp"
#include "edgeweight/verify.hpp"
#include "edgeweight/wkb.hpp"

namespace edgeweight::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;

inline constexpr const char* kCsvHeader = "kind,x,delta,N,g,h,log_w_carmona,q_series,pass,error";

struct RunConfig {
    std::string command;
    KeyValues model;      // model / potential keys (see model_from_config, potential_from_config)
    std::vector<double> xs, deltas, energies;
    double x_min = kNaN, x_max = kNaN;
    int points = 0;
    bool log_delta = true;
    std::int64_t n = 0;
    double width = 0.0;
    std::string format = "csv";
    std::string output;
    std::uint64_t seed = VerifyOptions{}.seed;
    bool quick = false;
    bool perturb_monotonicity = false;
    unsigned threads = 0;
    int L = 20;
    bool residual = false;
};

// Grid of x values, ascending. Explicit lists win over ranges; a range is
// spaced geometrically in delta = 2 - x unless log_delta is off.
inline std::vector<double> resolve_grid(const RunConfig& cfg) {
    std::vector<double> xs = cfg.xs;
    for (double d : cfg.deltas) {
        if (!(d > 0.0 && d < 4.0)) throw ConfigError("delta values must lie in (0, 4)");
        xs.push_back(2.0 - d);
    }
    if (xs.empty() && cfg.points > 0) {
        if (!(cfg.x_min < cfg.x_max)) throw ConfigError("grid needs x_min < x_max");
        if (cfg.points == 1) {
            xs.push_back(cfg.x_min);
        } else if (cfg.log_delta) {
            if (!(cfg.x_max < 2.0)) throw ConfigError("delta-log spacing needs x_max < 2");
            const double d_hi = 2.0 - cfg.x_min, d_lo = 2.0 - cfg.x_max;
            for (int i = 0; i < cfg.points; ++i)
                xs.push_back(2.0 - d_hi * std::pow(d_lo / d_hi, static_cast<double>(i) / (cfg.points - 1)));
        } else {
            for (int i = 0; i < cfg.points; ++i)
                xs.push_back(cfg.x_min + (cfg.x_max - cfg.x_min) * i / (cfg.points - 1));
        }
    }
    if (xs.empty())
        for (double d : {0.05, 0.02, 0.01}) xs.push_back(2.0 - d);
    for (double x : xs)
        if (!(std::abs(x) < 2.0)) throw ConfigError("grid point " + std::to_string(x) + " is not inside (-2, 2)");
    std::sort(xs.begin(), xs.end());
    return xs;
}

inline ParameterModel resolve_model(const RunConfig& cfg) {
    auto model = model_from_config(cfg.model);
    if (!model.is_free()) {
        const auto rep = validate_monotone(model, 1000);
        if (!rep.ok()) {
            std::string msg = "model validation failed:";
            for (const auto& f : rep.failures) msg += " " + f + ";";
            throw ConfigError(msg);
        }
    }
    return model;
}

inline std::string format_number(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string rows_to_csv(const std::vector<EdgeProfile>& rows) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.kind << ',' << format_number(r.x) << ',' << format_number(r.delta) << ',' << format_number(r.N) << ','
           << format_number(r.g) << ',' << format_number(r.h) << ',' << format_number(r.log_w_carmona) << ','
           << format_number(r.q_series) << ',' << (r.pass < 0 ? "" : (r.pass ? "1" : "0")) << ','
           << csv_escape(r.error) << '\n';
    }
    return os.str();
}

inline Json number_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json row_json(const EdgeProfile& r) {
    Json j;
    j["kind"] = r.kind;
    j["x"] = number_json(r.x);
    j["delta"] = number_json(r.delta);
    j["N"] = number_json(r.N);
    j["g"] = number_json(r.g);
    j["h"] = number_json(r.h);
    j["log_w_carmona"] = number_json(r.log_w_carmona);
    j["q_series"] = number_json(r.q_series);
    j["pass"] = r.pass < 0 ? Json(nullptr) : Json(r.pass == 1);
    j["error"] = r.error;
    return j;
}

inline void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.output.empty() || cfg.output == "-") {
        out << text;
        return;
    }
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + cfg.output);
    f << text;
}

inline std::string rows_output(const RunConfig& cfg, const std::string& subject, const std::vector<EdgeProfile>& rows) {
    if (cfg.format == "csv") return rows_to_csv(rows);
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = cfg.command;
    j["model"] = subject;
    j["rows"] = Json::array();
    for (const auto& r : rows) j["rows"].push_back(row_json(r));
    return j.dump(2) + "\n";
}

inline void check_format(const RunConfig& cfg) {
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format must be csv or json");
}

inline int all_pass(const std::vector<EdgeProfile>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const EdgeProfile& r) { return r.pass == 1; }) ? kExitPass
                                                                                                  : kExitCheckFailure;
}

// Edge sweep over a discrete model.
inline int cmd_weight(const RunConfig& cfg, std::ostream& out) {
    check_format(cfg);
    const auto model = resolve_model(cfg);
    const auto xs = resolve_grid(cfg);
    std::vector<EdgeProfile> rows(xs.size());
    EdgeOptions opt;
    opt.n = cfg.n;
    opt.bump_width = cfg.width;
    opt.threads = 1;
    parallel_for(xs.size(), [&](std::size_t i) { rows[i] = edge_profile(model, xs[i], opt); }, cfg.threads);
    emit(cfg, rows_output(cfg, model.describe(), rows), out);
    return all_pass(rows);
}

// Continuum sweep over energies.
inline int cmd_continuum(const RunConfig& cfg, std::ostream& out) {
    check_format(cfg);
    KeyValues kv = cfg.model;
    if (!kv.count("x0")) kv["x0"] = "1";
    const auto V = potential_from_config(kv);
    std::vector<double> Es = cfg.energies;
    if (Es.empty()) Es = {0.05, 0.1, 0.2};
    for (double E : Es)
        if (!(E > 0.0)) throw ConfigError("energies must be positive");
    std::sort(Es.begin(), Es.end());
    const auto rows = continuum_edge_profile(V, Es, {}, cfg.threads);
    emit(cfg, rows_output(cfg, V.describe(), rows), out);
    return all_pass(rows);
}

inline Json check_json(const CheckResult& c) {
    Json j;
    j["check_name"] = c.name;
    j["instances"] = c.instances;
    j["max_violation"] = number_json(c.max_violation);
    j["tolerance"] = c.tolerance;
    j["status"] = c.pass ? "pass" : "fail";
    return j;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    VerifyOptions opt;
    opt.seed = cfg.seed;
    opt.quick = cfg.quick;
    opt.perturb_monotonicity = cfg.perturb_monotonicity;
    opt.threads = cfg.threads;
    const auto rep = run_verify(opt);
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "verify";
    j["seed"] = cfg.seed;
    j["quick"] = cfg.quick;
    j["perturb_monotonicity"] = cfg.perturb_monotonicity;
    j["checks"] = Json::array();
    for (const auto& c : rep.checks) j["checks"].push_back(check_json(c));
    j["status"] = rep.ok() ? "pass" : "fail";
    emit(cfg, j.dump(2) + "\n", out);
    return rep.ok() ? kExitPass : kExitCheckFailure;
}

// Exact coefficients, the c_20 comparison, series terms at the requested
// deltas and optionally the residual table against direct sums.
inline int cmd_series(const RunConfig& cfg, std::ostream& out) {
    if (cfg.L < 0) throw ConfigError("L must be >= 0");
    const auto table = arccosh_coeffs(std::max(cfg.L, 20));
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "series";
    j["L"] = cfg.L;
    j["coefficients"] = Json::array();
    for (int l = 0; l <= cfg.L; ++l) j["coefficients"].push_back(table.as_string(l));
    const auto c20 = compare_c20();
    j["c20"] = {{"computed", c20.computed},
                {"quoted", c20.quoted},
                {"match", c20.match},
                {"differing_denominator_digits", c20.differing_digits}};
    const double beta = kv_number(cfg.model, "beta", 0.5), C = kv_number(cfg.model, "C", 1.0);
    j["beta"] = beta;
    j["C"] = C;
    j["q_series"] = Json::array();
    for (double d : cfg.deltas) {
        const auto q = q_series(beta, C, d);
        Json row;
        row["delta"] = d;
        row["total"] = q.total;
        row["terms"] = Json::array();
        for (const auto& t : q.terms)
            row["terms"].push_back({{"l", t.l}, {"coefficient", t.coefficient}, {"exponent", t.exponent}, {"value", t.value}});
        row["borderline_excluded"] = q.borderline_excluded;
        row["advisory"] = q.advisory;
        j["q_series"].push_back(row);
    }
    int status = kExitPass;
    if (cfg.residual) {
        std::vector<double> grid = cfg.deltas;
        std::sort(grid.rbegin(), grid.rend());
        const auto r = g_minus_series_residual(beta, C, grid, 100'000'000, cfg.threads);
        Json t;
        t["N_cap"] = r.N_cap;
        t["delta_floor"] = r.delta_floor;
        t["max_ratio"] = r.max_ratio;
        t["bounded"] = r.bounded;
        t["note"] = r.note;
        t["rows"] = Json::array();
        for (const auto& row : r.rows)
            t["rows"].push_back({{"requested_delta", row.requested_delta},
                                 {"delta", row.delta},
                                 {"N", row.N},
                                 {"g", row.g},
                                 {"q", row.q},
                                 {"residual", row.residual},
                                 {"ratio", row.ratio},
                                 {"capped", row.capped}});
        j["residual"] = t;
        if (!r.bounded) status = kExitCheckFailure;
    }
    emit(cfg, j.dump(2) + "\n", out);
    return status;
}

inline int cmd_szego(const RunConfig& cfg, std::ostream& out) {
    const auto model = ParameterModel::power_law_b(kv_number(cfg.model, "C", 1.0), kv_number(cfg.model, "beta", 0.5));
    std::vector<double> grid = cfg.deltas;
    if (grid.empty())
        for (int k = 0; k <= 10; ++k) grid.push_back(0.1 * std::pow(10.0, -0.5 * k));
    std::sort(grid.rbegin(), grid.rend());
    const auto d = szego_diagnostic(model, grid);
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "szego-check";
    j["model"] = model.describe();
    j["delta_max"] = d.delta_max;
    j["delta_cut"] = d.delta_cut;
    auto fit = [](const IntegralFit& f, double expected) {
        return Json{{"cumulative", f.cumulative},
                    {"exponent", f.exponent},
                    {"expected_exponent", expected},
                    {"monotone", f.monotone},
                    {"classification", f.classification}};
    };
    j["szego"] = fit(d.szego, d.expected_szego);
    j["quasi_szego"] = fit(d.quasi, d.expected_quasi);
    j["classification"] = d.classification;
    emit(cfg, j.dump(2) + "\n", out);
    return kExitPass;
}

inline int dispatch(const RunConfig& cfg, std::ostream& out) {
    if (cfg.command == "weight") return cmd_weight(cfg, out);
    if (cfg.command == "verify") return cmd_verify(cfg, out);
    if (cfg.command == "series") return cmd_series(cfg, out);
    if (cfg.command == "continuum") return cmd_continuum(cfg, out);
    if (cfg.command == "szego-check") return cmd_szego(cfg, out);
    throw ConfigError("unknown command '" + cfg.command + "'");
}

// Runs a command, mapping configuration problems to exit code 2.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(cfg, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitCheckFailure;
    }
}

}  // namespace edgeweight::cli
