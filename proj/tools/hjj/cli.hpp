// SPDX-License-Identifier: MIT
/**
    \file
    \brief hjj command line: validate | solve | verify | sweep

    Exit codes: 0 pass, 1 checked failure, 2 usage, file or parse error.
*/

#pragma once

#include <hjj/hypotheses.hpp>
#include <hjj/problem_file.hpp>
#include <hjj/solver.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace hjj::cli {

inline constexpr int schema_version = 1;
inline constexpr int exit_pass = 0;
inline constexpr int exit_fail = 1;
inline constexpr int exit_usage = 2;

/// Thrown for bad flags or values that CLI11 cannot catch by itself.
class UsageError : public Error {
public:
    using Error::Error;
};

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string short_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string point_text(const std::vector<double>& x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + short_num(x[i]);
    return s + ")";
}

inline std::vector<double> as_vector(const Point& p) { return {p.data(), p.data() + p.size()}; }

inline std::string header(const std::string& cmd, const ProblemSpec& spec) {
    return "# hjj " + cmd + " schema_version=" + std::to_string(schema_version) +
           " lhs_seed=" + std::to_string(spec.numerics().grid.lhs_seed) + "\n";
}

inline json envelope(const std::string& cmd, const ProblemSpec& spec) {
    return json{{"schema_version", schema_version},
                {"command", cmd},
                {"problem", spec.name()},
                {"regime", std::string(to_string(spec.regime()))},
                {"lhs_seed", spec.numerics().grid.lhs_seed}};
}

inline json witness_json(const Witness& w) {
    json j = json::object();
    if (w.u) j["u"] = *w.u;
    if (!w.x.empty()) j["x"] = w.x;
    if (w.j) j["j"] = *w.j;
    return j;
}

inline std::string witness_text(const Witness& w) {
    std::string s;
    if (w.u) s += "u=" + short_num(*w.u);
    if (!w.x.empty()) s += std::string(s.empty() ? "" : " ") + "x=" + point_text(w.x);
    if (w.j) s += std::string(s.empty() ? "" : " ") + "j=" + std::to_string(*w.j);
    return s.empty() ? "-" : s;
}

inline json constants_json(const Constants& c) {
    return json{{"C1", c.C1},       {"C2", c.C2},       {"K0", c.K0},     {"K1", c.K1},
                {"d", c.d},         {"beta", c.beta},   {"rho", c.rho},   {"delta", c.delta},
                {"gamma_L", c.gamma_L}, {"ball_radius", c.ball_radius},
                {"u_points", c.u_points}, {"x_samples", c.x_samples}};
}

inline json report_json(const HypothesisReport& rep) {
    json conds = json::array();
    for (const auto& e : rep.entries) {
        conds.push_back(json{{"id", e.id},
                             {"description", e.description},
                             {"passed", e.passed},
                             {"value", e.value},
                             {"bound", e.bound},
                             {"margin", e.margin},
                             {"witness", witness_json(e.witness)}});
    }
    json j{{"passed", rep.passed()}, {"constants", constants_json(rep.constants)}, {"conditions", conds}};
    if (const auto* t = rep.tightest()) j["tightest"] = t->id;
    return j;
}

inline void print_report_table(std::ostream& out, const HypothesisReport& rep) {
    const Constants& c = rep.constants;
    out << "constants C1=" << short_num(c.C1) << " C2=" << short_num(c.C2) << " K0=" << short_num(c.K0)
        << " K1=" << short_num(c.K1) << " d=" << short_num(c.d) << " beta=" << short_num(c.beta)
        << " rho=" << short_num(c.rho) << " delta=" << short_num(c.delta) << " gamma_L=" << short_num(c.gamma_L)
        << "\n";
    char line[512];
    std::snprintf(line, sizeof line, "%-22s %-6s %13s %13s %13s  %s\n", "condition", "status", "value", "bound",
                  "margin", "witness");
    out << line;
    for (const auto& e : rep.entries) {
        std::snprintf(line, sizeof line, "%-22s %-6s %13s %13s %13s  %s\n", e.id.c_str(), e.passed ? "PASS" : "FAIL",
                      short_num(e.value).c_str(), short_num(e.bound).c_str(), short_num(e.margin).c_str(),
                      witness_text(e.witness).c_str());
        out << line;
    }
    out << "result " << (rep.passed() ? "PASS" : "FAIL") << "\n";
}

// ---------------------------------------------------------------- validate

inline int cmd_validate(const ProblemSpec& spec, const std::string& format, std::ostream& out) {
    const auto rep = validate_hypotheses(spec);
    if (format == "json") {
        json j = envelope("validate", spec);
        j.update(report_json(rep));
        out << j.dump(2) << "\n";
    } else {
        out << header("validate", spec);
        out << "problem " << spec.name() << " regime " << to_string(spec.regime()) << "\n";
        print_report_table(out, rep);
    }
    return rep.passed() ? exit_pass : exit_fail;
}

// ---------------------------------------------------------------- solve

inline Point parse_point(const std::string& text, std::size_t n) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("--x: '" + text + "' is not a comma-separated list of numbers");
        }
    }
    if (v.size() != n) throw UsageError("--x: expected " + std::to_string(n) + " coordinates, got '" + text + "'");
    return Eigen::Map<const Point>(v.data(), static_cast<Eigen::Index>(n));
}

struct SolveOptions {
    std::vector<double> times;
    std::vector<std::string> points;
    std::size_t grid = 0;
    std::string format = "csv";
};

inline int cmd_solve(const ProblemSpec& spec, const SolveOptions& opt, std::ostream& out) {
    if (spec.x_dependent()) throw UsageError("solve is unavailable for regime lemma1-general (x-dependent L, h)");
    if (opt.times.empty()) throw UsageError("solve needs --t");
    std::vector<Point> xs;
    for (const auto& p : opt.points) xs.push_back(parse_point(p, spec.n()));
    if (opt.grid > 0) {
        if (opt.grid < 2) throw UsageError("--grid needs at least 2 points per axis");
        for (auto& p : ball_grid(spec.x_star(), spec.gamma(), opt.grid, spec.numerics().grid.lhs_samples,
                                 spec.numerics().grid.lhs_seed))
            xs.push_back(std::move(p));
    }
    if (xs.empty()) throw UsageError("solve needs --x or --grid");
    std::stable_sort(xs.begin(), xs.end(), [](const Point& a, const Point& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    auto ts = opt.times;
    std::stable_sort(ts.begin(), ts.end());

    struct Row {
        double t = 0.0;
        Point x;
        std::optional<SolutionSample> sample;
        std::string error;
    };
    std::vector<Row> rows(ts.size() * xs.size());
    parallel_for(rows.size(), [&](std::size_t i) {
        Row& r = rows[i];
        r.t = ts[i / xs.size()];
        r.x = xs[i % xs.size()];
        try {
            r.sample = u_at(spec, r.t, r.x);
        } catch (const Error& e) {
            r.error = e.what();
        }
    });

    bool ok = true;
    const std::size_t n = spec.n();
    if (opt.format == "json") {
        json j = envelope("solve", spec);
        json arr = json::array();
        for (const auto& r : rows) {
            json row{{"t", r.t}, {"x", as_vector(r.x)}};
            if (r.sample) {
                row["u"] = r.sample->u;
                row["p"] = as_vector(r.sample->p);
                row["j"] = r.sample->j;
                row["iterations"] = r.sample->iterations;
                row["residual"] = r.sample->residual;
            } else {
                row["error"] = r.error;
                ok = false;
            }
            arr.push_back(row);
        }
        j["rows"] = arr;
        j["passed"] = ok;
        out << j.dump(2) << "\n";
    } else {
        out << header("solve", spec);
        out << "t";
        for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
        out << ",u";
        for (std::size_t i = 1; i <= n; ++i) out << ",p" << i;
        out << ",j,iterations,residual,error\n";
        for (const auto& r : rows) {
            out << num(r.t);
            for (std::size_t i = 0; i < n; ++i) out << "," << num(r.x[static_cast<Eigen::Index>(i)]);
            if (r.sample) {
                out << "," << num(r.sample->u);
                for (std::size_t i = 0; i < n; ++i) out << "," << num(r.sample->p[static_cast<Eigen::Index>(i)]);
                out << "," << r.sample->j << "," << r.sample->iterations << "," << num(r.sample->residual) << ",\n";
            } else {
                ok = false;
                out << ",";
                for (std::size_t i = 0; i < n; ++i) out << ",";
                std::string msg = r.error;
                std::replace(msg.begin(), msg.end(), ',', ';');
                out << ",,,," << msg << "\n";
            }
        }
    }
    return ok ? exit_pass : exit_fail;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
    std::size_t intervals = 10;
    std::size_t grid = 0;             // 0: 21 per axis for n = 1, 9 otherwise
    std::size_t residual_points = 20;
    std::size_t round_trips = 100;
    bool force = false;
    std::string format = "table";
};

inline constexpr double residual_tol = 1e-4;
inline constexpr double jump_tol = 1e-6;
inline constexpr double round_trip_tol = 1e-7;

struct VerifyResult {
    HypothesisReport validation;
    std::optional<DecayReport> decay;
    std::optional<LemmaReport> lemma;
    double max_residual = 0.0;
    double residual_t = 0.0;
    Point residual_x;
    std::string residual_error;
    std::size_t residual_points = 0;
    double max_jump = 0.0;
    std::size_t jump_j = 0;
    Point jump_x;
    std::string jump_error;
    std::optional<RoundTripReport> trips;
    std::string trips_error;
    bool passed = false;
    std::string worst;  // first failing check, with witness
};

inline std::size_t default_grid(const ProblemSpec& spec) { return spec.n() == 1 ? 21 : 9; }

inline VerifyResult run_verify(const ProblemSpec& spec, const VerifyOptions& opt) {
    VerifyResult r;
    r.validation = validate_hypotheses(spec);
    if (!r.validation.passed() && !opt.force) {
        r.worst = "validation: " + r.validation.tightest()->id;
        return r;
    }
    const auto& sched = spec.schedule();
    const std::size_t J = opt.intervals;
    if (J == 0) throw UsageError("--intervals must be >= 1");
    if (J + 1 > sched.size() || 0.5 * (sched.time(J - 1) + sched.time(J)) > sched.horizon())
        throw UsageError("--intervals exceeds the schedule horizon");
    const std::size_t per_axis = opt.grid ? opt.grid : default_grid(spec);
    if (per_axis < 2) throw UsageError("--grid needs at least 2 points per axis");
    const GridConfig& gc = spec.numerics().grid;
    const auto xs = ball_grid(spec.x_star(), spec.gamma(), per_axis, gc.lhs_samples, gc.lhs_seed);
    const double t_end = std::min(sched.time(J), sched.horizon());

    if (spec.x_dependent()) {
        r.lemma = check_lemma_suite(spec, xs, t_end);
        r.passed = r.lemma->passed;
        if (!r.passed) r.worst = "lemma suite";
        return r;
    }

    r.decay = verify_decay(spec, xs, J, DecayOptions{11, std::nullopt});

    // PDE residual at random interior points of the first J intervals.
    {
        std::mt19937_64 rng(gc.lhs_seed);
        std::uniform_int_distribution<std::size_t> pick(0, J - 1);
        std::uniform_real_distribution<double> frac(0.1, 0.9);
        const auto pts = random_ball_points(spec.x_star(), 0.9 * spec.gamma(), opt.residual_points, rng);
        std::vector<double> ts(opt.residual_points);
        for (auto& t : ts) {
            const std::size_t j = pick(rng);
            t = sched.time(j) + frac(rng) * (sched.time(j + 1) - sched.time(j));
        }
        std::vector<double> res(opt.residual_points);
        std::vector<std::string> errs(opt.residual_points);
        parallel_for(opt.residual_points, [&](std::size_t k) {
            try {
                res[k] = std::abs(hj_residual(spec, ts[k], pts[k]));
            } catch (const Error& e) {
                errs[k] = e.what();
            }
        });
        r.residual_points = opt.residual_points;
        for (std::size_t k = 0; k < opt.residual_points; ++k) {
            if (!errs[k].empty() && r.residual_error.empty()) r.residual_error = errs[k];
            if (res[k] >= r.max_residual || r.residual_x.size() == 0) {
                r.max_residual = std::max(r.max_residual, res[k]);
                r.residual_t = ts[k];
                r.residual_x = pts[k];
            }
        }
    }

    // Jump condition at t_1 .. t_J.
    for (std::size_t j = 1; j <= J && sched.time(j) <= sched.horizon(); ++j) {
        try {
            const auto jc = check_jump_condition(spec, j, xs);
            if (jc.max_violation >= r.max_jump || r.jump_x.size() == 0) {
                r.max_jump = std::max(r.max_jump, jc.max_violation);
                r.jump_j = j;
                r.jump_x = jc.witness;
            }
        } catch (const Error& e) {
            if (r.jump_error.empty()) r.jump_error = e.what();
        }
    }

    if (opt.round_trips > 0) {
        try {
            r.trips = check_round_trips(spec, opt.round_trips, t_end, gc.lhs_seed);
        } catch (const Error& e) {
            r.trips_error = e.what();
        }
    }

    const double rho = r.validation.constants.rho;
    auto fail = [&](const std::string& what) {
        if (r.worst.empty()) r.worst = what;
    };
    if (const auto* iv = r.decay->first_failure()) {
        fail("decay at j=" + std::to_string(iv->j) +
             (iv->error.empty() ? " x=" + point_text(as_vector(iv->witness)) : ": " + iv->error));
    }
    if (!r.residual_error.empty()) {
        fail("residual: " + r.residual_error);
    } else if (!(r.max_residual <= residual_tol)) {
        fail("residual at t=" + short_num(r.residual_t) + " x=" + point_text(as_vector(r.residual_x)));
    }
    if (!r.jump_error.empty()) {
        fail("jump condition: " + r.jump_error);
    } else if (!(r.max_jump <= jump_tol)) {
        fail("jump condition at j=" + std::to_string(r.jump_j) + " x=" + point_text(as_vector(r.jump_x)));
    }
    if (opt.round_trips > 0) {
        if (!r.trips) {
            fail("round trips: " + r.trips_error);
        } else {
            if (!(r.trips->max_lambda_error <= round_trip_tol && r.trips->max_x_error <= round_trip_tol))
                fail("round trips");
            if (!(r.trips->max_modulus <= rho + 1e-6 && r.trips->max_step_ratio <= rho + 0.05))
                fail("contraction modulus");
        }
    }
    // Under --force the checks above are the news; validation is reported last.
    if (!r.validation.passed()) fail("validation: " + r.validation.tightest()->id);
    r.passed = r.worst.empty();
    return r;
}

inline json verify_json(const ProblemSpec& spec, const VerifyResult& r) {
    json j = envelope("verify", spec);
    j["validation"] = report_json(r.validation);
    if (r.decay) {
        json ivs = json::array();
        for (const auto& iv : r.decay->intervals) {
            json e{{"j", iv.j},
                   {"t", iv.t},
                   {"sup_u", iv.sup_u},
                   {"bound_u", iv.bound_u},
                   {"sup_grad", iv.sup_grad},
                   {"bound_grad", iv.bound_grad},
                   {"passed", iv.passed}};
            if (iv.witness.size()) e["witness"] = as_vector(iv.witness);
            if (!iv.error.empty()) e["error"] = iv.error;
            ivs.push_back(e);
        }
        j["decay"] = json{{"passed", r.decay->passed},
                          {"L", r.decay->L},
                          {"K1", r.decay->K1},
                          {"rho", r.decay->rho},
                          {"beta", r.decay->beta},
                          {"intervals", ivs}};
        json res{{"points", r.residual_points}, {"max", r.max_residual}, {"tolerance", residual_tol}};
        if (r.residual_x.size()) res["witness"] = json{{"t", r.residual_t}, {"x", as_vector(r.residual_x)}};
        if (!r.residual_error.empty()) res["error"] = r.residual_error;
        j["residual"] = res;
        json jc{{"max", r.max_jump}, {"tolerance", jump_tol}};
        if (r.jump_x.size()) jc["witness"] = json{{"j", r.jump_j}, {"x", as_vector(r.jump_x)}};
        if (!r.jump_error.empty()) jc["error"] = r.jump_error;
        j["jump_condition"] = jc;
        if (r.trips) {
            j["round_trips"] = json{{"samples", r.trips->samples},
                                    {"max_lambda_error", r.trips->max_lambda_error},
                                    {"max_x_error", r.trips->max_x_error},
                                    {"tolerance", round_trip_tol},
                                    {"max_modulus", r.trips->max_modulus},
                                    {"max_step_ratio", r.trips->max_step_ratio}};
        } else if (!r.trips_error.empty()) {
            j["round_trips"] = json{{"error", r.trips_error}};
        }
    }
    if (r.lemma) {
        j["lemma_suite"] = json{{"paths", r.lemma->paths},
                                {"jump_growth", r.lemma->jump_growth},
                                {"interval_growth", r.lemma->interval_growth},
                                {"initial_excess", r.lemma->initial_excess},
                                {"passed", r.lemma->passed}};
    }
    j["passed"] = r.passed;
    if (!r.worst.empty()) j["worst"] = r.worst;
    return j;
}

inline void print_verify_table(std::ostream& out, const ProblemSpec& spec, const VerifyResult& r) {
    out << header("verify", spec);
    out << "problem " << spec.name() << " regime " << to_string(spec.regime()) << "\n";
    out << "validation " << (r.validation.passed() ? "PASS" : "FAIL");
    if (const auto* t = r.validation.tightest()) out << " tightest=" << t->id << " margin=" << short_num(t->margin);
    out << "\n";
    const std::size_t n = spec.n();
    char line[512];
    if (r.decay) {
        out << "decay";
        for (std::size_t i = 0; i < n; ++i) out << " L" << i + 1 << "=" << short_num(r.decay->L[i]);
        out << " K1=" << short_num(r.decay->K1) << " rho=" << short_num(r.decay->rho) << "\n";
        std::snprintf(line, sizeof line, "%4s %10s %13s %13s %13s %13s  %s\n", "j", "t", "sup|u-u*|", "bound",
                      "max sup|du|", "grad bound", "status");
        out << line;
        for (const auto& iv : r.decay->intervals) {
            // tightest gradient component
            std::size_t w = 0;
            for (std::size_t i = 1; i < n; ++i)
                if (iv.sup_grad[i] / iv.bound_grad[i] > iv.sup_grad[w] / iv.bound_grad[w]) w = i;
            std::snprintf(line, sizeof line, "%4zu %10s %13s %13s %13s %13s  %s\n", iv.j, short_num(iv.t).c_str(),
                          short_num(iv.sup_u).c_str(), short_num(iv.bound_u).c_str(),
                          short_num(iv.sup_grad[w]).c_str(), short_num(iv.bound_grad[w]).c_str(),
                          iv.passed ? "PASS" : ("FAIL" + (iv.error.empty() ? "" : " " + iv.error)).c_str());
            out << line;
        }
        out << "residual max=" << short_num(r.max_residual) << " points=" << r.residual_points
            << " tol=" << short_num(residual_tol) << "\n";
        out << "jump_condition max=" << short_num(r.max_jump) << " tol=" << short_num(jump_tol) << "\n";
        if (r.trips) {
            out << "round_trips lambda=" << short_num(r.trips->max_lambda_error)
                << " x=" << short_num(r.trips->max_x_error) << " samples=" << r.trips->samples
                << " tol=" << short_num(round_trip_tol) << "\n";
            out << "contraction modulus=" << short_num(r.trips->max_modulus)
                << " step_ratio=" << short_num(r.trips->max_step_ratio)
                << " rho=" << short_num(r.validation.constants.rho) << "\n";
        }
    }
    if (r.lemma) {
        out << "lemma_suite paths=" << r.lemma->paths << " jump_growth=" << short_num(r.lemma->jump_growth)
            << " interval_growth=" << short_num(r.lemma->interval_growth)
            << " initial_excess=" << short_num(r.lemma->initial_excess) << "\n";
    }
    out << "result " << (r.passed ? "PASS" : "FAIL");
    if (!r.worst.empty()) out << " worst: " << r.worst;
    out << "\n";
}

inline int cmd_verify(const ProblemSpec& spec, const VerifyOptions& opt, std::ostream& out) {
    const auto r = run_verify(spec, opt);
    if (opt.format == "json") {
        out << verify_json(spec, r).dump(2) << "\n";
    } else {
        print_verify_table(out, spec, r);
    }
    return r.passed ? exit_pass : exit_fail;
}

// ---------------------------------------------------------------- sweep

/// Sets the numeric field at a dotted path. Array elements use numeric components
/// ("equilibrium.x_star.0"). Two schedule paths are special: "schedule.deltas"
/// sets every jump magnitude entry and "schedule.deltas_scale" multiplies them.
inline void set_param(json& doc, const std::string& path, double value) {
    if (path == "schedule.deltas" || path == "schedule.deltas_scale") {
        const bool scale = path == "schedule.deltas_scale";
        auto& deltas = doc["schedule"]["deltas"];
        for (auto& dy : deltas)
            for (auto& v : dy) v = scale ? v.get<double>() * value : value;
        return;
    }
    static const char* optional_numerics[] = {"numerics.step", "numerics.tol", "numerics.commute_tol",
                                              "numerics.zero_tol"};
    json* node = &doc;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw UsageError("--param: empty path");
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const bool last = i + 1 == parts.size();
        const std::string& key = parts[i];
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                std::size_t used = 0;
                idx = std::stoul(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                throw UsageError("--param: '" + path + "' does not address a numeric field");
            }
            if (idx >= node->size()) throw UsageError("--param: '" + path + "' index out of range");
            node = &(*node)[idx];
        } else if (node->is_object() && node->contains(key)) {
            node = &(*node)[key];
        } else if (node->is_object() && last &&
                   std::find(std::begin(optional_numerics), std::end(optional_numerics), path) !=
                       std::end(optional_numerics)) {
            node = &(*node)[key];
            *node = 0.0;
        } else if (node->is_object() && !last && path.rfind("numerics.", 0) == 0 && i == 0) {
            node = &(*node)[key];
            *node = json::object();
        } else {
            throw UsageError("--param: '" + path + "' does not address a numeric field");
        }
    }
    if (!node->is_number()) throw UsageError("--param: '" + path + "' does not address a numeric field");
    if (node->is_number_integer() || node->is_number_unsigned()) {
        if (value != std::floor(value) || value < 0)
            throw UsageError("--param: '" + path + "' needs a nonnegative integer");
        *node = static_cast<std::uint64_t>(value);
    } else {
        *node = value;
    }
}

struct SweepOptions {
    std::string param;
    std::vector<double> values;
    std::size_t intervals = 4;
    std::size_t grid = 0;  // 0: 11 per axis for n = 1, 5 otherwise
};

inline int cmd_sweep(const json& doc, const SweepOptions& opt, std::ostream& out) {
    if (opt.values.empty()) throw UsageError("sweep needs --values");
    // Fail on a bad path before any work is done.
    {
        json probe = doc;
        set_param(probe, opt.param, opt.values.front());
    }
    const ProblemSpec base(definition_from_json(doc));
    out << header("sweep", base);
    out << "value,valid,verified,passed,tightest,margin,detail\n";
    bool all = true;
    for (const double v : opt.values) {
        json d = doc;
        set_param(d, opt.param, v);
        std::string valid = "no", verified = "no", tightest, margin, detail;
        bool passed = false;
        try {
            const ProblemSpec spec(definition_from_json(d));
            const auto rep = validate_hypotheses(spec);
            if (const auto* t = rep.tightest()) {
                tightest = t->id;
                margin = num(t->margin);
            }
            if (rep.passed()) {
                valid = "yes";
                VerifyOptions vo;
                vo.intervals = opt.intervals;
                vo.grid = opt.grid ? opt.grid : (spec.n() == 1 ? 11 : 5);
                vo.residual_points = 0;
                vo.round_trips = 0;
                vo.force = false;
                const auto r = run_verify(spec, vo);
                verified = r.passed ? "yes" : "no";
                passed = r.passed;
                if (!r.passed) detail = r.worst;
            } else {
                detail = "validation";
            }
        } catch (const UsageError&) {
            throw;
        } catch (const Error& e) {
            detail = e.what();
        }
        std::replace(detail.begin(), detail.end(), ',', ';');
        all = all && passed;
        out << num(v) << "," << valid << "," << verified << "," << (passed ? "PASS" : "FAIL") << "," << tightest
            << "," << margin << "," << detail << "\n";
    }
    return all ? exit_pass : exit_fail;
}

// ---------------------------------------------------------------- entry point

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hamilton-Jacobi equations with jumps: validation, solution and verification"};
    app.name("hjj");
    app.require_subcommand(1);

    std::string file;
    std::string format;

    auto* validate = app.add_subcommand("validate", "check the regime hypotheses and print the derived constants");
    validate->add_option("file", file, "problem file (JSON)")->required();
    validate->add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));

    SolveOptions so;
    auto* solve = app.add_subcommand("solve", "evaluate u and its gradient");
    solve->add_option("file", file, "problem file (JSON)")->required();
    solve->add_option("--t", so.times, "times (comma separated)")->delimiter(',')->required();
    solve->add_option("--x", so.points, "point as comma-separated coordinates; repeatable");
    solve->add_option("--grid", so.grid, "points per axis of a grid on B(x*, gamma)");
    solve->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    VerifyOptions vo;
    auto* verify = app.add_subcommand("verify", "decay bounds, PDE residual, jump condition and round trips");
    verify->add_option("file", file, "problem file (JSON)")->required();
    verify->add_option("--intervals", vo.intervals, "number of intervals J");
    verify->add_option("--grid", vo.grid, "points per axis (default 21 for n = 1, 9 otherwise)");
    verify->add_option("--residual-points", vo.residual_points, "random interior points for the PDE residual");
    verify->add_option("--round-trips", vo.round_trips, "random pairs per inversion identity");
    verify->add_flag("--force", vo.force, "run even when validation fails");
    verify->add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));

    SweepOptions wo;
    auto* sweep = app.add_subcommand("sweep", "re-validate and re-verify over values of one parameter");
    sweep->add_option("file", file, "problem file (JSON)")->required();
    sweep->add_option("--param", wo.param, "dotted path, or schedule.deltas / schedule.deltas_scale")->required();
    sweep->add_option("--values", wo.values, "values (comma separated)")->delimiter(',')->required();
    sweep->add_option("--intervals", wo.intervals, "intervals verified per value");
    sweep->add_option("--grid", wo.grid, "points per axis (default 11 for n = 1, 5 otherwise)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_pass : exit_usage;
    }

    try {
        if (*sweep) return cmd_sweep(read_json_file(file), wo, out);
        const ProblemSpec spec = load_problem(file);
        if (*validate) return cmd_validate(spec, format.empty() ? "table" : format, out);
        if (*solve) {
            so.format = format.empty() ? "csv" : format;
            return cmd_solve(spec, so, out);
        }
        vo.format = format.empty() ? "table" : format;
        return cmd_verify(spec, vo, out);
    } catch (const ParseError& e) {
        err << "hjj: parse error: " << e.what() << "\n";
        return exit_usage;
    } catch (const SpecError& e) {
        err << "hjj: " << e.what() << "\n";
        return exit_usage;
    } catch (const UsageError& e) {
        err << "hjj: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        err << "hjj: " << e.what() << "\n";
        return exit_fail;
    }
}

}  // namespace hjj::cli
