// SPDX-License-Identifier: MIT
/**
    \file
    \brief JSON problem files

    {
      "meta":        {"name": "...", "regime": "theorem1"},
      "dims":        {"n": 1, "m": 1},
      "equilibrium": {"u_star": 0, "x_star": [0], "gamma": 1},
      "functions":   {"L": "u", "alphas": ["u"], "gfields": [["x1"]], "h": ["-u"], "u0": "0.5*tanh(x1)"},
      "schedule":    {"mode": "periodic", "period": 0.5, "deltas": [[0.75]], "horizon": 10},
      "numerics":    {"step": 0.001, "tol": 1e-12, "max_iter": 200,
                      "grid": {"u_points": 1001, "x_points": 41, "lhs_samples": 100000, "lhs_seed": 1592644148},
                      "commute_tol": 1e-9, "zero_tol": 1e-10}
    }

    An explicit schedule gives "times" (starting at 0) instead of "period".
    Everything under "numerics" is optional.
*/

#pragma once

#include <hjj/problem.hpp>

#include <nlohmann/json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

namespace hjj {

using json = nlohmann::json;

namespace detail {

inline const json& member(const json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw SpecError(path + key + ": missing");
    return *it;
}

inline void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& path) {
    if (!obj.is_object()) throw SpecError((path.empty() ? std::string("document") : path) + ": expected an object");
    for (const auto& [k, v] : obj.items()) {
        bool known = false;
        for (const char* allowed : keys) known = known || k == allowed;
        if (!known) throw SpecError(path + k + ": unknown key");
    }
}

inline double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw SpecError(where + ": expected a number");
    return v.get<double>();
}

inline std::size_t count(const json& v, const std::string& where) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) throw SpecError(where + ": expected an integer");
    const auto i = v.get<long long>();
    if (i < 0) throw SpecError(where + ": expected a nonnegative integer");
    return static_cast<std::size_t>(i);
}

inline std::string text(const json& v, const std::string& where) {
    if (!v.is_string()) throw SpecError(where + ": expected a string");
    return v.get<std::string>();
}

inline std::vector<double> numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw SpecError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::vector<std::string> texts(const json& v, const std::string& where) {
    if (!v.is_array()) throw SpecError(where + ": expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(text(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace detail

inline ProblemDefinition definition_from_json(const json& doc) {
    using namespace detail;
    only_keys(doc, {"meta", "dims", "equilibrium", "functions", "schedule", "numerics"}, "");
    ProblemDefinition d;

    const json& meta = member(doc, "meta", "");
    only_keys(meta, {"name", "regime"}, "meta.");
    d.name = text(member(meta, "name", "meta."), "meta.name");
    d.regime = parse_regime(text(member(meta, "regime", "meta."), "meta.regime"));

    const json& dims = member(doc, "dims", "");
    only_keys(dims, {"n", "m"}, "dims.");
    d.n = count(member(dims, "n", "dims."), "dims.n");
    d.m = count(member(dims, "m", "dims."), "dims.m");

    const json& eq = member(doc, "equilibrium", "");
    only_keys(eq, {"u_star", "x_star", "gamma"}, "equilibrium.");
    d.u_star = number(member(eq, "u_star", "equilibrium."), "equilibrium.u_star");
    d.x_star = numbers(member(eq, "x_star", "equilibrium."), "equilibrium.x_star");
    d.gamma = number(member(eq, "gamma", "equilibrium."), "equilibrium.gamma");

    const json& fn = member(doc, "functions", "");
    only_keys(fn, {"L", "alphas", "gfields", "h", "u0"}, "functions.");
    d.L = text(member(fn, "L", "functions."), "functions.L");
    d.alphas = texts(member(fn, "alphas", "functions."), "functions.alphas");
    const json& gf = member(fn, "gfields", "functions.");
    if (!gf.is_array()) throw SpecError("functions.gfields: expected an array of arrays");
    for (std::size_t k = 0; k < gf.size(); ++k)
        d.gfields.push_back(texts(gf[k], "functions.gfields[" + std::to_string(k) + "]"));
    d.h = texts(member(fn, "h", "functions."), "functions.h");
    d.u0 = text(member(fn, "u0", "functions."), "functions.u0");

    const json& sc = member(doc, "schedule", "");
    only_keys(sc, {"mode", "times", "period", "deltas", "horizon"}, "schedule.");
    const std::string mode = text(member(sc, "mode", "schedule."), "schedule.mode");
    if (mode == "periodic") {
        d.schedule.mode = ScheduleDefinition::Mode::Periodic;
        d.schedule.period = number(member(sc, "period", "schedule."), "schedule.period");
    } else if (mode == "explicit") {
        d.schedule.mode = ScheduleDefinition::Mode::Explicit;
        d.schedule.times = numbers(member(sc, "times", "schedule."), "schedule.times");
    } else {
        throw SpecError("schedule.mode: expected \"periodic\" or \"explicit\"");
    }
    const json& deltas = member(sc, "deltas", "schedule.");
    if (!deltas.is_array()) throw SpecError("schedule.deltas: expected an array of arrays");
    for (std::size_t j = 0; j < deltas.size(); ++j)
        d.schedule.deltas.push_back(numbers(deltas[j], "schedule.deltas[" + std::to_string(j) + "]"));
    d.schedule.horizon = number(member(sc, "horizon", "schedule."), "schedule.horizon");

    if (const auto it = doc.find("numerics"); it != doc.end()) {
        const json& nu = *it;
        only_keys(nu, {"step", "tol", "max_iter", "grid", "commute_tol", "zero_tol"}, "numerics.");
        if (nu.contains("step") && !nu["step"].is_null()) d.numerics.step = number(nu["step"], "numerics.step");
        if (nu.contains("tol")) d.numerics.tol = number(nu["tol"], "numerics.tol");
        if (nu.contains("max_iter")) d.numerics.max_iter = count(nu["max_iter"], "numerics.max_iter");
        if (nu.contains("commute_tol")) d.numerics.commute_tol = number(nu["commute_tol"], "numerics.commute_tol");
        if (nu.contains("zero_tol")) d.numerics.zero_tol = number(nu["zero_tol"], "numerics.zero_tol");
        if (nu.contains("grid")) {
            const json& g = nu["grid"];
            only_keys(g, {"u_points", "x_points", "lhs_samples", "lhs_seed"}, "numerics.grid.");
            if (g.contains("u_points")) d.numerics.grid.u_points = count(g["u_points"], "numerics.grid.u_points");
            if (g.contains("x_points")) d.numerics.grid.x_points = count(g["x_points"], "numerics.grid.x_points");
            if (g.contains("lhs_samples"))
                d.numerics.grid.lhs_samples = count(g["lhs_samples"], "numerics.grid.lhs_samples");
            if (g.contains("lhs_seed")) d.numerics.grid.lhs_seed = count(g["lhs_seed"], "numerics.grid.lhs_seed");
        }
    }
    return d;
}

inline json to_json(const ProblemDefinition& d) {
    json doc;
    doc["meta"] = {{"name", d.name}, {"regime", std::string(to_string(d.regime))}};
    doc["dims"] = {{"n", d.n}, {"m", d.m}};
    doc["equilibrium"] = {{"u_star", d.u_star}, {"x_star", d.x_star}, {"gamma", d.gamma}};
    doc["functions"] = {{"L", d.L}, {"alphas", d.alphas}, {"gfields", d.gfields}, {"h", d.h}, {"u0", d.u0}};
    json sc = {{"deltas", d.schedule.deltas}, {"horizon", d.schedule.horizon}};
    if (d.schedule.mode == ScheduleDefinition::Mode::Periodic) {
        sc["mode"] = "periodic";
        sc["period"] = d.schedule.period;
    } else {
        sc["mode"] = "explicit";
        sc["times"] = d.schedule.times;
    }
    doc["schedule"] = sc;
    json nu = {{"tol", d.numerics.tol},
               {"max_iter", d.numerics.max_iter},
               {"commute_tol", d.numerics.commute_tol},
               {"zero_tol", d.numerics.zero_tol},
               {"grid",
                {{"u_points", d.numerics.grid.u_points},
                 {"x_points", d.numerics.grid.x_points},
                 {"lhs_samples", d.numerics.grid.lhs_samples},
                 {"lhs_seed", d.numerics.grid.lhs_seed}}}};
    if (d.numerics.step) nu["step"] = *d.numerics.step;
    doc["numerics"] = nu;
    return doc;
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError(origin + ": " + e.what());
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

inline ProblemSpec load_problem(const std::string& path) { return ProblemSpec(definition_from_json(read_json_file(path))); }

}  // namespace hjj
