#include "putbond/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "putbond/errors.hpp"

namespace putbond {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail("'" + where + "' must be an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) fail("unknown field '" + where + "." + key + "'");
}

const json& require(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) fail("missing required field '" + where + "." + key + "'");
    return obj.at(key);
}

double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) fail("field '" + field + "' must be a number");
    return v.get<double>();
}

std::vector<double> as_numbers(const json& v, const std::string& field) {
    if (!v.is_array()) fail("field '" + field + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(as_number(x, field));
    return out;
}

// Null means "choose automatically" for the grid bounds.
double as_bound(const json& v, const std::string& field) {
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return as_number(v, field);
}

json bound_to_json(double x) { return std::isnan(x) ? json(nullptr) : json(x); }

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(doc, "config", {"bond", "market", "accuracy", "grid", "outputs"});

    RunConfig cfg;
    const json& bond = require(doc, "config", "bond");
    reject_unknown(bond, "bond", {"maturity_dates", "coupons", "face_value"});
    cfg.bond.maturity_dates = as_numbers(require(bond, "bond", "maturity_dates"), "bond.maturity_dates");
    cfg.bond.coupons = as_numbers(require(bond, "bond", "coupons"), "bond.coupons");
    cfg.bond.face_value = as_number(require(bond, "bond", "face_value"), "bond.face_value");

    const json& market = require(doc, "config", "market");
    reject_unknown(market, "market", {"short_rate", "payout_rate", "volatility", "recovery"});
    cfg.market.short_rate = as_number(require(market, "market", "short_rate"), "market.short_rate");
    cfg.market.payout_rate = as_number(require(market, "market", "payout_rate"), "market.payout_rate");
    cfg.market.volatility = as_number(require(market, "market", "volatility"), "market.volatility");
    cfg.market.recovery = as_number(require(market, "market", "recovery"), "market.recovery");

    if (doc.contains("accuracy")) {
        const json& acc = doc.at("accuracy");
        reject_unknown(acc, "accuracy", {"abs_tol", "max_points", "seed"});
        if (acc.contains("abs_tol")) cfg.accuracy.abs_tol = as_number(acc.at("abs_tol"), "accuracy.abs_tol");
        if (acc.contains("max_points")) {
            if (!acc.at("max_points").is_number_integer()) fail("field 'accuracy.max_points' must be an integer");
            cfg.accuracy.max_points = acc.at("max_points").get<long>();
        }
        if (acc.contains("seed")) {
            if (!acc.at("seed").is_number_unsigned()) fail("field 'accuracy.seed' must be a non-negative integer");
            cfg.accuracy.seed = acc.at("seed").get<std::uint64_t>();
        }
    }

    if (doc.contains("grid")) {
        const json& grid = doc.at("grid");
        reject_unknown(grid, "grid", {"x_min", "x_max", "nx", "nt_per_interval", "scheme"});
        if (grid.contains("x_min")) cfg.grid.x_min = as_bound(grid.at("x_min"), "grid.x_min");
        if (grid.contains("x_max")) cfg.grid.x_max = as_bound(grid.at("x_max"), "grid.x_max");
        for (const char* key : {"nx", "nt_per_interval"}) {
            if (!grid.contains(key)) continue;
            if (!grid.at(key).is_number_integer()) fail(std::string("field 'grid.") + key + "' must be an integer");
            (std::string(key) == "nx" ? cfg.grid.nx : cfg.grid.nt_per_interval) = grid.at(key).get<int>();
        }
        if (grid.contains("scheme")) {
            const json& s = grid.at("scheme");
            if (s == "crank_nicolson")
                cfg.grid.scheme = Scheme::CrankNicolson;
            else if (s == "implicit")
                cfg.grid.scheme = Scheme::Implicit;
            else
                fail("field 'grid.scheme' must be \"implicit\" or \"crank_nicolson\"");
        }
    }

    if (doc.contains("outputs")) {
        if (!doc.at("outputs").is_string()) fail("field 'outputs' must be a directory path string");
        cfg.outputs = doc.at("outputs").get<std::string>();
    }

    try {
        cfg.bond.validate();
        cfg.market.validate();
        cfg.accuracy.validate();
    } catch (const Error& e) {
        fail(std::string("invalid config: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string emit_config(const RunConfig& cfg) {
    json doc;
    doc["bond"] = {{"maturity_dates", cfg.bond.maturity_dates},
                   {"coupons", cfg.bond.coupons},
                   {"face_value", cfg.bond.face_value}};
    doc["market"] = {{"short_rate", cfg.market.short_rate},
                     {"payout_rate", cfg.market.payout_rate},
                     {"volatility", cfg.market.volatility},
                     {"recovery", cfg.market.recovery}};
    doc["accuracy"] = {{"abs_tol", cfg.accuracy.abs_tol},
                       {"max_points", cfg.accuracy.max_points},
                       {"seed", cfg.accuracy.seed}};
    doc["grid"] = {{"x_min", bound_to_json(cfg.grid.x_min)},
                   {"x_max", bound_to_json(cfg.grid.x_max)},
                   {"nx", cfg.grid.nx},
                   {"nt_per_interval", cfg.grid.nt_per_interval},
                   {"scheme", cfg.grid.scheme == Scheme::Implicit ? "implicit" : "crank_nicolson"}};
    doc["outputs"] = cfg.outputs;
    return doc.dump(2) + "\n";
}

}  // namespace putbond
