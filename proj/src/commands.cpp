#include "putbond/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "putbond/analytics.hpp"
#include "putbond/boundaries.hpp"
#include "putbond/errors.hpp"
#include "putbond/fdoracle.hpp"
#include "putbond/pricer.hpp"

namespace putbond {

namespace {

using nlohmann::json;

constexpr double kFigureVMax = 16000.0;

// Model inputs plus the solved schedule for one parameter setting.
struct Setup {
    BondSpec spec;
    MarketParams mkt;
    MvnAccuracy acc;
    BoundarySchedule sched;

    // lowest > 1 leaves the boundaries before T_lowest unsolved.
    Setup(BondSpec s, MarketParams m, MvnAccuracy a, int lowest = 1)
        : spec(std::move(s)), mkt(m), acc(a), sched(build_schedule(spec, mkt, acc, options_from(lowest))) {}

    static BoundaryOptions options_from(int lowest) {
        BoundaryOptions o;
        o.lowest_index = lowest;
        return o;
    }

    // Price with the (T_i, T_{i+1}] convention; degenerate bonds only live on [0, T_1].
    double price(double V, double t) const {
        if (!sched.degenerate) return price_at({V, t}, spec, mkt, sched, acc).price;
        if (t <= spec.date(1)) return degenerate_price(V, t, spec, mkt, acc);
        return std::nan("");
    }

    // Price on subinterval i over [T_i, T_{i+1}], right limit at T_i.
    double slice(int i, double V, double t) const {
        if (sched.degenerate) return i == 0 ? degenerate_price(V, t, spec, mkt, acc) : std::nan("");
        if (t < spec.date(i + 1)) return price_in_subinterval(i, V, t, spec, mkt, sched, acc).price;
        return price_at({V, t}, spec, mkt, sched, acc).price;
    }

    double spread(double V, double t) const {
        if (sched.degenerate) return std::nan("");
        int i = 0;
        while (i < spec.size() - 1 && t >= spec.date(i + 1)) ++i;
        return credit_spread(i, V, t, spec, mkt, sched, acc);
    }
};

BondSpec with_flat_coupon(BondSpec spec, double c) {
    std::fill(spec.coupons.begin(), spec.coupons.end(), c);
    return spec;
}

std::vector<double> uniform(double hi, double step, bool include_end = true) {
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidInput, "sweep step must be positive");
    const auto n = std::max<long long>(1, std::llround(hi / step));
    std::vector<double> xs;
    for (long long k = 0; k <= n; ++k) xs.push_back(hi * static_cast<double>(k) / static_cast<double>(n));
    if (!include_end) xs.pop_back();
    return xs;
}

// Evaluates rows concurrently; row k is written only by the worker that claims it.
std::vector<std::vector<double>> parallel_rows(const std::vector<double>& xs,
                                               const std::function<std::vector<double>(double)>& row) {
    std::vector<std::vector<double>> rows(xs.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const auto workers = static_cast<unsigned>(std::min<std::size_t>(hw, xs.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto work = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < xs.size();) {
            try {
                rows[k] = row(xs[k]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::string to_csv(const std::vector<std::string>& header, const std::vector<double>& xs,
                   const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    out += '\n';
    for (std::size_t k = 0; k < xs.size(); ++k) {
        out += format_number(xs[k]);
        for (double v : rows[k]) out += "," + format_number(v);
        out += '\n';
    }
    return out;
}

void require_dates(const BondSpec& spec, int n, const std::string& figure) {
    if (spec.size() < n)
        throw Error(ErrorCode::InvalidInput, figure + " needs at least " + std::to_string(n) + " coupon dates");
}

std::string redemption_figure(const RunConfig& cfg, int i, const CommandOptions& opts) {
    require_dates(cfg.bond, i + 1, "fig" + std::to_string(i + 3));
    const Setup s(cfg.bond, cfg.market, cfg.accuracy);
    const double Ti = s.spec.date(i);
    const double redeem = redemption_amount(s.spec, i);
    const double coupon = s.spec.coupons[static_cast<std::size_t>(i - 1)];
    const auto xs = uniform(kFigureVMax, opts.v_step);
    const auto rows = parallel_rows(xs, [&](double V) {
        const double keep = s.slice(i, V, Ti) + coupon;
        return std::vector<double>{keep, redeem, std::max(keep, redeem), V};
    });
    return to_csv({"V", "keep_value", "redeem_value", "max_value", "identity"}, xs, rows);
}

std::string slice_figure(const RunConfig& cfg, int i, const CommandOptions& opts) {
    require_dates(cfg.bond, i + 1, "fig" + std::to_string(i + 6));
    const Setup s(cfg.bond, cfg.market, cfg.accuracy);
    const double t0 = s.spec.date(i);
    const double t1 = s.spec.date(i + 1);
    std::vector<double> times;
    std::vector<std::string> header{"V"};
    for (int k = 0; k <= 4; ++k) {
        times.push_back(k == 4 ? t1 : t0 + 0.25 * k * (t1 - t0));
        header.push_back("B_t" + format_number(times.back()));
    }
    const auto xs = uniform(kFigureVMax, opts.v_step);
    const auto rows = parallel_rows(xs, [&](double V) {
        std::vector<double> row;
        for (double t : times) row.push_back(s.slice(i, V, t));
        return row;
    });
    return to_csv(header, xs, rows);
}

std::string coupon_boundary_figure(const RunConfig& cfg, int i, const CommandOptions& opts) {
    require_dates(cfg.bond, i + 1, "fig" + std::to_string(i + 9));
    // The curves only need boundaries after T_i; at C = 20 the root at T_1 lies
    // beyond the search bracket because redemption is almost always preferred.
    std::vector<Setup> setups;
    std::vector<std::string> header{"V"};
    for (double c : {20.0, 40.0, 60.0, 80.0, 100.0}) {
        setups.emplace_back(with_flat_coupon(cfg.bond, c), cfg.market, cfg.accuracy, i + 1);
        header.push_back("keep_C" + format_number(c));
        header.push_back("redeem_C" + format_number(c));
    }
    const auto xs = uniform(kFigureVMax, opts.v_step);
    const auto rows = parallel_rows(xs, [&](double V) {
        std::vector<double> row;
        for (const auto& s : setups) {
            const double Ti = s.spec.date(i);
            row.push_back(s.slice(i, V, Ti) + s.spec.coupons[static_cast<std::size_t>(i - 1)]);
            row.push_back(redemption_amount(s.spec, i));
        }
        return row;
    });
    return to_csv(header, xs, rows);
}

// Time sweep over [0, T], one column per curve.
using Curve = std::function<double(double)>;

std::string time_figure(double T, const std::vector<std::string>& labels, const std::vector<Curve>& curves,
                        bool include_end, const CommandOptions& opts) {
    std::vector<std::string> header{"t"};
    header.insert(header.end(), labels.begin(), labels.end());
    const auto xs = uniform(T, opts.t_step, include_end);
    const auto rows = parallel_rows(xs, [&](double t) {
        std::vector<double> row;
        for (const auto& curve : curves) row.push_back(curve(t));
        return row;
    });
    return to_csv(header, xs, rows);
}

json report_json(const ValidationReport& r) {
    return {{"coupon_condition_holds", r.coupon_condition_holds},
            {"coupon_condition_margin", r.coupon_condition_margin},
            {"M", r.M},
            {"volatility_condition_holds", r.volatility_condition_holds},
            {"required_volatility", r.required_volatility},
            {"d_sequence", r.chosen_d_sequence},
            {"degenerate", !r.coupon_condition_holds}};
}

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? ", " : "") + format_number(xs[k]);
    return s;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& out) {
    for (const auto& w : warnings) out << "warning: " << w << '\n';
}

}  // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

RunConfig effective_config(const RunConfig& cfg, const CommandOptions& opts) {
    RunConfig eff = cfg;
    if (opts.seed) eff.accuracy.seed = *opts.seed;
    if (opts.out_dir) eff.outputs = *opts.out_dir;
    return eff;
}

void cmd_validate(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    const ValidationReport r = validate_design(cfg.bond, cfg.market);
    if (opts.json) {
        out << report_json(r).dump(2) << '\n';
        return;
    }
    out << "coupon condition: " << (r.coupon_condition_holds ? "holds" : "FAILS")
        << " (margin " << format_number(r.coupon_condition_margin) << ")\n";
    out << "M: " << r.M << '\n';
    out << "volatility condition: " << (r.volatility_condition_holds ? "holds" : "fails") << " (required s_V >= "
        << format_number(r.required_volatility) << ", given " << format_number(cfg.market.volatility) << ")\n";
    out << "d sequence: " << join(r.chosen_d_sequence) << '\n';
    if (!r.coupon_condition_holds)
        out << "degenerate: coupons too small for the put; the bond is priced as a zero-coupon bond maturing at T_1\n";
}

void cmd_boundaries(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    const RunConfig eff = effective_config(cfg, opts);
    const BoundarySchedule s = build_schedule(eff.bond, eff.market, eff.accuracy);
    const auto opt = [](const std::vector<double>& v, int i) {
        return i <= static_cast<int>(v.size()) ? v[static_cast<std::size_t>(i - 1)] : std::nan("");
    };
    if (opts.json) {
        json rows = json::array();
        for (int i = 1; i <= s.N; ++i) {
            json row = {{"i", i}, {"T", eff.bond.date(i)}, {"D", s.D(i)}, {"U", s.U(i)}};
            if (i <= s.M) {
                row["E"] = s.E(i);
                row["L"] = s.L(i);
                row["redeems"] = s.redeems_at(i);
            }
            if (s.degenerate && i > 1) continue;
            rows.push_back(row);
        }
        out << json{{"M", s.M}, {"degenerate", s.degenerate}, {"boundaries", rows}, {"warnings", s.warnings}}.dump(2)
            << '\n';
        return;
    }
    out << "i,T,D,E,U,L,redeems\n";
    for (int i = 1; i <= s.N; ++i) {
        if (s.degenerate && i > 1) break;
        out << i << ',' << format_number(eff.bond.date(i)) << ',' << format_number(s.D(i)) << ','
            << format_number(opt(s.redemption_boundary, i)) << ',' << format_number(s.U(i)) << ','
            << format_number(opt(s.lower, i)) << ',' << (s.redeems_at(i) ? 1 : 0) << '\n';
    }
    print_warnings(s.warnings, out);
}

void cmd_price(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    const RunConfig eff = effective_config(cfg, opts);
    const BondSpec& spec = eff.bond;
    if (!(opts.t >= 0.0 && opts.t <= spec.maturity())) throw Error(ErrorCode::DomainError, "t must lie in [0, T_N]");
    json report;
    double analytic = std::nan("");
    if (opts.engine != Engine::Fd) {
        const BoundarySchedule sched = build_schedule(spec, eff.market, eff.accuracy);
        report["warnings"] = sched.warnings;
        if (sched.degenerate) {
            if (opts.t > spec.date(1))
                throw Error(ErrorCode::DomainError, "a degenerate bond is redeemed at T_1; t must not exceed T_1");
            analytic = degenerate_price(opts.V, opts.t, spec, eff.market, eff.accuracy);
            report["degenerate"] = true;
        } else {
            const PriceResult r = price_at({opts.V, opts.t}, spec, eff.market, sched, eff.accuracy);
            analytic = r.price;
            report["subinterval"] = r.subinterval;
            report["coupon_leg"] = r.legs.coupon;
            report["recovery_leg"] = r.legs.recovery;
            report["redemption_leg"] = r.legs.redemption;
            for (const auto& w : r.warnings) report["warnings"].push_back(w);
        }
        report["analytic"] = analytic;
    }
    if (opts.engine != Engine::Analytic) {
        const FdSolution fd = solve_backward(spec, eff.market, eff.grid);
        const double v = fd.price_at(opts.V, opts.t);
        report["fd"] = v;
        if (opts.engine == Engine::Both)
            report["relative_gap"] = analytic != 0.0 ? std::abs(v - analytic) / std::abs(analytic) : std::abs(v);
    }
    if (opts.json) {
        out << report.dump(2) << '\n';
        return;
    }
    for (const char* key : {"analytic", "fd", "relative_gap", "subinterval", "coupon_leg", "recovery_leg",
                            "redemption_leg"})
        if (report.contains(key)) out << key << ": " << format_number(report[key].get<double>()) << '\n';
    if (report.contains("degenerate")) out << "degenerate: priced as a zero-coupon bond maturing at T_1\n";
    if (report.contains("warnings")) print_warnings(report["warnings"].get<std::vector<std::string>>(), out);
}

void cmd_duration(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    const RunConfig eff = effective_config(cfg, opts);
    const BoundarySchedule sched = build_schedule(eff.bond, eff.market, eff.accuracy);
    const DurationResult d = duration(opts.V, eff.bond, eff.market, sched, eff.accuracy);
    json report = {{"V", opts.V}, {"price", d.price}, {"rate_derivative", d.rate_derivative}, {"duration", d.duration}};
    if (opts.full_sensitivity)
        report["duration_full_sensitivity"] =
            duration_full_sensitivity(opts.V, eff.bond, eff.market, eff.accuracy).duration;
    if (opts.json) {
        out << report.dump(2) << '\n';
        return;
    }
    for (const char* key : {"price", "rate_derivative", "duration", "duration_full_sensitivity"})
        if (report.contains(key)) out << key << ": " << format_number(report[key].get<double>()) << '\n';
}

void cmd_spread(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    const RunConfig eff = effective_config(cfg, opts);
    const Setup s(eff.bond, eff.market, eff.accuracy);
    if (s.sched.degenerate) throw Error(ErrorCode::DegenerateBond, "credit spread needs a non-degenerate bond");
    const double cs = s.spread(opts.V, opts.t);
    if (opts.json)
        out << json{{"V", opts.V}, {"t", opts.t}, {"credit_spread", cs}}.dump(2) << '\n';
    else
        out << "credit_spread: " << format_number(cs) << '\n';
}

void cmd_config(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    out << emit_config(effective_config(cfg, opts));
}

std::vector<std::string> figure_ids() {
    std::vector<std::string> ids;
    for (int k = 4; k <= 16; ++k) ids.push_back("fig" + std::to_string(k));
    return ids;
}

std::string sweep_csv(const RunConfig& cfg_in, const std::string& figure, const CommandOptions& opts) {
    const RunConfig cfg = effective_config(cfg_in, opts);
    if (figure == "fig4") return redemption_figure(cfg, 1, opts);
    if (figure == "fig5") return redemption_figure(cfg, 2, opts);
    if (figure == "fig6") return slice_figure(cfg, 0, opts);
    if (figure == "fig7") return slice_figure(cfg, 1, opts);
    if (figure == "fig8") return slice_figure(cfg, 2, opts);
    if (figure == "fig10") return coupon_boundary_figure(cfg, 1, opts);
    if (figure == "fig11") return coupon_boundary_figure(cfg, 2, opts);

    // Setups live in a deque so the curves can hold stable references.
    std::deque<Setup> setups;
    std::vector<std::string> labels;
    std::vector<Curve> curves;
    const double T = cfg.bond.maturity();
    const auto add_price = [&](const Setup& s, double V, std::string label) {
        labels.push_back(std::move(label));
        curves.push_back([&s, V](double t) { return s.price(V, t); });
    };
    const auto add_spread = [&](const Setup& s, double V, std::string label) {
        labels.push_back(std::move(label));
        curves.push_back([&s, V](double t) { return s.spread(V, t); });
    };

    if (figure == "fig9" || figure == "fig13") {
        const Setup& s = setups.emplace_back(cfg.bond, cfg.market, cfg.accuracy);
        const bool spread = figure == "fig13";
        for (double V : {5000.0, 10000.0, 15000.0}) {
            const std::string label = (spread ? "CS_V" : "B_V") + format_number(V);
            spread ? add_spread(s, V, label) : add_price(s, V, label);
        }
        return time_figure(T, labels, curves, !spread, opts);
    }
    if (figure == "fig12") {
        for (double c : {80.0, 90.0, 100.0})
            add_price(setups.emplace_back(with_flat_coupon(cfg.bond, c), cfg.market, cfg.accuracy), 10000.0,
                      "B_C" + format_number(c));
        return time_figure(T, labels, curves, true, opts);
    }
    if (figure == "fig14" || figure == "fig15") {
        const bool vol = figure == "fig14";
        for (double x : vol ? std::vector<double>{0.5, 1.0, 1.2} : std::vector<double>{0.3, 0.5, 0.8}) {
            MarketParams m = cfg.market;
            (vol ? m.volatility : m.recovery) = x;
            add_spread(setups.emplace_back(cfg.bond, m, cfg.accuracy), 10000.0,
                       (vol ? "CS_s" : "CS_delta") + format_number(x));
        }
        return time_figure(T, labels, curves, false, opts);
    }
    if (figure == "fig16") {
        for (double c : {30.0, 40.0, 50.0})
            add_spread(setups.emplace_back(with_flat_coupon(cfg.bond, c), cfg.market, cfg.accuracy), 10000.0,
                       "CS_C" + format_number(c));
        return time_figure(T, labels, curves, false, opts);
    }
    throw Error(ErrorCode::UnknownFigure, "unknown figure '" + figure + "' (expected fig4 .. fig16)");
}

std::string cmd_sweep(const RunConfig& cfg, const std::string& figure, const CommandOptions& opts, std::ostream& out) {
    const std::string csv = sweep_csv(cfg, figure, opts);
    const std::filesystem::path dir = effective_config(cfg, opts).outputs;
    std::filesystem::create_directories(dir);
    const std::filesystem::path path = dir / (figure + ".csv");
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorCode::ConfigError, "cannot write '" + path.string() + "'");
    file << csv;
    out << "wrote " << path.string() << '\n';
    return path.string();
}

}  // namespace putbond
