#include "putbond/boundaries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "putbond/errors.hpp"
#include "putbond/pricer.hpp"

namespace putbond {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxBracketDoublings = 2;

struct Bracket {
    double lo, hi, f_lo, f_hi;
};

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// Uniform scan on [0, v_hi]. Sets the cell holding the single sign change;
// throws MultipleRoots when the residual changes sign more than once. Grid
// nodes where the residual vanishes exactly are skipped.
bool scan_for_root(const std::function<double(double)>& g, double v_hi, int points, int index, Bracket& out) {
    int changes = 0;
    bool have_last = false;
    double last_v = 0.0, last_g = 0.0;
    for (int k = 0; k <= points; ++k) {
        const double v = v_hi * static_cast<double>(k) / static_cast<double>(points);
        const double gv = g(v);
        if (gv == 0.0) continue;
        if (have_last && sign_of(gv) != sign_of(last_g)) {
            if (++changes > 1)
                throw BoundaryError(ErrorCode::MultipleRoots, index,
                                    "boundary residual changes sign more than once at T_" + std::to_string(index));
            out = {last_v, v, last_g, gv};
        }
        have_last = true;
        last_v = v;
        last_g = gv;
    }
    return changes == 1;
}

// Bracketed refinement (TOMS 748) down to an absolute width of tol.
double refine_root(const std::function<double(double)>& g, Bracket b, double tol) {
    if (b.lo == b.hi) return b.lo;
    std::uintmax_t max_iter = 200;
    const auto width_ok = [tol](double lo, double hi) { return hi - lo <= tol; };
    const auto [lo, hi] = boost::math::tools::toms748_solve(g, b.lo, b.hi, b.f_lo, b.f_hi, width_ok, max_iter);
    return 0.5 * (lo + hi);
}

double root_tolerance(const BondSpec& spec, const BoundaryOptions& opts) {
    if (!(opts.tolerance_fraction > 0.0))
        throw Error(ErrorCode::InvalidInput, "boundary tolerance must be positive");
    return opts.tolerance_fraction * spec.face_value;
}

double find_unique_root(const std::function<double(double)>& g, const BondSpec& spec, const BoundaryOptions& opts,
                        int index) {
    const double tol = root_tolerance(spec, opts);
    double v_hi = upper_bracket(spec);
    for (int attempt = 0; attempt <= kMaxBracketDoublings; ++attempt, v_hi *= 2.0) {
        Bracket b{};
        if (opts.scan_points > 0) {
            if (!scan_for_root(g, v_hi, opts.scan_points, index, b)) continue;
        } else {
            const double g0 = g(0.0);
            const double g1 = g(v_hi);
            if (g0 == 0.0) return 0.0;
            if (sign_of(g0) == sign_of(g1)) continue;
            b = {0.0, v_hi, g0, g1};
        }
        return refine_root(g, b, tol);
    }
    throw BoundaryError(ErrorCode::BracketFailure, index,
                        "no sign change of the boundary residual at T_" + std::to_string(index));
}

}  // namespace

double upper_bracket(const BondSpec& spec) {
    const auto cbar = adjusted_coupons(spec);
    return (std::accumulate(cbar.begin(), cbar.end(), 0.0) + spec.face_value) * 10.0;
}

double solve_default_boundary(int i, const std::function<double(double)>& price_at_coupon_date, const BondSpec& spec,
                              const MarketParams& mkt, const BoundaryOptions& opts) {
    (void)mkt;
    const int N = spec.size();
    if (i < 1 || i > N) throw Error(ErrorCode::InvalidInput, "default boundary index out of range");
    const auto cbar = adjusted_coupons(spec);
    const double c_i = cbar[static_cast<std::size_t>(i - 1)];
    if (i == N) return c_i;

    const double R = redemption_amount(spec, i);
    const auto residual = [&](double V) { return V - std::max(R, price_at_coupon_date(V) + c_i); };
    const double root = find_unique_root(residual, spec, opts, i);

    // On the flat branch the root is R_i itself; return it exactly.
    if (R > 0.0 && R >= price_at_coupon_date(R) + c_i) return R;
    return root;
}

double solve_early_redemption_boundary(int i, const std::function<double(double)>& price_at_coupon_date,
                                       const BondSpec& spec, const MarketParams& mkt, const BoundaryOptions& opts) {
    if (!check_coupon_lower_bound(spec, mkt).holds)
        throw Error(ErrorCode::Degenerate, "coupon lower bound fails; the bond has no early-redemption boundary");
    const int M = compute_M(spec);
    if (i < 1 || i > M)
        throw Error(ErrorCode::IndexOutOfRegime,
                    "early-redemption boundary exists only for 1 <= i <= M = " + std::to_string(M));
    const auto cbar = adjusted_coupons(spec);
    double paid = 0.0;
    for (int j = 0; j < i; ++j) paid += cbar[static_cast<std::size_t>(j)];
    const double target = spec.face_value - paid;
    if (target <= 0.0) return 0.0;

    const auto residual = [&](double V) { return price_at_coupon_date(V) - target; };
    return find_unique_root(residual, spec, opts, i);
}

BoundarySchedule build_schedule(const BondSpec& spec, const MarketParams& mkt, const MvnAccuracy& acc,
                                const BoundaryOptions& opts) {
    spec.validate();
    mkt.validate();
    acc.validate();
    const int N = spec.size();
    if (opts.lowest_index < 1 || opts.lowest_index > N)
        throw Error(ErrorCode::InvalidInput, "lowest boundary index out of range");

    const ValidationReport report = validate_design(spec, mkt);
    BoundarySchedule s;
    s.N = N;
    s.tolerance = root_tolerance(spec, opts);
    s.volatility_condition_holds = report.volatility_condition_holds;
    s.default_boundary.assign(static_cast<std::size_t>(N), kNaN);
    s.upper.assign(static_cast<std::size_t>(N), kNaN);
    if (!report.volatility_condition_holds)
        s.warnings.push_back("volatility condition fails (required s_V >= " +
                             std::to_string(report.required_volatility) +
                             "); boundary uniqueness is checked numerically");

    if (!report.coupon_condition_holds) {
        s.degenerate = true;
        s.M = 0;
        s.default_boundary[0] = spec.face_value;
        s.upper[0] = spec.face_value;
        s.warnings.push_back("coupon lower bound fails; priced as a zero-coupon bond maturing at T_1");
        return s;
    }

    s.M = report.M;
    const auto M = static_cast<std::size_t>(s.M);
    s.redemption_boundary.assign(M, kNaN);
    s.lower.assign(M, kNaN);
    s.redeems.assign(M, false);

    const auto cbar = adjusted_coupons(spec);
    s.default_boundary.back() = cbar.back();
    s.upper.back() = cbar.back();

    for (int i = N - 1; i >= opts.lowest_index; --i) {
        const auto ui = static_cast<std::size_t>(i - 1);
        const double Ti = spec.date(i);
        const auto B = [&](double V) { return price_in_subinterval(i, V, Ti, spec, mkt, s, acc).price; };
        const double D = solve_default_boundary(i, B, spec, mkt, opts);
        s.default_boundary[ui] = D;
        s.upper[ui] = D;
        if (i <= s.M) {
            const double E = solve_early_redemption_boundary(i, B, spec, mkt, opts);
            if (E == 0.0)
                s.warnings.push_back("coupons up to T_" + std::to_string(i) +
                                     " exhaust the face value; E_" + std::to_string(i) + " = 0");
            s.redemption_boundary[ui] = E;
            s.redeems[ui] = E - D > s.tolerance;
            s.upper[ui] = std::max(D, E);
            s.lower[ui] = std::min(D, E);
        }
    }
    return s;
}

}  // namespace putbond
