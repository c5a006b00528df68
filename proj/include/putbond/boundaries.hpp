#pragma once

#include <functional>
#include <string>
#include <vector>

#include "putbond/domain.hpp"
#include "putbond/mvncdf.hpp"

namespace putbond {

/// Default, early-redemption and envelope boundaries at each coupon date.
///
/// Storage is 0-based (element i-1 holds the value for T_i); the accessors
/// take the 1-based coupon-date index. Entries not yet solved are NaN.
struct BoundarySchedule {
    int N = 0;
    int M = 0;
    std::vector<double> default_boundary;     // D_1..D_N
    std::vector<double> redemption_boundary;  // E_1..E_M
    std::vector<double> upper;                // U_i = max(D_i, E_i) for i <= M, D_i otherwise
    std::vector<double> lower;                // L_i = min(D_i, E_i), i <= M
    std::vector<bool> redeems;                // 1{D_i < E_i}, i <= M
    bool degenerate = false;
    bool volatility_condition_holds = false;
    double tolerance = 0.0;                   // absolute root tolerance used
    std::vector<std::string> warnings;

    double D(int i) const { return default_boundary.at(static_cast<std::size_t>(i - 1)); }
    double E(int i) const { return redemption_boundary.at(static_cast<std::size_t>(i - 1)); }
    double U(int i) const { return upper.at(static_cast<std::size_t>(i - 1)); }
    double L(int i) const { return lower.at(static_cast<std::size_t>(i - 1)); }
    bool redeems_at(int i) const { return i <= M && redeems.at(static_cast<std::size_t>(i - 1)); }
};

struct BoundaryOptions {
    double tolerance_fraction = 1e-6;  // root tolerance as a fraction of F
    int scan_points = 1000;            // uniqueness scan on (0, V_hi); 0 disables
    int lowest_index = 1;              // stop the backward sweep at this coupon date
};

/// Initial upper bracket for the boundary searches: (sum c̄ + F) * 10.
double upper_bracket(const BondSpec& spec);

/// Unique root of V = max{F - sum_{j<i} c̄_j, B_i(V, T_i) + c̄_i}, 1 <= i <= N-1.
/// Throws BoundaryError(BracketFailure) or BoundaryError(MultipleRoots).
double solve_default_boundary(int i, const std::function<double(double)>& price_at_coupon_date, const BondSpec& spec,
                              const MarketParams& mkt, const BoundaryOptions& opts = {});

/// Unique root of B_i(V, T_i) = F - sum_{j<=i} c̄_j for 1 <= i <= M.
/// Throws Error(Degenerate) when the coupon lower bound fails and
/// Error(IndexOutOfRegime) for i > M.
double solve_early_redemption_boundary(int i, const std::function<double(double)>& price_at_coupon_date,
                                       const BondSpec& spec, const MarketParams& mkt, const BoundaryOptions& opts = {});

/// Backward induction over the coupon dates. For a bond failing the coupon
/// lower bound the schedule is marked degenerate and only D_1 = F is set.
BoundarySchedule build_schedule(const BondSpec& spec, const MarketParams& mkt, const MvnAccuracy& acc,
                                const BoundaryOptions& opts = {});

}  // namespace putbond
