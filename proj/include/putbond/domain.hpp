#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace putbond {

/// Coupon bond with a holder put at every coupon date before maturity.
///
/// Coupon dates are T_1 < ... < T_N (years, T_0 = 0 implied). Coupon C_i is
/// paid at T_i; the face value is paid together with C_N at T_N. Indices in
/// the accessors below are 1-based to match the coupon-date numbering.
struct BondSpec {
    std::vector<double> maturity_dates;
    std::vector<double> coupons;
    double face_value = 0.0;

    int size() const noexcept { return static_cast<int>(maturity_dates.size()); }
    double date(int i) const { return i == 0 ? 0.0 : maturity_dates.at(static_cast<std::size_t>(i - 1)); }
    double maturity() const { return maturity_dates.back(); }

    /// Throws Error(InvalidInput) when any invariant is violated.
    void validate() const;
};

struct MarketParams {
    double short_rate = 0.0;   // r
    double payout_rate = 0.0;  // b
    double volatility = 0.0;   // s_V
    double recovery = 0.0;     // delta, fraction of firm value paid on default

    void validate() const;
};

/// c̄_i = C_i for i < N and c̄_N = F + C_N. Returned 0-based (element i-1 is c̄_i).
std::vector<double> adjusted_coupons(const BondSpec& spec);

/// Amount paid when the holder redeems at T_i: F minus the coupons already
/// received, F - sum_{j<i} c̄_j. Valid for 1 <= i <= N.
double redemption_amount(const BondSpec& spec, int i);

/// Value at time t of the riskless remainder of the coupon stream after T_i:
/// Z_i(t) = sum_{j>i} c̄_j exp(-r (T_j - t)).
double riskless_remainder(const BondSpec& spec, const MarketParams& mkt, int i, double t);

struct CouponCondition {
    bool holds = false;
    double margin = 0.0;  // LHS - RHS, currency
};

/// sum_j C_j e^{r(T_N - T_j)} > F (e^{r(T_N - T_1)} - 1). Equality fails.
CouponCondition check_coupon_lower_bound(const BondSpec& spec, const MarketParams& mkt);

/// Smallest k in [0, N-1] with sum_{j<=k+1} c̄_j > F: the last date at which
/// redeeming can beat keeping.
int compute_M(const BondSpec& spec);

/// Equally spaced d_i = delta + (1 - delta)(N - i)/N, returned 0-based.
std::vector<double> default_d_sequence(const BondSpec& spec, const MarketParams& mkt);

/// Sufficient volatility condition for the gradient estimate 0 < dB_i/dV < d_i.
/// d must be strictly decreasing with d_N = delta and d_1 < 1, otherwise
/// Error(MalformedSequence) is thrown.
bool check_volatility_condition(const BondSpec& spec, const MarketParams& mkt, std::span<const double> d);

/// Minimum volatility demanded by the condition above (max over intervals).
double required_volatility(const BondSpec& spec, const MarketParams& mkt, std::span<const double> d);

struct ValidationReport {
    bool coupon_condition_holds = false;
    double coupon_condition_margin = 0.0;
    bool volatility_condition_holds = false;
    double required_volatility = 0.0;
    std::vector<double> chosen_d_sequence;
    int M = 0;
};

ValidationReport validate_design(const BondSpec& spec, const MarketParams& mkt);

}  // namespace putbond
