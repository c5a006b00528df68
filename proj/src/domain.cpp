#include "putbond/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "putbond/errors.hpp"

namespace putbond {

void BondSpec::validate() const {
    if (maturity_dates.empty())
        throw Error(ErrorCode::InvalidInput, "bond needs at least one coupon date");
    if (coupons.size() != maturity_dates.size())
        throw Error(ErrorCode::InvalidInput, "coupons and maturity_dates differ in length");
    double prev = 0.0;
    for (double t : maturity_dates) {
        if (!std::isfinite(t) || !(t > prev))
            throw Error(ErrorCode::InvalidInput, "maturity_dates must be finite and strictly increasing from 0");
        prev = t;
    }
    for (double c : coupons)
        if (!std::isfinite(c) || c < 0.0)
            throw Error(ErrorCode::InvalidInput, "coupons must be finite and non-negative");
    if (!std::isfinite(face_value) || !(face_value > 0.0))
        throw Error(ErrorCode::InvalidInput, "face_value must be positive");
}

void MarketParams::validate() const {
    if (!std::isfinite(short_rate) || short_rate < 0.0)
        throw Error(ErrorCode::InvalidInput, "short_rate must be non-negative");
    if (!std::isfinite(payout_rate) || payout_rate < 0.0)
        throw Error(ErrorCode::InvalidInput, "payout_rate must be non-negative");
    if (!std::isfinite(volatility) || !(volatility > 0.0))
        throw Error(ErrorCode::InvalidInput, "volatility must be positive");
    if (!std::isfinite(recovery) || recovery < 0.0 || !(recovery < 1.0))
        throw Error(ErrorCode::InvalidInput, "recovery must lie in [0, 1)");
}

std::vector<double> adjusted_coupons(const BondSpec& spec) {
    std::vector<double> cbar = spec.coupons;
    if (!cbar.empty()) cbar.back() += spec.face_value;
    return cbar;
}

double redemption_amount(const BondSpec& spec, int i) {
    double amount = spec.face_value;
    for (int j = 1; j < i; ++j) amount -= spec.coupons[static_cast<std::size_t>(j - 1)];
    return amount;
}

double riskless_remainder(const BondSpec& spec, const MarketParams& mkt, int i, double t) {
    const auto cbar = adjusted_coupons(spec);
    double z = 0.0;
    for (int j = i + 1; j <= spec.size(); ++j)
        z += cbar[static_cast<std::size_t>(j - 1)] * std::exp(-mkt.short_rate * (spec.date(j) - t));
    return z;
}

CouponCondition check_coupon_lower_bound(const BondSpec& spec, const MarketParams& mkt) {
    const double r = mkt.short_rate;
    const double tn = spec.maturity();
    double lhs = 0.0;
    for (int j = 1; j <= spec.size(); ++j)
        lhs += spec.coupons[static_cast<std::size_t>(j - 1)] * std::exp(r * (tn - spec.date(j)));
    const double rhs = spec.face_value * std::expm1(r * (tn - spec.date(1)));
    return {lhs > rhs, lhs - rhs};
}

int compute_M(const BondSpec& spec) {
    const auto cbar = adjusted_coupons(spec);
    double cumulative = 0.0;
    for (int k = 0; k < spec.size(); ++k) {
        cumulative += cbar[static_cast<std::size_t>(k)];
        if (cumulative > spec.face_value) return k;
    }
    return spec.size() - 1;  // unreachable for a valid spec: c̄_N >= F
}

std::vector<double> default_d_sequence(const BondSpec& spec, const MarketParams& mkt) {
    const int n = spec.size();
    const double delta = mkt.recovery;
    std::vector<double> d(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        d[static_cast<std::size_t>(i - 1)] = delta + (1.0 - delta) * (n - i) / n;
    d.back() = delta;
    return d;
}

namespace {

void check_d_sequence(const BondSpec& spec, const MarketParams& mkt, std::span<const double> d) {
    if (static_cast<int>(d.size()) != spec.size())
        throw Error(ErrorCode::MalformedSequence, "d-sequence length must equal the number of coupon dates");
    if (std::abs(d.back() - mkt.recovery) > 1e-12)
        throw Error(ErrorCode::MalformedSequence, "d_N must equal the recovery rate");
    if (!(d.front() < 1.0))
        throw Error(ErrorCode::MalformedSequence, "d_1 must be below 1");
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
        if (!(d[i] > d[i + 1]))
            throw Error(ErrorCode::MalformedSequence, "d-sequence must be strictly decreasing");
}

}  // namespace

double required_volatility(const BondSpec& spec, const MarketParams& mkt, std::span<const double> d) {
    check_d_sequence(spec, mkt, d);
    const double delta = mkt.recovery;
    double required = 0.0;
    for (int i = 1; i <= spec.size() - 1; ++i) {
        const double dt = spec.date(i + 1) - spec.date(i);
        const double carry = std::exp(-mkt.payout_rate * dt);
        const double gap = d[static_cast<std::size_t>(i - 1)] - d[static_cast<std::size_t>(i)] * carry;
        const double bound = (1.0 - delta) * carry / (std::sqrt(2.0 * std::numbers::pi * dt) * gap);
        required = std::max(required, bound);
    }
    return required;
}

bool check_volatility_condition(const BondSpec& spec, const MarketParams& mkt, std::span<const double> d) {
    return mkt.volatility >= required_volatility(spec, mkt, d);
}

ValidationReport validate_design(const BondSpec& spec, const MarketParams& mkt) {
    spec.validate();
    mkt.validate();
    ValidationReport report;
    const auto coupon = check_coupon_lower_bound(spec, mkt);
    report.coupon_condition_holds = coupon.holds;
    report.coupon_condition_margin = coupon.margin;
    report.chosen_d_sequence = default_d_sequence(spec, mkt);
    report.required_volatility = required_volatility(spec, mkt, report.chosen_d_sequence);
    report.volatility_condition_holds = mkt.volatility >= report.required_volatility;
    report.M = compute_M(spec);
    return report;
}

}  // namespace putbond
