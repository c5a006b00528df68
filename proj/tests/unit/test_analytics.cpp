#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "putbond/analytics.hpp"
#include "putbond/errors.hpp"
#include "putbond/pricer.hpp"

using namespace putbond;

namespace {

const MvnAccuracy kAcc;

double fixed_boundary_fd_duration(double V, const BondSpec& spec, const MarketParams& mkt,
                                  const BoundarySchedule& sched, double h) {
    MarketParams up = mkt, dn = mkt;
    up.short_rate += h;
    dn.short_rate -= h;
    const double b = price_in_subinterval(0, V, 0.0, spec, mkt, sched, kAcc).price;
    const double bu = price_in_subinterval(0, V, 0.0, spec, up, sched, kAcc).price;
    const double bd = price_in_subinterval(0, V, 0.0, spec, dn, sched, kAcc).price;
    return -(bu - bd) / (2.0 * h * b);
}

}  // namespace

TEST(Analytics, DurationMatchesFixedBoundaryDifference) {
    const BondSpec spec = oracle::basic_bond();
    const MarketParams mkt = oracle::basic_market();
    const BoundarySchedule sched = build_schedule(spec, mkt, kAcc);
    for (double V : {5000.0, 10000.0, 15000.0}) {
        const DurationResult d = duration(V, spec, mkt, sched, kAcc);
        const double fd = fixed_boundary_fd_duration(V, spec, mkt, sched, 1e-5);
        EXPECT_NEAR(d.duration, fd, 1e-3 * std::abs(fd)) << "V=" << V;
        EXPECT_GT(d.duration, 0.0);
    }
}

TEST(Analytics, DurationApproachesMacaulayForSafeFirm) {
    const BondSpec spec = oracle::basic_bond();
    const MarketParams mkt = oracle::basic_market();
    const BoundarySchedule sched = build_schedule(spec, mkt, kAcc);
    double z = 0.0, weighted = 0.0;
    const auto cbar = adjusted_coupons(spec);
    for (int j = 1; j <= 3; ++j) {
        const double pv = cbar[static_cast<std::size_t>(j - 1)] * std::exp(-mkt.short_rate * j);
        z += pv;
        weighted += j * pv;
    }
    EXPECT_NEAR(duration(1e9, spec, mkt, sched, kAcc).duration, weighted / z, 1e-6);
}

TEST(Analytics, ZeroCouponLimitIsMaturity) {
    // A vanishing coupon keeps the single-period bond out of the degenerate branch.
    const BondSpec spec{{2.0}, {1e-9}, 1000.0};
    const MarketParams mkt = oracle::basic_market();
    const BoundarySchedule sched = build_schedule(spec, mkt, kAcc);
    ASSERT_FALSE(sched.degenerate);
    EXPECT_NEAR(duration(1e9, spec, mkt, sched, kAcc).duration, 2.0, 1e-9);
}

TEST(Analytics, FullSensitivityStaysCloseToFixedBoundaryDuration) {
    const BondSpec spec = oracle::basic_bond();
    const MarketParams mkt = oracle::basic_market();
    const BoundarySchedule sched = build_schedule(spec, mkt, kAcc);
    const double fixed = duration(10000.0, spec, mkt, sched, kAcc).duration;
    const double full = duration_full_sensitivity(10000.0, spec, mkt, kAcc).duration;
    EXPECT_NEAR(full, fixed, 1e-2 * fixed);
}

TEST(Analytics, ZeroPriceHasNoDuration) {
    const BondSpec spec = oracle::basic_bond();
    const MarketParams mkt = oracle::basic_market();
    const BoundarySchedule sched = build_schedule(spec, mkt, kAcc);
    try {
        duration(0.0, spec, mkt, sched, kAcc);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroPrice);
    }
}

TEST(Analytics, CreditSpreadLimitsAndErrors) {
    const BondSpec spec = oracle::basic_bond();
    const MarketParams mkt = oracle::basic_market();
    const BoundarySchedule sched = build_schedule(spec, mkt, kAcc);
    EXPECT_NEAR(credit_spread(0, 1e9, 0.0, spec, mkt, sched, kAcc), 0.0, 1e-9);
    EXPECT_NEAR(risk_free_leg(spec, mkt, 1, 1.5), riskless_remainder(spec, mkt, 1, 1.5), 0.0);
    try {
        credit_spread(0, 0.0, 0.0, spec, mkt, sched, kAcc);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UndefinedSpread);
    }
}

TEST(Analytics, CreditSpreadIsNonNegativeOnTheSweepGrid) {
    const BondSpec spec = oracle::basic_bond();
    const MarketParams mkt = oracle::basic_market();
    const BoundarySchedule sched = build_schedule(spec, mkt, kAcc);
    for (int i = 0; i < 3; ++i)
        for (double t = spec.date(i); t < spec.date(i + 1); t += 0.25)
            for (double V : {1500.0, 5000.0, 10000.0, 15000.0, 30000.0})
                EXPECT_GE(credit_spread(i, V, t, spec, mkt, sched, kAcc), 0.0) << i << " " << t << " " << V;
}

TEST(Analytics, CreditSpreadDirections) {
    const BondSpec spec = oracle::basic_bond();
    MarketParams mkt = oracle::basic_market();
    const auto cs = [&](const BondSpec& s, const MarketParams& m, double V, double t) {
        return credit_spread(0, V, t, s, m, build_schedule(s, m, kAcc), kAcc);
    };
    for (double t : {0.0, 0.5}) {
        EXPECT_GT(cs(spec, mkt, 5000.0, t), cs(spec, mkt, 10000.0, t));
        MarketParams hi_vol = mkt;
        hi_vol.volatility = 1.2;
        EXPECT_GT(cs(spec, hi_vol, 10000.0, t), cs(spec, mkt, 10000.0, t));
        MarketParams hi_rec = mkt;
        hi_rec.recovery = 0.8;
        EXPECT_LT(cs(spec, hi_rec, 10000.0, t), cs(spec, mkt, 10000.0, t));
        EXPECT_GT(cs(oracle::basic_bond(50.0), mkt, 10000.0, t), cs(spec, mkt, 10000.0, t));
    }
}
