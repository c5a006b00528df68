#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "putbond/domain.hpp"
#include "putbond/errors.hpp"

using namespace putbond;

TEST(Domain, AdjustedCouponsAddFaceValueAtMaturity) {
    const auto cbar = adjusted_coupons(oracle::basic_bond());
    EXPECT_EQ(cbar, (std::vector<double>{40.0, 40.0, 1040.0}));
}

TEST(Domain, RedemptionAmountSubtractsCouponsAlreadyPaid) {
    const BondSpec spec = oracle::basic_bond();
    EXPECT_DOUBLE_EQ(redemption_amount(spec, 1), 1000.0);
    EXPECT_DOUBLE_EQ(redemption_amount(spec, 2), 960.0);
    EXPECT_DOUBLE_EQ(redemption_amount(spec, 3), 920.0);
}

TEST(Domain, RisklessRemainderDiscountsOutstandingPayments) {
    const BondSpec spec = oracle::basic_bond();
    const MarketParams mkt = oracle::basic_market();
    const double z0 = 40.0 * std::exp(-0.03) + 40.0 * std::exp(-0.06) + 1040.0 * std::exp(-0.09);
    EXPECT_NEAR(riskless_remainder(spec, mkt, 0, 0.0), z0, 1e-12);
    EXPECT_NEAR(riskless_remainder(spec, mkt, 2, 2.5), 1040.0 * std::exp(-0.015), 1e-12);
    EXPECT_EQ(riskless_remainder(spec, mkt, 3, 3.0), 0.0);
}

TEST(Domain, CouponConditionHoldsForBasicBond) {
    const auto c = check_coupon_lower_bound(oracle::basic_bond(), oracle::basic_market());
    EXPECT_TRUE(c.holds);
    const double lhs = 40.0 * (std::exp(0.06) + std::exp(0.03) + 1.0);
    EXPECT_NEAR(c.margin, lhs - 1000.0 * std::expm1(0.06), 1e-9);
}

TEST(Domain, CouponConditionFailsWithoutCoupons) {
    EXPECT_FALSE(check_coupon_lower_bound(oracle::basic_bond(0.0), oracle::basic_market()).holds);
}

TEST(Domain, CouponConditionEqualityCountsAsFailure) {
    const BondSpec single{{1.0}, {0.0}, 1000.0};
    const auto c = check_coupon_lower_bound(single, oracle::basic_market());
    EXPECT_FALSE(c.holds);
    EXPECT_EQ(c.margin, 0.0);
}

TEST(Domain, CouponConditionMarginalAtTwenty) {
    // 20 (e^0.06 + e^0.03 + 1) = 61.84582 against 1000 (e^0.06 - 1) = 61.83655.
    const auto c = check_coupon_lower_bound(oracle::basic_bond(20.0), oracle::basic_market());
    EXPECT_TRUE(c.holds);
    EXPECT_NEAR(c.margin, 0.0092750646, 1e-9);
}

TEST(Domain, LastRedemptionDate) {
    EXPECT_EQ(compute_M(oracle::basic_bond()), 2);
    EXPECT_EQ(compute_M(oracle::basic_bond(600.0)), 1);
    EXPECT_EQ(compute_M(oracle::basic_bond(1500.0)), 0);
}

TEST(Domain, DefaultDSequenceIsEquallySpaced) {
    const auto d = default_d_sequence(oracle::basic_bond(), oracle::basic_market());
    ASSERT_EQ(d.size(), 3u);
    EXPECT_NEAR(d[0], 0.5 + 0.5 * 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(d[1], 0.5 + 0.5 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(d[2], 0.5);
}

TEST(Domain, VolatilityConditionForBasicBond) {
    const BondSpec spec = oracle::basic_bond();
    MarketParams mkt = oracle::basic_market();
    const auto d = default_d_sequence(spec, mkt);
    // With b = 0 and unit spacing the bound is (1 - delta) / (sqrt(2 pi) (d_i - d_{i+1})).
    EXPECT_NEAR(required_volatility(spec, mkt, d), 0.5 / (std::sqrt(2.0 * M_PI) / 6.0), 1e-12);
    EXPECT_FALSE(check_volatility_condition(spec, mkt, d));
    mkt.volatility = 1.5;
    EXPECT_TRUE(check_volatility_condition(spec, mkt, d));
}

TEST(Domain, MalformedDSequenceIsRejected) {
    const BondSpec spec = oracle::basic_bond();
    const MarketParams mkt = oracle::basic_market();
    const std::vector<double> increasing{0.6, 0.7, 0.5};
    const std::vector<double> wrong_end{0.9, 0.7, 0.6};
    const std::vector<double> too_large{1.0, 0.7, 0.5};
    for (const auto* d : {&increasing, &wrong_end, &too_large}) {
        try {
            check_volatility_condition(spec, mkt, *d);
            FAIL() << "expected MalformedSequence";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::MalformedSequence);
        }
    }
}

TEST(Domain, ValidationReportCollectsEverything) {
    const ValidationReport r = validate_design(oracle::basic_bond(), oracle::basic_market());
    EXPECT_TRUE(r.coupon_condition_holds);
    EXPECT_EQ(r.M, 2);
    EXPECT_FALSE(r.volatility_condition_holds);
    EXPECT_NEAR(r.required_volatility, 1.196827, 1e-6);
    EXPECT_EQ(r.chosen_d_sequence.size(), 3u);
}

TEST(Domain, InvalidSpecsThrow) {
    const auto expect_invalid = [](const BondSpec& s) {
        try {
            s.validate();
            FAIL() << "expected InvalidInput";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
        }
    };
    expect_invalid({{}, {}, 1000.0});
    expect_invalid({{1.0, 1.0}, {1.0, 1.0}, 1000.0});
    expect_invalid({{1.0, 2.0}, {1.0}, 1000.0});
    expect_invalid({{1.0}, {-1.0}, 1000.0});
    expect_invalid({{1.0}, {1.0}, 0.0});

    MarketParams m = oracle::basic_market();
    m.recovery = 1.0;
    EXPECT_THROW(m.validate(), Error);
    m = oracle::basic_market();
    m.volatility = 0.0;
    EXPECT_THROW(m.validate(), Error);
}
