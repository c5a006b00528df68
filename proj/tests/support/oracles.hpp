#pragma once

#include <cstdint>
#include <vector>

#include "putbond/boundaries.hpp"
#include "putbond/domain.hpp"

// Reference implementations used only by the tests. None of them call into
// the normal-CDF or pricing code they are meant to check.
namespace oracle {

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

putbond::BondSpec basic_bond(double coupon = 40.0);
putbond::MarketParams basic_market();

/// Standard normal CDF evaluated with 50 significant digits.
double normal_cdf_hp(double x);

/// P(X <= b, Y <= k) by adaptive quadrature of phi(x) Phi((k - rho x)/sqrt(1 - rho^2)).
double bivariate_by_quadrature(double h, double k, double rho);

/// Plain Monte Carlo orthant probability P(X_j <= limits_j) with X ~ N(0, corr).
Estimate mvn_cdf_mc(const std::vector<double>& limits, const std::vector<std::vector<double>>& corr, long samples,
                    std::uint64_t seed);

/// Univariate cash-or-nothing and asset-or-nothing values in the lognormal model.
double cash_or_nothing(double V, double K, double tau, const putbond::MarketParams& mkt, bool above);
double asset_or_nothing(double V, double K, double tau, const putbond::MarketParams& mkt, bool above);

/// Simulates the firm value across the remaining coupon dates and applies the
/// default / redemption / continuation rule of the schedule. Starts on
/// subinterval i at time t with firm value V.
Estimate bond_price_mc(const putbond::BondSpec& spec, const putbond::MarketParams& mkt,
                       const putbond::BoundarySchedule& sched, int i, double V, double t, long paths,
                       std::uint64_t seed);

}  // namespace oracle
