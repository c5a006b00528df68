#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "putbond/binaries.hpp"
#include "putbond/boundaries.hpp"
#include "putbond/domain.hpp"
#include "putbond/mvncdf.hpp"

namespace putbond {

/// Firm value and time. Within (T_i, T_{i+1}] the price is conditional on the
/// bond surviving (no default, no redemption) up to T_i; t = 0 maps to i = 0.
struct PriceQuery {
    double V = 0.0;
    double t = 0.0;
};

struct PriceLegs {
    double coupon = 0.0;      // sum of c̄_{k+1} times chained bond binaries
    double recovery = 0.0;    // delta times asset binaries struck at D_{k+1}
    double redemption = 0.0;  // redemption amount times (L-struck minus U-struck) binaries
};

struct PriceResult {
    double price = 0.0;
    int subinterval = 0;
    PriceLegs legs;
    std::vector<std::string> warnings;
};

enum class Leg { Coupon, Recovery, Redemption };

struct WeightedBinary {
    Leg leg = Leg::Coupon;
    double weight = 0.0;
    BinarySpec binary;
};

/// Closed form on subinterval i flattened into weighted binaries. Requires
/// U_{i+1..N}, D_{i+1..N}, L_{i+1..M} to be known.
std::vector<WeightedBinary> closed_form_terms(int i, const BondSpec& spec, const MarketParams& mkt,
                                              const BoundarySchedule& sched);

/// Price with the subinterval index i selected explicitly, T_i <= t < T_{i+1}. At
/// t = T_i this is the right limit B_i(V, T_i) used for the boundary searches.
PriceResult price_in_subinterval(int i, double V, double t, const BondSpec& spec, const MarketParams& mkt,
                                 const BoundarySchedule& sched, const MvnAccuracy& acc);

/// Payoff of subinterval i at its right end T_{i+1}. next_price is
/// V -> B_{i+1}(V, T_{i+1}) and is ignored for i = N-1.
double terminal_payoff(int i, double V, const std::function<double(double)>& next_price, const BondSpec& spec,
                       const MarketParams& mkt, const BoundarySchedule& sched);

/// Price for 0 <= t <= T_N with the (T_i, T_{i+1}] convention. Throws
/// Error(DegenerateBond) on a degenerate schedule.
PriceResult price_at(const PriceQuery& q, const BondSpec& spec, const MarketParams& mkt, const BoundarySchedule& sched,
                     const MvnAccuracy& acc);

/// Coupon bond without the put, on subinterval i, struck at the default
/// boundaries only. Coincides with price_in_subinterval for i >= M.
double no_redemption_price(int i, double V, double t, const BondSpec& spec, const MarketParams& mkt,
                           const BoundarySchedule& sched, const MvnAccuracy& acc);

/// Zero-coupon fallback for bonds failing the coupon lower bound:
/// F * B_F^+(V, t; T_1) + delta * A_F^-(V, t; T_1), 0 <= t <= T_1.
double degenerate_price(double V, double t, const BondSpec& spec, const MarketParams& mkt, const MvnAccuracy& acc);

/// Initial price per unit face value as a function of leverage F/V_0 and
/// coupon ratios C_k/F. Boundaries are solved on the unit-face bond.
double initial_price_normalized(double leverage, std::span<const double> coupon_ratios,
                                std::span<const double> maturity_dates, const MarketParams& mkt,
                                const MvnAccuracy& acc, const BoundaryOptions& opts = {});

}  // namespace putbond
