#pragma once

#include "putbond/binaries.hpp"
#include "putbond/boundaries.hpp"
#include "putbond/domain.hpp"
#include "putbond/mvncdf.hpp"

namespace putbond {

/// Riskless coupon stream after T_i valued at t: Z_i(t; T).
double risk_free_leg(const BondSpec& spec, const MarketParams& mkt, int i, double t);

/// d/dr of a single binary price at fixed strikes, assembled from the
/// density-weighted marginals of the normal CDF.
double binary_rate_derivative(const BinarySpec& spec, double V, double t, const MarketParams& mkt,
                              const MvnAccuracy& acc);

struct DurationResult {
    double duration = 0.0;         // -dB/dr / B, years
    double price = 0.0;            // B_0(V_0, 0)
    double rate_derivative = 0.0;  // dB/dr
};

/// Duration at t = 0 with the boundaries held fixed. Throws Error(ZeroPrice)
/// when the price is not positive.
DurationResult duration(double V0, const BondSpec& spec, const MarketParams& mkt, const BoundarySchedule& sched,
                        const MvnAccuracy& acc);

/// Duration from central differences of the whole pipeline, re-solving the
/// boundary schedule at r +/- h.
DurationResult duration_full_sensitivity(double V0, const BondSpec& spec, const MarketParams& mkt,
                                         const MvnAccuracy& acc, double h = 1e-4);

/// CS_i = -(ln B_i(V, t) - ln Z_i(t; T)) / (T - t) for T_i <= t < T_{i+1}.
/// Throws Error(UndefinedSpread) if t >= T or the price is not positive.
double credit_spread(int i, double V, double t, const BondSpec& spec, const MarketParams& mkt,
                     const BoundarySchedule& sched, const MvnAccuracy& acc);

}  // namespace putbond
