#include "putbond/analytics.hpp"

#include <cmath>

#include "putbond/errors.hpp"
#include "putbond/pricer.hpp"

namespace putbond {

double risk_free_leg(const BondSpec& spec, const MarketParams& mkt, int i, double t) {
    return riskless_remainder(spec, mkt, i, t);
}

double binary_rate_derivative(const BinarySpec& spec, double V, double t, const MarketParams& mkt,
                              const MvnAccuracy& acc) {
    const BinaryTerms terms = binary_terms(spec, V, t, mkt);
    const CorrelationMatrix corr = terms.correlation.matrix();
    double slope = 0.0;
    for (int j = 0; j < spec.order(); ++j)
        slope += mvn_cdf_partial(terms.limits, corr, j, acc).value *
                 terms.limit_rate_derivatives[static_cast<std::size_t>(j)];
    double d = terms.prefactor * slope;
    if (terms.prefactor_rate_derivative != 0.0)
        d += terms.prefactor_rate_derivative * mvn_cdf(terms.limits, corr, acc).value;
    return d;
}

DurationResult duration(double V0, const BondSpec& spec, const MarketParams& mkt, const BoundarySchedule& sched,
                        const MvnAccuracy& acc) {
    DurationResult res;
    res.price = price_in_subinterval(0, V0, 0.0, spec, mkt, sched, acc).price;
    if (!(res.price > 0.0)) throw Error(ErrorCode::ZeroPrice, "duration is undefined for a zero price");
    for (const auto& term : closed_form_terms(0, spec, mkt, sched))
        res.rate_derivative += term.weight * binary_rate_derivative(term.binary, V0, 0.0, mkt, acc);
    res.duration = -res.rate_derivative / res.price;
    return res;
}

DurationResult duration_full_sensitivity(double V0, const BondSpec& spec, const MarketParams& mkt,
                                         const MvnAccuracy& acc, double h) {
    if (!(h > 0.0) || !(mkt.short_rate - h >= 0.0))
        throw Error(ErrorCode::InvalidInput, "rate bump must be positive and keep the rate non-negative");
    BoundaryOptions tight;
    tight.tolerance_fraction = 1e-10;
    const auto price_with_rate = [&](double r) {
        MarketParams bumped = mkt;
        bumped.short_rate = r;
        const BoundarySchedule sched = build_schedule(spec, bumped, acc, tight);
        return price_in_subinterval(0, V0, 0.0, spec, bumped, sched, acc).price;
    };
    DurationResult res;
    res.price = price_with_rate(mkt.short_rate);
    if (!(res.price > 0.0)) throw Error(ErrorCode::ZeroPrice, "duration is undefined for a zero price");
    res.rate_derivative = (price_with_rate(mkt.short_rate + h) - price_with_rate(mkt.short_rate - h)) / (2.0 * h);
    res.duration = -res.rate_derivative / res.price;
    return res;
}

double credit_spread(int i, double V, double t, const BondSpec& spec, const MarketParams& mkt,
                     const BoundarySchedule& sched, const MvnAccuracy& acc) {
    const double T = spec.maturity();
    if (!(t < T)) throw Error(ErrorCode::UndefinedSpread, "credit spread needs t < T");
    const double B = price_in_subinterval(i, V, t, spec, mkt, sched, acc).price;
    if (!(B > 0.0)) throw Error(ErrorCode::UndefinedSpread, "credit spread needs a positive price");
    return -(std::log(B) - std::log(risk_free_leg(spec, mkt, i, t))) / (T - t);
}

}  // namespace putbond
