#include "putbond/binaries.hpp"

#include <cmath>

#include "putbond/errors.hpp"

namespace putbond {

void BinarySpec::validate() const {
    const std::size_t m = strikes.size();
    if (m == 0) throw Error(ErrorCode::InvalidInput, "binary needs at least one condition");
    if (expiries.size() != m || sides.size() != m)
        throw Error(ErrorCode::InvalidInput, "strikes, expiries and sides must have equal length");
    for (std::size_t j = 0; j < m; ++j) {
        if (!(strikes[j] > 0.0) || !std::isfinite(strikes[j]))
            throw Error(ErrorCode::InvalidInput, "strikes must be positive and finite");
        if (j > 0 && !(expiries[j] > expiries[j - 1]))
            throw Error(ErrorCode::NonIncreasingTimes, "binary expiries must be strictly increasing");
    }
}

BinaryTerms binary_terms(const BinarySpec& spec, double V, double t, const MarketParams& mkt) {
    spec.validate();
    if (!(t < spec.expiries.front())) throw Error(ErrorCode::ExpiredOption, "evaluation time is not before the first expiry");
    if (!(V > 0.0) || !std::isfinite(V)) throw Error(ErrorCode::DomainError, "firm value must be positive and finite");

    const double r = mkt.short_rate;
    const double b = mkt.payout_rate;
    const double s = mkt.volatility;
    const bool asset = spec.kind == BinaryKind::Asset;
    const double drift = r - b + (asset ? 0.5 : -0.5) * s * s;
    const int m = spec.order();

    BinaryTerms terms;
    std::vector<bool> flipped(static_cast<std::size_t>(m));
    terms.limits.resize(static_cast<std::size_t>(m));
    terms.limit_rate_derivatives.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const double tau = spec.expiries[uj] - t;
        const double root = std::sqrt(tau);
        const double d = (std::log(V / spec.strikes[uj]) + drift * tau) / (s * root);
        const double sign = spec.sides[uj] == Side::Above ? 1.0 : -1.0;
        flipped[uj] = spec.sides[uj] == Side::Below;
        terms.limits[uj] = sign * d;
        terms.limit_rate_derivatives[uj] = sign * root / s;
    }
    const double tau_m = spec.expiries.back() - t;
    if (asset) {
        terms.prefactor = V * std::exp(-b * tau_m);
        terms.prefactor_rate_derivative = 0.0;
    } else {
        terms.prefactor = std::exp(-r * tau_m);
        terms.prefactor_rate_derivative = -tau_m * terms.prefactor;
    }
    terms.correlation = build_correlation(spec.expiries, t, flipped);
    return terms;
}

MvnResult binary_price_ex(const BinarySpec& spec, double V, double t, const MarketParams& mkt, const MvnAccuracy& acc) {
    const BinaryTerms terms = binary_terms(spec, V, t, mkt);
    MvnResult p = mvn_cdf(terms.limits, terms.correlation, acc);
    p.value *= terms.prefactor;
    p.error *= terms.prefactor;
    return p;
}

double binary_price(const BinarySpec& spec, double V, double t, const MarketParams& mkt, const MvnAccuracy& acc) {
    return binary_price_ex(spec, V, t, mkt, acc).value;
}

double replicate_parity(const BinarySpec& spec, double V, double t, const MarketParams& mkt, const MvnAccuracy& acc) {
    spec.validate();
    BinarySpec above = spec;
    above.sides.back() = Side::Above;
    BinarySpec below = spec;
    below.sides.back() = Side::Below;
    const double split = binary_price(above, V, t, mkt, acc) + binary_price(below, V, t, mkt, acc);

    const bool asset = spec.kind == BinaryKind::Asset;
    const double carry_rate = asset ? mkt.payout_rate : mkt.short_rate;
    double carried = 0.0;
    if (spec.order() == 1) {
        if (!(V > 0.0)) throw Error(ErrorCode::DomainError, "firm value must be positive");
        const double tau = spec.expiries.front() - t;
        carried = (asset ? V : 1.0) * std::exp(-carry_rate * tau);
    } else {
        BinarySpec lower = spec;
        lower.strikes.pop_back();
        lower.expiries.pop_back();
        lower.sides.pop_back();
        const double gap = spec.expiries.back() - lower.expiries.back();
        carried = binary_price(lower, V, t, mkt, acc) * std::exp(-carry_rate * gap);
    }
    return split - carried;
}

}  // namespace putbond
