#include "putbond/pricer.hpp"

#include <cmath>
#include <string>

#include "putbond/errors.hpp"

namespace putbond {

namespace {

// Chain of conditions at T_{i+1}..T_{last}: strikes taken from `upper` except
// the final one, which is `final_strike` with side `final_side`.
BinarySpec chain(const BondSpec& spec, int i, int last, const BoundarySchedule& sched, double final_strike,
                 Side final_side, BinaryKind kind) {
    BinarySpec b;
    b.kind = kind;
    for (int j = i + 1; j <= last; ++j) {
        b.expiries.push_back(spec.date(j));
        if (j < last) {
            b.strikes.push_back(sched.U(j));
            b.sides.push_back(Side::Above);
        } else {
            b.strikes.push_back(final_strike);
            b.sides.push_back(final_side);
        }
    }
    return b;
}

void check_subinterval(int i, double t, const BondSpec& spec) {
    if (i < 0 || i >= spec.size()) throw Error(ErrorCode::InvalidInput, "subinterval index out of range");
    if (!(t >= spec.date(i) && t < spec.date(i + 1)))
        throw Error(ErrorCode::DomainError, "time lies outside subinterval " + std::to_string(i));
}

void check_firm_value(double V) {
    if (!std::isfinite(V) || V < 0.0) throw Error(ErrorCode::DomainError, "firm value must be finite and non-negative");
}

}  // namespace

std::vector<WeightedBinary> closed_form_terms(int i, const BondSpec& spec, const MarketParams& mkt,
                                              const BoundarySchedule& sched) {
    const int N = spec.size();
    const auto cbar = adjusted_coupons(spec);
    std::vector<WeightedBinary> terms;
    for (int k = i; k <= N - 1; ++k) {
        terms.push_back({Leg::Coupon, cbar[static_cast<std::size_t>(k)],
                         chain(spec, i, k + 1, sched, sched.U(k + 1), Side::Above, BinaryKind::Bond)});
        if (mkt.recovery > 0.0)
            terms.push_back({Leg::Recovery, mkt.recovery,
                             chain(spec, i, k + 1, sched, sched.D(k + 1), Side::Below, BinaryKind::Asset)});
    }
    for (int k = i + 1; k <= sched.M; ++k) {
        if (!sched.redeems_at(k)) continue;
        const double R = redemption_amount(spec, k);
        terms.push_back({Leg::Redemption, R, chain(spec, i, k, sched, sched.L(k), Side::Above, BinaryKind::Bond)});
        terms.push_back({Leg::Redemption, -R, chain(spec, i, k, sched, sched.U(k), Side::Above, BinaryKind::Bond)});
    }
    return terms;
}

PriceResult price_in_subinterval(int i, double V, double t, const BondSpec& spec, const MarketParams& mkt,
                                 const BoundarySchedule& sched, const MvnAccuracy& acc) {
    if (sched.degenerate) throw Error(ErrorCode::DegenerateBond, "bond fails the coupon lower bound");
    check_subinterval(i, t, spec);
    check_firm_value(V);
    PriceResult res;
    res.subinterval = i;
    if (V == 0.0) return res;

    bool budget = false;
    for (const auto& term : closed_form_terms(i, spec, mkt, sched)) {
        const MvnResult p = binary_price_ex(term.binary, V, t, mkt, acc);
        budget = budget || p.budget_exceeded;
        const double v = term.weight * p.value;
        switch (term.leg) {
            case Leg::Coupon: res.legs.coupon += v; break;
            case Leg::Recovery: res.legs.recovery += v; break;
            case Leg::Redemption: res.legs.redemption += v; break;
        }
    }
    res.price = res.legs.coupon + res.legs.recovery + res.legs.redemption;
    if (budget) res.warnings.push_back("integrator point budget reached; accuracy target not met");
    return res;
}

double terminal_payoff(int i, double V, const std::function<double(double)>& next_price, const BondSpec& spec,
                       const MarketParams& mkt, const BoundarySchedule& sched) {
    const int N = spec.size();
    if (i < 0 || i >= N) throw Error(ErrorCode::InvalidInput, "subinterval index out of range");
    check_firm_value(V);
    const double delta = mkt.recovery;
    if (i == N - 1) {
        const double last = adjusted_coupons(spec).back();
        return V >= last ? last : delta * V;
    }
    const int j = i + 1;
    if (V >= sched.U(j)) return next_price(V) + adjusted_coupons(spec)[static_cast<std::size_t>(i)];
    double payoff = V < sched.D(j) ? delta * V : 0.0;
    if (sched.redeems_at(j) && V >= sched.L(j)) payoff += redemption_amount(spec, j);
    return payoff;
}

PriceResult price_at(const PriceQuery& q, const BondSpec& spec, const MarketParams& mkt, const BoundarySchedule& sched,
                     const MvnAccuracy& acc) {
    if (sched.degenerate) throw Error(ErrorCode::DegenerateBond, "bond fails the coupon lower bound");
    check_firm_value(q.V);
    if (!std::isfinite(q.t) || q.t < 0.0 || q.t > spec.maturity())
        throw Error(ErrorCode::DomainError, "time must lie in [0, T_N]");
    int i = 0;
    while (i < spec.size() - 1 && q.t > spec.date(i + 1)) ++i;
    if (q.t < spec.date(i + 1)) return price_in_subinterval(i, q.V, q.t, spec, mkt, sched, acc);

    PriceResult res;
    res.subinterval = i;
    std::vector<std::string> inner;
    const auto next = [&](double V) {
        PriceResult p = price_in_subinterval(i + 1, V, spec.date(i + 1), spec, mkt, sched, acc);
        inner = std::move(p.warnings);
        return p.price;
    };
    res.price = terminal_payoff(i, q.V, next, spec, mkt, sched);
    res.warnings = std::move(inner);
    return res;
}

double no_redemption_price(int i, double V, double t, const BondSpec& spec, const MarketParams& mkt,
                           const BoundarySchedule& sched, const MvnAccuracy& acc) {
    if (sched.degenerate) throw Error(ErrorCode::DegenerateBond, "bond fails the coupon lower bound");
    check_subinterval(i, t, spec);
    check_firm_value(V);
    if (V == 0.0) return 0.0;
    const auto cbar = adjusted_coupons(spec);
    const int N = spec.size();
    double price = 0.0;
    for (int k = i; k <= N - 1; ++k) {
        BinarySpec coupon;
        BinarySpec recovery;
        coupon.kind = BinaryKind::Bond;
        recovery.kind = BinaryKind::Asset;
        for (int j = i + 1; j <= k + 1; ++j) {
            coupon.strikes.push_back(sched.D(j));
            coupon.expiries.push_back(spec.date(j));
            coupon.sides.push_back(Side::Above);
        }
        recovery.strikes = coupon.strikes;
        recovery.expiries = coupon.expiries;
        recovery.sides = coupon.sides;
        recovery.sides.back() = Side::Below;
        price += cbar[static_cast<std::size_t>(k)] * binary_price(coupon, V, t, mkt, acc);
        if (mkt.recovery > 0.0) price += mkt.recovery * binary_price(recovery, V, t, mkt, acc);
    }
    return price;
}

double degenerate_price(double V, double t, const BondSpec& spec, const MarketParams& mkt, const MvnAccuracy& acc) {
    check_firm_value(V);
    const double T1 = spec.date(1);
    const double F = spec.face_value;
    if (!std::isfinite(t) || t < 0.0 || t > T1) throw Error(ErrorCode::DomainError, "time must lie in [0, T_1]");
    if (t == T1) return V >= F ? F : mkt.recovery * V;
    if (V == 0.0) return 0.0;
    const BinarySpec bond{{F}, {T1}, {Side::Above}, BinaryKind::Bond};
    const BinarySpec asset{{F}, {T1}, {Side::Below}, BinaryKind::Asset};
    return F * binary_price(bond, V, t, mkt, acc) + mkt.recovery * binary_price(asset, V, t, mkt, acc);
}

double initial_price_normalized(double leverage, std::span<const double> coupon_ratios,
                                std::span<const double> maturity_dates, const MarketParams& mkt,
                                const MvnAccuracy& acc, const BoundaryOptions& opts) {
    if (!std::isfinite(leverage) || !(leverage > 0.0))
        throw Error(ErrorCode::InvalidInput, "leverage must be positive");
    BondSpec unit;
    unit.face_value = 1.0;
    unit.coupons.assign(coupon_ratios.begin(), coupon_ratios.end());
    unit.maturity_dates.assign(maturity_dates.begin(), maturity_dates.end());
    const BoundarySchedule sched = build_schedule(unit, mkt, acc, opts);
    const double V0 = 1.0 / leverage;
    if (sched.degenerate) return degenerate_price(V0, 0.0, unit, mkt, acc);
    return price_in_subinterval(0, V0, 0.0, unit, mkt, sched, acc).price;
}

}  // namespace putbond
