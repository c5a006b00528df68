#include "putbond/fdoracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "putbond/errors.hpp"

namespace putbond {

namespace {

constexpr int kCellSamples = 64;
constexpr double kSandwichSlack = 0.01;

struct Tridiag {
    double lower, diag, upper;
};

// Solves the constant-coefficient tridiagonal system on interior nodes with
// Dirichlet values at both ends folded into rhs.
void thomas(const Tridiag& a, std::vector<double>& rhs, std::vector<double>& scratch) {
    const std::size_t n = rhs.size();
    scratch.resize(n);
    double denom = a.diag;
    scratch[0] = a.upper / denom;
    rhs[0] /= denom;
    for (std::size_t j = 1; j < n; ++j) {
        denom = a.diag - a.lower * scratch[j - 1];
        scratch[j] = a.upper / denom;
        rhs[j] = (rhs[j] - a.lower * rhs[j - 1]) / denom;
    }
    for (std::size_t j = n - 1; j-- > 0;) rhs[j] -= scratch[j] * rhs[j + 1];
}

class Stepper {
public:
    Stepper(const MarketParams& mkt, double dx) {
        const double a = 0.5 * mkt.volatility * mkt.volatility;
        const double mu = mkt.short_rate - mkt.payout_rate - a;
        op_ = {a / (dx * dx) - mu / (2.0 * dx), -2.0 * a / (dx * dx) - mkt.short_rate, a / (dx * dx) + mu / (2.0 * dx)};
    }

    // One step back in time of length dt with weight theta on the earlier level.
    void step(const std::vector<double>& later, std::vector<double>& earlier, double dt, double theta, double left,
              double right) {
        const std::size_t n = later.size();
        const double e = (1.0 - theta) * dt;
        rhs_.resize(n - 2);
        for (std::size_t j = 1; j + 1 < n; ++j)
            rhs_[j - 1] = later[j] + e * (op_.lower * later[j - 1] + op_.diag * later[j] + op_.upper * later[j + 1]);
        const Tridiag lhs{-theta * dt * op_.lower, 1.0 - theta * dt * op_.diag, -theta * dt * op_.upper};
        rhs_.front() -= lhs.lower * left;
        rhs_.back() -= lhs.upper * right;
        thomas(lhs, rhs_, scratch_);
        earlier.resize(n);
        earlier.front() = left;
        earlier.back() = right;
        std::copy(rhs_.begin(), rhs_.end(), earlier.begin() + 1);
    }

private:
    Tridiag op_{};
    std::vector<double> rhs_, scratch_;
};

double interpolate(const std::vector<double>& values, double x_min, double dx, double x) {
    const double pos = (x - x_min) / dx;
    const auto last = static_cast<double>(values.size() - 1);
    if (pos <= 0.0) return values.front();
    if (pos >= last) return values.back();
    const auto j = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(j);
    return (1.0 - w) * values[j] + w * values[j + 1];
}

// Four-point Lagrange interpolation; falls back to linear in the edge cells.
double interpolate_cubic(const std::vector<double>& values, double x_min, double dx, double x) {
    const double pos = (x - x_min) / dx;
    const auto j = static_cast<long>(std::floor(pos));
    if (j < 1 || j + 2 >= static_cast<long>(values.size())) return interpolate(values, x_min, dx, x);
    const double w = pos - static_cast<double>(j);
    const auto at = [&](long k) { return values[static_cast<std::size_t>(k)]; };
    return at(j - 1) * (-w * (w - 1.0) * (w - 2.0) / 6.0) + at(j) * ((w + 1.0) * (w - 1.0) * (w - 2.0) / 2.0) +
           at(j + 1) * (-(w + 1.0) * w * (w - 2.0) / 2.0) + at(j + 2) * ((w + 1.0) * w * (w - 1.0) / 6.0);
}

// First upward sign change of g along the grid, linearly interpolated in V.
double first_crossing(const std::vector<double>& V, const std::vector<double>& g) {
    for (std::size_t j = 1; j < g.size(); ++j)
        if (g[j - 1] < 0.0 && g[j] >= 0.0) return V[j - 1] + (V[j] - V[j - 1]) * (-g[j - 1]) / (g[j] - g[j - 1]);
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

GridSpec GridSpec::automatic(const BondSpec& spec, const MarketParams& mkt, int nx, int nt_per_interval) {
    const auto cbar = adjusted_coupons(spec);
    double low = cbar.back();
    for (int i = 1; i <= spec.size(); ++i)
        low = std::min(low, std::max(redemption_amount(spec, i), cbar[static_cast<std::size_t>(i - 1)]));
    const double high = (std::accumulate(cbar.begin(), cbar.end(), 0.0) + spec.face_value) * 10.0;
    const double spread = 4.0 * mkt.volatility * std::sqrt(spec.maturity());
    GridSpec g;
    g.x_min = std::log(std::max(low, 1e-12 * spec.face_value)) - spread - 0.5;
    g.x_max = std::log(high) + spread + 0.5;
    g.nx = nx;
    g.nt_per_interval = nt_per_interval;
    return g;
}

GridSpec GridSpec::resolved(const BondSpec& spec, const MarketParams& mkt) const {
    const GridSpec fallback = automatic(spec, mkt, nx, nt_per_interval);
    GridSpec g = *this;
    if (std::isnan(g.x_min)) g.x_min = fallback.x_min;
    if (std::isnan(g.x_max)) g.x_max = fallback.x_max;
    if (!std::isfinite(g.x_min) || !std::isfinite(g.x_max) || !(g.x_min < g.x_max))
        throw Error(ErrorCode::InvalidInput, "grid needs finite bounds with x_min < x_max");
    if (g.nx < 200) throw Error(ErrorCode::InvalidInput, "grid needs at least 200 spatial nodes");
    if (g.nt_per_interval < 2) throw Error(ErrorCode::InvalidInput, "grid needs at least 2 time steps per interval");
    return g;
}

const std::vector<double>& FdSolution::level(int i, int k) const {
    return levels_.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k));
}

double FdSolution::level_time(int i, int k) const {
    const auto ui = static_cast<std::size_t>(i);
    return dates_[ui] + (dates_[ui + 1] - dates_[ui]) * k / grid_.nt_per_interval;
}

double FdSolution::value(int i, double V, double t) const {
    if (i < 0 || i >= N()) throw Error(ErrorCode::InvalidInput, "subinterval index out of range");
    const auto ui = static_cast<std::size_t>(i);
    if (!(t >= dates_[ui] && t <= dates_[ui + 1])) throw Error(ErrorCode::DomainError, "time outside subinterval");
    if (!std::isfinite(V) || V < 0.0) throw Error(ErrorCode::DomainError, "firm value must be finite and non-negative");
    if (V == 0.0) return 0.0;
    const double x = std::log(V);
    const double pos = (t - dates_[ui]) / (dates_[ui + 1] - dates_[ui]) * grid_.nt_per_interval;
    const int k = std::min(static_cast<int>(pos), grid_.nt_per_interval - 1);
    const double w = pos - k;
    // Levels inside the interval are smooth; the terminal level carries the coupon-date jumps.
    const auto& lo = levels_[ui][static_cast<std::size_t>(k)];
    const auto& hi = levels_[ui][static_cast<std::size_t>(k + 1)];
    const double a = interpolate_cubic(lo, grid_.x_min, dx_, x);
    const double b = k + 1 == grid_.nt_per_interval ? interpolate(hi, grid_.x_min, dx_, x)
                                                    : interpolate_cubic(hi, grid_.x_min, dx_, x);
    return (1.0 - w) * a + w * b;
}

double FdSolution::price_at(double V, double t) const {
    if (!(t >= 0.0 && t <= dates_.back())) throw Error(ErrorCode::DomainError, "time must lie in [0, T_N]");
    int i = 0;
    while (i < N() - 1 && t > dates_[static_cast<std::size_t>(i + 1)]) ++i;
    return value(i, V, t);
}

FdSolution solve_backward(const BondSpec& spec, const MarketParams& mkt, const GridSpec& grid_in) {
    spec.validate();
    mkt.validate();
    const GridSpec grid = grid_in.resolved(spec, mkt);
    const int N = spec.size();
    const int nx = grid.nx;
    const int nt = grid.nt_per_interval;
    const auto cbar = adjusted_coupons(spec);
    const double delta = mkt.recovery;

    FdSolution sol;
    sol.grid_ = grid;
    sol.dx_ = (grid.x_max - grid.x_min) / (nx - 1);
    for (int i = 0; i <= N; ++i) sol.dates_.push_back(spec.date(i));
    sol.levels_.assign(static_cast<std::size_t>(N), {});

    std::vector<double> V(static_cast<std::size_t>(nx));
    for (int j = 0; j < nx; ++j) V[static_cast<std::size_t>(j)] = std::exp(sol.x(j));

    Stepper stepper(mkt, sol.dx_);
    for (int i = N - 1; i >= 0; --i) {
        const double t0 = spec.date(i);
        const double t1 = spec.date(i + 1);
        const double dt = (t1 - t0) / nt;
        auto& levels = sol.levels_[static_cast<std::size_t>(i)];
        levels.assign(static_cast<std::size_t>(nt + 1), std::vector<double>(static_cast<std::size_t>(nx)));

        // Coupon-date condition at T_{i+1} from the already solved B_{i+1}(., T_{i+1}).
        const double c_next = cbar[static_cast<std::size_t>(i)];
        const double redeem = redemption_amount(spec, i + 1);
        const std::vector<double>* next = i + 1 < N ? &sol.levels_[static_cast<std::size_t>(i + 1)][0] : nullptr;
        const auto continuation = [&](double x) {
            if (next == nullptr) return c_next;
            return std::max(interpolate(*next, grid.x_min, sol.dx_, x) + c_next, redeem);
        };
        const auto payoff = [&](double x) {
            const double v = std::exp(x);
            const double m = continuation(x);
            return v >= m ? m : delta * v;
        };
        const auto regime = [&](double x) {
            const double m = continuation(x);
            const bool solvent = std::exp(x) >= m;
            const bool redeemed = next != nullptr && redeem >= interpolate(*next, grid.x_min, sol.dx_, x) + c_next;
            return 2 * static_cast<int>(solvent) + static_cast<int>(redeemed);
        };
        auto& terminal = levels.back();
        for (int j = 0; j < nx; ++j) {
            const double x = sol.x(j);
            const double lo = x - 0.5 * sol.dx_;
            const double hi = x + 0.5 * sol.dx_;
            const int state = regime(x);
            if (j == 0 || j == nx - 1 || (regime(lo) == state && regime(hi) == state)) {
                terminal[static_cast<std::size_t>(j)] = payoff(x);
                continue;
            }
            // Cell average with each regime change located by bisection, so the
            // jump position carries no sampling error.
            const double h = sol.dx_ / kCellSamples;
            double sum = 0.0;
            for (int q = 0; q < kCellSamples; ++q) {
                const double a = lo + q * h;
                const double b = a + h;
                const int ra = regime(a);
                if (ra == regime(b)) {
                    sum += payoff(0.5 * (a + b)) * h;
                    continue;
                }
                double left = a, right = b;
                for (int it = 0; it < 60 && right - left > 1e-15; ++it) {
                    const double mid = 0.5 * (left + right);
                    (regime(mid) == ra ? left : right) = mid;
                }
                const double c = 0.5 * (left + right);
                sum += payoff(0.5 * (a + c)) * (c - a) + payoff(0.5 * (c + b)) * (b - c);
            }
            terminal[static_cast<std::size_t>(j)] = sum / sol.dx_;
        }
        terminal.front() = 0.0;
        terminal.back() = riskless_remainder(spec, mkt, i, t1);

        std::vector<double> half;
        for (int k = nt - 1; k >= 0; --k) {
            const double t = t0 + dt * k;
            const double right = riskless_remainder(spec, mkt, i, t);
            const auto& later = levels[static_cast<std::size_t>(k + 1)];
            auto& earlier = levels[static_cast<std::size_t>(k)];
            if (grid.scheme == Scheme::Implicit) {
                stepper.step(later, earlier, dt, 1.0, 0.0, right);
            } else if (k == nt - 1) {
                // Rannacher start-up: two implicit half steps damp the payoff jumps.
                stepper.step(later, half, 0.5 * dt, 1.0, 0.0, riskless_remainder(spec, mkt, i, t + 0.5 * dt));
                stepper.step(half, earlier, 0.5 * dt, 1.0, 0.0, right);
            } else {
                stepper.step(later, earlier, dt, 0.5, 0.0, right);
            }
            for (double b : earlier)
                if (b < -kSandwichSlack * right || b > (1.0 + kSandwichSlack) * right)
                    throw Error(ErrorCode::UnstableScheme,
                                "finite-difference solution left the price bounds on subinterval " +
                                    std::to_string(i));
        }
    }

    // Boundaries implied by the solver's own values at each coupon date.
    const int M = compute_M(spec);
    sol.implied_default_boundary.assign(static_cast<std::size_t>(N), std::numeric_limits<double>::quiet_NaN());
    sol.implied_default_boundary.back() = cbar.back();
    std::vector<double> g(static_cast<std::size_t>(nx));
    double paid = 0.0;
    for (int i = 1; i <= N - 1; ++i) {
        const auto& B = sol.levels_[static_cast<std::size_t>(i)][0];
        const double c = cbar[static_cast<std::size_t>(i - 1)];
        const double R = redemption_amount(spec, i);
        paid += c;
        for (std::size_t j = 0; j < g.size(); ++j) g[j] = V[j] - std::max(R, B[j] + c);
        sol.implied_default_boundary[static_cast<std::size_t>(i - 1)] = first_crossing(V, g);
        if (i <= M) {
            for (std::size_t j = 0; j < g.size(); ++j) g[j] = B[j] - (spec.face_value - paid);
            sol.implied_redemption_boundary.push_back(first_crossing(V, g));
        }
    }
    return sol;
}

}  // namespace putbond
