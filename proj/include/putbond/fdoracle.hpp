#pragma once

#include <limits>
#include <vector>

#include "putbond/domain.hpp"

namespace putbond {

enum class Scheme { Implicit, CrankNicolson };

/// Uniform grid in x = ln V with a fixed number of steps per coupon interval.
/// NaN bounds are replaced by automatic ones in solve_backward.
struct GridSpec {
    double x_min = std::numeric_limits<double>::quiet_NaN();
    double x_max = std::numeric_limits<double>::quiet_NaN();
    int nx = 4001;
    int nt_per_interval = 500;
    Scheme scheme = Scheme::CrankNicolson;

    /// Bounds at least four standard deviations beyond the relevant levels.
    static GridSpec automatic(const BondSpec& spec, const MarketParams& mkt, int nx = 4001, int nt_per_interval = 500);
    /// Fills in missing bounds and checks the layout; throws Error(InvalidInput).
    GridSpec resolved(const BondSpec& spec, const MarketParams& mkt) const;
};

/// Tabulated B_i(V, t) on every subinterval, plus the boundaries implied by
/// the solver's own coupon-date conditions.
class FdSolution {
public:
    int N() const noexcept { return static_cast<int>(levels_.size()); }
    const GridSpec& grid() const noexcept { return grid_; }
    double x(int j) const { return grid_.x_min + dx_ * j; }
    double dx() const noexcept { return dx_; }

    /// Grid values of subinterval i at time level k, k = 0 at T_i and
    /// k = nt_per_interval at T_{i+1} (the terminal condition).
    const std::vector<double>& level(int i, int k) const;
    double level_time(int i, int k) const;

    /// Interpolated value on subinterval i for T_i <= t <= T_{i+1}.
    double value(int i, double V, double t) const;
    /// Same conventions as the analytic price: T_i < t <= T_{i+1}, t = 0 maps to 0.
    double price_at(double V, double t) const;

    std::vector<double> implied_default_boundary;     // D_1..D_N
    std::vector<double> implied_redemption_boundary;  // E_1..E_M

private:
    friend FdSolution solve_backward(const BondSpec&, const MarketParams&, const GridSpec&);
    GridSpec grid_;
    double dx_ = 0.0;
    std::vector<double> dates_;                             // T_0..T_N
    std::vector<std::vector<std::vector<double>>> levels_;  // [i][k][j]
};

/// Backward time stepping of the pricing PDE in log firm value with Dirichlet
/// data 0 at x_min and the riskless remainder at x_max. Throws
/// Error(UnstableScheme) if the solution leaves [0, Z_i(t)] by more than 1%.
FdSolution solve_backward(const BondSpec& spec, const MarketParams& mkt, const GridSpec& grid);

}  // namespace putbond
