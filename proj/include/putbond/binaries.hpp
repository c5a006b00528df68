#pragma once

#include <vector>

#include "putbond/domain.hpp"
#include "putbond/mvncdf.hpp"

namespace putbond {

enum class BinaryKind { Bond, Asset };

/// '+' pays when V(T_j) >= K_j, '-' when V(T_j) < K_j.
enum class Side { Above, Below };

/// Higher-order binary: pays one unit of cash (bond kind) or the firm value
/// (asset kind) at T_m if every condition V(T_j) vs K_j holds.
struct BinarySpec {
    std::vector<double> strikes;
    std::vector<double> expiries;
    std::vector<Side> sides;
    BinaryKind kind = BinaryKind::Bond;

    int order() const noexcept { return static_cast<int>(strikes.size()); }
    void validate() const;
};

/// The binary price written as prefactor * N_m(limits; corr), plus the rate
/// sensitivities of each piece (used by the duration kernels).
struct BinaryTerms {
    double prefactor = 0.0;                // e^{-r(T_m - t)} or V e^{-b(T_m - t)}
    double prefactor_rate_derivative = 0.0;
    std::vector<double> limits;            // signed d_j^-/d_j^+
    std::vector<double> limit_rate_derivatives;
    CorrelationSpec correlation;
};

/// Throws Error(ExpiredOption) if t >= T_1 and Error(DomainError) if V <= 0.
BinaryTerms binary_terms(const BinarySpec& spec, double V, double t, const MarketParams& mkt);

double binary_price(const BinarySpec& spec, double V, double t, const MarketParams& mkt, const MvnAccuracy& acc);

/// Same as binary_price but also reports whether the integrator hit its budget.
MvnResult binary_price_ex(const BinarySpec& spec, double V, double t, const MarketParams& mkt, const MvnAccuracy& acc);

/// Price of the binary with the last condition split both ways, minus the
/// lower-order binary carried from T_{m-1} to T_m. Zero in exact arithmetic.
double replicate_parity(const BinarySpec& spec, double V, double t, const MarketParams& mkt, const MvnAccuracy& acc);

}  // namespace putbond
