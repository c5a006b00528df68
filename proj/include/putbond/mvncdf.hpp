#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace putbond {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Accuracy controls for the lattice integrator used at n >= 4.
struct MvnAccuracy {
    double abs_tol = 1e-7;
    long max_points = 4'000'000;
    std::uint64_t seed = 20240601;

    void validate() const;
};

/// Dense symmetric correlation matrix, row-major.
class CorrelationMatrix {
public:
    CorrelationMatrix() = default;
    explicit CorrelationMatrix(int n);

    int size() const noexcept { return n_; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * n_ + j)]; }
    void set(int i, int j, double value);  // also sets (j, i)

    /// Lower-triangular Cholesky factor, row-major. Throws
    /// Error(NotPositiveDefinite) when the matrix is not positive definite.
    std::vector<double> cholesky() const;

    /// Submatrix on the given (ordered) coordinates.
    CorrelationMatrix restrict_to(std::span<const int> coords) const;

private:
    int n_ = 0;
    std::vector<double> data_;
};

/// Correlation of the standardized Brownian log-returns observed at a chain of
/// expiries: r_lm = sqrt((T_l - t)/(T_m - t)) for l < m, with optional sign
/// reflection of individual coordinates (r_lm -> s_l s_m r_lm).
struct CorrelationSpec {
    int dims = 0;
    std::vector<double> remaining_times;  // T_l - t, strictly increasing, > 0
    std::vector<bool> flipped;            // per-coordinate reflection

    bool flip_last() const { return !flipped.empty() && flipped.back(); }
    double entry(int l, int m) const;
    CorrelationMatrix matrix() const;
};

/// Throws Error(NonIncreasingTimes) unless times are strictly increasing, and
/// Error(DomainError) unless t < times[0].
CorrelationSpec build_correlation(std::span<const double> times, double t, bool flip_last);
CorrelationSpec build_correlation(std::span<const double> times, double t, const std::vector<bool>& flipped);

struct MvnResult {
    double value = 0.0;
    double error = 0.0;             // estimated absolute error
    bool budget_exceeded = false;   // integrator stopped on max_points
};

double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

/// P(X <= a, Y <= b) for a standard bivariate normal with correlation rho.
double bivariate_normal_cdf(double a, double b, double rho);

/// N_n(limits; R): probability that a standard normal vector with correlation R
/// lies below the limits. Limits may be +/-infinity. n = 1 and n = 2 are
/// evaluated in closed form, n = 3 by adaptive quadrature of the conditional
/// bivariate CDF, n >= 4 by a randomized lattice rule over the Cholesky
/// (separation-of-variables) transform.
MvnResult mvn_cdf(std::span<const double> limits, const CorrelationMatrix& corr, const MvnAccuracy& acc);
MvnResult mvn_cdf(std::span<const double> limits, const CorrelationSpec& corr, const MvnAccuracy& acc);

/// The lattice integrator alone, for any n >= 1; all limits finite or +inf.
MvnResult mvn_cdf_lattice(std::span<const double> limits, const CorrelationMatrix& corr, const MvnAccuracy& acc);

/// Density-weighted marginal: the (n-1)-fold integral of the joint density with
/// coordinate `coordinate` (0-based) pinned at its limit. This is the partial
/// derivative of N_n with respect to that limit.
MvnResult mvn_cdf_partial(std::span<const double> limits, const CorrelationMatrix& corr, int coordinate,
                          const MvnAccuracy& acc);
MvnResult mvn_cdf_partial(std::span<const double> limits, const CorrelationSpec& corr, int coordinate,
                          const MvnAccuracy& acc);

}  // namespace putbond
