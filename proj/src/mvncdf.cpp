#include "putbond/mvncdf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "putbond/errors.hpp"

namespace putbond {

namespace {

// Standard normal mass beyond this many standard deviations is below 1e-17.
constexpr double kClip = 8.5;
constexpr int kLatticeShifts = 12;
constexpr long kLatticeInitialPoints = 512;

}  // namespace

void MvnAccuracy::validate() const {
    if (!(abs_tol > 0.0)) throw Error(ErrorCode::InvalidInput, "abs_tol must be positive");
    if (max_points <= 0) throw Error(ErrorCode::InvalidInput, "max_points must be positive");
}

CorrelationMatrix::CorrelationMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n * n), 0.0) {
    for (int i = 0; i < n; ++i) data_[static_cast<std::size_t>(i * n + i)] = 1.0;
}

void CorrelationMatrix::set(int i, int j, double value) {
    data_[static_cast<std::size_t>(i * n_ + j)] = value;
    data_[static_cast<std::size_t>(j * n_ + i)] = value;
}

std::vector<double> CorrelationMatrix::cholesky() const {
    std::vector<double> l(static_cast<std::size_t>(n_ * n_), 0.0);
    auto at = [&](int i, int j) -> double& { return l[static_cast<std::size_t>(i * n_ + j)]; };
    for (int j = 0; j < n_; ++j) {
        double diag = (*this)(j, j);
        for (int k = 0; k < j; ++k) diag -= at(j, k) * at(j, k);
        if (!(diag > 1e-14))
            throw Error(ErrorCode::NotPositiveDefinite, "Cholesky pivot " + std::to_string(j) + " is not positive");
        at(j, j) = std::sqrt(diag);
        for (int i = j + 1; i < n_; ++i) {
            double s = (*this)(i, j);
            for (int k = 0; k < j; ++k) s -= at(i, k) * at(j, k);
            at(i, j) = s / at(j, j);
        }
    }
    return l;
}

CorrelationMatrix CorrelationMatrix::restrict_to(std::span<const int> coords) const {
    CorrelationMatrix sub(static_cast<int>(coords.size()));
    for (int a = 0; a < sub.size(); ++a)
        for (int b = a + 1; b < sub.size(); ++b)
            sub.set(a, b, (*this)(coords[static_cast<std::size_t>(a)], coords[static_cast<std::size_t>(b)]));
    return sub;
}

double CorrelationSpec::entry(int l, int m) const {
    if (l == m) return 1.0;
    const int lo = std::min(l, m);
    const int hi = std::max(l, m);
    double r = std::sqrt(remaining_times[static_cast<std::size_t>(lo)] / remaining_times[static_cast<std::size_t>(hi)]);
    if (flipped[static_cast<std::size_t>(l)] != flipped[static_cast<std::size_t>(m)]) r = -r;
    return r;
}

CorrelationMatrix CorrelationSpec::matrix() const {
    CorrelationMatrix m(dims);
    for (int l = 0; l < dims; ++l)
        for (int k = l + 1; k < dims; ++k) m.set(l, k, entry(l, k));
    return m;
}

CorrelationSpec build_correlation(std::span<const double> times, double t, const std::vector<bool>& flipped) {
    if (times.empty()) throw Error(ErrorCode::InvalidInput, "correlation needs at least one time");
    if (flipped.size() != times.size()) throw Error(ErrorCode::InvalidInput, "flip mask length mismatch");
    for (std::size_t j = 1; j < times.size(); ++j)
        if (!(times[j] > times[j - 1])) throw Error(ErrorCode::NonIncreasingTimes, "times must be strictly increasing");
    if (!(t < times.front())) throw Error(ErrorCode::DomainError, "evaluation time must precede the first expiry");
    CorrelationSpec spec;
    spec.dims = static_cast<int>(times.size());
    spec.remaining_times.reserve(times.size());
    for (double tj : times) spec.remaining_times.push_back(tj - t);
    spec.flipped = flipped;
    return spec;
}

CorrelationSpec build_correlation(std::span<const double> times, double t, bool flip_last) {
    std::vector<bool> flipped(times.size(), false);
    if (flip_last && !flipped.empty()) flipped.back() = true;
    return build_correlation(times, t, flipped);
}

double normal_pdf(double x) {
    if (!std::isfinite(x)) return 0.0;
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (p <= 0.0) return -kInfinity;
    if (p >= 1.0) return kInfinity;
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

namespace {

// Upper-orthant bivariate probability P(X > h, Y > k) after Drezner and
// Wesolowsky as refined by Genz: Gauss-Legendre on the Plackett integrand for
// moderate |r|, an asymptotic expansion plus correction near |r| = 1.
template <std::size_t Points>
double bvn_upper_rule(double h, double k, double r) {
    using Rule = boost::math::quadrature::gauss<double, Points>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    constexpr double twopi = 2.0 * std::numbers::pi;
    const double hk = h * k;
    double bvn = 0.0;
    if (std::abs(r) < 0.925) {
        const double hs = (h * h + k * k) / 2.0;
        const double asr = std::asin(r);
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (double sgn : {-1.0, 1.0}) {
                const double sn = std::sin(asr * (1.0 + sgn * x[i]) / 2.0);
                bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        return bvn * asr / (2.0 * twopi) + normal_cdf(-h) * normal_cdf(-k);
    }
    double kk = k;
    double hkk = hk;
    if (r < 0.0) {
        kk = -k;
        hkk = -hk;
    }
    if (std::abs(r) < 1.0) {
        const double as = (1.0 - r) * (1.0 + r);
        double a = std::sqrt(as);
        const double bs = (h - kk) * (h - kk);
        const double c = (4.0 - hkk) / 8.0;
        const double d = (12.0 - hkk) / 16.0;
        bvn = a * std::exp(-(bs / as + hkk) / 2.0) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
        if (hkk > -160.0) {
            const double b = std::sqrt(bs);
            bvn -= std::exp(-hkk / 2.0) * std::sqrt(twopi) * normal_cdf(-b / a) * b *
                   (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (double sgn : {-1.0, 1.0}) {
                const double xs = std::pow(a * (1.0 + sgn * x[i]), 2);
                const double rs = std::sqrt(1.0 - xs);
                const double asr = -(bs / xs + hkk) / 2.0;
                if (asr > -100.0) {
                    bvn += a * w[i] * std::exp(asr) *
                           (std::exp(-hkk * xs / (2.0 * std::pow(1.0 + rs, 2))) / rs -
                            (1.0 + c * xs * (1.0 + d * xs)));
                }
            }
        }
        bvn = -bvn / twopi;
    }
    if (r > 0.0) return bvn + normal_cdf(-std::max(h, kk));
    bvn = -bvn;
    if (kk > h) {
        if (h < 0.0)
            bvn += normal_cdf(kk) - normal_cdf(h);
        else
            bvn += normal_cdf(-h) - normal_cdf(-kk);
    }
    return bvn;
}

double bvn_upper(double h, double k, double r) {
    const double ar = std::abs(r);
    if (ar < 0.3) return bvn_upper_rule<6>(h, k, r);
    if (ar < 0.75) return bvn_upper_rule<12>(h, k, r);
    return bvn_upper_rule<20>(h, k, r);
}

double trivariate_cdf(std::span<const double> a, const CorrelationMatrix& corr) {
    // Condition on the coordinate with the smallest limit; the remaining pair
    // is bivariate normal given its value.
    int c = 0;
    for (int j = 1; j < 3; ++j)
        if (a[static_cast<std::size_t>(j)] < a[static_cast<std::size_t>(c)]) c = j;
    const int p = (c + 1) % 3;
    const int q = (c + 2) % 3;
    const double rpc = corr(p, c);
    const double rqc = corr(q, c);
    const double sp = std::sqrt((1.0 - rpc) * (1.0 + rpc));
    const double sq = std::sqrt((1.0 - rqc) * (1.0 + rqc));
    const double rho = (corr(p, q) - rpc * rqc) / (sp * sq);
    const double ap = a[static_cast<std::size_t>(p)];
    const double aq = a[static_cast<std::size_t>(q)];
    const double upper = std::min(a[static_cast<std::size_t>(c)], kClip);
    if (upper <= -kClip) return 0.0;
    auto integrand = [&](double y) {
        return normal_pdf(y) * bivariate_normal_cdf((ap - rpc * y) / sp, (aq - rqc * y) / sq, rho);
    };
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, -kClip, upper, 20, 1e-13, &error);
    return std::clamp(value, 0.0, 1.0);
}

std::vector<int> first_primes(int count) {
    std::vector<int> primes;
    for (int candidate = 2; static_cast<int>(primes.size()) < count; ++candidate) {
        bool prime = true;
        for (int p : primes) {
            if (p * p > candidate) break;
            if (candidate % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime) primes.push_back(candidate);
    }
    return primes;
}

// Cholesky with Genz-Bretz variable ordering: at each step pick the remaining
// coordinate with the smallest conditional probability. Reorders `b` in place.
std::vector<double> ordered_cholesky(std::vector<double>& b, const CorrelationMatrix& corr) {
    const int n = corr.size();
    std::vector<double> r(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[static_cast<std::size_t>(i * n + j)] = corr(i, j);
    std::vector<double> l(static_cast<std::size_t>(n * n), 0.0);
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    auto R = [&](int i, int j) -> double& { return r[static_cast<std::size_t>(i * n + j)]; };
    auto L = [&](int i, int j) -> double& { return l[static_cast<std::size_t>(i * n + j)]; };

    for (int i = 0; i < n; ++i) {
        int best = i;
        double best_p = kInfinity;
        for (int j = i; j < n; ++j) {
            double var = R(j, j);
            double shift = 0.0;
            for (int k = 0; k < i; ++k) {
                var -= L(j, k) * L(j, k);
                shift += L(j, k) * y[static_cast<std::size_t>(k)];
            }
            if (!(var > 1e-14)) throw Error(ErrorCode::NotPositiveDefinite, "correlation matrix is singular");
            const double p = normal_cdf((b[static_cast<std::size_t>(j)] - shift) / std::sqrt(var));
            if (p < best_p) {
                best_p = p;
                best = j;
            }
        }
        if (best != i) {
            std::swap(b[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(best)]);
            for (int k = 0; k < n; ++k) std::swap(R(i, k), R(best, k));
            for (int k = 0; k < n; ++k) std::swap(R(k, i), R(k, best));
            for (int k = 0; k < i; ++k) std::swap(L(i, k), L(best, k));
        }
        double diag = R(i, i);
        for (int k = 0; k < i; ++k) diag -= L(i, k) * L(i, k);
        L(i, i) = std::sqrt(diag);
        for (int j = i + 1; j < n; ++j) {
            double s = R(j, i);
            for (int k = 0; k < i; ++k) s -= L(j, k) * L(i, k);
            L(j, i) = s / L(i, i);
        }
        double shift = 0.0;
        for (int k = 0; k < i; ++k) shift += L(i, k) * y[static_cast<std::size_t>(k)];
        const double bi = (b[static_cast<std::size_t>(i)] - shift) / L(i, i);
        const double pi = normal_cdf(bi);
        y[static_cast<std::size_t>(i)] = pi > 1e-300 ? -normal_pdf(bi) / pi : bi;
    }
    return l;
}

}  // namespace

double bivariate_normal_cdf(double a, double b, double rho) {
    if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
    if (a == -kInfinity || b == -kInfinity) return 0.0;
    if (a == kInfinity) return normal_cdf(b);
    if (b == kInfinity) return normal_cdf(a);
    if (!(std::abs(rho) < 1.0))
        throw Error(ErrorCode::NotPositiveDefinite, "bivariate correlation must lie strictly inside (-1, 1)");
    return std::clamp(bvn_upper(-a, -b, rho), 0.0, 1.0);
}

MvnResult mvn_cdf_lattice(std::span<const double> limits, const CorrelationMatrix& corr, const MvnAccuracy& acc) {
    acc.validate();
    const int n = corr.size();
    if (static_cast<int>(limits.size()) != n) throw Error(ErrorCode::InvalidInput, "limit count must match dimension");
    std::vector<double> b(limits.begin(), limits.end());
    for (double& v : b) {
        if (v == -kInfinity) return {0.0, 0.0, false};
        v = std::min(v, kClip);
    }
    const std::vector<double> l = ordered_cholesky(b, corr);
    auto L = [&](int i, int j) { return l[static_cast<std::size_t>(i * n + j)]; };
    const double first = normal_cdf(b[0] / L(0, 0));
    if (n == 1) return {first, 0.0, false};

    const int dims = n - 1;
    const std::vector<int> primes = first_primes(dims);
    std::vector<double> generator(static_cast<std::size_t>(dims));
    for (int d = 0; d < dims; ++d) generator[static_cast<std::size_t>(d)] = std::fmod(std::sqrt(static_cast<double>(primes[static_cast<std::size_t>(d)])), 1.0);

    std::mt19937_64 rng(acc.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> shifts(kLatticeShifts, std::vector<double>(static_cast<std::size_t>(dims)));
    for (auto& shift : shifts)
        for (double& s : shift) s = unit(rng);

    std::vector<double> sums(kLatticeShifts, 0.0);
    std::vector<double> ys(static_cast<std::size_t>(dims));
    auto integrand = [&](const std::vector<double>& w) {
        double e = first;
        double f = e;
        for (int i = 1; i < n; ++i) {
            const double u = std::clamp(w[static_cast<std::size_t>(i - 1)] * e, 1e-300, 1.0 - 1e-16);
            ys[static_cast<std::size_t>(i - 1)] = normal_quantile(u);
            double s = 0.0;
            for (int j = 0; j < i; ++j) s += L(i, j) * ys[static_cast<std::size_t>(j)];
            e = normal_cdf((b[static_cast<std::size_t>(i)] - s) / L(i, i));
            f *= e;
            if (f == 0.0) break;
        }
        return f;
    };

    std::vector<double> w(static_cast<std::size_t>(dims));
    long done = 0;
    long target = kLatticeInitialPoints;
    MvnResult result;
    while (true) {
        for (int k = 0; k < kLatticeShifts; ++k) {
            for (long j = done + 1; j <= target; ++j) {
                for (int d = 0; d < dims; ++d) {
                    const double x = std::fmod(static_cast<double>(j) * generator[static_cast<std::size_t>(d)] + shifts[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)], 1.0);
                    w[static_cast<std::size_t>(d)] = std::abs(2.0 * x - 1.0);  // tent periodization
                }
                sums[static_cast<std::size_t>(k)] += integrand(w);
            }
        }
        done = target;
        double mean = 0.0;
        for (double s : sums) mean += s / static_cast<double>(done);
        mean /= kLatticeShifts;
        double var = 0.0;
        for (double s : sums) {
            const double dev = s / static_cast<double>(done) - mean;
            var += dev * dev;
        }
        var /= static_cast<double>(kLatticeShifts) * (kLatticeShifts - 1);
        result.value = std::clamp(mean, 0.0, 1.0);
        result.error = 3.0 * std::sqrt(var);
        if (result.error <= acc.abs_tol) break;
        if (2 * target * kLatticeShifts > acc.max_points) {
            result.budget_exceeded = true;
            break;
        }
        target *= 2;
    }
    return result;
}

MvnResult mvn_cdf(std::span<const double> limits, const CorrelationMatrix& corr, const MvnAccuracy& acc) {
    if (static_cast<int>(limits.size()) != corr.size())
        throw Error(ErrorCode::InvalidInput, "limit count must match dimension");
    std::vector<int> active;
    for (int j = 0; j < corr.size(); ++j) {
        const double a = limits[static_cast<std::size_t>(j)];
        if (std::isnan(a)) throw Error(ErrorCode::InvalidInput, "NaN integration limit");
        if (a == -kInfinity) return {0.0, 0.0, false};
        if (a != kInfinity) active.push_back(j);
    }
    // Coordinates with +inf limits integrate out exactly.
    std::vector<double> a;
    for (int j : active) a.push_back(limits[static_cast<std::size_t>(j)]);
    const CorrelationMatrix sub = static_cast<int>(active.size()) == corr.size() ? corr : corr.restrict_to(active);
    switch (a.size()) {
    case 0: return {1.0, 0.0, false};
    case 1: return {normal_cdf(a[0]), 0.0, false};
    case 2: return {bivariate_normal_cdf(a[0], a[1], sub(0, 1)), 0.0, false};
    case 3:
        (void)sub.cholesky();  // positive-definiteness check
        return {trivariate_cdf(a, sub), 0.0, false};
    default: return mvn_cdf_lattice(a, sub, acc);
    }
}

MvnResult mvn_cdf(std::span<const double> limits, const CorrelationSpec& corr, const MvnAccuracy& acc) {
    return mvn_cdf(limits, corr.matrix(), acc);
}

MvnResult mvn_cdf_partial(std::span<const double> limits, const CorrelationMatrix& corr, int coordinate,
                          const MvnAccuracy& acc) {
    const int n = corr.size();
    if (static_cast<int>(limits.size()) != n) throw Error(ErrorCode::InvalidInput, "limit count must match dimension");
    if (coordinate < 0 || coordinate >= n) throw Error(ErrorCode::InvalidInput, "coordinate out of range");
    const double pinned = limits[static_cast<std::size_t>(coordinate)];
    if (!std::isfinite(pinned)) return {0.0, 0.0, false};
    const double density = normal_pdf(pinned);
    if (n == 1) return {density, 0.0, false};

    std::vector<int> rest;
    for (int j = 0; j < n; ++j)
        if (j != coordinate) rest.push_back(j);
    std::vector<double> cond_limits;
    std::vector<double> cond_sd;
    for (int j : rest) {
        const double rji = corr(j, coordinate);
        const double var = (1.0 - rji) * (1.0 + rji);
        if (!(var > 1e-14)) throw Error(ErrorCode::NotPositiveDefinite, "degenerate conditional variance");
        const double sd = std::sqrt(var);
        cond_sd.push_back(sd);
        cond_limits.push_back((limits[static_cast<std::size_t>(j)] - rji * pinned) / sd);
    }
    CorrelationMatrix cond(n - 1);
    for (int a = 0; a < n - 1; ++a)
        for (int b = a + 1; b < n - 1; ++b) {
            const int ja = rest[static_cast<std::size_t>(a)];
            const int jb = rest[static_cast<std::size_t>(b)];
            const double c = (corr(ja, jb) - corr(ja, coordinate) * corr(jb, coordinate)) /
                             (cond_sd[static_cast<std::size_t>(a)] * cond_sd[static_cast<std::size_t>(b)]);
            cond.set(a, b, std::clamp(c, -1.0, 1.0));
        }
    MvnResult inner = mvn_cdf(cond_limits, cond, acc);
    inner.value *= density;
    inner.error *= density;
    return inner;
}

MvnResult mvn_cdf_partial(std::span<const double> limits, const CorrelationSpec& corr, int coordinate,
                          const MvnAccuracy& acc) {
    return mvn_cdf_partial(limits, corr.matrix(), coordinate, acc);
}

}  // namespace putbond
