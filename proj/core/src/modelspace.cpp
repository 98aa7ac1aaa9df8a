#include "warpgeom/modelspace.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "warpgeom/error.hpp"

namespace warpgeom {

namespace {

constexpr double kEtaSeriesCutoff = 1e-8;
constexpr double kClosedFormSmallArg = 0.5;
constexpr double kBalanceSlack = 1e-12;
constexpr double kDivergenceGrowth = 0.01;

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

double parse_real(const std::string& text, const char* what) {
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v))
        throw PreconditionError(std::string("invalid ") + what + ": '" + text + "'");
    return v;
}

// ∫_0^X sinh^n (hyperbolic) or sin^n, by the standard reduction formula.
double reduced_power_integral(int n, double X, bool hyperbolic) {
    if (n == 0) return X;
    double prev2 = X;  // J_0
    double half = hyperbolic ? std::sinh(0.5 * X) : std::sin(0.5 * X);
    double prev1 = 2.0 * half * half;  // J_1 = cosh X − 1 or 1 − cos X
    if (n == 1) return prev1;
    const double s = hyperbolic ? std::sinh(X) : std::sin(X);
    const double c = hyperbolic ? std::cosh(X) : std::cos(X);
    double J[2] = {prev2, prev1};
    for (int j = 2; j <= n; ++j) {
        const double lead = std::pow(s, j - 1) * c / j;
        const double rest = static_cast<double>(j - 1) / j * J[j % 2];
        J[j % 2] = hyperbolic ? lead - rest : -lead + rest;
    }
    return J[n % 2];
}

// −ln tanh(x/2), stable for large x.
double log_coth_half(double x) { return 2.0 * std::atanh(std::exp(-x)); }

struct TopTenth {
    double reported;
    double change;
    bool increasing;
};

TopTenth top_tenth(const std::vector<double>& t, const std::vector<double>& v) {
    const double cut = t.back() - 0.1 * (t.back() - t.front());
    std::size_t first = t.size() - 1;
    while (first > 0 && t[first - 1] >= cut) --first;
    double best = v[first];
    for (std::size_t i = first; i < v.size(); ++i) best = std::max(best, v[i]);
    const double last = v.back();
    double change = 0.0;
    if (last != 0.0) change = (last - v[first]) / std::abs(last);
    bool increasing = v.size() >= 2 && v[v.size() - 1] > v[v.size() - 2];
    return {best, change, increasing};
}

}  // namespace

std::string_view to_string(Parabolicity p) {
    switch (p) {
        case Parabolicity::Parabolic: return "parabolic";
        case Parabolicity::Hyperbolic: return "hyperbolic";
        case Parabolicity::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

// ------------------------------------------------------------------ Warping

Warping Warping::space_form(double b) {
    if (!std::isfinite(b)) throw PreconditionError("space-form curvature must be finite");
    Warping w;
    w.b_ = b;
    w.k_ = std::sqrt(std::abs(b));
    w.lambda_ = b > 0.0 ? std::numbers::pi / w.k_ : kInfinity;
    return w;
}

Warping Warping::custom(wexpr::Expr expr, std::optional<double> domain_bound) {
    Warping w;
    w.expr_ = expr;
    w.d1_ = wexpr::differentiate(expr);
    w.d2_ = wexpr::differentiate(*w.d1_);
    double w0 = 0.0, dw0 = 0.0;
    try {
        w0 = wexpr::evaluate(expr, 0.0);
        dw0 = wexpr::evaluate(*w.d1_, 0.0);
    } catch (const DomainError& e) {
        throw PreconditionError(std::string("warping function not defined at r = 0: ") + e.what());
    }
    if (std::abs(w0) > 1e-8) throw PreconditionError("warping function must satisfy w(0) = 0, got " + std::to_string(w0));
    if (std::abs(dw0 - 1.0) > 1e-8)
        throw PreconditionError("warping function must satisfy w'(0) = 1, got " + std::to_string(dw0));

    auto positive = [&](double r) {
        try {
            double v = wexpr::evaluate(expr, r);
            return !std::isnan(v) && v > 0.0;
        } catch (const DomainError&) {
            return false;
        }
    };
    if (domain_bound) {
        if (!(*domain_bound > 0.0)) throw PreconditionError("domain bound must be positive");
        w.lambda_ = *domain_bound;
    } else {
        constexpr double kStep = 0.025;
        constexpr int kSamples = 4000;
        double good = 0.0;
        for (int i = 1; i <= kSamples; ++i) {
            const double r = i * kStep;
            if (!positive(r)) {
                double lo = good, hi = r;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (positive(mid) ? lo : hi) = mid;
                }
                if (!(hi > 0.0)) throw PreconditionError("warping function is not positive near 0");
                w.lambda_ = hi;
                return w;
            }
            good = r;
        }
    }
    const double probe_end = std::isfinite(w.lambda_) ? w.lambda_ : 100.0;
    for (int i = 1; i < 400; ++i) {
        const double r = probe_end * i / 400.0;
        if (!positive(r))
            throw PreconditionError("warping function is not positive at r = " + std::to_string(r));
    }
    return w;
}

Warping Warping::from_text(std::string_view text) {
    std::string s = trim(text);
    if (s.size() >= 2 && s[0] == 'b') {
        std::size_t i = 1;
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i < s.size() && s[i] == '=') return space_form(parse_real(trim(s.substr(i + 1)), "curvature"));
    }
    return custom(wexpr::parse(s));
}

double Warping::value(double r) const {
    if (expr_) return wexpr::evaluate(*expr_, r);
    if (b_ == 0.0) return r;
    if (b_ < 0.0) return std::sinh(k_ * r) / k_;
    return std::sin(k_ * r) / k_;
}

double Warping::first(double r) const {
    if (expr_) return wexpr::evaluate(*d1_, r);
    if (b_ == 0.0) return 1.0;
    if (b_ < 0.0) return std::cosh(k_ * r);
    return std::cos(k_ * r);
}

double Warping::second(double r) const {
    if (expr_) return wexpr::evaluate(*d2_, r);
    if (b_ == 0.0) return 0.0;
    if (b_ < 0.0) return k_ * std::sinh(k_ * r);
    return -k_ * std::sin(k_ * r);
}

std::string Warping::describe() const {
    if (expr_) return "w(r) = " + wexpr::print(*expr_);
    std::ostringstream os;
    os.precision(17);
    os << "b=" << b_;
    return os.str();
}

// --------------------------------------------------------------- RadiusGrid

RadiusGrid RadiusGrid::linspace(double a, double b, int n) {
    if (n < 1) throw PreconditionError("radius grid needs at least one point");
    RadiusGrid g;
    g.radii.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        g.radii.push_back(a);
        return g;
    }
    for (int i = 0; i < n; ++i) g.radii.push_back(i == n - 1 ? b : a + (b - a) * i / (n - 1));
    return g;
}

RadiusGrid RadiusGrid::parse(std::string_view spec) {
    std::string s = trim(spec);
    auto c1 = s.find(':');
    auto c2 = c1 == std::string::npos ? std::string::npos : s.find(':', c1 + 1);
    if (c2 == std::string::npos) throw PreconditionError("radius grid must look like a:b:n, got '" + s + "'");
    double a = parse_real(trim(s.substr(0, c1)), "grid start");
    double b = parse_real(trim(s.substr(c1 + 1, c2 - c1 - 1)), "grid end");
    double n = parse_real(trim(s.substr(c2 + 1)), "grid count");
    if (n < 1 || n != std::floor(n)) throw PreconditionError("grid count must be a positive integer");
    RadiusGrid g = linspace(a, b, static_cast<int>(n));
    g.validate();
    return g;
}

void RadiusGrid::validate(double lo, double hi) const {
    if (radii.empty()) throw PreconditionError("radius grid is empty");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > lo) || !(radii[i] < hi))
            throw PreconditionError("grid radius " + std::to_string(radii[i]) + " outside (" + std::to_string(lo) +
                                    ", " + std::to_string(hi) + ")");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw PreconditionError("radius grid must be strictly increasing");
    }
}

// --------------------------------------------------------------- ModelSpace

ModelSpace::ModelSpace(int dim, Warping warp) : m_(dim), warp_(std::move(warp)) {
    if (dim < 2) throw PreconditionError("model dimension must be at least 2");
    v0_ = 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

std::string ModelSpace::describe() const { return "M^" + std::to_string(m_) + "_w, " + warp_.describe(); }

void ModelSpace::require_in_domain(double r, bool allow_zero, const char* op) const {
    const bool low_ok = allow_zero ? r >= 0.0 : r > 0.0;
    if (!low_ok || !(r < warp_.domain_bound()) || !std::isfinite(r))
        throw DomainError(std::string(op) + ": radius " + std::to_string(r) + " outside " +
                          (allow_zero ? "[0, " : "(0, ") + std::to_string(warp_.domain_bound()) + ")");
}

double ModelSpace::eta(double r) const {
    require_in_domain(r, false, "eta");
    if (r < kEtaSeriesCutoff) return 1.0 / r + 0.5 * warp_.second(0.0);
    return warp_.first(r) / warp_.value(r);
}

double ModelSpace::radial_curvature(double r) const {
    if (r <= 0.0) return -warp_.second(kEtaSeriesCutoff) / warp_.value(kEtaSeriesCutoff);
    return -warp_.second(r) / warp_.value(r);
}

double ModelSpace::vol_sphere(double r) const {
    require_in_domain(r, true, "vol_sphere");
    return v0_ * std::pow(warp_.value(r), m_ - 1);
}

double ModelSpace::power_integral(double r, const QuadratureConfig& q) const {
    require_in_domain(r, true, "vol_ball");
    if (r == 0.0) return 0.0;
    const int n = m_ - 1;
    if (warp_.is_space_form()) {
        if (warp_.b_ == 0.0) return std::pow(r, m_) / m_;
        const double X = warp_.k_ * r;
        if (X >= kClosedFormSmallArg)
            return reduced_power_integral(n, X, warp_.b_ < 0.0) / std::pow(warp_.k_, m_);
    }
    return integrate([&](double t) { return std::pow(warp_.value(t), n); }, 0.0, r, q).value;
}

double ModelSpace::vol_ball(double r, const QuadratureConfig& q) const { return v0_ * power_integral(r, q); }

double ModelSpace::iso_quotient(double r, const QuadratureConfig& q) const {
    require_in_domain(r, true, "iso_quotient");
    if (r == 0.0) return 0.0;
    if (warp_.is_space_form() && warp_.b_ == 0.0) return r / m_;
    return power_integral(r, q) / std::pow(warp_.value(r), m_ - 1);
}

double ModelSpace::inverse_power_integral(double a, double b, const QuadratureConfig& q) const {
    require_in_domain(a, false, "capacity");
    require_in_domain(b, false, "capacity");
    if (a == b) return 0.0;
    if (a > b) return -inverse_power_integral(b, a, q);
    const int n = m_ - 1;
    if (warp_.is_space_form()) {
        const double k = warp_.k_;
        if (warp_.b_ == 0.0) {
            if (n == 1) return std::log(b / a);
            return (std::pow(a, 1 - n) - std::pow(b, 1 - n)) / (n - 1);
        }
        if (warp_.b_ < 0.0) {
            if (n == 1) return log_coth_half(k * a) - log_coth_half(k * b);
            if (n == 2) return 2.0 * k * (1.0 / std::expm1(2.0 * k * a) - 1.0 / std::expm1(2.0 * k * b));
        } else {
            if (n == 1) return std::log(std::tan(0.5 * k * b)) - std::log(std::tan(0.5 * k * a));
            if (n == 2) return k * (1.0 / std::tan(k * a) - 1.0 / std::tan(k * b));
        }
    }
    return integrate([&](double s) { return std::pow(warp_.value(s), -n); }, a, b, q).value;
}

double ModelSpace::inverse_power_tail(double a, const QuadratureConfig& q) const {
    require_in_domain(a, false, "tail integral");
    if (std::isfinite(warp_.domain_bound()))
        throw PreconditionError("improper integrals need a complete model (Λ = ∞)");
    const int n = m_ - 1;
    if (warp_.is_space_form()) {
        const double k = warp_.k_;
        if (warp_.b_ == 0.0) return n == 1 ? kInfinity : std::pow(a, 1 - n) / (n - 1);
        if (n == 1) return log_coth_half(k * a);
        if (n == 2) return 2.0 * k / std::expm1(2.0 * k * a);
    }
    return integrate_to_infinity([&](double s) { return std::pow(warp_.value(s), -n); }, a, q).value;
}

double ModelSpace::capacity(double rho, double R, const QuadratureConfig& q) const {
    if (!(rho > 0.0) || !(rho < R))
        throw PreconditionError("capacity needs 0 < rho < R, got rho = " + std::to_string(rho) +
                                ", R = " + std::to_string(R));
    return v0_ / inverse_power_integral(rho, R, q);
}

double ModelSpace::potential(double rho, double R, double t, const QuadratureConfig& q) const {
    if (!(rho > 0.0) || !(rho < R)) throw PreconditionError("potential needs 0 < rho < R");
    if (t < rho || t > R) throw DomainError("potential: t = " + std::to_string(t) + " outside [rho, R]");
    if (t == rho) return 0.0;
    if (t == R) return 1.0;
    const double v = inverse_power_integral(rho, t, q) / inverse_power_integral(rho, R, q);
    return std::clamp(v, 0.0, 1.0);
}

double ModelSpace::mean_exit_time(double R, double r, const QuadratureConfig& q) const {
    require_in_domain(R, true, "mean_exit_time");
    if (r < 0.0 || r > R) throw DomainError("mean_exit_time: r = " + std::to_string(r) + " outside [0, R]");
    if (r == R) return 0.0;
    if (warp_.is_space_form()) {
        const double k = warp_.k_;
        if (warp_.b_ == 0.0) return (R * R - r * r) / (2.0 * m_);
        if (m_ == 2 && warp_.b_ < 0.0)
            return 2.0 / (k * k) * (std::log(std::cosh(0.5 * k * R)) - std::log(std::cosh(0.5 * k * r)));
        if (m_ == 2 && warp_.b_ > 0.0)
            return 2.0 / (k * k) * (std::log(std::cos(0.5 * k * r)) - std::log(std::cos(0.5 * k * R)));
    }
    return integrate([&](double t) { return iso_quotient(t, q); }, r, R, q).value;
}

BalanceReport ModelSpace::balance_check(const RadiusGrid& grid, const QuadratureConfig& q) const {
    grid.validate(0.0, warp_.domain_bound());
    BalanceReport rep;
    const double lower = 1.0 / m_;
    const double upper = 1.0 / (m_ - 1);
    for (double r : grid.radii) {
        const double p = iso_quotient(r, q) * eta(r);
        rep.products.push_back(p);
        if (p - lower < rep.worst_below_margin) {
            rep.worst_below_margin = p - lower;
            rep.worst_below_radius = r;
        }
        if (upper - p < rep.worst_above_margin) {
            rep.worst_above_margin = upper - p;
            rep.worst_above_radius = r;
        }
    }
    rep.below = rep.worst_below_margin >= -kBalanceSlack;
    rep.above = rep.worst_above_margin >= -kBalanceSlack;
    return rep;
}

ParabolicityReport ModelSpace::parabolicity(const QuadratureConfig& q) const {
    if (std::isfinite(warp_.domain_bound()))
        throw PreconditionError("parabolicity test needs a complete model (Λ = ∞)");
    ParabolicityReport rep;
    rep.ladder.push_back(1.0);
    for (double T = 10.0; T <= q.tail_max * (1.0 + 1e-12); T *= 10.0) rep.ladder.push_back(T);
    for (std::size_t k = 1; k < rep.ladder.size(); ++k)
        rep.increments.push_back(inverse_power_integral(rep.ladder[k - 1], rep.ladder[k], q) / v0_);

    double log_sum = 0.0;
    bool zero_ratio = false;
    for (std::size_t k = 1; k < rep.increments.size(); ++k) {
        const double prev = rep.increments[k - 1];
        const double ratio = prev > 0.0 ? rep.increments[k] / prev : 0.0;
        rep.ratios.push_back(ratio);
        if (ratio <= 0.0)
            zero_ratio = true;
        else
            log_sum += std::log(ratio);
    }
    if (rep.ratios.empty()) {
        rep.verdict = Parabolicity::Inconclusive;
        return rep;
    }
    rep.fitted_ratio = zero_ratio ? 0.0 : std::exp(log_sum / static_cast<double>(rep.ratios.size()));

    // j·d_j nondecreasing: the increments decay no faster than 1/j
    bool slower_than_harmonic = true;
    for (std::size_t k = 1; k < rep.increments.size(); ++k) {
        const double j = static_cast<double>(k);
        if (rep.increments[k] * (j + 1.0) < rep.increments[k - 1] * j * (1.0 - 1e-9)) slower_than_harmonic = false;
    }
    if (rep.fitted_ratio < 0.5)
        rep.verdict = Parabolicity::Hyperbolic;
    else if (slower_than_harmonic)
        rep.verdict = Parabolicity::Parabolic;
    else
        rep.verdict = Parabolicity::Inconclusive;
    return rep;
}

LimsupEstimate ModelSpace::tone_upper_limit(const RadiusGrid& grid, const QuadratureConfig& q) const {
    grid.validate(0.0, warp_.domain_bound());
    LimsupEstimate est;
    est.t = grid.radii;
    const ParabolicityReport par = parabolicity(q);
    if (par.verdict == Parabolicity::Parabolic) {
        est.values.assign(grid.size(), 0.0);
        est.reported = 0.0;
        est.note = "parabolic model: the tail integral diverges and the tone quantity is identically 0";
        return est;
    }
    if (par.verdict == Parabolicity::Inconclusive)
        est.warnings.push_back("parabolicity probe inconclusive; tail integrals evaluated anyway");
    for (double t : grid.radii) {
        const double tail = inverse_power_tail(t, q);
        est.values.push_back(std::isfinite(tail) ? 1.0 / (power_integral(t, q) * tail) : 0.0);
    }
    TopTenth top = top_tenth(est.t, est.values);
    est.reported = top.reported;
    est.top_relative_change = top.change;
    est.still_increasing = top.increasing;
    est.divergent = top.change > kDivergenceGrowth;
    return est;
}

CheegerBound ModelSpace::cheeger_bound(const RadiusGrid& grid, const QuadratureConfig& q) const {
    grid.validate(0.0, warp_.domain_bound());
    std::vector<double> qs;
    for (double t : grid.radii) qs.push_back(iso_quotient(t, q));
    TopTenth top = top_tenth(grid.radii, qs);
    CheegerBound cb;
    cb.still_increasing = top.increasing;
    cb.unbounded = top.change > kDivergenceGrowth;
    if (cb.unbounded) {
        cb.L = kInfinity;
        cb.lower_bound = 0.0;
    } else {
        cb.L = *std::max_element(qs.begin(), qs.end());
        cb.lower_bound = 1.0 / (4.0 * cb.L * cb.L);
    }
    return cb;
}

LimsupEstimate ModelSpace::ends_coefficient(const RadiusGrid& grid, const QuadratureConfig& q) const {
    grid.validate(0.0, warp_.domain_bound());
    LimsupEstimate est;
    est.t = grid.radii;
    for (double t : grid.radii) {
        if (warp_.first(t) < 0.0)
            est.warnings.push_back("w' < 0 at t = " + std::to_string(t) + "; ends bound hypothesis fails");
        est.values.push_back(m_ * power_integral(t, q) / std::pow(t, m_));
    }
    TopTenth top = top_tenth(est.t, est.values);
    est.reported = top.reported;
    est.top_relative_change = top.change;
    est.still_increasing = top.increasing;
    est.divergent = top.change > kDivergenceGrowth;
    return est;
}

bool ModelSpace::check_q_linear_bound(const RadiusGrid& grid, const QuadratureConfig& q) const {
    grid.validate(0.0, warp_.domain_bound());
    for (double s : grid.radii)
        if (iso_quotient(s, q) > s + 1e-12) return false;
    return true;
}

}  // namespace warpgeom
