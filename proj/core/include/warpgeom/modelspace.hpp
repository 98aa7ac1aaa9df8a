#pragma once

// Rotationally symmetric model spaces M^m_w = [0, Λ) ×_w S^{m-1} with metric
// dr² + w(r)² g_{S^{m-1}}. Space forms (w = r, sinh(kr)/k, sin(kr)/k) use
// closed forms; parsed warping functions always go through quadrature.

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "warpgeom/quadrature.hpp"
#include "warpgeom/wexpr.hpp"

namespace warpgeom {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class Warping {
public:
    /// Constant-curvature warp for sectional curvature b.
    static Warping space_form(double b);

    /// Parsed warp. Validates w(0) = 0 and w'(0) = 1 to 1e-8. Λ is located as
    /// the first point where w stops being positive, unless given.
    static Warping custom(wexpr::Expr w, std::optional<double> domain_bound = std::nullopt);

    /// Accepts "b=<real>" for a space form, otherwise an expression in r.
    static Warping from_text(std::string_view text);

    bool is_space_form() const { return !expr_.has_value(); }
    /// Curvature b of a space form (0 for custom warps).
    double curvature() const { return b_; }
    const std::optional<wexpr::Expr>& expression() const { return expr_; }

    double value(double r) const;
    double first(double r) const;
    double second(double r) const;

    /// Λ; +∞ for complete models.
    double domain_bound() const { return lambda_; }
    std::string describe() const;

private:
    Warping() = default;

    double b_ = 0.0;
    double k_ = 0.0;  // sqrt|b|
    std::optional<wexpr::Expr> expr_;
    std::optional<wexpr::Expr> d1_;
    std::optional<wexpr::Expr> d2_;
    double lambda_ = kInfinity;

    friend class ModelSpace;
};

/// Strictly increasing radii, parsed from "a:b:n" (inclusive linspace).
struct RadiusGrid {
    std::vector<double> radii;

    static RadiusGrid linspace(double a, double b, int n);
    static RadiusGrid parse(std::string_view spec);
    /// Throws PreconditionError unless nonempty, strictly increasing and
    /// inside (lo, hi).
    void validate(double lo = 0.0, double hi = kInfinity) const;
    bool empty() const { return radii.empty(); }
    std::size_t size() const { return radii.size(); }
};

struct BalanceReport {
    bool below = true;
    bool above = true;
    double worst_below_margin = kInfinity;  // min of q·η − 1/m
    double worst_below_radius = 0.0;
    double worst_above_margin = kInfinity;  // min of 1/(m−1) − q·η
    double worst_above_radius = 0.0;
    std::vector<double> products;  // q·η on the grid
};

enum class Parabolicity { Parabolic, Hyperbolic, Inconclusive };
std::string_view to_string(Parabolicity p);

struct ParabolicityReport {
    Parabolicity verdict = Parabolicity::Inconclusive;
    std::vector<double> ladder;      // T_0 = 1, T_k = 10^k
    std::vector<double> increments;  // ∫_{T_{k-1}}^{T_k} ds / Vol(S_s)
    std::vector<double> ratios;      // increments[k] / increments[k-1]
    double fitted_ratio = 0.0;       // geometric mean of the ratios
};

/// Finite-grid estimate of a limsup: the maximum over the top tenth of the
/// grid range, plus a divergence diagnostic.
struct LimsupEstimate {
    std::vector<double> t;
    std::vector<double> values;
    double reported = 0.0;
    bool divergent = false;          // values still growing by > 1% across the top tenth
    bool still_increasing = false;   // last sample exceeds the one before it
    double top_relative_change = 0.0;
    std::string note = "estimate at finite t, not a proven limit";
    std::vector<std::string> warnings;
};

struct CheegerBound {
    double L = kInfinity;
    bool unbounded = true;
    bool still_increasing = false;
    double lower_bound = 0.0;  // 1/(4L²), or 0 when L is unbounded
};

class ModelSpace {
public:
    ModelSpace(int dim, Warping warp);

    int dim() const { return m_; }
    const Warping& warp() const { return warp_; }
    /// V0 = 2π^{m/2}/Γ(m/2), the measure of the unit (m−1)-sphere.
    double fiber_measure() const { return v0_; }
    /// Volume of the Euclidean unit m-ball, V0/m.
    double unit_ball_volume() const { return v0_ / m_; }

    /// Mean curvature of the distance sphere, w'/w.
    double eta(double r) const;
    double vol_sphere(double r) const;
    double vol_ball(double r, const QuadratureConfig& q = {}) const;
    /// q_w(r) = Vol(B_r)/Vol(S_r); q_w(0) = 0.
    double iso_quotient(double r, const QuadratureConfig& q = {}) const;
    /// Radial sectional curvature −w''/w.
    double radial_curvature(double r) const;

    BalanceReport balance_check(const RadiusGrid& grid, const QuadratureConfig& q = {}) const;

    /// Cap(A_{ρ,R}) = (∫_ρ^R ds / Vol(S_s))^{-1}.
    double capacity(double rho, double R, const QuadratureConfig& q = {}) const;
    /// Radial harmonic potential with Ψ(ρ) = 0, Ψ(R) = 1.
    double potential(double rho, double R, double t, const QuadratureConfig& q = {}) const;
    /// E_R(r) = ∫_r^R q_w(t) dt.
    double mean_exit_time(double R, double r, const QuadratureConfig& q = {}) const;

    ParabolicityReport parabolicity(const QuadratureConfig& q = {}) const;

    /// Samples 1/(Vol(B_t) ∫_t^∞ ds/Vol(S_s)); identically 0 for parabolic models.
    LimsupEstimate tone_upper_limit(const RadiusGrid& grid, const QuadratureConfig& q = {}) const;
    CheegerBound cheeger_bound(const RadiusGrid& grid, const QuadratureConfig& q = {}) const;
    /// Samples m ∫_0^t w^{m−1} / t^m.
    LimsupEstimate ends_coefficient(const RadiusGrid& grid, const QuadratureConfig& q = {}) const;
    /// q_w(s) ≤ s on the grid.
    bool check_q_linear_bound(const RadiusGrid& grid, const QuadratureConfig& q = {}) const;

    /// ∫_0^r w^{m−1}.
    double power_integral(double r, const QuadratureConfig& q = {}) const;
    /// ∫_a^b w^{1−m}.
    double inverse_power_integral(double a, double b, const QuadratureConfig& q = {}) const;
    /// ∫_a^∞ w^{1−m}; +∞ when the tail diverges in closed form.
    double inverse_power_tail(double a, const QuadratureConfig& q = {}) const;

    std::string describe() const;

private:
    void require_in_domain(double r, bool allow_zero, const char* op) const;

    int m_;
    Warping warp_;
    double v0_;
};

}  // namespace warpgeom
