#pragma once

// Numerical checks of the comparison inequalities for minimal surfaces in R³.
// Every builtin or loaded mesh is taken to sit in Euclidean space, so the
// ambient curvature bound K_N = 0 ≤ −w''/w reduces to w'' ≤ 0.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "warpgeom/dgeom.hpp"
#include "warpgeom/modelspace.hpp"
#include "warpgeom/sparse.hpp"
#include "warpgeom/surfaces.hpp"

namespace warpgeom {

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

/// Where the numbers of a check came from.
struct Provenance {
    std::string mesh_label;
    std::uint64_t mesh_fingerprint = 0;
    std::size_t vertices = 0;
    std::size_t faces = 0;
    std::string model;
    double quad_abs_tol = 0.0;
    double quad_rel_tol = 0.0;
    double solver_rel_tol = 0.0;
};

/// A named hypothesis of a theorem, sampled numerically.
struct Hypothesis {
    std::string name;
    bool holds = false;
    std::string detail;
};

/// One inequality "lhs ≤ rhs". Equalities are stored as a deviation
/// |a − b| ≤ 0. The check passes when margin = rhs − lhs ≥ −tolerance.
struct Check {
    std::string id;
    std::string theorem;
    std::string inequality;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    std::optional<double> at;  // radius of the worst case, if aggregated
    std::vector<Hypothesis> hypotheses;
    std::map<std::string, double> values;
    std::string note;
    Provenance provenance;
};

struct VerificationReport {
    std::vector<Check> checks;
    std::vector<std::string> not_testable;

    void append(std::vector<Check> more);
    std::size_t count(Verdict v) const;
    /// True if any check failed, or (strict) any check is inconclusive.
    bool failed(bool strict) const;
};

struct HarnessOptions {
    QuadratureConfig quad;
    SolverConfig solver;
    int threads = 0;                // ≤ 0: hardware concurrency
    double mono_slack = 0.01;       // relative slack for monotonicity
    double quotient_tol = 0.01;     // relative, quotient comparisons
    double capacity_tol = 0.03;     // relative, capacity sandwiches
    double exit_tol = 0.02;         // relative to E^w_R(0)
    double tail_tol = 0.02;         // |flux − volume| quotient gap at the tail
    double tail_stability = 0.01;   // relative change allowed over the top tenth
    double eigen_tol = 0.02;        // relative, λ₁ trend and lower bound
    int hypothesis_samples = 256;
};

// Hypothesis gates, sampled on (0, r_max].
Hypothesis gate_curvature_bound(const ModelSpace& model, double r_max, int samples = 256);
Hypothesis gate_balanced_below(const ModelSpace& model, double r_max, const QuadratureConfig& q = {},
                               int samples = 256);
Hypothesis gate_w_prime(const ModelSpace& model, double r_max, bool strict, int samples = 256);
/// −w''/w ≤ 0 on [from, to].
Hypothesis gate_nonpositive_model_curvature(const ModelSpace& model, double from, double to, int samples = 256);
/// The pole lies on the surface (within one typical edge length).
Hypothesis gate_pole_on_surface(const TriMesh& mesh);

Provenance make_provenance(const TriMesh* mesh, const ModelSpace* model, const HarnessOptions& opts);

struct QuotientCurve {
    std::vector<double> radii;
    std::vector<double> volume;        // Vol(D_R) (restricted to the end if masked)
    std::vector<double> flux;          // J_r(R)
    std::vector<double> model_volume;  // Vol(B^w_R)
    std::vector<double> model_flux;    // Vol(S^w_R)
    std::vector<double> volume_quotient;
    std::vector<double> flux_quotient;
    bool masked = false;
    std::vector<Hypothesis> hypotheses;  // empty for synthetic curves
    Provenance provenance;

    /// Grid maxima: the reported Vol_w and Flux_w estimates.
    double volume_sup() const;
    double flux_sup() const;
    void validate() const;
};

/// `face_mask` (optional) restricts volume and flux to selected faces, used
/// for end-restricted quantities.
QuotientCurve quotient_curves(const TriMesh& mesh, const ModelSpace& model, const RadiusGrid& grid,
                              const HarnessOptions& opts = {}, std::span<const char> face_mask = {});

/// Volume quotient ≤ flux quotient and monotonicity of both.
std::vector<Check> verify_isoperimetric(const QuotientCurve& curve, const HarnessOptions& opts = {});

/// Euclidean identity Vol(D_R)/Vol(B_R) = J_r(R)/J^w_r(R) for the flat model.
std::vector<Check> verify_flux_eq_volume(const QuotientCurve& curve, const HarnessOptions& opts = {});

std::vector<Check> verify_capacity_sandwich(const TriMesh& mesh, const ModelSpace& model, double rho, double R,
                                            const HarnessOptions& opts = {});

std::vector<Check> verify_euclidean_sandwich(const TriMesh& mesh, double rho, double R,
                                             const HarnessOptions& opts = {});

std::vector<Check> exit_time_comparison(const TriMesh& mesh, const ModelSpace& model, double R,
                                        const HarnessOptions& opts = {});

struct EndsReport {
    double R = 0.0;
    double t = 0.0;
    double coefficient = 0.0;       // m ∫_0^t w^{m−1} / t^m
    double volume_quotient = 0.0;   // Vol(D_t)/Vol(B^w_t)
    double bound = 0.0;             // displayed formula, constant 2^m
    double bound_unit_constant = 0.0;  // same with the footnote's C_m = 1
    std::optional<double> asymptotic_bound;  // 2^m C_w Vol_w
    std::optional<double> asymptotic_bound_unit_constant;
    double c_w = 0.0;
    double vol_w = 0.0;
    EndsCount ends;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<Check> checks;
};

/// `vol_w_grid` sets the radii used for the Vol_w grid maximum; an empty grid
/// means 20 radii on [t/20, t].
EndsReport ends_bound(const TriMesh& mesh, const ModelSpace& model, double R, double t,
                      const HarnessOptions& opts = {}, const RadiusGrid& vol_w_grid = {});

struct EndFactor {
    std::size_t end_index = 0;
    double flux_w = 0.0;
    double vol_w = 0.0;
    double factor = 0.0;  // Flux_w(V) / Vol_w(V)
};

struct ToneReport {
    LimsupEstimate model_limit;
    CheegerBound cheeger;
    Parabolicity parabolicity = Parabolicity::Inconclusive;
    std::vector<EndFactor> end_factors;
    std::optional<double> factor;  // minimum over ends; 1 without a mesh
    double upper = kInfinity;
    double lower = 0.0;
    std::vector<double> radii;
    std::vector<double> lambda;  // discrete λ₁(D_R)
    std::vector<Check> checks;
};

/// Limit grid used for the model-side limsup and sup estimates.
RadiusGrid default_limit_grid();

/// `mesh` may be null for a model-only report.
ToneReport tone_report(const TriMesh* mesh, const ModelSpace& model, double R0, const RadiusGrid& grid,
                       const HarnessOptions& opts = {}, const RadiusGrid& limit_grid = default_limit_grid());

/// Flux_w = Vol_w when the volume quotient has settled.
Check volume_flux_tail(const QuotientCurve& curve, const HarnessOptions& opts = {});

struct SuiteConfig {
    RadiusGrid grid;      // quotient curve radii
    double rho = 1.0;     // annulus for capacity checks
    double R = 2.0;       // ball for exit time and annulus outer radius
    double ends_R = 1.0;
    double ends_t = 2.0;
    double R0 = 1.0;      // end decomposition radius for the tone report
    RadiusGrid tone_grid;  // λ₁(D_R) radii; empty skips the discrete trend
};

struct SuiteResult {
    QuotientCurve curve;
    EndsReport ends;
    ToneReport tone;
    VerificationReport report;
};

/// Every check the harness knows, in a fixed order.
SuiteResult run_suite(const TriMesh& mesh, const ModelSpace& model, const SuiteConfig& cfg,
                      const HarnessOptions& opts = {});

}  // namespace warpgeom
