#include "warpgeom/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace warpgeom {

using nlohmann::json;

namespace {

json numbers(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number_json(x));
    return a;
}

std::string hex(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

json number_json(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json to_json(const Provenance& p) {
    return json{{"mesh", p.mesh_label},
                {"mesh_fingerprint", hex(p.mesh_fingerprint)},
                {"vertices", p.vertices},
                {"faces", p.faces},
                {"model", p.model},
                {"quadrature", {{"abs_tol", p.quad_abs_tol}, {"rel_tol", p.quad_rel_tol}}},
                {"solver_rel_tol", p.solver_rel_tol}};
}

json to_json(const Hypothesis& h) { return json{{"name", h.name}, {"holds", h.holds}, {"detail", h.detail}}; }

json to_json(const Check& c) {
    json j{{"id", c.id},
           {"theorem", c.theorem},
           {"inequality", c.inequality},
           {"lhs", number_json(c.lhs)},
           {"rhs", number_json(c.rhs)},
           {"margin", number_json(c.margin)},
           {"tolerance", number_json(c.tolerance)},
           {"verdict", to_string(c.verdict)},
           {"provenance", to_json(c.provenance)}};
    j["at"] = c.at ? number_json(*c.at) : json(nullptr);
    json hs = json::array();
    for (const auto& h : c.hypotheses) hs.push_back(to_json(h));
    j["hypotheses"] = hs;
    json vals = json::object();
    for (const auto& [k, v] : c.values) vals[k] = number_json(v);
    j["values"] = vals;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

json to_json(const VerificationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return json{{"checks", checks},
                {"not_testable", r.not_testable},
                {"summary",
                 {{"pass", r.count(Verdict::Pass)},
                  {"fail", r.count(Verdict::Fail)},
                  {"inconclusive", r.count(Verdict::Inconclusive)}}}};
}

json to_json(const QuotientCurve& c) {
    json hs = json::array();
    for (const auto& h : c.hypotheses) hs.push_back(to_json(h));
    return json{{"radii", numbers(c.radii)},
                {"volume", numbers(c.volume)},
                {"flux", numbers(c.flux)},
                {"model_volume", numbers(c.model_volume)},
                {"model_flux", numbers(c.model_flux)},
                {"volume_quotient", numbers(c.volume_quotient)},
                {"flux_quotient", numbers(c.flux_quotient)},
                {"volume_sup", number_json(c.volume_sup())},
                {"flux_sup", number_json(c.flux_sup())},
                {"masked", c.masked},
                {"hypotheses", hs},
                {"provenance", to_json(c.provenance)}};
}

json to_json(const EndsCount& e) {
    json sizes = json::array();
    for (const auto& v : e.ends) sizes.push_back(v.size());
    return json{{"count", e.count},
                {"end_vertex_counts", sizes},
                {"bounded_components", e.bounded_components},
                {"warnings", e.warnings}};
}

json to_json(const EndsReport& e) {
    json checks = json::array();
    for (const auto& c : e.checks) checks.push_back(to_json(c));
    auto opt = [](const std::optional<double>& v) { return v ? number_json(*v) : json(nullptr); };
    return json{{"R", e.R},
                {"t", e.t},
                {"coefficient", number_json(e.coefficient)},
                {"volume_quotient", number_json(e.volume_quotient)},
                {"bound", number_json(e.bound)},
                {"bound_unit_constant", number_json(e.bound_unit_constant)},
                {"asymptotic_bound", opt(e.asymptotic_bound)},
                {"asymptotic_bound_unit_constant", opt(e.asymptotic_bound_unit_constant)},
                {"C_w", number_json(e.c_w)},
                {"Vol_w", number_json(e.vol_w)},
                {"ends", to_json(e.ends)},
                {"verdict", to_string(e.verdict)},
                {"checks", checks}};
}

json to_json(const LimsupEstimate& l) {
    return json{{"t", numbers(l.t)},
                {"values", numbers(l.values)},
                {"reported", number_json(l.reported)},
                {"divergent", l.divergent},
                {"still_increasing", l.still_increasing},
                {"top_relative_change", number_json(l.top_relative_change)},
                {"note", l.note},
                {"warnings", l.warnings}};
}

json to_json(const CheegerBound& c) {
    return json{{"L", number_json(c.L)},
                {"unbounded", c.unbounded},
                {"still_increasing", c.still_increasing},
                {"lower_bound", number_json(c.lower_bound)}};
}

json to_json(const ToneReport& t) {
    json factors = json::array();
    for (const auto& f : t.end_factors)
        factors.push_back({{"end", f.end_index},
                           {"flux_w", number_json(f.flux_w)},
                           {"vol_w", number_json(f.vol_w)},
                           {"factor", number_json(f.factor)}});
    json checks = json::array();
    for (const auto& c : t.checks) checks.push_back(to_json(c));
    return json{{"model_limit", to_json(t.model_limit)},
                {"cheeger", to_json(t.cheeger)},
                {"parabolicity", std::string(to_string(t.parabolicity))},
                {"end_factors", factors},
                {"factor", t.factor ? number_json(*t.factor) : json(nullptr)},
                {"upper", number_json(t.upper)},
                {"lower", number_json(t.lower)},
                {"radii", numbers(t.radii)},
                {"lambda", numbers(t.lambda)},
                {"checks", checks}};
}

json to_json(const BalanceReport& b) {
    return json{{"below", b.below},
                {"above", b.above},
                {"worst_below_margin", number_json(b.worst_below_margin)},
                {"worst_below_radius", number_json(b.worst_below_radius)},
                {"worst_above_margin", number_json(b.worst_above_margin)},
                {"worst_above_radius", number_json(b.worst_above_radius)}};
}

json to_json(const ParabolicityReport& p) {
    return json{{"verdict", std::string(to_string(p.verdict))},
                {"ladder", numbers(p.ladder)},
                {"increments", numbers(p.increments)},
                {"ratios", numbers(p.ratios)},
                {"fitted_ratio", number_json(p.fitted_ratio)}};
}

json to_json(const CapacityResult& c) {
    return json{{"capacity", number_json(c.capacity)},
                {"resistance", number_json(c.resistance)},
                {"max_principle_excess", number_json(c.max_principle_excess)},
                {"negative_edges", c.negative_edges},
                {"iterations", c.iterations},
                {"relative_residual", number_json(c.relative_residual)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_curve_csv(const QuotientCurve& c, std::ostream& out) {
    out << "R [length],volume [length^2],model_volume [length^2],flux [length],model_flux [length],"
           "volume_quotient [1],flux_quotient [1]\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < c.radii.size(); ++i)
        out << c.radii[i] << ',' << c.volume[i] << ',' << c.model_volume[i] << ',' << c.flux[i] << ','
            << c.model_flux[i] << ',' << c.volume_quotient[i] << ',' << c.flux_quotient[i] << '\n';
}

void write_model_csv(const ModelSpace& model, const RadiusGrid& grid, std::ostream& out, const QuadratureConfig& q) {
    out << "r [length],w [length],eta [1/length],volS [length^(m-1)],volB [length^m],q [length],q*eta [1]\n";
    out << std::setprecision(17);
    for (double r : grid.radii) {
        const double qq = model.iso_quotient(r, q);
        const double eta = model.eta(r);
        out << r << ',' << model.warp().value(r) << ',' << eta << ',' << model.vol_sphere(r) << ','
            << model.vol_ball(r, q) << ',' << qq << ',' << qq * eta << '\n';
    }
}

}  // namespace warpgeom
