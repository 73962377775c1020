#include "flexbench/material.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include "flexbench/errors.hpp"

namespace flexbench {

namespace {

MaterialParams make_material(std::string name, double rho, double A, double B, double n, double C,
                             double m, double Tm, double eps0)
{
    MaterialParams mat;
    mat.name = std::move(name);
    mat.T0 = 273.15;
    mat.Tw = 300.0;
    mat.rho = rho;
    mat.eta = 0.9;
    mat.psi = 0.9;
    mat.jc_A = A;
    mat.jc_B = B;
    mat.jc_n = n;
    mat.jc_C = C;
    mat.jc_m = m;
    mat.Tm = Tm;
    mat.jc_eps0 = eps0;
    return mat;
}

const std::array<MaterialParams, 4>& builtin_table()
{
    static const std::array<MaterialParams, 4> table = {
        make_material("steel", 7860.0, 7.92e8, 5.10e8, 0.26, 0.014, 1.03, 1790.0, 1.0),
        make_material("tungsten-alloy", 17600.0, 1.51e9, 1.77e8, 0.12, 0.016, 1.0, 1723.0, 1.0),
        make_material("steel-dummy", 7860.0, 5.82e8, 4.65e8, 0.325, 0.008, 1.3, 1790.0, 1.0),
        make_material("inconel-718", 8242.0, 9.28e8, 9.79e8, 0.245847, 0.0056, 1.80073, 1623.15, 0.001),
    };
    return table;
}

void require(bool ok, const std::string& what)
{
    if (!ok) {
        throw DomainError(what);
    }
}

} // namespace

void MaterialParams::validate() const
{
    require(!name.empty(), "material name must not be empty");
    require(Tw > 0.0 && Tm > Tw, "material '" + name + "': requires Tm > Tw > 0");
    require(rho > 0.0, "material '" + name + "': density must be positive");
    require(jc_eps0 > 0.0, "material '" + name + "': reference strain rate must be positive");
    require(jc_A > 0.0, "material '" + name + "': jc_A must be positive");
    require(eta > 0.0 && eta <= 1.0, "material '" + name + "': eta must lie in (0, 1]");
    require(psi > 0.0 && psi <= 1.0, "material '" + name + "': psi must lie in (0, 1]");
    require(jc_B >= 0.0 && jc_n >= 0.0 && jc_m > 0.0, "material '" + name + "': jc_B, jc_n >= 0 and jc_m > 0 required");
}

void ProcessParams::validate() const
{
    using namespace process_bounds;
    auto check = [](double v, double lo, double hi, const char* what) {
        if (!(v >= lo && v <= hi)) {
            throw DomainError(std::string(what) + " = " + std::to_string(v) + " outside [" + std::to_string(lo) +
                              ", " + std::to_string(hi) + "]");
        }
    };
    check(cutting_speed, kSpeedMin, kSpeedMax, "cutting_speed");
    check(cutting_angle, kAngleMin, kAngleMax, "cutting_angle");
    check(cutting_depth, kDepthMin, kDepthMax, "cutting_depth");
    if (cutting_width != kCuttingWidth) {
        throw DomainError("cutting_width must equal " + std::to_string(kCuttingWidth));
    }
}

double flow_stress(const MaterialParams& mat, double eps_p, double eps_dot_p, double T)
{
    if (!(eps_p >= 0.0)) {
        throw DomainError("flow_stress: plastic strain must be non-negative");
    }
    if (!(eps_dot_p > 0.0)) {
        throw DomainError("flow_stress: strain rate must be positive");
    }
    if (!(T >= mat.Tw && T <= mat.Tm)) {
        throw DomainError("flow_stress: temperature outside [Tw, Tm]");
    }
    const double hardening = mat.jc_A + mat.jc_B * std::pow(eps_p, mat.jc_n);
    const double rate = 1.0 + mat.jc_C * std::log(eps_dot_p / mat.jc_eps0);
    const double softening = 1.0 - std::pow((T - mat.Tw) / (mat.Tm - mat.Tw), mat.jc_m);
    return hardening * rate * softening;
}

std::uint64_t layer_count(double total_depth, double cutting_depth)
{
    if (!(total_depth > 0.0) || !(cutting_depth > 0.0)) {
        throw DomainError("layer_count: depths must be positive");
    }
    const double ratio = std::ceil(total_depth / cutting_depth);
    if (!(ratio < 1.0e18)) {
        throw DomainError("layer_count: too many layers");
    }
    auto n = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(ratio));
    // Repair rounding so that n * c >= d > (n - 1) * c holds in floating point.
    while (static_cast<double>(n) * cutting_depth < total_depth) {
        ++n;
    }
    while (n > 1 && static_cast<double>(n - 1) * cutting_depth >= total_depth) {
        --n;
    }
    return n;
}

std::span<const MaterialParams> builtin_materials()
{
    return builtin_table();
}

std::string canonical_material_name(std::string_view name)
{
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        if (c == '_' || c == ' ') {
            out.push_back('-');
        } else {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

const MaterialParams& find_material(std::string_view name, std::span<const MaterialParams> extra)
{
    const std::string key = canonical_material_name(name);
    for (const auto& m : extra) {
        if (canonical_material_name(m.name) == key) {
            return m;
        }
    }
    for (const auto& m : builtin_table()) {
        if (m.name == key) {
            return m;
        }
    }
    throw DomainError("unknown material '" + std::string(name) + "'");
}

} // namespace flexbench
