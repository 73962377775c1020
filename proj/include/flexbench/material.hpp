#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flexbench {

// Johnson-Cook and thermal constants describing one workpiece material.
struct MaterialParams {
    std::string name;
    double T0 = 273.15;   // K, offset used by the thermal property laws
    double Tw = 300.0;    // K, ambient (workpiece) temperature
    double rho = 0.0;     // kg/m^3
    double eta = 0.9;     // shear-plane temperature averaging factor
    double psi = 0.9;     // tool-chip interface temperature averaging factor
    double jc_A = 0.0;    // Pa
    double jc_B = 0.0;    // Pa
    double jc_n = 0.0;
    double jc_C = 0.0;
    double jc_m = 0.0;
    double Tm = 0.0;      // K, melting temperature
    double jc_eps0 = 1.0; // 1/s, reference strain rate

    // Throws DomainError when an invariant is violated.
    void validate() const;

    bool operator==(const MaterialParams&) const = default;
};

// Box of admissible process parameters.
namespace process_bounds {
inline constexpr double kSpeedMin = 0.1;
inline constexpr double kSpeedMax = 5.0;
inline constexpr double kAngleMin = -0.5;
inline constexpr double kAngleMax = 1.0;
inline constexpr double kDepthMin = 1.0e-6;
inline constexpr double kDepthMax = 1.0e-3;
inline constexpr double kCuttingWidth = 1.6e-4;
} // namespace process_bounds

// Decision vector of one cut. Depth and width are fed to the cutting model as
// lengths with the numeric values given here.
struct ProcessParams {
    double cutting_speed = 1.0;  // m/s
    double cutting_angle = 0.0;  // rad, tool rake angle
    double cutting_depth = 1e-4; // depth of one layer
    double cutting_width = process_bounds::kCuttingWidth;

    // Throws DomainError naming the first violated bound.
    void validate() const;

    bool operator==(const ProcessParams&) const = default;
};

struct CutOutputs {
    double shear_angle = 0.0; // rad
    double Fc = 0.0;          // N, cutting direction
    double Ft = 0.0;          // N, thrust direction
    double t_c = 0.0;         // chip thickness, same unit as cutting_depth
    std::uint64_t n_layers = 1;
};

// Internal equilibrium of the extended Oxley model, exposed for diagnostics.
struct CutState {
    double shear_angle = 0.0;     // phi
    double strain_rate_ratio = 0.0; // C0 = l_AB / primary zone thickness
    double zone_ratio = 0.0;        // delta = secondary zone thickness / chip thickness
    double T_AB = 0.0;            // K, shear plane temperature
    double T_int = 0.0;           // K, tool-chip interface temperature
    double k_AB = 0.0;            // Pa, shear flow stress on AB
    double tau_int = 0.0;         // Pa, interface shear stress
    double k_chip = 0.0;          // Pa, chip flow stress at the interface
    double contact_length = 0.0;  // h
    double residual_interface = 0.0; // (tau_int - k_chip) / k_chip
    double residual_normal = 0.0;    // (sigma'_N - sigma_N) / k_AB
    CutOutputs outputs;
};

// Johnson-Cook flow stress. Throws DomainError outside eps_p >= 0,
// eps_dot_p > 0, Tw <= T <= Tm.
double flow_stress(const MaterialParams& mat, double eps_p, double eps_dot_p, double T);

// ceil(total_depth / cutting_depth), at least 1.
std::uint64_t layer_count(double total_depth, double cutting_depth);

// Solves the extended Oxley equilibrium for one cut.
// Throws ConvergenceError or ModelDomainError when no physical equilibrium exists.
CutOutputs solve_cut(const MaterialParams& mat, const ProcessParams& proc, double total_depth);
CutState solve_cut_state(const MaterialParams& mat, const ProcessParams& proc, double total_depth);

// The four benchmark materials: steel, tungsten-alloy, steel-dummy, inconel-718.
std::span<const MaterialParams> builtin_materials();

// Looks a material up by name (case-insensitive, '_' and ' ' match '-').
// Searches `extra` first, then the built-in set. Throws DomainError if unknown.
const MaterialParams& find_material(std::string_view name, std::span<const MaterialParams> extra = {});

std::string canonical_material_name(std::string_view name);

} // namespace flexbench
