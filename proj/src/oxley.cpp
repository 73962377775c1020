// Extended Oxley orthogonal cutting model with a Johnson-Cook flow law.
//
// Unknowns: shear angle phi, primary zone ratio C0 and secondary zone ratio
// delta. Conditions: the normal stress at the tool tip computed from the
// shear plane equals the interface normal stress (sigma'_N = sigma_N), the
// interface shear stress equals the chip flow stress (tau_int = k_chip), and
// delta minimises the cutting force.
//
// sigma'_N = sigma_N does not involve delta or temperature, so it defines a
// curve C0(phi). Along that curve the cutting force decreases with phi, and
// tau_int depends on phi only, while k_chip decreases the admissible phi as
// it grows. Minimising Fc over delta is therefore the same as solving
// tau_int(phi) = min_delta k_chip(phi, delta) along the curve.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "flexbench/errors.hpp"
#include "flexbench/material.hpp"

namespace flexbench {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kPi = std::numbers::pi;
constexpr double kDeltaMin = 0.005;
constexpr double kDeltaMax = 0.2;
constexpr int kPhiGrid = 24;
constexpr double kPhiStart = 0.4;
constexpr double kPhiMin = 0.01;
constexpr int kDeltaBits = 16;
constexpr std::uintmax_t kMaxIterations = 1000;
constexpr double kResidualTolerance = 1e-6;

// AISI-1045 thermal laws with T0 as the Celsius offset.
constexpr double kHeatA = 420.0;
constexpr double kHeatB = 0.504;
constexpr double kCondA = 52.61;
constexpr double kCondB = 0.0281;

double specific_heat(const MaterialParams& m, double T) { return kHeatA + kHeatB * (T - m.T0); }
double conductivity(const MaterialParams& m, double T) { return kCondA - kCondB * (T - m.T0); }

// Johnson-Cook law made total for use inside the iteration: softening is
// clamped to [0, 1] and a negative rate factor to zero.
double flow_stress_clamped(const MaterialParams& m, double eps, double rate, double T)
{
    const double hardening = m.jc_A + m.jc_B * std::pow(eps, m.jc_n);
    const double rate_factor = std::max(0.0, 1.0 + m.jc_C * std::log(rate / m.jc_eps0));
    const double theta = std::clamp((T - m.Tw) / (m.Tm - m.Tw), 0.0, 1.0);
    return hardening * rate_factor * (1.0 - std::pow(theta, m.jc_m));
}

// Fraction of shear-plane heat conducted into the workpiece.
double heat_partition(double thermal_number, double tan_phi)
{
    const double x = thermal_number * tan_phi;
    const double beta = x > 10.0 ? 0.3 - 0.15 * std::log10(x) : 0.5 - 0.35 * std::log10(x);
    return std::clamp(beta, 0.0, 1.0);
}

struct Inputs {
    const MaterialParams& mat;
    double V;
    double alpha;
    double t1;
    double w;
};

// Quantities along the sigma'_N = sigma_N curve at one shear angle.
struct PhiState {
    double phi = 0.0;
    double C0 = 0.0;
    double eps_AB = 0.0;
    double n_eq = 0.0;
    double theta = 0.0;
    double lambda = 0.0;
    double T_AB = 0.0;
    double k_AB = 0.0;
    double R = 0.0;
    double Fc = 0.0;
    double Ft = 0.0;
    double t2 = 0.0;
    double h = 0.0;
    double tau_int = 0.0;
    double k_chip = 0.0;
    double delta = 0.0;
    double T_int = 0.0;
    double normal_residual = 0.0;
    bool melted = false;
};

struct Geometry {
    double eps_AB;
    double n_eq;
    double base; // 1 + 2 (pi/4 - phi)
};

Geometry shear_geometry(const Inputs& in, double phi)
{
    const auto& m = in.mat;
    const double gamma = std::cos(in.alpha) / (2.0 * std::sin(phi) * std::cos(phi - in.alpha));
    const double eps = gamma / kSqrt3;
    const double bn = m.jc_B * std::pow(eps, m.jc_n);
    return {eps, m.jc_n * bn / (m.jc_A + bn), 1.0 + 2.0 * (kPi / 4.0 - phi)};
}

// (sigma'_N - sigma_N) / k_AB; independent of k_AB and therefore of temperature.
double normal_stress_residual(const Inputs& in, double phi, const Geometry& g, double C0)
{
    const double tan_theta = g.base - C0 * g.n_eq;
    const double theta = std::atan(tan_theta);
    const double lambda = theta - phi + in.alpha;
    const double cl = std::cos(lambda);
    const double sigma_tip = 1.0 + kPi / 2.0 - 2.0 * in.alpha - 2.0 * C0 * g.n_eq;
    const double sigma_int = cl * cl / (std::sin(theta) * std::cos(theta) * (1.0 + C0 * g.n_eq / (3.0 * tan_theta)));
    return sigma_tip - sigma_int;
}

std::optional<double> solve_c0(const Inputs& in, double phi, const Geometry& g)
{
    if (!(g.base > 0.0) || !(g.n_eq > 0.0)) {
        return std::nullopt;
    }
    double hi = g.base / g.n_eq;
    double lo = 0.0;
    const double theta_max = kPi / 2.0 + phi - in.alpha; // keeps lambda below pi/2
    if (theta_max <= 0.0) {
        return std::nullopt;
    }
    if (theta_max < kPi / 2.0) {
        lo = std::max(0.0, (g.base - std::tan(theta_max)) / g.n_eq);
    }
    const double span = hi - lo;
    if (!(span > 0.0)) {
        return std::nullopt;
    }
    lo += 1e-12 * span;
    hi -= 1e-12 * span;
    auto f = [&](double c) { return normal_stress_residual(in, phi, g, c); };
    const double flo = f(lo);
    const double fhi = f(hi);
    if (!(flo > 0.0) || !(fhi < 0.0)) {
        return std::nullopt;
    }
    std::uintmax_t iters = kMaxIterations;
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                    boost::math::tools::eps_tolerance<double>(48), iters);
    return 0.5 * (a + b);
}

// Shear plane temperature: T = Tw + eta * dT_SZ(T), unique since the right
// side falls with T and reaches Tw at the melting point.
double solve_shear_plane_temperature(const Inputs& in, double phi, double eps_AB, double rate_AB)
{
    const auto& m = in.mat;
    const double heat_per_k = std::cos(in.alpha) / (std::sin(phi) * std::cos(phi - in.alpha) * m.rho);
    const double tan_phi = std::tan(phi);
    auto g = [&](double T) {
        const double k = flow_stress_clamped(m, eps_AB, rate_AB, T) / kSqrt3;
        const double S = specific_heat(m, T);
        const double RT = m.rho * S * in.V * in.t1 / conductivity(m, T);
        const double beta = heat_partition(RT, tan_phi);
        return T - (m.Tw + m.eta * (1.0 - beta) * k * heat_per_k / S);
    };
    const double glo = g(m.Tw);
    if (glo >= 0.0) {
        return m.Tw;
    }
    const double ghi = m.Tm - m.Tw;
    std::uintmax_t iters = kMaxIterations;
    auto [a, b] = boost::math::tools::toms748_solve(g, m.Tw, m.Tm, glo, ghi,
                                                    boost::math::tools::eps_tolerance<double>(44), iters);
    return 0.5 * (a + b);
}

std::optional<PhiState> evaluate_phi(const Inputs& in, double phi, int delta_bits)
{
    const auto& m = in.mat;
    if (!(phi > 0.0) || !(std::cos(phi - in.alpha) > 0.0)) {
        return std::nullopt;
    }
    const Geometry geo = shear_geometry(in, phi);
    const auto c0 = solve_c0(in, phi, geo);
    if (!c0) {
        return std::nullopt;
    }
    PhiState s;
    s.phi = phi;
    s.C0 = *c0;
    s.eps_AB = geo.eps_AB;
    s.n_eq = geo.n_eq;
    s.normal_residual = normal_stress_residual(in, phi, geo, s.C0);

    const double sphi = std::sin(phi);
    const double cpa = std::cos(phi - in.alpha);
    const double l_AB = in.t1 / sphi;
    const double Vs = in.V * std::cos(in.alpha) / cpa;
    const double Vc = in.V * sphi / cpa;
    const double rate_AB = s.C0 * Vs / (kSqrt3 * l_AB);

    s.T_AB = solve_shear_plane_temperature(in, phi, s.eps_AB, rate_AB);
    const double dT_SZ = (s.T_AB - m.Tw) / m.eta;
    s.k_AB = flow_stress_clamped(m, s.eps_AB, rate_AB, s.T_AB) / kSqrt3;

    const double tan_theta = geo.base - s.C0 * s.n_eq;
    s.theta = std::atan(tan_theta);
    s.lambda = s.theta - phi + in.alpha;
    const double Fs = s.k_AB * l_AB * in.w;
    s.R = Fs / std::cos(s.theta);
    s.Fc = s.R * std::cos(s.lambda - in.alpha);
    s.Ft = s.R * std::sin(s.lambda - in.alpha);
    const double friction = s.R * std::sin(s.lambda);

    s.t2 = in.t1 * cpa / sphi;
    s.h = in.t1 * std::sin(s.theta) / (std::cos(s.lambda) * sphi) * (1.0 + s.C0 * s.n_eq / (3.0 * tan_theta));
    s.tau_int = friction / (s.h * in.w);

    // Mean chip temperature T_c = Tw + dT_SZ + Q / S(T_c) with S linear in T.
    const double Q = std::max(0.0, friction) * Vc / (m.rho * in.V * in.t1 * in.w);
    const double c = m.Tw - m.T0 + dT_SZ;
    const double lin = kHeatA - kHeatB * c;
    const double u = (-lin + std::sqrt(lin * lin + 4.0 * kHeatB * (kHeatA * c + Q))) / (2.0 * kHeatB);
    const double T_c = m.T0 + u;
    if (!(T_c < m.Tm)) {
        s.melted = true;
        s.k_chip = 0.0;
        s.delta = kDeltaMin;
        s.T_int = T_c;
        return s;
    }
    const double dT_C = T_c - m.Tw - dT_SZ;
    const double RT = m.rho * specific_heat(m, T_c) * in.V * in.t1 / conductivity(m, T_c);
    const double sx = std::sqrt(RT * s.t2 / s.h);
    const double dT_M_base = dT_C * std::pow(10.0, 0.06) * sx;

    auto chip_state = [&](double delta, double& T_int) {
        T_int = m.Tw + dT_SZ + m.psi * dT_M_base * std::pow(10.0, -0.195 * delta * sx);
        const double eps_int = 2.0 * s.eps_AB + 0.5 * s.h / (kSqrt3 * delta * s.t2);
        const double rate_int = Vc / (kSqrt3 * delta * s.t2);
        return flow_stress_clamped(m, eps_int, rate_int, T_int) / kSqrt3;
    };
    auto k_of = [&](double delta) {
        double T;
        return chip_state(delta, T);
    };
    std::uintmax_t iters = kMaxIterations;
    auto [d, k] = boost::math::tools::brent_find_minima(k_of, kDeltaMin, kDeltaMax, delta_bits, iters);
    for (double edge : {kDeltaMin, kDeltaMax}) {
        const double ke = k_of(edge);
        if (ke < k) {
            k = ke;
            d = edge;
        }
    }
    s.delta = d;
    s.k_chip = chip_state(d, s.T_int);
    s.melted = !(s.T_int < m.Tm);
    return s;
}

double interface_residual(const PhiState& s)
{
    return s.tau_int - s.k_chip;
}

} // namespace

CutState solve_cut_state(const MaterialParams& mat, const ProcessParams& proc, double total_depth)
{
    mat.validate();
    proc.validate();
    const std::uint64_t n_layers = layer_count(total_depth, proc.cutting_depth);
    const Inputs in{mat, proc.cutting_speed, proc.cutting_angle, proc.cutting_depth, proc.cutting_width};

    // Admissible shear angles: cos(phi - alpha) > 0 and 1 + 2 (pi/4 - phi) > 0.
    const double phi_lo = std::max(kPhiMin, in.alpha - kPi / 2.0 + kPhiMin);
    const double phi_hi = std::min(0.5 + kPi / 4.0 - kPhiMin, in.alpha + kPi / 2.0 - kPhiMin);

    bool any_state = false;
    bool any_melt = false;
    std::vector<double> scan_residuals;
    std::array<std::optional<double>, kPhiGrid + 1> grid{};
    std::array<bool, kPhiGrid + 1> visited{};
    auto grid_phi = [&](int i) { return phi_lo + (phi_hi - phi_lo) * i / kPhiGrid; };
    auto grid_residual = [&](int i) -> std::optional<double> {
        if (!visited[i]) {
            visited[i] = true;
            if (const auto s = evaluate_phi(in, grid_phi(i), kDeltaBits)) {
                any_state = true;
                any_melt = any_melt || s->melted;
                grid[i] = interface_residual(*s);
                scan_residuals.push_back(s->k_chip > 0.0 ? *grid[i] / s->k_chip : *grid[i]);
            }
        }
        return grid[i];
    };
    auto is_bracket = [&](int i) {
        const auto a = grid_residual(i);
        if (!a || !(*a > 0.0)) {
            return false;
        }
        const auto b = grid_residual(i + 1);
        return b && *b <= 0.0;
    };

    // Walk from a typical shear angle towards the sign change. The interface
    // residual mostly falls with phi, but melted pockets and local bumps exist,
    // so a failed walk falls back to a full left-to-right scan.
    std::optional<int> found;
    int start = static_cast<int>(std::lround((kPhiStart - phi_lo) / (phi_hi - phi_lo) * kPhiGrid));
    start = std::clamp(start, 0, kPhiGrid - 1);
    if (const auto r0 = grid_residual(start)) {
        if (*r0 > 0.0) {
            for (int i = start; i < kPhiGrid; ++i) {
                const auto next = grid_residual(i + 1);
                if (!next) {
                    break;
                }
                if (*next <= 0.0) {
                    found = i;
                    break;
                }
            }
        } else {
            for (int i = start - 1; i >= 0; --i) {
                const auto r = grid_residual(i);
                if (!r) {
                    break;
                }
                if (*r > 0.0) {
                    found = i;
                    break;
                }
            }
        }
    }
    for (int i = 0; !found && i < kPhiGrid; ++i) {
        if (is_bracket(i)) {
            found = i;
        }
    }
    if (!found) {
        if (any_melt) {
            throw ModelDomainError("cutting model: tool-chip interface reaches the melting temperature");
        }
        if (!any_state) {
            throw ModelDomainError("cutting model: no admissible shear angle for this rake angle");
        }
        throw ConvergenceError("cutting model: interface stress balance has no root", scan_residuals);
    }

    auto residual = [&](double phi) {
        const auto s = evaluate_phi(in, phi, kDeltaBits);
        // Gaps inside the bracket count as "interface stress too low".
        return s ? interface_residual(*s) : -1.0;
    };
    const double a = grid_phi(*found);
    const double b = grid_phi(*found + 1);
    const double r_lo = *grid[*found];
    const double r_hi = *grid[*found + 1];
    std::uintmax_t iters = kMaxIterations;
    auto [x0, x1] = boost::math::tools::toms748_solve(residual, a, b, r_lo, r_hi,
                                                      boost::math::tools::eps_tolerance<double>(42), iters);
    const double phi = 0.5 * (x0 + x1);
    const auto s = evaluate_phi(in, phi, kDeltaBits);
    if (!s) {
        throw ConvergenceError("cutting model: equilibrium left the admissible region", {r_lo, r_hi});
    }

    CutState out;
    out.shear_angle = s->phi;
    out.strain_rate_ratio = s->C0;
    out.zone_ratio = s->delta;
    out.T_AB = s->T_AB;
    out.T_int = s->T_int;
    out.k_AB = s->k_AB;
    out.tau_int = s->tau_int;
    out.k_chip = s->k_chip;
    out.contact_length = s->h;
    out.residual_interface = s->k_chip > 0.0 ? (s->tau_int - s->k_chip) / s->k_chip : 1.0;
    out.residual_normal = s->normal_residual;

    if (s->melted || !(s->T_int < mat.Tm)) {
        throw ModelDomainError("cutting model: tool-chip interface reaches the melting temperature");
    }
    if (std::abs(out.residual_interface) > kResidualTolerance || std::abs(out.residual_normal) > kResidualTolerance) {
        throw ConvergenceError("cutting model: residuals above tolerance",
                               {out.residual_interface, out.residual_normal});
    }
    if (!(s->t2 > 0.0) || !(s->phi > 0.0 && s->phi < kPi / 2.0) || !(s->h > 0.0)) {
        throw ModelDomainError("cutting model: non-physical chip geometry");
    }
    if (!std::isfinite(s->Fc) || !std::isfinite(s->Ft)) {
        throw ModelDomainError("cutting model: non-finite forces");
    }
    out.outputs = CutOutputs{s->phi, s->Fc, s->Ft, s->t2, n_layers};
    return out;
}

CutOutputs solve_cut(const MaterialParams& mat, const ProcessParams& proc, double total_depth)
{
    return solve_cut_state(mat, proc, total_depth).outputs;
}

} // namespace flexbench
