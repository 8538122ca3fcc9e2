#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "monopole/fields.hpp"

namespace monopole {

/// Uniform rectangular grid of the coefficient fields of
///   H = g^11 (p1 - A1)^2 + g^22 (p2 - A2)^2 + h,
///   F = g^11 v1 (p1 - A1)^2 + g^22 v2 (p2 - A2)^2 + phi1 (p1 - A1) + phi2 (p2 - A2) + varphi,
/// with contravariant g^ii and the magnetic density B as a scalar field.
/// Samples are stored row-major with index i along the first coordinate.
struct AnsatzGrid {
  int n1 = 0;
  int n2 = 0;
  ChartBox box;
  std::vector<double> g11, g22, v1, v2, phi1, phi2, h, varphi, B;

  AnsatzGrid() = default;
  AnsatzGrid(int n1, int n2, const ChartBox& box);

  double h1() const noexcept { return (box.hi1 - box.lo1) / (n1 - 1); }
  double h2() const noexcept { return (box.hi2 - box.lo2) / (n2 - 1); }
  double c1(int i) const noexcept { return box.lo1 + i * h1(); }
  double c2(int j) const noexcept { return box.lo2 + j * h2(); }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(j);
  }
};

/// Interior verification box: the middle 80% of the coordinate strip
/// (Case I) or of the quarter cell [0, K1] x [0, K2] (Case II).
ChartBox default_verify_box(const SystemSpec& spec);

/// Samples the built-in fields of a Case I (elliptic coordinates) or Case II
/// (torus coordinates) system. Covariant metric samples are inverted here.
AnsatzGrid sample_system(const SystemSpec& spec, int n, const ChartBox& box);
AnsatzGrid sample_system(const SystemSpec& spec, int n);
/// Case II in Staeckel coordinates q_i = x_i^2 on the part of the strip with x2 > 0.
AnsatzGrid sample_case_ii_stackel(const SystemSpec& spec, int n);

enum class Condition { C1, C2, C3, C4, C5, C6, C6Star };
std::string_view to_string(Condition c) noexcept;

/// Each residual is the grid maximum of |equation| divided by the grid maximum
/// of its individual terms (0 when every term vanishes).
struct ConditionReport {
  std::array<double, 7> residual{};
  double c6star_correction = 0.0;  // max |quantum correction term|, absolute
  int n1 = 0;
  int n2 = 0;
  int stencil = 0;

  double operator[](Condition c) const noexcept { return residual[static_cast<std::size_t>(c)]; }
  double max_residual() const noexcept;
};

/// (C1)-(C6) by central differences of order `stencil` (2, 4, 6 or 8). The C6*
/// slot and the correction are filled as well. Throws GridTooSmall below 9x9.
ConditionReport check_classical(const AnsatzGrid& grid, int stencil = 8);

struct QuantumReport {
  double residual = 0.0;    // normalized (C6)* residual
  double correction = 0.0;  // max |correction term|
  double c6_residual = 0.0; // normalized classical (C6) residual on the same grid
};
QuantumReport check_quantum_c6star(const AnsatzGrid& grid, int stencil = 8);

/// Pointwise fields (NaN where the stencil does not fit).
std::vector<double> c6star_field(const AnsatzGrid& grid, int stencil = 8);
std::vector<double> c6star_correction_field(const AnsatzGrid& grid, int stencil = 8);
/// phi1 d1B + phi2 d2B + sqrt(g^11 g^22)(v2 - v1)(d2g11/g11 d1h + d1g22/g22 d2h - d1d2h),
/// assembled independently of the (C6)* code.
std::vector<double> consistency_field(const AnsatzGrid& grid, int stencil = 8);

/// max |consistency(grid) - C6*(grid with h and B swapped)| over the interior.
double check_duality(const AnsatzGrid& grid, int stencil_consistency = 8, int stencil_quantum = 8);

struct OdeReport {
  double g_case_a = 0.0;                // 40/9 g'^3 - 5 g g' g'' + g^2 g''' for g = Q^{-3/2}
  std::array<double, 3> pz{};           // n = -2/3, 2, 3 with y^n = Q
  double pz_linear = 0.0;               // n = 1
  double g_relation = 0.0;              // 3 g' g'' + g g''' for g = sqrt(Q)
  double max() const noexcept;
};

/// Q(q) = c0 + c1 q + c2 q^2 with closed-form derivatives; residuals relative
/// to the largest term. Throws SingularSample where Q <= 0.
OdeReport check_ode_identities(std::span<const double> samples, const std::array<double, 3>& c);

enum class FunctionalCase { Sqrt, Quadratic };

/// a''(q1)(a(q1) - b(q2) - (q1 - q2) b'(q2))^3 - b''(q2)(b(q2) - a(q1) + (q1 - q2) a'(q1))^3
/// with a = b = coeff sqrt(q) or coeff q^2, relative to the larger product.
/// Throws DomainError for q1 == q2 or non-positive arguments in the sqrt case.
double check_functional_equation(FunctionalCase c, double q1, double q2, double coeff = 1.0);

}  // namespace monopole
