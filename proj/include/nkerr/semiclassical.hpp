#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>
#include <vector>

#include "nkerr/model.hpp"

namespace nkerr {

enum class Stability { stable, unstable, marginal };

// Right-hand side of the coherent-field equation of motion
//   d(alpha)/dt = [-i sum_m U_m |a|^(2(m-1)) - (n/2) eta_n |a|^(2(n-1))
//                  - gamma/2] alpha - i n G_n (alpha*)^(n-1).
Complex gp_rhs(const ModelSpec& spec, Complex alpha);

// Wirtinger derivatives (df/d alpha, df/d alpha*) of gp_rhs at alpha.
std::pair<Complex, Complex> gp_wirtinger(const ModelSpec& spec, Complex alpha);

// Real 2x2 Jacobian of the flow in (Re alpha, Im alpha).
Eigen::Matrix2d gp_jacobian(const ModelSpec& spec, Complex alpha);

// Eigenvalues of the 2x2 Jacobian at alpha.
std::array<Complex, 2> gp_jacobian_eigs(const ModelSpec& spec, Complex alpha);

// Inverse problem: the drive amplitude that makes density N stationary,
//   G_n(N) = sqrt([4 (sum_m U_m N^(m-1))^2 + (gamma + n eta_n N^(n-1))^2]
//                 / (4 n^2 N^(n-2))).
// Defined only for N > 0.
double drive_of_density(const ModelSpec& spec, double density);

// lim_{N->0+} G_n(N). The limit is symbolic: zero, a finite value, or
// infinite, depending on the leading power of the numerator polynomial.
struct CriticalDrive {
    enum class Kind { zero, finite, infinite } kind = Kind::zero;
    double value = 0.0;  // meaningful only when finite
};

CriticalDrive critical_drive(const ModelSpec& spec);

// Linearization around the vacuum. The matrix has -gamma/2 on the diagonal
// and -+ 2 delta_{n,2} G_2 +- U_1 off it; its eigenvalues are
//   lambda_plus_minus = -gamma/2 +- sqrt(4 delta_{n,2} G_2^2 - U_1^2).
struct VacuumStability {
    Eigen::Matrix2d matrix;
    std::array<Complex, 2> eigenvalues;
    Stability verdict = Stability::stable;
};

VacuumStability vacuum_stability(const ModelSpec& spec);

struct FixedPoint {
    double density = 0.0;  // N = |alpha|^2
    double theta = 0.0;    // principal phase; the other images sit at theta + 2 pi j / n
    Complex alpha{0.0, 0.0};
    Stability stability = Stability::stable;
    std::array<Complex, 2> jacobian_eigs{};
    int multiplicity = 1;  // n phase images for nonzero density, 1 for the vacuum
    double residual = 0.0; // |gp_rhs| at the reported point
};

enum class TransitionClass { none, first_order, second_order, multistable };

std::string to_string(TransitionClass c);
std::string to_string(Stability s);

// All stationary solutions at a given drive: the vacuum (always a solution
// for n >= 2) plus every positive real root of the stationary polynomial,
// each carried with phase, Jacobian eigenvalues and stability.
struct SemiclassicalSolutionSet {
    double drive = 0.0;
    std::vector<FixedPoint> points;
    TransitionClass classification = TransitionClass::none;
};

SemiclassicalSolutionSet fixed_points(const ModelSpec& spec, double drive);

// Transition classification from the behavior of G_n(N) near N = 0+:
// condition (i) 0 < G_c < infinity, condition (ii) first nonzero derivative
// of G_n at the critical point non-negative. A vertical-tangent case
// escalates to higher derivatives; derivative_order reports which one decided.
struct TransitionReport {
    CriticalDrive critical;
    bool condition_i = false;
    bool condition_ii = false;
    double slope = 0.0;        // leading nonzero derivative value at N -> 0+
    int derivative_order = 0;  // 0 means G is flat to all orders
    TransitionClass verdict = TransitionClass::none;
    std::string summary;
};

TransitionReport classify_transition(const ModelSpec& spec);

// Stationary points of G_n(N) inside [n_min, n_max], located by a sign-change
// scan of dG_n/dN plus bisection, together with the Descartes bound on the
// number of positive stationary points.
struct Extremum {
    double density = 0.0;
    enum class Kind { minimum, maximum } kind = Kind::minimum;
};

struct MultistabilityReport {
    std::vector<Extremum> extrema;
    int descartes_bound = 0;
};

MultistabilityReport detect_multistability(const ModelSpec& spec, double n_min, double n_max);

}  // namespace nkerr
