#include "nkerr/semiclassical.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nkerr {

namespace {

constexpr double kStabilityBand = 1e-10;

// Dense polynomial with ascending coefficients: p[i] is the N^i coefficient.
using Poly = std::vector<double>;

double poly_eval(const Poly& p, double x) {
    double acc = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

// Sum of |c_i| x^i, used as the cancellation scale for residual tests.
double poly_scale(const Poly& p, double x) {
    double acc = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + std::abs(p[i]);
    return acc;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

Poly poly_add(const Poly& a, const Poly& b) {
    Poly out(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

Poly poly_deriv(const Poly& p) {
    if (p.size() <= 1) return {};
    Poly out(p.size() - 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) out[i - 1] = p[i] * static_cast<double>(i);
    return out;
}

void poly_trim(Poly& p) {
    while (!p.empty() && p.back() == 0.0) p.pop_back();
}

// A(N) = sum_m U_m N^(m-1).
Poly interaction_poly(const ModelSpec& spec) {
    return Poly(spec.u.begin(), spec.u.end());
}

// B2(N) = gamma + n eta_n N^(n-1)  (twice the imaginary part of the
// stationary-equation coefficient).
Poly loss_poly(const ModelSpec& spec) {
    Poly b2(static_cast<std::size_t>(spec.n), 0.0);
    b2[0] = spec.gamma;
    b2[static_cast<std::size_t>(spec.n) - 1] += static_cast<double>(spec.n) * spec.eta_n;
    return b2;
}

// C(N) = 4 A(N)^2 + B2(N)^2, the drive-free numerator of (2n G_n(N))^2 N^(n-2).
Poly numerator_poly(const ModelSpec& spec) {
    const Poly a = interaction_poly(spec);
    const Poly b2 = loss_poly(spec);
    Poly c = poly_mul(a, a);
    for (double& v : c) v *= 4.0;
    Poly out = poly_add(c, poly_mul(b2, b2));
    poly_trim(out);
    return out;
}

// R(N) = C'(N) N + (2-n) C(N); its positive roots are the stationary points
// of G_n(N).
Poly stationary_points_poly(const Poly& c, int n) {
    Poly r = poly_mul(poly_deriv(c), Poly{0.0, 1.0});
    Poly shifted = c;
    for (double& v : shifted) v *= static_cast<double>(2 - n);
    r = poly_add(r, shifted);
    poly_trim(r);
    return r;
}

// Real roots of p via a balanced companion matrix.
std::vector<double> companion_real_roots(Poly p) {
    poly_trim(p);
    // Strip leading (highest-order) coefficients that are negligible versus
    // the largest one; they only produce spurious huge roots.
    double maxc = 0.0;
    for (double v : p) maxc = std::max(maxc, std::abs(v));
    if (maxc == 0.0) return {};
    while (p.size() > 1 && std::abs(p.back()) < 1e-14 * maxc) p.pop_back();
    const std::size_t degree = p.size() - 1;
    if (degree == 0) return {};
    if (degree == 1) return {-p[0] / p[1]};

    // Variable scaling x = s y balances the coefficient magnitudes.
    double s = 1.0;
    if (p[0] != 0.0) {
        s = std::pow(std::abs(p[0] / p.back()), 1.0 / static_cast<double>(degree));
        if (!(s > 0.0) || !std::isfinite(s)) s = 1.0;
    }
    Poly q = p;
    double f = 1.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] *= f;
        f *= s;
    }
    const double qlead = q.back();
    for (double& v : q) v /= qlead;

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(degree),
                                                 static_cast<Eigen::Index>(degree));
    for (std::size_t i = 0; i + 1 < degree; ++i) {
        comp(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = 1.0;
    }
    for (std::size_t i = 0; i < degree; ++i) {
        comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(degree - 1)) = -q[i];
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("companion-matrix eigensolve failed during root finding");
    }

    std::vector<double> roots;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const Complex z = es.eigenvalues()(i) * s;
        if (std::abs(z.imag()) <= 1e-7 * std::max(1.0, std::abs(z.real()))) {
            roots.push_back(z.real());
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double newton_polish(const Poly& p, const Poly& dp, double x) {
    for (int it = 0; it < 60; ++it) {
        const double fx = poly_eval(p, x);
        const double dfx = poly_eval(dp, x);
        if (dfx == 0.0) break;
        const double step = fx / dfx;
        const double next = x - step;
        if (!(next > 0.0) || !std::isfinite(next)) break;
        x = next;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

// Complex coefficient of the stationary equation, D = A(N) - i B2(N)/2.
Complex stationary_coefficient(const ModelSpec& spec, double density) {
    const double a = poly_eval(interaction_poly(spec), density);
    const double b = 0.5 * poly_eval(loss_poly(spec), density);
    return Complex(a, -b);
}

// Integer power by repeated multiplication; unlike std::pow on complex
// arguments this is exact for exponent zero at the origin.
Complex cpow_int(Complex base, int exponent) {
    Complex out(1.0, 0.0);
    for (int i = 0; i < exponent; ++i) out *= base;
    return out;
}

Stability verdict_from_eigs(const std::array<Complex, 2>& eigs) {
    const double worst = std::max(eigs[0].real(), eigs[1].real());
    if (worst > kStabilityBand) return Stability::unstable;
    if (eigs[0].real() < -kStabilityBand && eigs[1].real() < -kStabilityBand) {
        return Stability::stable;
    }
    return Stability::marginal;
}

}  // namespace

std::string to_string(TransitionClass c) {
    switch (c) {
        case TransitionClass::none: return "none";
        case TransitionClass::first_order: return "first_order";
        case TransitionClass::second_order: return "second_order";
        case TransitionClass::multistable: return "multistable";
    }
    return "?";
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::marginal: return "marginal";
    }
    return "?";
}

Complex gp_rhs(const ModelSpec& spec, Complex alpha) {
    validate(spec);
    const double nsq = std::norm(alpha);
    double interaction = 0.0;
    for (std::size_t mi = 0; mi < spec.u.size(); ++mi) {
        interaction += spec.u[mi] * std::pow(nsq, static_cast<double>(mi));
    }
    const double n = static_cast<double>(spec.n);
    const Complex bracket(-0.5 * spec.gamma -
                              0.5 * n * spec.eta_n * std::pow(nsq, static_cast<double>(spec.n - 1)),
                          -interaction);
    Complex drive(0.0, 0.0);
    if (spec.g_n != 0.0) {
        drive = Complex(0.0, -1.0) * n * spec.g_n * cpow_int(std::conj(alpha), spec.n - 1);
    }
    return bracket * alpha + drive;
}

std::pair<Complex, Complex> gp_wirtinger(const ModelSpec& spec, Complex alpha) {
    validate(spec);
    const double nsq = std::norm(alpha);
    const double n = static_cast<double>(spec.n);

    double a_val = 0.0, a_prime = 0.0;
    for (std::size_t mi = 0; mi < spec.u.size(); ++mi) {
        const double m1 = static_cast<double>(mi);
        a_val += spec.u[mi] * std::pow(nsq, m1);
        if (mi >= 1) a_prime += spec.u[mi] * m1 * std::pow(nsq, m1 - 1.0);
    }
    const double b_val = 0.5 * (spec.gamma + n * spec.eta_n *
                                                 std::pow(nsq, static_cast<double>(spec.n - 1)));
    double b_prime = 0.0;
    if (spec.n >= 2) {
        b_prime = 0.5 * n * (n - 1.0) * spec.eta_n *
                  std::pow(nsq, static_cast<double>(spec.n - 2));
    }

    const Complex iA_plus_B(b_val, a_val);           // i A + B
    const Complex iAp_plus_Bp(b_prime, a_prime);     // i A' + B'

    const Complex d_alpha = -iA_plus_B - iAp_plus_Bp * nsq;
    Complex d_conj = -iAp_plus_Bp * alpha * alpha;
    if (spec.g_n != 0.0 && spec.n >= 2) {
        d_conj += Complex(0.0, -1.0) * n * (n - 1.0) * spec.g_n *
                  cpow_int(std::conj(alpha), spec.n - 2);
    }
    return {d_alpha, d_conj};
}

Eigen::Matrix2d gp_jacobian(const ModelSpec& spec, Complex alpha) {
    const auto [p, q] = gp_wirtinger(spec, alpha);
    Eigen::Matrix2d j;
    j << (p + q).real(), (q - p).imag(),
         (p + q).imag(), (p - q).real();
    return j;
}

std::array<Complex, 2> gp_jacobian_eigs(const ModelSpec& spec, Complex alpha) {
    const auto [p, q] = gp_wirtinger(spec, alpha);
    // Eigenvalues of the real 2x2 form: Re(p) +- sqrt(|q|^2 - Im(p)^2).
    const Complex root = std::sqrt(Complex(std::norm(q) - p.imag() * p.imag(), 0.0));
    return {Complex(p.real(), 0.0) + root, Complex(p.real(), 0.0) - root};
}

double drive_of_density(const ModelSpec& spec, double density) {
    validate(spec);
    if (!(density > 0.0)) {
        throw std::domain_error("drive_of_density is defined only for positive density");
    }
    const Poly c = numerator_poly(spec);
    const double n = static_cast<double>(spec.n);
    const double denom = 4.0 * n * n * std::pow(density, static_cast<double>(spec.n - 2));
    return std::sqrt(poly_eval(c, density) / denom);
}

CriticalDrive critical_drive(const ModelSpec& spec) {
    validate(spec);
    const Poly c = numerator_poly(spec);
    // Lowest-order nonzero coefficient decides the limit of
    // G^2 ~ c_k N^(k - n + 2) / (4 n^2).
    int k = -1;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] != 0.0) {
            k = static_cast<int>(i);
            break;
        }
    }
    CriticalDrive out;
    if (k < 0) {
        // Identically zero numerator: G(N) == 0 for every N.
        out.kind = CriticalDrive::Kind::zero;
        return out;
    }
    const int exponent = k - (spec.n - 2);
    if (exponent > 0) {
        out.kind = CriticalDrive::Kind::zero;
    } else if (exponent == 0) {
        out.kind = CriticalDrive::Kind::finite;
        out.value = std::sqrt(c[static_cast<std::size_t>(k)]) / (2.0 * spec.n);
    } else {
        out.kind = CriticalDrive::Kind::infinite;
    }
    return out;
}

VacuumStability vacuum_stability(const ModelSpec& spec) {
    validate(spec);
    const double u1 = spec.u.empty() ? 0.0 : spec.u[0];
    const double g2 = (spec.n == 2) ? spec.g_n : 0.0;

    VacuumStability out;
    out.matrix << -0.5 * spec.gamma, -2.0 * g2 + u1,
                  -2.0 * g2 - u1,    -0.5 * spec.gamma;
    const Complex root = std::sqrt(Complex(4.0 * g2 * g2 - u1 * u1, 0.0));
    out.eigenvalues = {Complex(-0.5 * spec.gamma, 0.0) + root,
                       Complex(-0.5 * spec.gamma, 0.0) - root};
    out.verdict = verdict_from_eigs(out.eigenvalues);
    return out;
}

SemiclassicalSolutionSet fixed_points(const ModelSpec& spec, double drive) {
    validate(spec);
    if (drive < 0.0) {
        throw std::invalid_argument("drive must be non-negative (phase gauge)");
    }
    ModelSpec at_drive = spec;
    at_drive.g_n = drive;

    SemiclassicalSolutionSet out;
    out.drive = drive;

    // Stationary densities solve C(N) = 4 n^2 g^2 N^(n-2). Multiplying by the
    // positive power of N that clears denominators gives a single polynomial
    // valid for every n >= 1.
    Poly p = numerator_poly(spec);
    const int lift = std::max(0, 2 - spec.n);
    for (int i = 0; i < lift; ++i) p.insert(p.begin(), 0.0);
    {
        const double n = static_cast<double>(spec.n);
        const int drive_power = std::max(0, spec.n - 2);
        Poly drive_term(static_cast<std::size_t>(drive_power) + 1, 0.0);
        drive_term[static_cast<std::size_t>(drive_power)] = -4.0 * n * n * drive * drive;
        p = poly_add(p, drive_term);
    }
    poly_trim(p);
    const Poly dp = poly_deriv(p);

    std::vector<double> roots;
    for (double r : companion_real_roots(p)) {
        if (!(r > 0.0)) continue;
        const double polished = newton_polish(p, dp, r);
        if (!(polished > 0.0)) continue;
        const double scale = poly_scale(p, polished);
        if (std::abs(poly_eval(p, polished)) > 1e-9 * std::max(scale, 1e-300)) continue;
        roots.push_back(polished);
    }
    std::sort(roots.begin(), roots.end());
    // Merge near-duplicates (double roots at branch folds).
    {
        std::vector<double> unique_roots;
        for (double r : roots) {
            if (unique_roots.empty() ||
                r - unique_roots.back() > 1e-8 * std::max(1.0, r)) {
                unique_roots.push_back(r);
            }
        }
        roots = std::move(unique_roots);
    }

    if (spec.n >= 2 || drive == 0.0) {
        const VacuumStability vac = vacuum_stability(at_drive);
        FixedPoint origin;
        origin.density = 0.0;
        origin.theta = 0.0;
        origin.alpha = Complex(0.0, 0.0);
        origin.jacobian_eigs = vac.eigenvalues;
        origin.stability = vac.verdict;
        origin.multiplicity = 1;
        origin.residual = 0.0;
        out.points.push_back(origin);
    }

    const double n = static_cast<double>(spec.n);
    for (double density : roots) {
        // Phase from the stationary equation: with D = A - i B2/2,
        //   e^{i n theta} = -n G N^{(n-2)/2} / D,
        // which makes gp_rhs vanish at alpha = sqrt(N) e^{i theta}.
        const Complex d = stationary_coefficient(spec, density);
        const Complex ratio = -n * drive * std::pow(density, 0.5 * (n - 2.0)) / d;
        const double theta = std::arg(ratio) / n;

        FixedPoint fp;
        fp.density = density;
        fp.theta = theta;
        fp.alpha = std::polar(std::sqrt(density), theta);
        fp.jacobian_eigs = gp_jacobian_eigs(at_drive, fp.alpha);
        fp.stability = verdict_from_eigs(fp.jacobian_eigs);
        fp.multiplicity = spec.n;
        fp.residual = std::abs(gp_rhs(at_drive, fp.alpha));
        out.points.push_back(fp);
    }

    int stable_nonzero = 0;
    bool vacuum_stable = false;
    bool have_vacuum = false;
    for (const FixedPoint& fp : out.points) {
        if (fp.density > 0.0 && fp.stability == Stability::stable) ++stable_nonzero;
        if (fp.density == 0.0) {
            have_vacuum = true;
            vacuum_stable = fp.stability == Stability::stable;
        }
    }
    if (stable_nonzero == 0) {
        out.classification = TransitionClass::none;
    } else if (stable_nonzero >= 2) {
        out.classification = TransitionClass::multistable;
    } else if (have_vacuum && vacuum_stable) {
        out.classification = TransitionClass::first_order;
    } else {
        out.classification = TransitionClass::second_order;
    }
    return out;
}

TransitionReport classify_transition(const ModelSpec& spec) {
    validate(spec);
    TransitionReport report;
    report.critical = critical_drive(spec);
    report.condition_i = report.critical.kind == CriticalDrive::Kind::finite &&
                         report.critical.value > 0.0;

    std::ostringstream summary;
    switch (report.critical.kind) {
        case CriticalDrive::Kind::zero:
            summary << "G_c = 0";
            break;
        case CriticalDrive::Kind::finite:
            summary << "G_c = " << report.critical.value;
            break;
        case CriticalDrive::Kind::infinite:
            summary << "G_c = infinity";
            break;
    }

    if (report.condition_i) {
        // G^2 is analytic at N = 0 here: G^2 = (c_k + c_{k+1} N + ...)/(4 n^2)
        // with k = n-2. The sign of the first nonzero Taylor coefficient past
        // c_k decides condition (ii); the value reported is the matching
        // derivative of G itself at 0+.
        const Poly c = numerator_poly(spec);
        const std::size_t k = static_cast<std::size_t>(spec.n - 2);
        const double n = static_cast<double>(spec.n);
        report.derivative_order = 0;
        report.slope = 0.0;
        double factorial = 1.0;
        for (std::size_t j = 1; k + j < c.size(); ++j) {
            factorial *= static_cast<double>(j);
            if (c[k + j] != 0.0) {
                report.derivative_order = static_cast<int>(j);
                report.slope = factorial * c[k + j] /
                               (8.0 * n * n * report.critical.value);
                break;
            }
        }
        report.condition_ii = report.slope >= 0.0;
        if (report.derivative_order == 0) {
            summary << "; G flat at N->0+ (all derivatives vanish)";
        } else if (report.derivative_order == 1) {
            summary << "; dG/dN|_{0+} = " << report.slope;
        } else {
            summary << "; first nonzero derivative is order " << report.derivative_order
                    << " with value " << report.slope;
        }
    } else {
        report.condition_ii = false;
    }

    if (report.condition_i && report.condition_ii) {
        report.verdict = TransitionClass::second_order;
    } else {
        // No continuous onset at N = 0. A fold of G_n(N) at finite density
        // still permits a first-order jump; without one the drive response
        // is smooth.
        const Poly r = stationary_points_poly(numerator_poly(spec), spec.n);
        double bound = 1.0;
        if (!r.empty()) {
            double lead = std::abs(r.back());
            double maxq = 0.0;
            for (std::size_t i = 0; i + 1 < r.size(); ++i) {
                maxq = std::max(maxq, std::abs(r[i]) / lead);
            }
            bound = 1.0 + maxq;
        }
        const auto folds = detect_multistability(spec, 1e-9 * bound, bound);
        report.verdict = folds.extrema.empty() ? TransitionClass::none
                                               : TransitionClass::first_order;
    }
    summary << "; condition (i) " << (report.condition_i ? "holds" : "fails")
            << ", condition (ii) " << (report.condition_ii ? "holds" : "fails")
            << "; verdict: " << to_string(report.verdict);
    report.summary = summary.str();
    return report;
}

MultistabilityReport detect_multistability(const ModelSpec& spec, double n_min, double n_max) {
    validate(spec);
    if (!(n_min > 0.0) || !(n_max > n_min)) {
        throw std::invalid_argument("density interval must satisfy 0 < n_min < n_max");
    }
    // Stationary points of G(N): with G^2 = C(N) N^(2-n) / (4 n^2),
    //   d(G^2)/dN = 0  <=>  R(N) := C'(N) N + (2-n) C(N) = 0  (N > 0).
    const Poly r = stationary_points_poly(numerator_poly(spec), spec.n);

    MultistabilityReport report;

    // Descartes bound: sign alternations of the nonzero coefficients, after
    // dividing out powers of N (roots at zero are outside the domain).
    {
        int changes = 0;
        int last_sign = 0;
        for (double v : r) {
            if (v == 0.0) continue;
            const int s = v > 0.0 ? 1 : -1;
            if (last_sign != 0 && s != last_sign) ++changes;
            last_sign = s;
        }
        report.descartes_bound = changes;
    }

    if (r.empty()) return report;

    const bool log_grid = n_max / n_min > 50.0;
    const int samples = 4096;
    auto grid_point = [&](int i) {
        const double t = static_cast<double>(i) / (samples - 1);
        if (log_grid) return n_min * std::pow(n_max / n_min, t);
        return n_min + (n_max - n_min) * t;
    };

    double prev_x = grid_point(0);
    double prev_val = poly_eval(r, prev_x);
    for (int i = 1; i < samples; ++i) {
        const double x = grid_point(i);
        const double val = poly_eval(r, x);
        if ((prev_val < 0.0 && val > 0.0) || (prev_val > 0.0 && val < 0.0)) {
            double lo = prev_x, hi = x, flo = prev_val;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fmid = poly_eval(r, mid);
                if ((flo < 0.0) == (fmid < 0.0)) {
                    lo = mid;
                    flo = fmid;
                } else {
                    hi = mid;
                }
                if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
            }
            const double root = 0.5 * (lo + hi);
            // R crossing from below means G^2 starts increasing: a minimum.
            report.extrema.push_back({root, prev_val < 0.0 ? Extremum::Kind::minimum
                                                           : Extremum::Kind::maximum});
        }
        prev_x = x;
        prev_val = val;
    }
    return report;
}

}  // namespace nkerr
