#include "scherk/translation_invariant.hpp"

#include <cmath>
#include <stdexcept>

namespace scherk {

namespace {

// t(C) = K(1/sqrt(C)) / sqrt(C); K via the arithmetic-geometric mean.
double agm(double a, double b) {
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-17 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return a;
}

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(F&& f, double a, double b, double tol = 1e-13) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 48);
}

}  // namespace

double translation_invariant_asymptote(double C) {
    if (!(C > 1.0)) throw std::invalid_argument("profile constant must exceed 1");
    const double kp = std::sqrt((C - 1.0) / C);
    const double K = kPi / (2.0 * agm(1.0, kp));
    return K / std::sqrt(C);
}

TranslationInvariantGraph TranslationInvariantGraph::solve(const TranslationInvariantProblem& prob) {
    if (!(prob.t > 0.0))
        throw std::invalid_argument("TranslationInvariantGraph: t must be positive");
    if (prob.angular_resolution < 16)
        throw std::invalid_argument("TranslationInvariantGraph: angular resolution too small");

    // t(C) decreases from infinity (C -> 1) to 0 (C -> infinity)
    double lo = std::log(1e-15), hi = std::log(1e9);
    if (translation_invariant_asymptote(1.0 + std::exp(lo)) < prob.t)
        throw std::invalid_argument("TranslationInvariantGraph: t too large for double precision");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (translation_invariant_asymptote(1.0 + std::exp(mid)) > prob.t ? lo : hi) = mid;
    }

    TranslationInvariantGraph g;
    g.t_ = prob.t;
    g.C_ = 1.0 + std::exp(0.5 * (lo + hi));

    const int res = prob.angular_resolution;
    g.alpha_.resize(res + 1);
    g.f_.resize(res + 1);
    for (int i = 0; i <= res; ++i) g.alpha_[i] = kPi * i / res;
    const int mid = res / 2;
    auto slope = [&](double a) { return g.profile_slope(a); };
    g.f_[mid] = (res % 2 == 0) ? 0.0 : integrate(slope, kPi / 2.0, g.alpha_[mid]);
    for (int i = mid + 1; i <= res; ++i)
        g.f_[i] = g.f_[i - 1] + integrate(slope, g.alpha_[i - 1], g.alpha_[i]);
    for (int i = mid - 1; i >= 0; --i)
        g.f_[i] = g.f_[i + 1] - integrate(slope, g.alpha_[i], g.alpha_[i + 1]);
    return g;
}

double TranslationInvariantGraph::profile_slope(double alpha) const {
    const double s = std::sin(alpha);
    return 1.0 / std::sqrt(C_ - s * s);
}

double TranslationInvariantGraph::profile_second(double alpha) const {
    const double fp = profile_slope(alpha);
    return fp * fp * fp * std::sin(alpha) * std::cos(alpha);
}

double TranslationInvariantGraph::profile(double alpha) const {
    if (!(alpha > 0.0 && alpha < kPi))
        throw std::invalid_argument("profile: alpha must lie in (0, pi)");
    return integrate([this](double a) { return profile_slope(a); }, kPi / 2.0, alpha);
}

Jet2 TranslationInvariantGraph::jet(double x, double y) const {
    if (!(y > 0.0)) throw std::invalid_argument("jet: requires y > 0");
    const double r2 = x * x + y * y;
    const double r = std::sqrt(r2);
    const double alpha = std::atan2(y, x);
    const double c = x / r, s = y / r;
    const double fp = profile_slope(alpha);
    const double fpp = fp * fp * fp * s * c;

    Jet2 j;
    j.x = x;
    j.y = y;
    j.u = profile(alpha);
    j.ux = -fp * s / r;
    j.uy = fp * c / r;
    j.uxx = (fpp * s * s + 2.0 * fp * s * c) / r2;
    j.uxy = -(fpp * s * c + fp * (c * c - s * s)) / r2;
    j.uyy = (fpp * c * c - 2.0 * fp * s * c) / r2;
    return j;
}

double TranslationInvariantGraph::nu_on_axis() const {
    return std::sqrt((C_ - 1.0) / C_);
}

}  // namespace scherk
