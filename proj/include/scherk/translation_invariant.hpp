#pragma once

#include <vector>

#include "scherk/curvature.hpp"

namespace scherk {

/// Entire graph invariant under the hyperbolic translations along the
/// half-plane geodesic {x = 0}, with asymptotic values -t and +t on the two
/// boundary halves.  Translation invariance reduces the graph to a profile
/// u(x, y) = f(alpha), alpha = atan2(y, x); substitution into the expanded
/// minimal-graph equation collapses it to
///     f'' = f'^3 sin(alpha) cos(alpha),
/// which integrates to f'(alpha) = 1/sqrt(C - sin^2 alpha) with C > 1 fixed
/// by the asymptote.
struct TranslationInvariantProblem {
    double t = 1.0;               // asymptotic value, t > 0
    int angular_resolution = 2048;  // grid used for the exported profile
};

class TranslationInvariantGraph {
  public:
    static TranslationInvariantGraph solve(const TranslationInvariantProblem& prob);

    double asymptote() const { return t_; }
    double profile_constant() const { return C_; }

    double profile(double alpha) const;         // f, odd about pi/2
    double profile_slope(double alpha) const;   // f'
    double profile_second(double alpha) const;  // f''

    /// Angular grid and profile values at angular_resolution + 1 points.
    const std::vector<double>& grid_alpha() const { return alpha_; }
    const std::vector<double>& grid_f() const { return f_; }

    /// Full second-order jet of the reconstructed 2-D field at (x, y), y > 0.
    Jet2 jet(double x, double y) const;

    /// Vertical normal component along the invariance geodesic {x = 0}.
    double nu_on_axis() const;

  private:
    double t_ = 0.0;
    double C_ = 0.0;
    std::vector<double> alpha_, f_;
};

/// Asymptote as a function of the profile constant (complete elliptic
/// integral, evaluated with the arithmetic-geometric mean).
double translation_invariant_asymptote(double C);

}  // namespace scherk
