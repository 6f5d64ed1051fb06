#pragma once

// Pointwise Riemannian and leafwise (foliated) differential operators on
// chart-specified models. Analytic derivatives are used when the model or
// field supplies them; otherwise central finite differences with the model's
// fd_step (first derivatives) or 1e-4 (second derivatives of bare values).
//
// Vectors tangent to E are extended to local fields by keeping their
// coefficients in the orthonormal E-frame fixed. The extension has to stay
// inside E for Hess_E and W to be tensorial.

#include "folbm/model.hpp"
#include "folbm/types.hpp"

#include <vector>

namespace folbm::geometry {

inline constexpr double kSecondDerivativeStep = 1e-4;

[[nodiscard]] MetricSample metric(const FoliatedModel& model, const ChartPoint& x);

/// Gram-Schmidt of the model's E-frame in the metric g. Columns of the result
/// are g-orthonormal and span the same subspace. Throws DegenerateFrame if a
/// pivot falls below 1e-12.
[[nodiscard]] Mat orthonormal_e_frame(const FoliatedModel& model, const ChartPoint& x);
[[nodiscard]] Mat orthonormalize(const Mat& raw, const MetricSample& m);

/// Orthonormal frame of the g-orthogonal complement of E, built from the
/// chart basis vectors in order d_1, d_2, ... (vectors nearly inside the span
/// of the previous ones are skipped).
[[nodiscard]] Mat orthonormal_perp_frame(const FoliatedModel& model, const ChartPoint& x);

/// Orthogonal projection onto E: sum_i g(v, u_i) u_i.
[[nodiscard]] TangentVector project_E(const FoliatedModel& model, const TangentVector& v);
[[nodiscard]] TangentVector project_perp(const FoliatedModel& model, const TangentVector& v);
/// Matrix P with P v = pi(v), given an orthonormal E-frame U at the point.
[[nodiscard]] Mat projector(const MetricSample& m, const Mat& U);

/// Analytic Christoffels when the model provides them, else the
/// finite-difference Levi-Civita formula.
[[nodiscard]] Christoffels christoffels(const FoliatedModel& model, const ChartPoint& x);
[[nodiscard]] Christoffels christoffels_fd(const FoliatedModel& model, const ChartPoint& x);

/// Coordinate partials of f, analytic or central differences.
[[nodiscard]] Vec partials(const FoliatedModel& model, const ScalarField& f, const ChartPoint& x);
[[nodiscard]] Mat second_partials(const FoliatedModel& model, const ScalarField& f,
                                  const ChartPoint& x);

[[nodiscard]] TangentVector grad(const FoliatedModel& model, const ScalarField& f,
                                 const ChartPoint& x);
[[nodiscard]] TangentVector grad_E(const FoliatedModel& model, const ScalarField& f,
                                   const ChartPoint& x);
/// Independent route: sum_i (u_i f) u_i over the orthonormal E-frame.
[[nodiscard]] TangentVector grad_E_basis(const FoliatedModel& model, const ScalarField& f,
                                         const ChartPoint& x);

/// nabla_dir V at x: directional difference of the components plus the
/// Christoffel correction.
[[nodiscard]] Vec covariant_derivative(const FoliatedModel& model, const VectorField& V,
                                       const ChartPoint& x, const Vec& dir);

/// Riemannian divergence sum_k (d_k V^k + Gamma^k_{kj} V^j). `step` defaults
/// to the model's fd_step; fields that themselves use finite differences are
/// better served by a larger step.
[[nodiscard]] double div(const FoliatedModel& model, const VectorField& V, const ChartPoint& x,
                         double step = 0.0);
/// sum_i g(nabla_{u_i} V, u_i). Only meaningful for sections of E.
[[nodiscard]] double div_E(const FoliatedModel& model, const VectorField& V,
                           const ChartPoint& x);

/// Full Riemannian Hessian in chart components: d_ab f - Gamma^k_ab d_k f.
[[nodiscard]] Mat hess(const FoliatedModel& model, const ScalarField& f, const ChartPoint& x);
/// Hess_E f in the orthonormal E-frame (p x p):
/// u_i u_j f - (pi nabla_{u_i} u_j) f.
[[nodiscard]] Mat hess_E(const FoliatedModel& model, const ScalarField& f, const ChartPoint& x);
/// Trace of hess_E.
[[nodiscard]] double laplacian_E(const FoliatedModel& model, const ScalarField& f,
                                 const ChartPoint& x);
/// Second route: div_E(grad_E f).
[[nodiscard]] double laplacian_E_divergence(const FoliatedModel& model, const ScalarField& f,
                                            const ChartPoint& x);

/// W(X, Y) = pi_perp(nabla_X Y~) with Y~ the frame-coefficient extension of Y.
/// X and Y must lie in E (NotInE otherwise).
[[nodiscard]] TangentVector second_fundamental_form(const FoliatedModel& model,
                                                    const TangentVector& X,
                                                    const TangentVector& Y);
/// Same, with a caller-supplied E-valued extension of Y.
[[nodiscard]] TangentVector second_fundamental_form(const FoliatedModel& model,
                                                    const TangentVector& X,
                                                    const VectorField& Y_extension);
/// K = Tr_E W.
[[nodiscard]] TangentVector mean_curvature_K(const FoliatedModel& model, const ChartPoint& x);

/// kappa = pi_E(sum_j nabla_{V_j} V_j) over the orthonormal perp frame V_j.
[[nodiscard]] TangentVector kappa(const FoliatedModel& model, const ChartPoint& x);
/// kappa-flat applied to X: g(kappa, X).
[[nodiscard]] double kappa_flat(const FoliatedModel& model, const TangentVector& X);

/// Laplace-Beltrami operator in divergence form
/// (1/sqrt g) d_i(sqrt g g^{ij} d_j f).
[[nodiscard]] double laplacian_full(const FoliatedModel& model, const ScalarField& f,
                                    const ChartPoint& x);
/// g^{ab} (d_ab f - Gamma^k_ab d_k f); independent route to laplacian_full.
[[nodiscard]] double trace_hess(const FoliatedModel& model, const ScalarField& f,
                                const ChartPoint& x);

/// Delta f - (Delta_E f - kappa(f)) - div(pi_perp grad f). Zero for every
/// smooth f; the basic-Laplacian part enters through the divergence term.
[[nodiscard]] double decomposition_residual(const FoliatedModel& model, const ScalarField& f,
                                            const ChartPoint& x);

}  // namespace folbm::geometry
