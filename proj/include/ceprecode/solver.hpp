// SPDX-License-Identifier: Apache-2.0
//
// ceprecode: constant-envelope precoding with constructive interference
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CEPRECODE_SOLVER_HPP
#define CEPRECODE_SOLVER_HPP

#include "ceprecode/objective.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cep {

/// How tangent projections and inner products are evaluated inside the solver.
enum class ProjectionKernel {
    dense,     // matrix forms X^T G and tr(U^T V) with NxN intermediates; matches flop_model
    columnwise // O(N) per projection; same iterates up to rounding
};

std::string_view to_string(ProjectionKernel k) noexcept;
ProjectionKernel parse_projection_kernel(std::string_view text);

struct SolverConfig {
    std::optional<double> grad_tol; // unset: 1e-6 * sqrt(N)
    int max_iters = 500;
    std::optional<double> epsilon; // unset: 0.01 * u * beta
    double armijo_initial = 1.0;
    double armijo_contraction = 0.5;
    double armijo_slope = 1e-4;
    int max_backtracks = 50;
    bool restart_on_nondescent = true;
    bool pr_plus = true;
    // Second stage at epsilon/4, warm-started from the first.
    bool continuation = false;
    ProjectionKernel kernel = ProjectionKernel::dense;
    std::uint64_t seed = 0;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;

    double resolved_grad_tol(Eigen::Index n_antennas) const;
    double resolved_epsilon(const RotatedChannel& ch) const;

    bool operator==(const SolverConfig&) const = default;
};

struct ObjectiveSample {
    double exact = 0.0;
    double smoothed = 0.0;
};

struct SolveReport {
    std::string solver;
    ComplexVector x;
    std::optional<RealPoint> x_final;
    // Entry 0 is the initialization; entry k the k-th accepted iterate.
    std::vector<ObjectiveSample> objective_trace;
    std::vector<double> grad_norm_trace;
    int iterations = 0;
    bool converged = false;
    bool stalled = false;
    std::uint64_t flops_estimate = 0;
    double wall_time_s = 0.0;

    double final_exact() const { return objective_trace.empty() ? 0.0 : objective_trace.back().exact; }
    double final_smoothed() const { return objective_trace.empty() ? 0.0 : objective_trace.back().smoothed; }
};

/// max_n | |x_n| - sqrt(P_T/N) |.
double envelope_deviation(const ComplexVector& x, double power_budget);

/// Riemannian conjugate gradient for the smoothed CI problem, started from
/// oblique_random(N, cfg.seed).
SolveReport rcg_solve(const ChannelMatrix& h, const SymbolVector& s, double power_budget, const SolverConfig& cfg);

/// Same, with an explicit starting point on the manifold.
SolveReport rcg_solve(const RotatedChannel& ch, const RealPoint& init, const SolverConfig& cfg);

/// Polak-Ribiere coefficient <g_new, g_new - P(g_old)> / <g_old, g_old>,
/// clamped at zero when `clamp` is set. Returns 0 when g_old vanishes.
double polak_ribiere(const TangentVector& g_new, const TangentVector& g_old, const RealPoint& x_new,
                     bool clamp = true, ProjectionKernel kernel = ProjectionKernel::columnwise);

/// -grad + mu * transport(x, prev_dir). Falls back to -grad when the result
/// is not a descent direction and `restart_on_nondescent` is set.
TangentVector descent_direction(const TangentVector& grad, const TangentVector& prev_dir, double mu,
                                const RealPoint& x, bool restart_on_nondescent = true,
                                ProjectionKernel kernel = ProjectionKernel::columnwise);

struct ArmijoResult {
    bool accepted = false;
    double step = 0.0;
    int backtracks = 0;
    std::optional<RealPoint> next;
    double value = 0.0; // smoothed objective at `next`
};

/// Backtracking search along `dir`: the first step armijo_initial *
/// contraction^t (t <= max_backtracks) with f(R(step dir)) <= f + slope_c *
/// step * <grad, dir>. `accepted` is false when no such t exists.
ArmijoResult armijo_step(const RealPoint& x, const TangentVector& dir, const RotatedChannel& ch, double epsilon,
                         const SolverConfig& cfg);

enum class FlopStage {
    gradient,  // gradient and Polak-Ribiere coefficient: 16N^2 + 14MN + 18M + 16N
    direction, // transported search direction: 4N^2 + 6N
    iteration  // sum of both
};

std::uint64_t flop_model(std::uint64_t n, std::uint64_t m, FlopStage stage);

/// Tags: "gradient-stage", "direction-stage", "rcg-ci" (full iteration).
std::uint64_t flop_model(std::uint64_t n, std::uint64_t m, std::string_view tag);

} // namespace cep

#endif // CEPRECODE_SOLVER_HPP
