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

#ifndef CEPRECODE_BASELINES_HPP
#define CEPRECODE_BASELINES_HPP

#include "ceprecode/solver.hpp"

namespace cep {

/// ||H^T x - s||^2, the total multi-user interference power.
double ir_objective(const ComplexVector& x, const ChannelMatrix& h, const ComplexVector& s);

/// d/d theta of ||H^T x - s||^2 for x_n = r exp(j theta_n).
RealVector ir_phase_gradient(const ComplexVector& x, const ChannelMatrix& h, const ComplexVector& s);

struct GdConfig {
    int iterations = 50;
    // Multiple of 1 / (2 r^2 mean_n |h_n|^2), the inverse diagonal curvature.
    double initial_step = 1.0;
    double contraction = 0.5;
    double slope = 1e-4;
    int max_backtracks = 50;
    // One backtracked step per antenna per outer iteration instead of a full-vector step.
    bool coordinate_sequential = false;
    std::uint64_t seed = 0;

    void validate() const;

    bool operator==(const GdConfig&) const = default;
};

/// Gradient descent on the transmit phases; iterations == 0 returns the
/// random initialization. Objective trace holds the IR objective.
SolveReport gd_ir_solve(const ChannelMatrix& h, const SymbolVector& s, double power_budget, const GdConfig& cfg);

/// Riemannian conjugate gradient on the complex circle for the IR objective,
/// sharing the line search and Polak-Ribiere machinery of rcg_solve.
SolveReport rcg_ir_solve(const ChannelMatrix& h, const SymbolVector& s, double power_budget, const SolverConfig& cfg);

SolveReport rcg_ir_solve(const ChannelMatrix& h, const SymbolVector& s, const CirclePoint& init,
                         const SolverConfig& cfg);

enum class CeoObjective { ci, ir };

struct CeoConfig {
    int iterations = 1000; // T
    int samples = 500;     // K
    double quantile = 0.05;  // rho
    double smoothing = 0.08; // alpha
    std::uint64_t seed = 0;

    // Throws std::invalid_argument; requires ceil(rho K) >= 1.
    void validate() const;
    int elite_count() const;

    bool operator==(const CeoConfig&) const = default;
};

/**
 * Cross-entropy search over transmit phases. Each antenna phase is drawn from
 * a wrapped Gaussian; the ceil(rho K) lowest-cost samples refit the circular
 * mean and spread, blended into the running estimate with weight alpha. The
 * best sample over all T x K draws is returned; the objective trace holds the
 * best-so-far cost per iteration (exact CI cost or IR objective).
 */
SolveReport ceo_solve(const ChannelMatrix& h, const SymbolVector& s, double power_budget, CeoObjective objective,
                      const CeoConfig& cfg);

struct RelaxedCiConfig {
    int iterations = 2000;
    // Initial step as a multiple of sqrt(P_T/N); step k is step0 / sqrt(k).
    double initial_step = 1.0;

    void validate() const;

    bool operator==(const RelaxedCiConfig&) const = default;
};

/// Projected gradient on the smoothed CI objective over the polydisc
/// |x_n| <= sqrt(P_T/N), followed by normalization of every entry onto the
/// circle. A convex-relaxation surrogate; reported as "cvx-ci".
SolveReport relaxed_ci_solve(const ChannelMatrix& h, const SymbolVector& s, double power_budget,
                             const SolverConfig& cfg, const RelaxedCiConfig& relaxed = {});

/// Radial clip of every entry to modulus <= radius.
ComplexVector clip_to_polydisc(const ComplexVector& x, double radius);

} // namespace cep

#endif // CEPRECODE_BASELINES_HPP
