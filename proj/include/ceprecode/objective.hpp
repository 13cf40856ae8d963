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

#ifndef CEPRECODE_OBJECTIVE_HPP
#define CEPRECODE_OBJECTIVE_HPP

#include "ceprecode/channel.hpp"
#include "ceprecode/manifold.hpp"

namespace cep {

/**
 * Channel rotated by the conjugate symbol phases, h~_m = h_m exp(-j phi_m),
 * together with the four coefficient matrices of the real linear forms
 *
 *   g_{2m}   = a_m^T x_R + c_m^T x_I
 *   g_{2m+1} = b_m^T x_R - d_m^T x_I          (m = 0..M-1, zero-based)
 *
 * with A = H~_I - beta H~_R, B = -H~_I - beta H~_R, C = H~_R + beta H~_I and
 * D = H~_R - beta H~_I. For each user max(g_{2m}, g_{2m+1}) equals
 * |Im r_m| - beta Re r_m where r_m = h~_m^T x is the rotated noiseless receive
 * sample, so the CI cost of user m is that value plus u*beta.
 *
 * Built once per channel/symbol realization and shared read-only.
 */
struct RotatedChannel {
    RealMatrix h_tilde_re; // N x M
    RealMatrix h_tilde_im; // N x M
    RealMatrix a, b, c, d; // N x M
    double beta = 0.0;
    double u = 0.0;
    double power_budget = 1.0;
    Eigen::Index n_users = 0;
    Eigen::Index n_antennas = 0;

    // Row 2n multiplies x_R[n], row 2n+1 multiplies x_I[n]; column i is g_i.
    // Matches the interleaved storage of a column-major 2xN matrix, so
    // g = amplitude * stacked^T * vec(X~).
    RealMatrix stacked; // 2N x 2M

    // sqrt(P_T/N): maps a manifold point to x_R / x_I.
    double amplitude() const noexcept;
};

RotatedChannel rotate_channel(const ChannelMatrix& h, const SymbolVector& s, double power_budget);

struct ObjectiveEval {
    RealVector g;
    Eigen::Index max_index = 0; // zero-based; smallest index attaining the max
    double exact_value = 0.0;   // max_i g_i
    double smoothed_value = 0.0;
    double epsilon = 0.0;
};

/// The 2M linear forms at X~ (membership is not required).
RealVector eval_g(const Matrix2N& x_tilde, const RotatedChannel& ch);
RealVector eval_g(const RealPoint& x, const RotatedChannel& ch);

/// max_i g_i with the smallest-index tie-break; smoothed_value is left at 0.
ObjectiveEval exact_objective(const RealPoint& x, const RotatedChannel& ch);

/// epsilon * log(sum_i exp(g_i / epsilon)), shifted by max g for stability.
double log_sum_exp(const RealVector& g, double epsilon);

/// exp(g_i/eps) / sum_j exp(g_j/eps); sums to one.
RealVector softmax_weights(const RealVector& g, double epsilon);

double smoothed_objective(const RealPoint& x, const RotatedChannel& ch, double epsilon);

/// Exact and smoothed values in one pass.
ObjectiveEval evaluate(const RealPoint& x, const RotatedChannel& ch, double epsilon);

/// d f / d X~ (2 x N).
Matrix2N euclidean_gradient(const RealPoint& x, const RotatedChannel& ch, double epsilon);

/// Gradient from weights that were already computed for this point.
Matrix2N euclidean_gradient_from_weights(const RotatedChannel& ch, const RealVector& weights);

TangentVector riemannian_gradient(const RealPoint& x, const RotatedChannel& ch, double epsilon);

/// max_m |Im t_m| - beta Re t_m with t_m = (h_m^T x - s_m) exp(-j phi_m), evaluated on the complex precoder.
double ci_cost(const ComplexVector& x, const ChannelMatrix& h, const SymbolVector& s);

/// CI cost from the linear forms: exact_value + u*beta.
double ci_cost(const ObjectiveEval& eval, const RotatedChannel& ch);

/// Every noiseless receive sample lies in its constructive region (CI cost <= 0).
bool ci_feasible(const ObjectiveEval& eval, const RotatedChannel& ch);

/// Default smoothing: 0.01 * u * beta.
double default_epsilon(const RotatedChannel& ch);

} // namespace cep

#endif // CEPRECODE_OBJECTIVE_HPP
