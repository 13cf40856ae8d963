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

#include "ceprecode/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cep {

namespace {

void require_epsilon(double epsilon)
{
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("smoothing parameter epsilon must be positive");
    }
}

void require_antennas(Eigen::Index cols, const RotatedChannel& ch)
{
    if (cols != ch.n_antennas) {
        throw DimensionError("point has " + std::to_string(cols) + " antennas, channel has " +
                             std::to_string(ch.n_antennas));
    }
}

Eigen::Index argmax_first(const RealVector& g)
{
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < g.size(); ++i) {
        if (g[i] > g[best]) {
            best = i;
        }
    }
    return best;
}

} // namespace

double RotatedChannel::amplitude() const noexcept
{
    return std::sqrt(power_budget / static_cast<double>(n_antennas));
}

RotatedChannel rotate_channel(const ChannelMatrix& h, const SymbolVector& s, double power_budget)
{
    if (h.n_users() != s.size()) {
        throw DimensionError("rotate_channel: channel has " + std::to_string(h.n_users()) + " users, symbols " +
                             std::to_string(s.size()));
    }
    if (!(power_budget > 0.0) || !std::isfinite(power_budget)) {
        throw std::invalid_argument("rotate_channel: power budget must be positive");
    }

    const Eigen::Index n = h.n_antennas();
    const Eigen::Index m = h.n_users();
    RotatedChannel ch;
    ch.beta = s.beta();
    ch.u = s.amplitude();
    ch.power_budget = power_budget;
    ch.n_users = m;
    ch.n_antennas = n;

    ComplexMatrix rotated(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        rotated.col(k) = h.data().col(k) * std::polar(1.0, -s.phases()[k]);
    }
    ch.h_tilde_re = rotated.real();
    ch.h_tilde_im = rotated.imag();

    const double beta = ch.beta;
    ch.a = ch.h_tilde_im - beta * ch.h_tilde_re;
    ch.b = -ch.h_tilde_im - beta * ch.h_tilde_re;
    ch.c = ch.h_tilde_re + beta * ch.h_tilde_im;
    ch.d = ch.h_tilde_re - beta * ch.h_tilde_im;

    ch.stacked.resize(2 * n, 2 * m);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index a = 0; a < n; ++a) {
            ch.stacked(2 * a, 2 * k) = ch.a(a, k);
            ch.stacked(2 * a + 1, 2 * k) = ch.c(a, k);
            ch.stacked(2 * a, 2 * k + 1) = ch.b(a, k);
            ch.stacked(2 * a + 1, 2 * k + 1) = -ch.d(a, k);
        }
    }
    return ch;
}

RealVector eval_g(const Matrix2N& x_tilde, const RotatedChannel& ch)
{
    require_antennas(x_tilde.cols(), ch);
    const Eigen::Map<const RealVector> flat(x_tilde.data(), x_tilde.size());
    return ch.amplitude() * (ch.stacked.transpose() * flat);
}

RealVector eval_g(const RealPoint& x, const RotatedChannel& ch)
{
    return eval_g(x.data(), ch);
}

ObjectiveEval exact_objective(const RealPoint& x, const RotatedChannel& ch)
{
    ObjectiveEval out;
    out.g = eval_g(x, ch);
    out.max_index = argmax_first(out.g);
    out.exact_value = out.g[out.max_index];
    return out;
}

double log_sum_exp(const RealVector& g, double epsilon)
{
    require_epsilon(epsilon);
    const double top = g.maxCoeff();
    const double sum = ((g.array() - top) / epsilon).exp().sum();
    return top + epsilon * std::log(sum);
}

RealVector softmax_weights(const RealVector& g, double epsilon)
{
    require_epsilon(epsilon);
    const double top = g.maxCoeff();
    RealVector w = ((g.array() - top) / epsilon).exp().matrix();
    w /= w.sum();
    return w;
}

double smoothed_objective(const RealPoint& x, const RotatedChannel& ch, double epsilon)
{
    return log_sum_exp(eval_g(x, ch), epsilon);
}

ObjectiveEval evaluate(const RealPoint& x, const RotatedChannel& ch, double epsilon)
{
    ObjectiveEval out = exact_objective(x, ch);
    out.smoothed_value = log_sum_exp(out.g, epsilon);
    out.epsilon = epsilon;
    return out;
}

Matrix2N euclidean_gradient_from_weights(const RotatedChannel& ch, const RealVector& weights)
{
    Matrix2N grad(2, ch.n_antennas);
    Eigen::Map<RealVector> flat(grad.data(), grad.size());
    flat.noalias() = ch.amplitude() * (ch.stacked * weights);
    return grad;
}

Matrix2N euclidean_gradient(const RealPoint& x, const RotatedChannel& ch, double epsilon)
{
    return euclidean_gradient_from_weights(ch, softmax_weights(eval_g(x, ch), epsilon));
}

TangentVector riemannian_gradient(const RealPoint& x, const RotatedChannel& ch, double epsilon)
{
    return tangent_project(x, euclidean_gradient(x, ch, epsilon));
}

double ci_cost(const ComplexVector& x, const ChannelMatrix& h, const SymbolVector& s)
{
    if (x.size() != h.n_antennas() || h.n_users() != s.size()) {
        throw DimensionError("ci_cost: dimension mismatch");
    }
    const ComplexVector received = h.data().transpose() * x;
    const ComplexVector sym = s.symbols();
    const double beta = s.beta();
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index m = 0; m < s.size(); ++m) {
        const Complex t = (received[m] - sym[m]) * std::polar(1.0, -s.phases()[m]);
        worst = std::max(worst, std::abs(t.imag()) - beta * t.real());
    }
    return worst;
}

double ci_cost(const ObjectiveEval& eval, const RotatedChannel& ch)
{
    return eval.exact_value + ch.u * ch.beta;
}

bool ci_feasible(const ObjectiveEval& eval, const RotatedChannel& ch)
{
    return ci_cost(eval, ch) <= 0.0;
}

double default_epsilon(const RotatedChannel& ch)
{
    return 0.01 * ch.u * ch.beta;
}

} // namespace cep
