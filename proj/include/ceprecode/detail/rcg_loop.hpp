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

#ifndef CEPRECODE_DETAIL_RCG_LOOP_HPP
#define CEPRECODE_DETAIL_RCG_LOOP_HPP

// Manifold-agnostic conjugate gradient loop shared by the CI solver (oblique
// manifold) and the IR baseline (complex circle).
//
// A problem type provides:
//   Point, Tangent, Eval                  value types
//   Eval evaluate(const Point&)           Eval has a `double value` (line-search cost)
//   Tangent gradient(const Point&, const Eval&)
//   double inner(const Tangent&, const Tangent&)
//   Tangent transport(const Point& to, const Tangent&)
//   Point retract(const Point&, const Tangent&, double step)   may throw DegenerateRetraction

#include "ceprecode/common.hpp"
#include "ceprecode/solver.hpp"

#include <cmath>
#include <optional>
#include <utility>

namespace cep::detail {

struct LoopSettings {
    double grad_tol = 1e-6;
    int max_iters = 500;
    double armijo_initial = 1.0;
    double armijo_contraction = 0.5;
    double armijo_slope = 1e-4;
    int max_backtracks = 50;
    bool restart_on_nondescent = true;
    bool pr_plus = true;
};

inline LoopSettings loop_settings(const SolverConfig& cfg, double grad_tol)
{
    LoopSettings s;
    s.grad_tol = grad_tol;
    s.max_iters = cfg.max_iters;
    s.armijo_initial = cfg.armijo_initial;
    s.armijo_contraction = cfg.armijo_contraction;
    s.armijo_slope = cfg.armijo_slope;
    s.max_backtracks = cfg.max_backtracks;
    s.restart_on_nondescent = cfg.restart_on_nondescent;
    s.pr_plus = cfg.pr_plus;
    return s;
}

template <class Problem>
struct LineSearchOutcome {
    bool accepted = false;
    double step = 0.0;
    int backtracks = 0;
    std::optional<typename Problem::Point> point;
    std::optional<typename Problem::Eval> eval;
};

template <class Problem>
LineSearchOutcome<Problem> armijo_search(const Problem& p, const typename Problem::Point& x, double f0,
                                         const typename Problem::Tangent& dir, double slope, const LoopSettings& s)
{
    LineSearchOutcome<Problem> out;
    double step = s.armijo_initial;
    for (int t = 0; t <= s.max_backtracks; ++t) {
        try {
            auto candidate = p.retract(x, dir, step);
            auto eval = p.evaluate(candidate);
            if (eval.value <= f0 + s.armijo_slope * step * slope) {
                out.accepted = true;
                out.step = step;
                out.backtracks = t;
                out.point.emplace(std::move(candidate));
                out.eval.emplace(std::move(eval));
                return out;
            }
        } catch (const DegenerateRetraction&) {
            // shrink and retry
        }
        step *= s.armijo_contraction;
    }
    out.backtracks = s.max_backtracks;
    return out;
}

template <class Problem>
double pr_coefficient(const Problem& p, const typename Problem::Point& x_new, const typename Problem::Tangent& g_new,
                      const typename Problem::Tangent& g_old, double old_sq, bool clamp)
{
    if (!(old_sq > 0.0)) {
        return 0.0;
    }
    const typename Problem::Tangent moved = p.transport(x_new, g_old);
    const typename Problem::Tangent diff = g_new - moved;
    const double mu = p.inner(g_new, diff) / old_sq;
    return clamp ? std::max(mu, 0.0) : mu;
}

template <class Problem>
struct LoopOutcome {
    typename Problem::Point point;
    typename Problem::Eval eval;
    int iterations = 0;
    bool converged = false;
    bool stalled = false;
};

// `record(point, eval, grad_norm)` is called for the start point and after
// every accepted iteration.
template <class Problem, class Recorder>
LoopOutcome<Problem> run_rcg(const Problem& p, typename Problem::Point x0, const LoopSettings& s, Recorder&& record)
{
    using Tangent = typename Problem::Tangent;

    auto x = std::move(x0);
    auto eval = p.evaluate(x);
    Tangent grad = p.gradient(x, eval);
    double grad_sq = p.inner(grad, grad);
    record(x, eval, std::sqrt(grad_sq));

    Tangent dir = -grad;
    int k = 0;
    bool stalled = false;
    while (k < s.max_iters && std::sqrt(grad_sq) >= s.grad_tol) {
        double slope = p.inner(grad, dir);
        bool steepest = false;
        if (!(slope < 0.0)) {
            dir = -grad;
            slope = -grad_sq;
            steepest = true;
        }
        auto ls = armijo_search(p, x, eval.value, dir, slope, s);
        if (!ls.accepted && !steepest) {
            dir = -grad;
            ls = armijo_search(p, x, eval.value, dir, -grad_sq, s);
        }
        if (!ls.accepted) {
            stalled = true;
            break;
        }

        x = std::move(*ls.point);
        eval = std::move(*ls.eval);
        Tangent grad_new = p.gradient(x, eval);
        const double mu = pr_coefficient(p, x, grad_new, grad, p.inner(grad, grad), s.pr_plus);
        const Tangent carried = p.transport(x, dir);
        Tangent next_dir = mu * carried - grad_new;
        if (s.restart_on_nondescent && !(p.inner(next_dir, grad_new) < 0.0)) {
            next_dir = -grad_new;
        }
        dir = std::move(next_dir);
        grad = std::move(grad_new);
        grad_sq = p.inner(grad, grad);
        ++k;
        record(x, eval, std::sqrt(grad_sq));
    }

    LoopOutcome<Problem> out{std::move(x), std::move(eval)};
    out.iterations = k;
    out.converged = std::sqrt(grad_sq) < s.grad_tol;
    out.stalled = stalled;
    return out;
}

} // namespace cep::detail

#endif // CEPRECODE_DETAIL_RCG_LOOP_HPP
