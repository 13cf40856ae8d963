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

#include "ceprecode/solver.hpp"
#include "ceprecode/detail/rcg_loop.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace cep {

namespace {

// Smoothed CI problem on the oblique manifold.
class CiProblem {
public:
    using Point = RealPoint;
    using Tangent = TangentVector;
    struct Eval {
        double value;
        ObjectiveEval full;
    };

    CiProblem(const RotatedChannel& ch, double epsilon, ProjectionKernel kernel)
        : ch_(ch), epsilon_(epsilon), dense_(kernel == ProjectionKernel::dense)
    {
    }

    Eval evaluate(const Point& x) const
    {
        ObjectiveEval e = cep::evaluate(x, ch_, epsilon_);
        const double v = e.smoothed_value;
        return Eval{v, std::move(e)};
    }

    Tangent gradient(const Point& x, const Eval& e) const
    {
        const Matrix2N eg = euclidean_gradient_from_weights(ch_, softmax_weights(e.full.g, epsilon_));
        return dense_ ? tangent_project_dense(x, eg) : tangent_project(x, eg);
    }

    double inner(const Tangent& u, const Tangent& v) const { return dense_ ? metric_dense(u, v) : metric(u, v); }

    Tangent transport(const Point& to, const Tangent& v) const
    {
        return dense_ ? transport_dense(to, v) : cep::transport(to, v);
    }

    Point retract(const Point& x, const Tangent& v, double step) const { return cep::retract(x, v, step); }

private:
    const RotatedChannel& ch_;
    double epsilon_;
    bool dense_;
};

void require(bool ok, const char* field, const char* rule)
{
    if (!ok) {
        throw std::invalid_argument(std::string("SolverConfig.") + field + ": " + rule);
    }
}

} // namespace

std::string_view to_string(ProjectionKernel k) noexcept
{
    return k == ProjectionKernel::dense ? "dense" : "columnwise";
}

ProjectionKernel parse_projection_kernel(std::string_view text)
{
    if (text == "dense") {
        return ProjectionKernel::dense;
    }
    if (text == "columnwise") {
        return ProjectionKernel::columnwise;
    }
    throw std::invalid_argument("unknown projection kernel '" + std::string(text) + "'");
}

void SolverConfig::validate() const
{
    if (grad_tol) {
        require(*grad_tol > 0.0 && std::isfinite(*grad_tol), "grad_tol", "must be positive");
    }
    require(max_iters >= 1, "max_iters", "must be at least 1");
    if (epsilon) {
        require(*epsilon > 0.0 && std::isfinite(*epsilon), "epsilon", "must be positive");
    }
    require(armijo_initial > 0.0 && std::isfinite(armijo_initial), "armijo_initial", "must be positive");
    require(armijo_contraction > 0.0 && armijo_contraction < 1.0, "armijo_contraction", "must lie in (0, 1)");
    require(armijo_slope > 0.0 && armijo_slope < 1.0, "armijo_slope", "must lie in (0, 1)");
    require(max_backtracks >= 1, "max_backtracks", "must be at least 1");
}

double SolverConfig::resolved_grad_tol(Eigen::Index n_antennas) const
{
    return grad_tol.value_or(1e-6 * std::sqrt(static_cast<double>(n_antennas)));
}

double SolverConfig::resolved_epsilon(const RotatedChannel& ch) const
{
    return epsilon.value_or(default_epsilon(ch));
}

double envelope_deviation(const ComplexVector& x, double power_budget)
{
    const double radius = std::sqrt(power_budget / static_cast<double>(x.size()));
    double worst = 0.0;
    for (Eigen::Index n = 0; n < x.size(); ++n) {
        worst = std::max(worst, std::abs(std::abs(x[n]) - radius));
    }
    return worst;
}

SolveReport rcg_solve(const ChannelMatrix& h, const SymbolVector& s, double power_budget, const SolverConfig& cfg)
{
    cfg.validate();
    const RotatedChannel ch = rotate_channel(h, s, power_budget);
    return rcg_solve(ch, oblique_random(h.n_antennas(), cfg.seed, power_budget), cfg);
}

SolveReport rcg_solve(const RotatedChannel& ch, const RealPoint& init, const SolverConfig& cfg)
{
    cfg.validate();
    if (init.n_antennas() != ch.n_antennas) {
        throw DimensionError("rcg_solve: initial point does not match the channel");
    }
    const auto started = std::chrono::steady_clock::now();

    SolveReport report;
    report.solver = "rcg-ci";
    const detail::LoopSettings settings = detail::loop_settings(cfg, cfg.resolved_grad_tol(ch.n_antennas));
    const double eps = cfg.resolved_epsilon(ch);

    auto recorder = [&report](const RealPoint&, const auto& eval, double grad_norm) {
        report.objective_trace.push_back({eval.full.exact_value, eval.full.smoothed_value});
        report.grad_norm_trace.push_back(grad_norm);
    };

    const CiProblem first(ch, eps, cfg.kernel);
    auto outcome = detail::run_rcg(first, init, settings, recorder);
    report.iterations = outcome.iterations;
    report.stalled = outcome.stalled;
    report.converged = outcome.converged;

    if (cfg.continuation) {
        // The second stage restarts its trace at the warm start; drop the
        // duplicate entry so the trace stays one row per iterate.
        const std::size_t before = report.objective_trace.size();
        const CiProblem second(ch, eps / 4.0, cfg.kernel);
        auto refined = detail::run_rcg(second, outcome.point, settings, recorder);
        report.objective_trace.erase(report.objective_trace.begin() + static_cast<std::ptrdiff_t>(before));
        report.grad_norm_trace.erase(report.grad_norm_trace.begin() + static_cast<std::ptrdiff_t>(before));
        report.iterations += refined.iterations;
        report.stalled = report.stalled || refined.stalled;
        report.converged = refined.converged;
        outcome = std::move(refined);
    }

    report.x = outcome.point.precoder();
    report.x_final.emplace(outcome.point);
    report.flops_estimate = static_cast<std::uint64_t>(report.iterations) *
                            flop_model(static_cast<std::uint64_t>(ch.n_antennas),
                                       static_cast<std::uint64_t>(ch.n_users), FlopStage::iteration);
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

double polak_ribiere(const TangentVector& g_new, const TangentVector& g_old, const RealPoint& x_new, bool clamp,
                     ProjectionKernel kernel)
{
    if (!g_new.base().same_as(x_new)) {
        throw std::invalid_argument("polak_ribiere: g_new is not tangent at x_new");
    }
    const bool dense = kernel == ProjectionKernel::dense;
    const double old_sq = dense ? metric_dense(g_old, g_old) : metric(g_old, g_old);
    if (!(old_sq > 0.0)) {
        return 0.0;
    }
    const TangentVector moved = dense ? transport_dense(x_new, g_old) : transport(x_new, g_old);
    const TangentVector diff = g_new - moved;
    const double mu = (dense ? metric_dense(g_new, diff) : metric(g_new, diff)) / old_sq;
    return clamp ? std::max(mu, 0.0) : mu;
}

TangentVector descent_direction(const TangentVector& grad, const TangentVector& prev_dir, double mu,
                                const RealPoint& x, bool restart_on_nondescent, ProjectionKernel kernel)
{
    if (!grad.base().same_as(x)) {
        throw std::invalid_argument("descent_direction: gradient is not tangent at x");
    }
    if (prev_dir.data().cols() != x.n_antennas()) {
        throw DimensionError("descent_direction: previous direction has the wrong shape");
    }
    const bool dense = kernel == ProjectionKernel::dense;
    const TangentVector carried = dense ? transport_dense(x, prev_dir) : transport(x, prev_dir);
    TangentVector dir = mu * carried - grad;
    if (restart_on_nondescent) {
        const double slope = dense ? metric_dense(dir, grad) : metric(dir, grad);
        if (!(slope < 0.0)) {
            return -grad;
        }
    }
    return dir;
}

ArmijoResult armijo_step(const RealPoint& x, const TangentVector& dir, const RotatedChannel& ch, double epsilon,
                         const SolverConfig& cfg)
{
    cfg.validate();
    const CiProblem problem(ch, epsilon, cfg.kernel);
    const auto here = problem.evaluate(x);
    const TangentVector grad = problem.gradient(x, here);
    const double slope = metric(grad, dir);
    if (!(slope < 0.0)) {
        throw std::invalid_argument("armijo_step: direction is not a descent direction");
    }
    const auto found =
        detail::armijo_search(problem, x, here.value, dir, slope, detail::loop_settings(cfg, 0.0));
    ArmijoResult out;
    out.accepted = found.accepted;
    out.step = found.step;
    out.backtracks = found.backtracks;
    if (found.accepted) {
        out.next = *found.point;
        out.value = found.eval->value;
    }
    return out;
}

std::uint64_t flop_model(std::uint64_t n, std::uint64_t m, FlopStage stage)
{
    if (n < 1 || m < 1) {
        throw std::invalid_argument("flop_model: N and M must be at least 1");
    }
    const std::uint64_t gradient = 16 * n * n + 14 * m * n + 18 * m + 16 * n;
    const std::uint64_t direction = 4 * n * n + 6 * n;
    switch (stage) {
    case FlopStage::gradient:
        return gradient;
    case FlopStage::direction:
        return direction;
    case FlopStage::iteration:
        return gradient + direction;
    }
    return gradient + direction;
}

std::uint64_t flop_model(std::uint64_t n, std::uint64_t m, std::string_view tag)
{
    if (tag == "gradient-stage") {
        return flop_model(n, m, FlopStage::gradient);
    }
    if (tag == "direction-stage") {
        return flop_model(n, m, FlopStage::direction);
    }
    if (tag == "rcg-ci") {
        return flop_model(n, m, FlopStage::iteration);
    }
    throw std::invalid_argument("flop_model: unknown algorithm tag '" + std::string(tag) + "'");
}

} // namespace cep
