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

#include "ceprecode/baselines.hpp"
#include "ceprecode/detail/rcg_loop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

namespace cep {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_match(const ChannelMatrix& h, Eigen::Index x_len, Eigen::Index s_len, const char* what)
{
    if (x_len != h.n_antennas() || s_len != h.n_users()) {
        throw DimensionError(std::string(what) + ": dimension mismatch");
    }
}

double radius_for(const ChannelMatrix& h, double power_budget)
{
    if (!(power_budget > 0.0) || !std::isfinite(power_budget)) {
        throw std::invalid_argument("power budget must be positive");
    }
    return std::sqrt(power_budget / static_cast<double>(h.n_antennas()));
}

ComplexVector phases_to_precoder(const RealVector& theta, double radius)
{
    ComplexVector x(theta.size());
    for (Eigen::Index n = 0; n < theta.size(); ++n) {
        x[n] = std::polar(radius, theta[n]);
    }
    return x;
}

// IR problem on the complex circle.
class IrProblem {
public:
    using Point = CirclePoint;
    using Tangent = ComplexVector;
    struct Eval {
        double value;
        ComplexVector residual;
    };

    IrProblem(const ChannelMatrix& h, const ComplexVector& s) : h_(h), s_(s) {}

    Eval evaluate(const Point& x) const
    {
        ComplexVector e = h_.data().transpose() * x.data() - s_;
        const double v = e.squaredNorm();
        return Eval{v, std::move(e)};
    }

    Tangent gradient(const Point& x, const Eval& e) const
    {
        const ComplexVector eg = 2.0 * (h_.data().conjugate() * e.residual);
        return circle_project(x, eg);
    }

    double inner(const Tangent& u, const Tangent& v) const { return circle_metric(u, v); }

    Tangent transport(const Point& to, const Tangent& v) const { return circle_project(to, v); }

    Point retract(const Point& x, const Tangent& v, double step) const { return circle_retract(x, v, step); }

private:
    const ChannelMatrix& h_;
    const ComplexVector& s_;
};

// Wrapped-Gaussian phase sampler state for one antenna array.
struct PhaseDistribution {
    RealVector mean;
    RealVector spread;
};

// Box-Muller from 24-bit uniforms; each 64-bit draw yields one pair.
void fill_standard_normals(Rng& rng, Eigen::ArrayXXf& out)
{
    const Eigen::Index total = out.size();
    const Eigen::Index pairs = (total + 1) / 2;
    constexpr float scale = 1.0f / 16777216.0f;
    Eigen::ArrayXf u1(pairs);
    Eigen::ArrayXf u2(pairs);
    for (Eigen::Index i = 0; i < pairs; ++i) {
        const std::uint64_t w = rng();
        u1[i] = (static_cast<float>(w >> 40) + 0.5f) * scale;
        u2[i] = static_cast<float>((w >> 16) & 0xFFFFFFu) * scale;
    }
    const Eigen::ArrayXf radius = (-2.0f * u1.log()).sqrt();
    const Eigen::ArrayXf phase = static_cast<float>(2.0 * M_PI) * u2;
    Eigen::Map<Eigen::ArrayXf> flat(out.data(), total);
    flat.head(pairs) = radius * phase.cos();
    flat.tail(total - pairs) = (radius * phase.sin()).head(total - pairs);
}

} // namespace

// ---------------------------------------------------------------------------

double ir_objective(const ComplexVector& x, const ChannelMatrix& h, const ComplexVector& s)
{
    require_match(h, x.size(), s.size(), "ir_objective");
    return (h.data().transpose() * x - s).squaredNorm();
}

RealVector ir_phase_gradient(const ComplexVector& x, const ChannelMatrix& h, const ComplexVector& s)
{
    require_match(h, x.size(), s.size(), "ir_phase_gradient");
    const ComplexVector e = h.data().transpose() * x - s;
    const ComplexVector back = h.data() * e.conjugate();
    RealVector grad(x.size());
    for (Eigen::Index n = 0; n < x.size(); ++n) {
        grad[n] = -2.0 * (x[n] * back[n]).imag();
    }
    return grad;
}

void GdConfig::validate() const
{
    if (iterations < 0) {
        throw std::invalid_argument("GdConfig.iterations: must be non-negative");
    }
    if (!(initial_step > 0.0) || !(contraction > 0.0 && contraction < 1.0) || !(slope > 0.0 && slope < 1.0) ||
        max_backtracks < 1) {
        throw std::invalid_argument("GdConfig: invalid line-search parameters");
    }
}

SolveReport gd_ir_solve(const ChannelMatrix& h, const SymbolVector& s, double power_budget, const GdConfig& cfg)
{
    cfg.validate();
    if (h.n_users() != s.size()) {
        throw DimensionError("gd_ir_solve: dimension mismatch");
    }
    const auto started = Clock::now();
    const double radius = radius_for(h, power_budget);
    const ComplexVector sym = s.symbols();
    const Eigen::Index n_ant = h.n_antennas();

    RealVector theta = circle_random(n_ant, radius, cfg.seed).data().unaryExpr([](const Complex& z) {
        return std::arg(z);
    });
    ComplexVector x = phases_to_precoder(theta, radius);
    double value = ir_objective(x, h, sym);

    SolveReport report;
    report.solver = "gd-ir";
    report.objective_trace.push_back({value, value});
    report.grad_norm_trace.push_back(ir_phase_gradient(x, h, sym).norm());

    // d2f/dtheta_n^2 is at most 2 r^2 |h_n|^2 plus a cross term; the trial step is
    // initial_step over that diagonal scale (per antenna in the sequential variant).
    const RealVector row_energy = h.data().rowwise().squaredNorm();
    const double full_scale = 1.0 / (2.0 * radius * radius * row_energy.mean());

    for (int it = 0; it < cfg.iterations; ++it) {
        bool moved = false;
        if (!cfg.coordinate_sequential) {
            const RealVector grad = ir_phase_gradient(x, h, sym);
            const double slope = -grad.squaredNorm();
            if (!(slope < 0.0)) {
                break;
            }
            double step = cfg.initial_step * full_scale;
            for (int t = 0; t <= cfg.max_backtracks; ++t) {
                const RealVector trial = theta - step * grad;
                const ComplexVector xt = phases_to_precoder(trial, radius);
                const double vt = ir_objective(xt, h, sym);
                if (vt <= value + cfg.slope * step * slope) {
                    theta = trial;
                    x = xt;
                    value = vt;
                    moved = true;
                    break;
                }
                step *= cfg.contraction;
            }
        } else {
            ComplexVector residual = h.data().transpose() * x - sym;
            for (Eigen::Index n = 0; n < n_ant; ++n) {
                const Complex back = (h.data().row(n).transpose().array() * residual.conjugate().array()).sum();
                const double partial = -2.0 * (x[n] * back).imag();
                if (partial == 0.0) {
                    continue;
                }
                double step = cfg.initial_step / (2.0 * radius * radius * std::max(row_energy[n], 1e-300));
                for (int t = 0; t <= cfg.max_backtracks; ++t) {
                    const Complex xn = std::polar(radius, theta[n] - step * partial);
                    const ComplexVector rt = residual + h.data().row(n).transpose() * (xn - x[n]);
                    const double vt = rt.squaredNorm();
                    if (vt <= value - cfg.slope * step * partial * partial) {
                        theta[n] -= step * partial;
                        x[n] = xn;
                        residual = rt;
                        value = vt;
                        moved = true;
                        break;
                    }
                    step *= cfg.contraction;
                }
            }
        }
        report.iterations = it + 1;
        report.objective_trace.push_back({value, value});
        report.grad_norm_trace.push_back(ir_phase_gradient(x, h, sym).norm());
        if (!moved) {
            report.stalled = true;
            break;
        }
    }

    report.x = x;
    report.converged = false;
    report.x_final.emplace(RealPoint::from_precoder(x, power_budget));
    report.flops_estimate = static_cast<std::uint64_t>(report.iterations) * 16u *
                            static_cast<std::uint64_t>(h.n_users() * n_ant);
    report.wall_time_s = seconds_since(started);
    return report;
}

// ---------------------------------------------------------------------------

SolveReport rcg_ir_solve(const ChannelMatrix& h, const SymbolVector& s, double power_budget, const SolverConfig& cfg)
{
    const double radius = radius_for(h, power_budget);
    return rcg_ir_solve(h, s, circle_random(h.n_antennas(), radius, cfg.seed), cfg);
}

SolveReport rcg_ir_solve(const ChannelMatrix& h, const SymbolVector& s, const CirclePoint& init,
                         const SolverConfig& cfg)
{
    cfg.validate();
    require_match(h, init.size(), s.size(), "rcg_ir_solve");
    const auto started = Clock::now();
    const ComplexVector sym = s.symbols();
    const IrProblem problem(h, sym);

    SolveReport report;
    report.solver = "rcg-ir";
    auto recorder = [&report](const CirclePoint&, const IrProblem::Eval& e, double grad_norm) {
        report.objective_trace.push_back({e.value, e.value});
        report.grad_norm_trace.push_back(grad_norm);
    };
    // The IR Hessian is 2 conj(H) H^T; the trial step is armijo_initial over its mean diagonal.
    detail::LoopSettings settings = detail::loop_settings(cfg, cfg.resolved_grad_tol(h.n_antennas()));
    settings.armijo_initial /= 2.0 * h.data().rowwise().squaredNorm().mean();
    auto outcome = detail::run_rcg(problem, init, settings, recorder);

    const double power_budget = init.radius() * init.radius() * static_cast<double>(init.size());
    report.x = outcome.point.data();
    report.x_final.emplace(RealPoint::from_precoder(report.x, power_budget));
    report.iterations = outcome.iterations;
    report.converged = outcome.converged;
    report.stalled = outcome.stalled;
    report.flops_estimate = static_cast<std::uint64_t>(report.iterations) * 24u *
                            static_cast<std::uint64_t>(h.n_users() * h.n_antennas());
    report.wall_time_s = seconds_since(started);
    return report;
}

// ---------------------------------------------------------------------------

void CeoConfig::validate() const
{
    if (iterations < 1) {
        throw std::invalid_argument("CeoConfig.iterations: must be at least 1");
    }
    if (samples < 1) {
        throw std::invalid_argument("CeoConfig.samples: must be at least 1");
    }
    if (!(quantile > 0.0 && quantile < 1.0)) {
        throw std::invalid_argument("CeoConfig.quantile: must lie in (0, 1)");
    }
    if (!(smoothing > 0.0 && smoothing <= 1.0)) {
        throw std::invalid_argument("CeoConfig.smoothing: must lie in (0, 1]");
    }
}

int CeoConfig::elite_count() const
{
    const int count = static_cast<int>(std::ceil(quantile * samples - 1e-9));
    return std::clamp(count, 1, samples);
}

SolveReport ceo_solve(const ChannelMatrix& h, const SymbolVector& s, double power_budget, CeoObjective objective,
                      const CeoConfig& cfg)
{
    cfg.validate();
    if (h.n_users() != s.size()) {
        throw DimensionError("ceo_solve: dimension mismatch");
    }
    const auto started = Clock::now();
    const double radius = radius_for(h, power_budget);
    const Eigen::Index n_ant = h.n_antennas();
    const Eigen::Index n_users = h.n_users();
    const Eigen::Index k_samples = cfg.samples;
    const int n_elite = cfg.elite_count();
    const double beta = s.beta();
    const ComplexVector sym = s.symbols();

    // CI scores use the rotated channel so that each user's target lies on the real axis.
    ComplexMatrix h_t(n_users, n_ant);
    if (objective == CeoObjective::ci) {
        for (Eigen::Index m = 0; m < n_users; ++m) {
            h_t.row(m) = h.data().col(m).transpose() * std::polar(1.0, -s.phases()[m]);
        }
    } else {
        h_t = h.data().transpose();
    }

    // Exact double-precision score of one phase vector.
    auto score_of = [&](const RealVector& theta) {
        const ComplexVector r = h_t * phases_to_precoder(theta, radius);
        if (objective == CeoObjective::ir) {
            return (r - sym).squaredNorm();
        }
        double worst = -std::numeric_limits<double>::infinity();
        for (Eigen::Index m = 0; m < n_users; ++m) {
            worst = std::max(worst, std::abs(r[m].imag()) - beta * r[m].real());
        }
        return worst;
    };

    // Sampling and ranking run in single precision; only the ranking depends on it.
    const Eigen::MatrixXf h_re = (radius * h_t.real()).cast<float>();
    const Eigen::MatrixXf h_im = (radius * h_t.imag()).cast<float>();
    const Eigen::VectorXf s_re = sym.real().cast<float>();
    const Eigen::VectorXf s_im = sym.imag().cast<float>();
    const float beta_f = static_cast<float>(beta);

    Rng rng(cfg.seed);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    PhaseDistribution dist{RealVector(n_ant), RealVector::Constant(n_ant, M_PI)};
    for (Eigen::Index n = 0; n < n_ant; ++n) {
        dist.mean[n] = angle(rng);
    }

    Eigen::ArrayXXf theta(n_ant, k_samples);
    Eigen::ArrayXXf cos_t(n_ant, k_samples);
    Eigen::ArrayXXf sin_t(n_ant, k_samples);
    Eigen::MatrixXf rx_re(n_users, k_samples);
    Eigen::MatrixXf rx_im(n_users, k_samples);
    Eigen::ArrayXf scores(k_samples);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(k_samples));

    RealVector best_theta = dist.mean;
    double best_score = std::numeric_limits<double>::infinity();

    SolveReport report;
    report.solver = objective == CeoObjective::ci ? "ceo-ci" : "ceo-ir";
    report.objective_trace.reserve(static_cast<std::size_t>(cfg.iterations));

    for (int it = 0; it < cfg.iterations; ++it) {
        fill_standard_normals(rng, theta);
        const Eigen::ArrayXf mu = dist.mean.cast<float>().array();
        const Eigen::ArrayXf sigma = dist.spread.cast<float>().array();
        theta = (theta.colwise() * sigma).colwise() + mu;
        cos_t = theta.cos();
        sin_t = theta.sin();

        rx_re.noalias() = h_re * cos_t.matrix();
        rx_re.noalias() -= h_im * sin_t.matrix();
        rx_im.noalias() = h_re * sin_t.matrix();
        rx_im.noalias() += h_im * cos_t.matrix();

        if (objective == CeoObjective::ci) {
            scores = (rx_im.array().abs() - beta_f * rx_re.array()).colwise().maxCoeff().transpose();
        } else {
            scores = ((rx_re.colwise() - s_re).array().square() + (rx_im.colwise() - s_im).array().square())
                         .colwise()
                         .sum()
                         .transpose();
        }

        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::partial_sort(order.begin(), order.begin() + n_elite, order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return scores[a] < scores[b] || (scores[a] == scores[b] && a < b);
        });

        const RealVector candidate = theta.col(order[0]).cast<double>();
        const double candidate_score = score_of(candidate);
        if (candidate_score < best_score) {
            best_score = candidate_score;
            best_theta = candidate;
        }

        // Refit the circular mean and spread on the elite set, then blend.
        for (Eigen::Index n = 0; n < n_ant; ++n) {
            double c = 0.0;
            double sn = 0.0;
            for (int e = 0; e < n_elite; ++e) {
                const Eigen::Index k = order[static_cast<std::size_t>(e)];
                c += cos_t(n, k);
                sn += sin_t(n, k);
            }
            c /= n_elite;
            sn /= n_elite;
            const double resultant = std::min(1.0, std::hypot(c, sn));
            const double elite_mean = std::atan2(sn, c);
            const double elite_spread = resultant > 0.0 ? std::sqrt(-2.0 * std::log(resultant)) : M_PI;

            const double a = cfg.smoothing;
            const double mc = a * std::cos(elite_mean) + (1.0 - a) * std::cos(dist.mean[n]);
            const double ms = a * std::sin(elite_mean) + (1.0 - a) * std::sin(dist.mean[n]);
            dist.mean[n] = (mc == 0.0 && ms == 0.0) ? elite_mean : std::atan2(ms, mc);
            dist.spread[n] = a * elite_spread + (1.0 - a) * dist.spread[n];
        }

        report.objective_trace.push_back({best_score, best_score});
    }

    report.x = phases_to_precoder(best_theta, radius);
    report.x_final.emplace(RealPoint::from_precoder(report.x, power_budget));
    report.iterations = cfg.iterations;
    report.flops_estimate = static_cast<std::uint64_t>(cfg.iterations) * static_cast<std::uint64_t>(k_samples) * 8u *
                            static_cast<std::uint64_t>(n_users * n_ant);
    report.wall_time_s = seconds_since(started);
    return report;
}

// ---------------------------------------------------------------------------

void RelaxedCiConfig::validate() const
{
    if (iterations < 1) {
        throw std::invalid_argument("RelaxedCiConfig.iterations: must be at least 1");
    }
    if (!(initial_step > 0.0) || !std::isfinite(initial_step)) {
        throw std::invalid_argument("RelaxedCiConfig.initial_step: must be positive");
    }
}

ComplexVector clip_to_polydisc(const ComplexVector& x, double radius)
{
    ComplexVector out = x;
    for (Eigen::Index n = 0; n < out.size(); ++n) {
        const double len = std::abs(out[n]);
        if (len > radius) {
            out[n] *= radius / len;
        }
    }
    return out;
}

SolveReport relaxed_ci_solve(const ChannelMatrix& h, const SymbolVector& s, double power_budget,
                             const SolverConfig& cfg, const RelaxedCiConfig& relaxed)
{
    cfg.validate();
    relaxed.validate();
    const auto started = Clock::now();
    const double radius = radius_for(h, power_budget);
    const RotatedChannel ch = rotate_channel(h, s, power_budget);
    const double eps = cfg.resolved_epsilon(ch);
    const Eigen::Index n_ant = h.n_antennas();

    // Work directly in (x_R, x_I), interleaved like a column-major 2xN matrix.
    auto forms = [&ch](const ComplexVector& x) -> RealVector {
        RealVector flat(2 * x.size());
        for (Eigen::Index n = 0; n < x.size(); ++n) {
            flat[2 * n] = x[n].real();
            flat[2 * n + 1] = x[n].imag();
        }
        return ch.stacked.transpose() * flat;
    };

    ComplexVector x = circle_random(n_ant, radius, cfg.seed).data();
    RealVector g = forms(x);
    ComplexVector best = x;
    double best_exact = g.maxCoeff();

    SolveReport report;
    report.solver = "cvx-ci";
    report.objective_trace.push_back({best_exact, log_sum_exp(g, eps)});

    const double step0 = relaxed.initial_step * radius;
    for (int k = 1; k <= relaxed.iterations; ++k) {
        const RealVector w = softmax_weights(g, eps);
        const RealVector grad = ch.stacked * w;
        const double step = step0 / std::sqrt(static_cast<double>(k));
        for (Eigen::Index n = 0; n < n_ant; ++n) {
            x[n] -= step * Complex(grad[2 * n], grad[2 * n + 1]);
        }
        x = clip_to_polydisc(x, radius);
        g = forms(x);
        const double exact = g.maxCoeff();
        if (exact < best_exact) {
            best_exact = exact;
            best = x;
        }
        report.objective_trace.push_back({exact, log_sum_exp(g, eps)});
    }
    report.iterations = relaxed.iterations;

    // Normalize onto the constant-envelope set; a zero entry takes phase 0.
    ComplexVector ce(n_ant);
    for (Eigen::Index n = 0; n < n_ant; ++n) {
        const double len = std::abs(best[n]);
        ce[n] = len > 0.0 ? best[n] * (radius / len) : Complex(radius, 0.0);
    }
    const RealPoint point = RealPoint::from_precoder(ce, power_budget);
    const ObjectiveEval final_eval = evaluate(point, ch, eps);
    report.objective_trace.push_back({final_eval.exact_value, final_eval.smoothed_value});

    report.x = point.precoder();
    report.x_final.emplace(point);
    report.flops_estimate = static_cast<std::uint64_t>(relaxed.iterations) * 8u *
                            static_cast<std::uint64_t>(h.n_users() * n_ant);
    report.wall_time_s = seconds_since(started);
    return report;
}

} // namespace cep
