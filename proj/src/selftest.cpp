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

#include "ceprecode/cli.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>

namespace cep {

namespace {

struct Check {
    bool ok = true;
    double worst = 0.0;

    void observe(double err, double tol)
    {
        worst = std::max(worst, err);
        ok = ok && err < tol;
    }
};

Matrix2N random_matrix(Eigen::Index n, Rng& rng)
{
    std::normal_distribution<double> normal;
    Matrix2N m(2, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = normal(rng);
    }
    return m;
}

Check manifold_checks()
{
    Check c;
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        const Eigen::Index n = 1 + t % 32;
        const RealPoint x = oblique_random(n, rng());
        const TangentVector v = tangent_project(x, random_matrix(n, rng));
        c.observe(v.tangency_residual(), kTangencyTol);
        c.observe((tangent_project(x, v.data()).data() - v.data()).cwiseAbs().maxCoeff(), 1e-12);
        const RealPoint y = retract(x, v, 0.7);
        c.observe((y.data().colwise().norm().array() - 1.0).abs().maxCoeff(), kMembershipTol);
        c.observe((retract(x, TangentVector::zero(x), 1.0).data() - x.data()).cwiseAbs().maxCoeff(), 1e-15);
    }
    return c;
}

Check gradient_checks()
{
    Check c;
    for (int t = 0; t < 10; ++t) {
        const Eigen::Index n = 8;
        const Eigen::Index m = 4;
        const ChannelMatrix h = generate_channel(n, m, derive_seed(5, t, "selftest/h"));
        const SymbolVector s = draw_symbols(m, 4, 1.0, derive_seed(5, t, "selftest/s"));
        const RotatedChannel ch = rotate_channel(h, s, 1.0);
        const double eps = 0.1;
        Rng rng(derive_seed(5, t, "selftest/x"));
        const Matrix2N x = random_matrix(n, rng);
        const RealVector w = softmax_weights(eval_g(x, ch), eps);
        const Matrix2N grad = euclidean_gradient_from_weights(ch, w);
        Matrix2N fd(2, n);
        const double h_step = 1e-6;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            Matrix2N up = x;
            Matrix2N dn = x;
            up.data()[i] += h_step;
            dn.data()[i] -= h_step;
            fd.data()[i] = (log_sum_exp(eval_g(up, ch), eps) - log_sum_exp(eval_g(dn, ch), eps)) / (2 * h_step);
        }
        c.observe((grad - fd).norm() / std::max(fd.norm(), 1e-12), 1e-5);
    }
    return c;
}

Check identity_checks()
{
    Check c;
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index n = 2 + t % 7;
        const Eigen::Index m = 1 + t % 4;
        const ChannelMatrix h = generate_channel(n, m, derive_seed(6, t, "selftest/h"));
        const SymbolVector s = draw_symbols(m, 4 + 4 * (t % 2), 1.0, derive_seed(6, t, "selftest/s"));
        const RotatedChannel ch = rotate_channel(h, s, 1.0);
        const RealPoint x = oblique_random(n, derive_seed(6, t, "selftest/x"));
        const RealVector g = eval_g(x, ch);
        const ComplexVector received = h.data().transpose() * x.precoder();
        for (Eigen::Index k = 0; k < m; ++k) {
            const Complex tk = (received[k] - s.symbols()[k]) * std::polar(1.0, -s.phases()[k]);
            const double lhs = std::abs(tk.imag()) - s.beta() * tk.real();
            const double rhs = std::max(g[2 * k], g[2 * k + 1]) + s.amplitude() * s.beta();
            c.observe(std::abs(lhs - rhs), 1e-10);
        }
        const double eps = 0.05;
        const double gap = log_sum_exp(g, eps) - g.maxCoeff();
        c.observe(gap < 0.0 ? 1.0 : 0.0, 0.5);
        c.observe(gap > eps * std::log(2.0 * static_cast<double>(m)) + 1e-12 ? 1.0 : 0.0, 0.5);
    }
    return c;
}

Check scalar_checks()
{
    Check c;
    ComplexMatrix one(1, 1);
    one(0, 0) = 1.0;
    const ChannelMatrix h(one);
    const SymbolVector s({0}, 4, 1.0);
    for (int t = 0; t < 5; ++t) {
        SolverConfig cfg;
        cfg.seed = derive_seed(7, t, "selftest/scalar");
        const SolveReport r = rcg_solve(h, s, 1.0, cfg);
        c.observe(std::abs(r.final_exact() + 1.0), 1e-3);
        c.observe(envelope_deviation(r.x, 1.0), 1e-12);
    }
    return c;
}

} // namespace

int run_selftest(std::ostream& out)
{
    bool all = true;
    auto report = [&](std::string_view name, const Check& c) {
        out << fmt::format("{} {:<34} worst {:.3e}\n", c.ok ? "PASS" : "FAIL", name, c.worst);
        all = all && c.ok;
    };
    report("manifold invariants", manifold_checks());
    report("gradient vs finite differences", gradient_checks());
    report("CI identity and smoothing bound", identity_checks());
    report("scalar instance optimum", scalar_checks());

    Check flops;
    flops.observe(flop_model(64, 20, FlopStage::gradient) == 84840 ? 0.0 : 1.0, 0.5);
    flops.observe(flop_model(64, 20, FlopStage::direction) == 16768 ? 0.0 : 1.0, 0.5);
    report("flop model", flops);

    Check detect;
    detect.observe(detect_psk(std::polar(1.0, 0.1), 4).index == 0 ? 0.0 : 1.0, 0.5);
    detect.observe(detect_psk(Complex(1.0, 1.0), 4).index == 0 ? 0.0 : 1.0, 0.5);
    detect.observe(detect_psk(Complex(0.0, 0.0), 4).degenerate ? 0.0 : 1.0, 0.5);
    report("PSK detector", detect);

    return all ? kExitOk : kExitNumerical;
}

} // namespace cep
