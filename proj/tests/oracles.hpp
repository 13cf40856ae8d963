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

// Independent reference computations shared by the tests.
#ifndef CEPRECODE_TESTS_ORACLES_HPP
#define CEPRECODE_TESTS_ORACLES_HPP

#include "ceprecode/sim.hpp"

#include <cmath>
#include <random>

namespace oracle {

using cep::Complex;

inline cep::ComplexMatrix random_complex(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed ^ 0x5eedULL);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    cep::ComplexMatrix out(rows, cols);
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out.data()[i] = Complex(normal(rng), normal(rng));
    }
    return out;
}

inline cep::SymbolVector random_symbols(Eigen::Index m, int order, double u, std::uint64_t seed)
{
    std::mt19937_64 rng(seed ^ 0xabcULL);
    std::vector<int> idx(static_cast<std::size_t>(m));
    for (auto& k : idx) {
        k = static_cast<int>(rng() % static_cast<std::uint64_t>(order));
    }
    return cep::SymbolVector(idx, order, u);
}

// |Im t_m| - beta Re t_m with t_m the rotated residual of user m.
inline double sector_violation(Complex received, Complex symbol, double phase, double beta)
{
    const Complex t = (received - symbol) * std::polar(1.0, -phase);
    return std::abs(t.imag()) - beta * t.real();
}

// max_m of sector_violation by explicit loops.
inline double ci_cost_loop(const cep::ComplexMatrix& h, const cep::ComplexVector& x, const cep::SymbolVector& s)
{
    double worst = -1e300;
    for (Eigen::Index m = 0; m < h.cols(); ++m) {
        Complex r = 0.0;
        for (Eigen::Index n = 0; n < h.rows(); ++n) {
            r += h(n, m) * x[n];
        }
        worst = std::max(worst, sector_violation(r, s.symbols()[m], s.phases()[m], s.beta()));
    }
    return worst;
}

// Global minimum of |sin a| - beta cos a scaled by |h| over a uniform grid of
// the transmit phase, for the single-antenna single-user CI problem.
inline double scalar_ci_grid_min(Complex h, double power, double phase, double beta, int points = 100000)
{
    double best = 1e300;
    for (int i = 0; i < points; ++i) {
        const double theta = 2.0 * M_PI * i / points;
        const Complex r = h * std::polar(std::sqrt(power), theta) * std::polar(1.0, -phase);
        best = std::min(best, std::abs(r.imag()) - beta * r.real());
    }
    return best;
}

inline double q_function(double x)
{
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

// Exact QPSK symbol error probability in AWGN at symbol SNR es_n0.
inline double qpsk_awgn_ser(double es_n0)
{
    const double q = q_function(std::sqrt(es_n0));
    return 2.0 * q - q * q;
}

} // namespace oracle

#endif
