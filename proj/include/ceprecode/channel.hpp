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

#ifndef CEPRECODE_CHANNEL_HPP
#define CEPRECODE_CHANNEL_HPP

#include "ceprecode/common.hpp"

#include <vector>

namespace cep {

/// Downlink channel H (N antennas x M users); column m is h_m and user m receives h_m^T x.
class ChannelMatrix {
public:
    // Throws DimensionError on an empty matrix and std::invalid_argument on
    // non-finite entries.
    explicit ChannelMatrix(ComplexMatrix h);

    const ComplexMatrix& data() const noexcept { return h_; }
    Eigen::Index n_antennas() const noexcept { return h_.rows(); }
    Eigen::Index n_users() const noexcept { return h_.cols(); }

    // More users than antennas is allowed but leaves few degrees of freedom.
    bool underdetermined() const noexcept { return h_.cols() > h_.rows(); }

private:
    ComplexMatrix h_;
};

/// Desired L-PSK symbols s_m = u exp(j phi_m) with phi_m = 2 pi k_m / L.
class SymbolVector {
public:
    // Throws std::invalid_argument for L < 2, u <= 0 or an index outside [0, L).
    SymbolVector(std::vector<int> indices, int order, double amplitude);

    const std::vector<int>& indices() const noexcept { return indices_; }
    const RealVector& phases() const noexcept { return phases_; }
    Eigen::Index size() const noexcept { return phases_.size(); }
    int order() const noexcept { return order_; }
    double amplitude() const noexcept { return amplitude_; }
    double half_angle() const noexcept; // psi = pi / L
    double beta() const noexcept;       // tan(psi); unbounded for L = 2, so the CI form needs L >= 3
    double symbol_energy() const noexcept { return amplitude_ * amplitude_; }

    ComplexVector symbols() const;

private:
    std::vector<int> indices_;
    RealVector phases_;
    int order_;
    double amplitude_;
};

} // namespace cep

#endif // CEPRECODE_CHANNEL_HPP
