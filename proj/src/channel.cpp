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

#include "ceprecode/channel.hpp"

#include <cmath>
#include <string>

namespace cep {

ChannelMatrix::ChannelMatrix(ComplexMatrix h) : h_(std::move(h))
{
    if (h_.rows() == 0 || h_.cols() == 0) {
        throw DimensionError("ChannelMatrix: empty channel");
    }
    if (!h_.allFinite()) {
        throw std::invalid_argument("ChannelMatrix: non-finite entry");
    }
}

SymbolVector::SymbolVector(std::vector<int> indices, int order, double amplitude)
    : indices_(std::move(indices)), order_(order), amplitude_(amplitude)
{
    if (order_ < 2) {
        throw std::invalid_argument("SymbolVector: PSK order must be at least 2, got " + std::to_string(order_));
    }
    if (!(amplitude_ > 0.0) || !std::isfinite(amplitude_)) {
        throw std::invalid_argument("SymbolVector: amplitude must be positive");
    }
    if (indices_.empty()) {
        throw DimensionError("SymbolVector: need at least one user");
    }
    phases_.resize(static_cast<Eigen::Index>(indices_.size()));
    for (std::size_t m = 0; m < indices_.size(); ++m) {
        if (indices_[m] < 0 || indices_[m] >= order_) {
            throw std::invalid_argument("SymbolVector: symbol index out of range");
        }
        phases_[static_cast<Eigen::Index>(m)] = 2.0 * M_PI * indices_[m] / order_;
    }
}

double SymbolVector::half_angle() const noexcept
{
    return M_PI / order_;
}

double SymbolVector::beta() const noexcept
{
    return std::tan(half_angle());
}

ComplexVector SymbolVector::symbols() const
{
    ComplexVector s(size());
    for (Eigen::Index m = 0; m < size(); ++m) {
        s[m] = std::polar(amplitude_, phases_[m]);
    }
    return s;
}

} // namespace cep
