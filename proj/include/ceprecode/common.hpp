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

#ifndef CEPRECODE_COMMON_HPP
#define CEPRECODE_COMMON_HPP

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cep {

inline constexpr std::string_view kLibraryVersion = "1.0.0";

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Matrix2N = Eigen::Matrix<double, 2, Eigen::Dynamic>;

// Deterministic 64-bit engine; every random stream in the library is one of these.
using Rng = std::mt19937_64;

// Shape or length mismatch between operands.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A retraction step produced a zero column (oblique) or a zero entry (circle).
class DegenerateRetraction : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mixes (master, index, tag) into an independent seed. Used to give every
// Monte-Carlo slot, purpose and solver its own reproducible stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view tag) noexcept;

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) noexcept;

} // namespace cep

#endif // CEPRECODE_COMMON_HPP
