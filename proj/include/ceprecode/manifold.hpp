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

#ifndef CEPRECODE_MANIFOLD_HPP
#define CEPRECODE_MANIFOLD_HPP

#include "ceprecode/common.hpp"

#include <memory>

namespace cep {

inline constexpr double kMembershipTol = 1e-12;
inline constexpr double kTangencyTol = 1e-10;

class TangentVector;

/**
 * Point on the 2xN oblique manifold: a real matrix whose columns have unit
 * Euclidean norm. Column n holds (cos theta_n, sin theta_n) of antenna n, i.e.
 * row 0 is x_R * sqrt(N/P_T) and row 1 is x_I * sqrt(N/P_T).
 *
 * Immutable; copies share storage.
 */
class RealPoint {
public:
    // Validates column norms against kMembershipTol. Throws DimensionError for
    // N = 0 and std::invalid_argument for non-unit columns or P_T <= 0.
    explicit RealPoint(Matrix2N data, double power_budget = 1.0);

    // Normalizes each column; throws DegenerateRetraction on a zero column.
    static RealPoint normalized(const Matrix2N& data, double power_budget = 1.0);
    static RealPoint from_phases(const RealVector& theta, double power_budget = 1.0);
    // Normalizes each entry of a complex precoder back onto the manifold.
    static RealPoint from_precoder(const ComplexVector& x, double power_budget = 1.0);

    const Matrix2N& data() const noexcept { return *data_; }
    Eigen::Index n_antennas() const noexcept { return data_->cols(); }
    double power_budget() const noexcept { return power_budget_; }

    // sqrt(P_T/N): modulus of every precoded symbol.
    double amplitude() const noexcept;

    // x = sqrt(P_T/N) * (row0 + j*row1).
    ComplexVector precoder() const;
    RealVector phases() const;

    // True when both points refer to the same matrix (shared storage or equal entries).
    bool same_as(const RealPoint& other) const noexcept;

private:
    struct Unchecked {};
    RealPoint(Unchecked, Matrix2N data, double power_budget);

    std::shared_ptr<const Matrix2N> data_;
    double power_budget_;

    friend RealPoint retract(const RealPoint&, const TangentVector&, double);
};

/// Element of the tangent space at `base`: diag(base^T U) = 0.
class TangentVector {
public:
    // Wraps `data` without projecting; throws std::invalid_argument when the
    // tangency residual exceeds kTangencyTol.
    TangentVector(RealPoint base, Matrix2N data);
    static TangentVector zero(const RealPoint& base);

    const Matrix2N& data() const noexcept { return data_; }
    const RealPoint& base() const noexcept { return base_; }

    // Largest |(X^T U)_nn|.
    double tangency_residual() const;

    TangentVector operator-() const;
    TangentVector& operator+=(const TangentVector& rhs);
    TangentVector& operator*=(double s);
    friend TangentVector operator+(TangentVector a, const TangentVector& b) { return a += b; }
    friend TangentVector operator-(TangentVector a, const TangentVector& b) { return a += -b; }
    friend TangentVector operator*(double s, TangentVector v) { return v *= s; }

private:
    struct Trusted {};
    TangentVector(Trusted, RealPoint base, Matrix2N data);

    RealPoint base_;
    Matrix2N data_;

    friend TangentVector tangent_project(const RealPoint&, const Matrix2N&);
    friend TangentVector tangent_project_dense(const RealPoint&, const Matrix2N&);
};

/// Point drawn with every column an independent standard-normal 2-vector, normalized.
RealPoint oblique_random(Eigen::Index n_antennas, std::uint64_t seed, double power_budget = 1.0);

/// Orthogonal projection G - X diag(X^T G), evaluated column by column in O(N).
TangentVector tangent_project(const RealPoint& x, const Matrix2N& g);

/// Same projection evaluated in matrix form: the full NxN product X^T G is
/// formed and its diagonal extracted. O(N^2); this is the evaluation the
/// per-iteration flop model counts.
TangentVector tangent_project_dense(const RealPoint& x, const Matrix2N& g);

/// tr(U^T V). Throws std::invalid_argument when the base points differ.
double metric(const TangentVector& u, const TangentVector& v);

/// tr(U^T V) with U^T V formed as an NxN matrix.
double metric_dense(const TangentVector& u, const TangentVector& v);

double norm(const TangentVector& u);

/// Column-wise normalization of X + step*V. step == 0 returns X unchanged.
RealPoint retract(const RealPoint& x, const TangentVector& v, double step);

/// Projection of V (tangent elsewhere) onto the tangent space at x_new.
TangentVector transport(const RealPoint& x_new, const TangentVector& v);
TangentVector transport_dense(const RealPoint& x_new, const TangentVector& v);

// ---------------------------------------------------------------------------
// Complex circle manifold {x in C^N : |x_n| = r}, used by the IR baseline.

class CirclePoint {
public:
    // Validates |x_n| = radius within kMembershipTol.
    CirclePoint(ComplexVector data, double radius);
    static CirclePoint from_phases(const RealVector& theta, double radius);

    const ComplexVector& data() const noexcept { return data_; }
    double radius() const noexcept { return radius_; }
    Eigen::Index size() const noexcept { return data_.size(); }

private:
    struct Unchecked {};
    CirclePoint(Unchecked, ComplexVector data, double radius);

    ComplexVector data_;
    double radius_;

    friend CirclePoint circle_retract(const CirclePoint&, const ComplexVector&, double);
};

CirclePoint circle_random(Eigen::Index n, double radius, std::uint64_t seed);

/// u_n = g_n - Re(g_n conj(x_n)) x_n / r^2.
ComplexVector circle_project(const CirclePoint& x, const ComplexVector& g);

/// r * (x_n + step v_n) / |x_n + step v_n|.
CirclePoint circle_retract(const CirclePoint& x, const ComplexVector& v, double step);

/// Real inner product Re(sum conj(u_n) v_n).
double circle_metric(const ComplexVector& u, const ComplexVector& v);

} // namespace cep

#endif // CEPRECODE_MANIFOLD_HPP
