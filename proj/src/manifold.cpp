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

#include "ceprecode/manifold.hpp"

#include <cmath>
#include <string>

namespace cep {

namespace {

void require_same_shape(const RealPoint& x, const Matrix2N& g, const char* what)
{
    if (g.cols() != x.n_antennas()) {
        throw DimensionError(std::string(what) + ": expected 2x" + std::to_string(x.n_antennas()) +
                             " matrix, got 2x" + std::to_string(g.cols()));
    }
}

void require_same_base(const TangentVector& u, const TangentVector& v, const char* what)
{
    if (!u.base().same_as(v.base())) {
        throw std::invalid_argument(std::string(what) + ": tangent vectors live at different points");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// RealPoint

RealPoint::RealPoint(Matrix2N data, double power_budget)
    : RealPoint(Unchecked{}, std::move(data), power_budget)
{
    if (!(power_budget > 0.0) || !std::isfinite(power_budget)) {
        throw std::invalid_argument("RealPoint: power budget must be positive");
    }
    for (Eigen::Index n = 0; n < data_->cols(); ++n) {
        const double err = std::abs(data_->col(n).norm() - 1.0);
        if (!(err <= kMembershipTol)) {
            throw std::invalid_argument("RealPoint: column " + std::to_string(n) + " is not unit norm");
        }
    }
}

RealPoint::RealPoint(Unchecked, Matrix2N data, double power_budget)
    : data_(std::make_shared<const Matrix2N>(std::move(data))), power_budget_(power_budget)
{
    if (data_->cols() == 0) {
        throw DimensionError("RealPoint: need at least one antenna");
    }
}

RealPoint RealPoint::normalized(const Matrix2N& data, double power_budget)
{
    if (data.cols() == 0) {
        throw DimensionError("RealPoint: need at least one antenna");
    }
    Matrix2N out(2, data.cols());
    for (Eigen::Index n = 0; n < data.cols(); ++n) {
        const double len = data.col(n).norm();
        if (!(len > 0.0) || !std::isfinite(len)) {
            throw DegenerateRetraction("column " + std::to_string(n) + " has zero length");
        }
        out.col(n) = data.col(n) / len;
    }
    return RealPoint(std::move(out), power_budget);
}

RealPoint RealPoint::from_phases(const RealVector& theta, double power_budget)
{
    Matrix2N out(2, theta.size());
    out.row(0) = theta.array().cos().matrix().transpose();
    out.row(1) = theta.array().sin().matrix().transpose();
    return RealPoint(std::move(out), power_budget);
}

RealPoint RealPoint::from_precoder(const ComplexVector& x, double power_budget)
{
    Matrix2N raw(2, x.size());
    raw.row(0) = x.real().transpose();
    raw.row(1) = x.imag().transpose();
    return normalized(raw, power_budget);
}

double RealPoint::amplitude() const noexcept
{
    return std::sqrt(power_budget_ / static_cast<double>(n_antennas()));
}

ComplexVector RealPoint::precoder() const
{
    const double a = amplitude();
    ComplexVector x(n_antennas());
    for (Eigen::Index n = 0; n < n_antennas(); ++n) {
        x[n] = Complex(a * (*data_)(0, n), a * (*data_)(1, n));
    }
    return x;
}

RealVector RealPoint::phases() const
{
    RealVector theta(n_antennas());
    for (Eigen::Index n = 0; n < n_antennas(); ++n) {
        theta[n] = std::atan2((*data_)(1, n), (*data_)(0, n));
    }
    return theta;
}

bool RealPoint::same_as(const RealPoint& other) const noexcept
{
    return data_ == other.data_ || (data_->cols() == other.data_->cols() && *data_ == *other.data_);
}

// ---------------------------------------------------------------------------
// TangentVector

TangentVector::TangentVector(RealPoint base, Matrix2N data)
    : TangentVector(Trusted{}, std::move(base), std::move(data))
{
    if (data_.cols() != base_.n_antennas()) {
        throw DimensionError("TangentVector: shape does not match base point");
    }
    if (!(tangency_residual() <= kTangencyTol)) {
        throw std::invalid_argument("TangentVector: matrix is not tangent at the base point");
    }
}

TangentVector::TangentVector(Trusted, RealPoint base, Matrix2N data)
    : base_(std::move(base)), data_(std::move(data))
{
}

TangentVector TangentVector::zero(const RealPoint& base)
{
    return TangentVector(Trusted{}, base, Matrix2N::Zero(2, base.n_antennas()));
}

double TangentVector::tangency_residual() const
{
    return (base_.data().cwiseProduct(data_)).colwise().sum().cwiseAbs().maxCoeff();
}

TangentVector TangentVector::operator-() const
{
    return TangentVector(Trusted{}, base_, -data_);
}

TangentVector& TangentVector::operator+=(const TangentVector& rhs)
{
    require_same_base(*this, rhs, "TangentVector::operator+");
    data_ += rhs.data_;
    return *this;
}

TangentVector& TangentVector::operator*=(double s)
{
    data_ *= s;
    return *this;
}

// ---------------------------------------------------------------------------
// Oblique manifold operations

RealPoint oblique_random(Eigen::Index n_antennas, std::uint64_t seed, double power_budget)
{
    if (n_antennas < 1) {
        throw DimensionError("oblique_random: N must be at least 1");
    }
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix2N raw(2, n_antennas);
    for (Eigen::Index n = 0; n < n_antennas; ++n) {
        // A draw of exactly (0, 0) has probability zero but is still rejected.
        do {
            raw(0, n) = normal(rng);
            raw(1, n) = normal(rng);
        } while (raw(0, n) == 0.0 && raw(1, n) == 0.0);
    }
    return RealPoint::normalized(raw, power_budget);
}

TangentVector tangent_project(const RealPoint& x, const Matrix2N& g)
{
    require_same_shape(x, g, "tangent_project");
    const Matrix2N& xd = x.data();
    const Eigen::RowVectorXd radial = xd.cwiseProduct(g).colwise().sum();
    Matrix2N out = g - xd * radial.asDiagonal();
    return TangentVector(TangentVector::Trusted{}, x, std::move(out));
}

TangentVector tangent_project_dense(const RealPoint& x, const Matrix2N& g)
{
    require_same_shape(x, g, "tangent_project_dense");
    const Matrix2N& xd = x.data();
    const RealMatrix gram = xd.transpose() * g; // N x N
    const RealVector radial = gram.diagonal();
    Matrix2N out = g - xd * radial.asDiagonal();
    return TangentVector(TangentVector::Trusted{}, x, std::move(out));
}

double metric(const TangentVector& u, const TangentVector& v)
{
    require_same_base(u, v, "metric");
    return u.data().cwiseProduct(v.data()).sum();
}

double metric_dense(const TangentVector& u, const TangentVector& v)
{
    require_same_base(u, v, "metric_dense");
    const RealMatrix prod = u.data().transpose() * v.data(); // N x N
    return prod.trace();
}

double norm(const TangentVector& u)
{
    return u.data().norm();
}

RealPoint retract(const RealPoint& x, const TangentVector& v, double step)
{
    if (v.data().cols() != x.n_antennas()) {
        throw DimensionError("retract: tangent vector shape does not match point");
    }
    if (!std::isfinite(step)) {
        throw std::invalid_argument("retract: step must be finite");
    }
    if (step == 0.0 || v.data().isZero(0.0)) {
        return x;
    }
    Matrix2N moved = x.data() + step * v.data();
    for (Eigen::Index n = 0; n < moved.cols(); ++n) {
        const double len = moved.col(n).norm();
        if (!(len > 0.0) || !std::isfinite(len)) {
            throw DegenerateRetraction("retract: column " + std::to_string(n) + " collapsed to zero");
        }
        moved.col(n) /= len;
    }
    return RealPoint(RealPoint::Unchecked{}, std::move(moved), x.power_budget());
}

TangentVector transport(const RealPoint& x_new, const TangentVector& v)
{
    return tangent_project(x_new, v.data());
}

TangentVector transport_dense(const RealPoint& x_new, const TangentVector& v)
{
    return tangent_project_dense(x_new, v.data());
}

// ---------------------------------------------------------------------------
// Complex circle manifold

CirclePoint::CirclePoint(ComplexVector data, double radius)
    : CirclePoint(Unchecked{}, std::move(data), radius)
{
    for (Eigen::Index n = 0; n < data_.size(); ++n) {
        if (!(std::abs(std::abs(data_[n]) - radius_) <= kMembershipTol)) {
            throw std::invalid_argument("CirclePoint: entry " + std::to_string(n) + " is off the circle");
        }
    }
}

CirclePoint::CirclePoint(Unchecked, ComplexVector data, double radius)
    : data_(std::move(data)), radius_(radius)
{
    if (data_.size() == 0) {
        throw DimensionError("CirclePoint: need at least one entry");
    }
    if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
        throw std::invalid_argument("CirclePoint: radius must be positive");
    }
}

CirclePoint CirclePoint::from_phases(const RealVector& theta, double radius)
{
    ComplexVector x(theta.size());
    for (Eigen::Index n = 0; n < theta.size(); ++n) {
        x[n] = std::polar(radius, theta[n]);
    }
    return CirclePoint(std::move(x), radius);
}

CirclePoint circle_random(Eigen::Index n, double radius, std::uint64_t seed)
{
    if (n < 1) {
        throw DimensionError("circle_random: N must be at least 1");
    }
    Rng rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    RealVector theta(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        theta[i] = angle(rng);
    }
    return CirclePoint::from_phases(theta, radius);
}

ComplexVector circle_project(const CirclePoint& x, const ComplexVector& g)
{
    if (g.size() != x.size()) {
        throw DimensionError("circle_project: length mismatch");
    }
    const double r2 = x.radius() * x.radius();
    ComplexVector u(g.size());
    for (Eigen::Index n = 0; n < g.size(); ++n) {
        const double radial = (g[n] * std::conj(x.data()[n])).real();
        u[n] = g[n] - (radial / r2) * x.data()[n];
    }
    return u;
}

CirclePoint circle_retract(const CirclePoint& x, const ComplexVector& v, double step)
{
    if (v.size() != x.size()) {
        throw DimensionError("circle_retract: length mismatch");
    }
    if (!std::isfinite(step)) {
        throw std::invalid_argument("circle_retract: step must be finite");
    }
    if (step == 0.0 || v.isZero(0.0)) {
        return x;
    }
    ComplexVector out(x.size());
    for (Eigen::Index n = 0; n < x.size(); ++n) {
        const Complex moved = x.data()[n] + step * v[n];
        const double len = std::abs(moved);
        if (!(len > 0.0) || !std::isfinite(len)) {
            throw DegenerateRetraction("circle_retract: entry " + std::to_string(n) + " collapsed to zero");
        }
        out[n] = moved * (x.radius() / len);
    }
    return CirclePoint(CirclePoint::Unchecked{}, std::move(out), x.radius());
}

double circle_metric(const ComplexVector& u, const ComplexVector& v)
{
    if (u.size() != v.size()) {
        throw DimensionError("circle_metric: length mismatch");
    }
    return (u.conjugate().cwiseProduct(v)).sum().real();
}

} // namespace cep
