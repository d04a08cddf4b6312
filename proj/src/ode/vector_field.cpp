#include "hyperode/ode/vector_field.hpp"

#include <string>

#include "hyperode/error.hpp"

namespace hyperode {

VectorField::VectorField(std::size_t dim, Dynamics dynamics, ExactSolution exact)
    : dim_(dim), dynamics_(std::move(dynamics)), exact_(std::move(exact)) {
    if (dim_ == 0) throw DimensionError("vector field dimension must be positive");
    if (!dynamics_) throw DimensionError("vector field needs a dynamics function");
}

Vector VectorField::operator()(double s, std::span<const double> z) {
    if (z.size() != dim_)
        throw DimensionError("state has length " + std::to_string(z.size()) + ", field expects " +
                             std::to_string(dim_));
    ++nfe_;
    Vector out = dynamics_(s, z);
    if (out.size() != dim_) throw DimensionError("dynamics returned a vector of the wrong length");
    return out;
}

Vector VectorField::exact(double s, std::span<const double> z0) const {
    if (!exact_) throw UndefinedMetricError("vector field has no exact solution");
    if (z0.size() != dim_) throw DimensionError("initial condition has the wrong length");
    return exact_(s, z0);
}

VectorField VectorField::clone() const { return VectorField(dim_, dynamics_, exact_); }

} // namespace hyperode
