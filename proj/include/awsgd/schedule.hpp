#ifndef AWSGD_SCHEDULE_HPP_
#define AWSGD_SCHEDULE_HPP_

#include <cstdint>

#include "awsgd/errors.hpp"

namespace awsgd {

// Learning-rate schedule. InverseTime and AdaGrad are indexed by the number
// of samples consumed so far, not by batch steps.
struct Schedule {
    enum class Kind { Constant, InverseTime, AdaGrad };

    Kind kind = Kind::Constant;
    double base = 0.0;
    double offset = 0.0;
    double eps = 1e-8;

    static Schedule constant(double rate) { return {Kind::Constant, rate, 0.0, 0.0}; }

    static Schedule inverseTime(double rate0, double timeOffset) {
        if (timeOffset < 0.0) throw ConfigError("schedule offset must be >= 0");
        return {Kind::InverseTime, rate0, timeOffset, 0.0};
    }

    static Schedule adagrad(double rate0, double epsilon = 1e-8) {
        if (epsilon <= 0.0) throw ConfigError("adagrad eps must be > 0");
        return {Kind::AdaGrad, rate0, 0.0, epsilon};
    }

    bool isAdaGrad() const { return kind == Kind::AdaGrad; }

    // Scalar rate at sample count t. For AdaGrad this is the base rate; the
    // per-coordinate scaling is applied by the optimizer.
    double at(std::int64_t t) const {
        switch (kind) {
            case Kind::Constant:
                return base;
            case Kind::InverseTime:
                return base / (offset + static_cast<double>(t));
            case Kind::AdaGrad:
                return base;
        }
        return base;
    }
};

}  // namespace awsgd

#endif  // AWSGD_SCHEDULE_HPP_
