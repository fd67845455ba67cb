#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace mepde {

/// Numerical failure during a solve. Carries the time at which the solver
/// gave up when that is meaningful (NaN otherwise).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what,
                         double t_fail = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what), t_fail_(t_fail) {}

    double t_fail() const { return t_fail_; }

private:
    double t_fail_;
};

}  // namespace mepde
