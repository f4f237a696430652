#pragma once

#include <Eigen/Core>

namespace pctladp {

inline constexpr const char* version = "0.1.0";

}  // namespace pctladp
