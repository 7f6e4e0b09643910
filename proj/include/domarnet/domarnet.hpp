#pragma once

#include "domarnet/error.hpp"
#include "domarnet/network.hpp"
#include "domarnet/linalg.hpp"
#include "domarnet/equilibrium.hpp"
#include "domarnet/analysis.hpp"
#include "domarnet/domar.hpp"

namespace domarnet {
inline constexpr const char* kVersion = "0.1.0";
}
