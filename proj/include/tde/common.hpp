#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tde {

// Storage scalar. The default build uses f32; the gradient-check build
// compiles the same sources with TDE_REAL_DOUBLE so finite differences
// can be held to 1e-6.
#ifdef TDE_REAL_DOUBLE
using Real = double;
#else
using Real = float;
#endif

using i64 = std::int64_t;
using u64 = std::uint64_t;
using u32 = std::uint32_t;

struct EmptyTrajectory : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingWeather : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotAirborne : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnlabeledFlight : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyDataset : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TemplateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Worker-thread cap, from TDE_THREADS. 1 means fully serial.
int max_threads();

constexpr double kTmaRadiusKm = 120.0;       // TMA horizontal radius, also the scaling constant
constexpr double kEnuScaleMeters = 120000.0; // divide ENU meters by this
constexpr double kEarthRadiusKm = 6371.0088; // mean Earth radius
constexpr double kFeetToMeters = 0.3048;

} // namespace tde
