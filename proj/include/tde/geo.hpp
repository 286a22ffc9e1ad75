#pragma once

#include <vector>

#include "tde/common.hpp"

namespace tde {

// Geodetic position, WGS-84 degrees / meters MSL / UTC epoch seconds.
struct GeoPoint {
  double lat = 0;
  double lon = 0;
  double alt = 0;
  double t = 0;
};

// ENU offset from the airport origin, in meters.
struct EnuVector {
  double x = 0;
  double y = 0;
  double z = 0;
};

// ENU state scaled by 120 km, the encoder's native coordinate.
struct EnuState {
  double x = 0;
  double y = 0;
  double z = 0;
  double t = 0;
};

// The 9 channels fed to the trajectory encoder, one row per kept timestep.
struct FeatureRow {
  double x, y, z;
  double ux, uy, uz;
  double r;
  double sin_t, cos_t;
};

bool valid_geopoint(const GeoPoint& p);

EnuVector geodetic_to_enu(const GeoPoint& p, const GeoPoint& origin);
GeoPoint enu_to_geodetic(const EnuVector& enu, const GeoPoint& origin);

double great_circle_distance_km(const GeoPoint& a, const GeoPoint& b);

// Linear interpolation onto the integer-second grid spanned by the input;
// duplicate timestamps collapse to the last record. Throws EmptyTrajectory
// when fewer than two distinct-time points remain.
std::vector<GeoPoint> resample_1hz(const std::vector<GeoPoint>& raw);

// Scale to the TMA-normalized frame.
std::vector<EnuState> to_enu_states(const std::vector<GeoPoint>& pts,
                                    const GeoPoint& origin);

// Keeps every stride_s-th state (indices 0, stride, 2*stride, ...) and
// expands each kept state to 9 channels. Direction vectors are forward
// differences between kept states; the final row reuses the previous
// direction, as does any zero-length step.
std::vector<FeatureRow> extract_geometric_features(
    const std::vector<EnuState>& traj, int stride_s = 5);

// Same, from bare xyz rows (already scaled, on the 1 Hz grid).
std::vector<FeatureRow> extract_geometric_features_xyz(const double* xyz_rows,
                                                       int n_rows,
                                                       int stride_s = 5);

} // namespace tde
