#include "tde/geo.hpp"

#include <algorithm>
#include <cmath>

namespace tde {

namespace {
constexpr double kDegToRad = 0.017453292519943295769236907684886;
constexpr double kWgsA = 6378137.0;             // semi-major axis
constexpr double kWgsF = 1.0 / 298.257223563;   // flattening
constexpr double kWgsE2 = kWgsF * (2.0 - kWgsF);

struct Ecef {
  double x, y, z;
};

Ecef geodetic_to_ecef(const GeoPoint& p) {
  double phi = p.lat * kDegToRad;
  double lam = p.lon * kDegToRad;
  double sphi = std::sin(phi), cphi = std::cos(phi);
  double n = kWgsA / std::sqrt(1.0 - kWgsE2 * sphi * sphi);
  return {(n + p.alt) * cphi * std::cos(lam),
          (n + p.alt) * cphi * std::sin(lam),
          (n * (1.0 - kWgsE2) + p.alt) * sphi};
}

GeoPoint ecef_to_geodetic(const Ecef& e) {
  // iterative latitude refinement; converges to sub-micrometer in a few steps
  double lon = std::atan2(e.y, e.x);
  double rho = std::hypot(e.x, e.y);
  double phi = std::atan2(e.z, rho * (1.0 - kWgsE2));
  double alt = 0.0;
  for (int i = 0; i < 8; ++i) {
    double sphi = std::sin(phi);
    double n = kWgsA / std::sqrt(1.0 - kWgsE2 * sphi * sphi);
    alt = rho / std::cos(phi) - n;
    phi = std::atan2(e.z, rho * (1.0 - kWgsE2 * n / (n + alt)));
  }
  GeoPoint p;
  p.lat = phi / kDegToRad;
  p.lon = lon / kDegToRad;
  p.alt = alt;
  return p;
}
} // namespace

bool valid_geopoint(const GeoPoint& p) {
  return p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 &&
         p.lon <= 180.0 && std::isfinite(p.alt) && std::isfinite(p.t);
}

EnuVector geodetic_to_enu(const GeoPoint& p, const GeoPoint& origin) {
  Ecef ep = geodetic_to_ecef(p);
  Ecef eo = geodetic_to_ecef(origin);
  double dx = ep.x - eo.x, dy = ep.y - eo.y, dz = ep.z - eo.z;
  double phi = origin.lat * kDegToRad;
  double lam = origin.lon * kDegToRad;
  double sphi = std::sin(phi), cphi = std::cos(phi);
  double slam = std::sin(lam), clam = std::cos(lam);
  EnuVector out;
  out.x = -slam * dx + clam * dy;
  out.y = -sphi * clam * dx - sphi * slam * dy + cphi * dz;
  out.z = cphi * clam * dx + cphi * slam * dy + sphi * dz;
  return out;
}

GeoPoint enu_to_geodetic(const EnuVector& enu, const GeoPoint& origin) {
  double phi = origin.lat * kDegToRad;
  double lam = origin.lon * kDegToRad;
  double sphi = std::sin(phi), cphi = std::cos(phi);
  double slam = std::sin(lam), clam = std::cos(lam);
  Ecef eo = geodetic_to_ecef(origin);
  Ecef e;
  e.x = eo.x - slam * enu.x - sphi * clam * enu.y + cphi * clam * enu.z;
  e.y = eo.y + clam * enu.x - sphi * slam * enu.y + cphi * slam * enu.z;
  e.z = eo.z + cphi * enu.y + sphi * enu.z;
  return ecef_to_geodetic(e);
}

double great_circle_distance_km(const GeoPoint& a, const GeoPoint& b) {
  double la = a.lat * kDegToRad, lb = b.lat * kDegToRad;
  double dlat = (b.lat - a.lat) * kDegToRad;
  double dlon = (b.lon - a.lon) * kDegToRad;
  double sl = std::sin(dlat / 2), so = std::sin(dlon / 2);
  double h = sl * sl + std::cos(la) * std::cos(lb) * so * so;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

std::vector<GeoPoint> resample_1hz(const std::vector<GeoPoint>& raw) {
  // collapse exact duplicate timestamps, keep the last record
  std::vector<GeoPoint> pts;
  pts.reserve(raw.size());
  for (const auto& p : raw) {
    if (!pts.empty() && p.t == pts.back().t)
      pts.back() = p;
    else
      pts.push_back(p);
  }
  if (pts.size() < 2)
    throw EmptyTrajectory("resample_1hz: fewer than 2 points");
  for (size_t i = 1; i < pts.size(); ++i)
    if (pts[i].t <= pts[i - 1].t)
      throw FormatError("resample_1hz: timestamps not increasing");

  i64 t0 = i64(std::ceil(pts.front().t));
  i64 t1 = i64(std::floor(pts.back().t));
  std::vector<GeoPoint> out;
  if (t1 < t0)
    return out;
  out.reserve(size_t(t1 - t0 + 1));
  size_t k = 0;
  for (i64 t = t0; t <= t1; ++t) {
    while (k + 2 < pts.size() && pts[k + 1].t <= double(t))
      ++k;
    const GeoPoint& a = pts[k];
    const GeoPoint& b = pts[k + 1];
    double w = (double(t) - a.t) / (b.t - a.t);
    GeoPoint g;
    g.lat = a.lat + (b.lat - a.lat) * w;
    g.lon = a.lon + (b.lon - a.lon) * w;
    g.alt = a.alt + (b.alt - a.alt) * w;
    g.t = double(t);
    out.push_back(g);
  }
  return out;
}

std::vector<EnuState> to_enu_states(const std::vector<GeoPoint>& pts,
                                    const GeoPoint& origin) {
  std::vector<EnuState> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    EnuVector v = geodetic_to_enu(p, origin);
    out.push_back({v.x / kEnuScaleMeters, v.y / kEnuScaleMeters,
                   v.z / kEnuScaleMeters, p.t});
  }
  return out;
}

std::vector<FeatureRow> extract_geometric_features_xyz(const double* xyz,
                                                       int n_rows,
                                                       int stride_s) {
  std::vector<FeatureRow> out;
  if (n_rows <= 0)
    return out;
  std::vector<int> kept;
  for (int i = 0; i < n_rows; i += stride_s)
    kept.push_back(i);

  out.resize(kept.size());
  double pux = 0, puy = 0, puz = 0; // previous valid direction
  bool have_prev = false;
  for (size_t k = 0; k < kept.size(); ++k) {
    const double* p = &xyz[size_t(kept[k]) * 3];
    FeatureRow& f = out[k];
    f.x = p[0];
    f.y = p[1];
    f.z = p[2];
    if (k + 1 < kept.size()) {
      const double* q = &xyz[size_t(kept[k + 1]) * 3];
      double dx = q[0] - p[0], dy = q[1] - p[1], dz = q[2] - p[2];
      double n = std::sqrt(dx * dx + dy * dy + dz * dz);
      if (n > 0) {
        pux = dx / n;
        puy = dy / n;
        puz = dz / n;
        have_prev = true;
      }
      // zero-length step falls back to the previous direction
    }
    // final row (and zero steps) reuse the previous direction; all-zero
    // only when no motion was ever observed
    f.ux = have_prev ? pux : 0.0;
    f.uy = have_prev ? puy : 0.0;
    f.uz = have_prev ? puz : 0.0;
    f.r = std::sqrt(f.x * f.x + f.y * f.y);
    if (f.x == 0.0 && f.y == 0.0) {
      f.sin_t = 0.0; // arctan2 undefined at the origin; pin to theta = 0
      f.cos_t = 1.0;
    } else {
      double th = std::atan2(f.y, f.x);
      f.sin_t = std::sin(th);
      f.cos_t = std::cos(th);
    }
  }
  return out;
}

std::vector<FeatureRow> extract_geometric_features(
    const std::vector<EnuState>& traj, int stride_s) {
  std::vector<double> xyz;
  xyz.reserve(traj.size() * 3);
  for (const auto& s : traj) {
    xyz.push_back(s.x);
    xyz.push_back(s.y);
    xyz.push_back(s.z);
  }
  return extract_geometric_features_xyz(xyz.data(), int(traj.size()),
                                        stride_s);
}

} // namespace tde
