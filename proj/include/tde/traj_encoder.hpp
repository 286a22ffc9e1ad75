#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "tde/nn.hpp"
#include "tde/types.hpp"

namespace tde {

constexpr int kInstanceDim = 320;

enum class GroupKind : unsigned char { Focusing = 0, Active = 1, Prior = 2 };

// Frozen causal-transformer trajectory encoder: 9-channel geometric input,
// L2-normalized input/output projections, no positional encoding, last
// valid timestep projected to a 320-d instance embedding.
struct TrajEncoder {
  TransformerParams tf;
  int stride_s = 5;

  void init(const TransformerConfig& cfg, u64 seed);

  // xyz: n_rows scaled-ENU rows (1 Hz). Requires >= 1 state after striding.
  std::vector<Real> encode_xyz(const double* xyz, int n_rows) const;

  // One embedding row per unmasked trajectory; `index_map` keeps the
  // original group index of each row.
  Mat encode_group(const TrajGroup& g, std::vector<int>* index_map) const;
};

// Incremental encoder over one growing track. Appending states reproduces
// the full encode bit-for-bit because all kernels are row-local; only the
// final (provisional-direction) feature row is recomputed per call.
class IncrementalTrackEncoder {
public:
  explicit IncrementalTrackEncoder(const TrajEncoder& enc) : enc_(&enc) {}

  // Encode the prefix of `track` with n_rows 1 Hz states (n_rows may only
  // grow between calls).
  std::vector<Real> encode(const std::vector<double>& xyz, int n_rows);

private:
  const TrajEncoder* enc_;
  KVCache kv_;
  int committed_rows_ = 0; // feature rows already in kv_
};

// In-memory embedding cache (flight, t, kind) -> 320 floats, with the
// binary file round-trip. For prior-group members t is the member's own
// final timestamp, which identifies the snapshot.
class EmbeddingCache {
public:
  const std::vector<Real>* find(const std::string& flight_id, i64 t,
                                GroupKind kind) const;
  void put(const std::string& flight_id, i64 t, GroupKind kind,
           std::vector<Real> emb);
  size_t size() const { return map_.size(); }
  u64 hits = 0, misses = 0;

  void save(const std::string& path) const;
  void load(const std::string& path);

private:
  static std::string key(const std::string& id, i64 t, GroupKind kind);
  std::unordered_map<std::string, std::vector<Real>> map_;
};

} // namespace tde
