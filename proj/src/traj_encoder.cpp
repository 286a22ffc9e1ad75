#include "tde/traj_encoder.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "tde/geo.hpp"

namespace tde {

namespace {
Mat features_to_mat(const std::vector<FeatureRow>& rows, int lo, int hi) {
  Mat m(hi - lo, 9);
  for (int i = lo; i < hi; ++i) {
    const FeatureRow& f = rows[size_t(i)];
    Real* p = m.row(i - lo);
    p[0] = Real(f.x);
    p[1] = Real(f.y);
    p[2] = Real(f.z);
    p[3] = Real(f.ux);
    p[4] = Real(f.uy);
    p[5] = Real(f.uz);
    p[6] = Real(f.r);
    p[7] = Real(f.sin_t);
    p[8] = Real(f.cos_t);
  }
  return m;
}
} // namespace

void TrajEncoder::init(const TransformerConfig& cfg, u64 seed) {
  TransformerConfig c = cfg;
  c.input_dim = 9;
  c.output_dim = kInstanceDim;
  c.l2_normalize_io = true;
  c.causal = true;
  tf.init(c, seed, /*frozen=*/true, "atscc");
}

std::vector<Real> TrajEncoder::encode_xyz(const double* xyz,
                                          int n_rows) const {
  if (n_rows < 1)
    throw EmptyTrajectory("encode_xyz: empty trajectory");
  auto feats = extract_geometric_features_xyz(xyz, n_rows, stride_s);
  Mat F = features_to_mat(feats, 0, int(feats.size()));
  Mat H = transformer_hidden(tf, F, nullptr, nullptr, nullptr, nullptr);
  Mat last(1, H.cols);
  std::memcpy(last.row(0), H.row(H.rows - 1), size_t(H.cols) * sizeof(Real));
  Mat out = project_output(tf, last);
  return {out.row(0), out.row(0) + out.cols};
}

Mat TrajEncoder::encode_group(const TrajGroup& g,
                              std::vector<int>* index_map) const {
  if (index_map)
    index_map->clear();
  std::vector<std::vector<Real>> rows;
  for (int i = 0; i < g.n; ++i) {
    int len = g.valid_len(i);
    if (len < 1)
      continue; // fully masked trajectories are excluded
    rows.push_back(encode_xyz(g.traj(i), len));
    if (index_map)
      index_map->push_back(i);
  }
  Mat out(int(rows.size()), kInstanceDim);
  for (size_t r = 0; r < rows.size(); ++r)
    std::memcpy(out.row(int(r)), rows[r].data(),
                size_t(kInstanceDim) * sizeof(Real));
  return out;
}

std::vector<Real> IncrementalTrackEncoder::encode(const std::vector<double>& xyz,
                                                  int n_rows) {
  if (n_rows < 1)
    throw EmptyTrajectory("incremental encode: empty trajectory");
  const int stride = enc_->stride_s;
  auto feats = extract_geometric_features_xyz(xyz.data(), n_rows, stride);
  const int kept = int(feats.size());
  const int final_rows = kept - 1; // last row has a provisional direction

  if (kv_.k.empty())
    kv_.init(enc_->tf.cfg.n_layers, enc_->tf.cfg.d_model);
  if (final_rows > committed_rows_) {
    Mat F = features_to_mat(feats, committed_rows_, final_rows);
    transformer_hidden(enc_->tf, F, nullptr, &kv_, &kv_, nullptr);
    committed_rows_ = final_rows;
  }

  Mat Flast = features_to_mat(feats, kept - 1, kept);
  Mat H = transformer_hidden(enc_->tf, Flast, nullptr, &kv_, nullptr, nullptr);
  Mat out = project_output(enc_->tf, H);
  return {out.row(out.rows - 1), out.row(out.rows - 1) + out.cols};
}

std::string EmbeddingCache::key(const std::string& id, i64 t, GroupKind kind) {
  return id + '\x1f' + std::to_string(t) + '\x1f' +
         std::to_string(int(kind));
}

const std::vector<Real>* EmbeddingCache::find(const std::string& flight_id,
                                              i64 t, GroupKind kind) const {
  auto it = map_.find(key(flight_id, t, kind));
  if (it == map_.end()) {
    ++const_cast<EmbeddingCache*>(this)->misses;
    return nullptr;
  }
  ++const_cast<EmbeddingCache*>(this)->hits;
  return &it->second;
}

void EmbeddingCache::put(const std::string& flight_id, i64 t, GroupKind kind,
                         std::vector<Real> emb) {
  map_[key(flight_id, t, kind)] = std::move(emb);
}

namespace {
template <typename T> void put_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T> void get_raw(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}
} // namespace

void EmbeddingCache::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw FormatError("cannot write cache: " + path);
  out.write("TDEE", 4);
  put_raw<u32>(out, 1);
  put_raw<u32>(out, u32(kInstanceDim));
  put_raw<u64>(out, u64(map_.size()));
  // deterministic file order
  std::vector<const std::pair<const std::string, std::vector<Real>>*> items;
  items.reserve(map_.size());
  for (const auto& kv : map_)
    items.push_back(&kv);
  std::sort(items.begin(), items.end(),
            [](auto* a, auto* b) { return a->first < b->first; });
  for (auto* kv : items) {
    // key encodes (flight_id, t, kind) with unit separators
    size_t p1 = kv->first.find('\x1f');
    size_t p2 = kv->first.find('\x1f', p1 + 1);
    std::string id = kv->first.substr(0, p1);
    i64 t = std::stoll(kv->first.substr(p1 + 1, p2 - p1 - 1));
    u32 kind = u32(std::stoi(kv->first.substr(p2 + 1)));
    put_raw<u32>(out, u32(id.size()));
    out.write(id.data(), std::streamsize(id.size()));
    put_raw<i64>(out, t);
    unsigned char k8 = (unsigned char)kind;
    out.write(reinterpret_cast<const char*>(&k8), 1);
    std::vector<float> f32(kv->second.begin(), kv->second.end());
    out.write(reinterpret_cast<const char*>(f32.data()),
              std::streamsize(f32.size() * sizeof(float)));
  }
}

void EmbeddingCache::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw FormatError("cannot open cache: " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "TDEE", 4) != 0)
    throw FormatError("bad cache magic");
  u32 version = 0, dim = 0;
  get_raw(in, version);
  get_raw(in, dim);
  if (version != 1 || dim != u32(kInstanceDim))
    throw FormatError("cache version/dim mismatch");
  u64 count = 0;
  get_raw(in, count);
  for (u64 i = 0; i < count; ++i) {
    u32 idlen = 0;
    get_raw(in, idlen);
    std::string id(idlen, '\0');
    in.read(id.data(), idlen);
    i64 t = 0;
    get_raw(in, t);
    unsigned char kind = 0;
    in.read(reinterpret_cast<char*>(&kind), 1);
    std::vector<float> f32(size_t(kInstanceDim));
    in.read(reinterpret_cast<char*>(f32.data()),
            std::streamsize(f32.size() * sizeof(float)));
    if (!in)
      throw FormatError("truncated cache file");
    map_[key(id, t, GroupKind(kind))] =
        std::vector<Real>(f32.begin(), f32.end());
  }
}

} // namespace tde
