#include "tde/fusion.hpp"

#include <algorithm>
#include <cstring>

#include "tde/prompts.hpp"

namespace tde {

Profile Profile::desk() {
  Profile p;
  p.name = "desk";
  p.embed_dim = 128;
  p.vocab_size = 8192;
  p.encoder_cfg = {4, 128, 4, 512, 0.0, true, 9, kInstanceDim, true};
  p.backbone_cfg = {4, 128, 4, 512, 0.0, true, 128, 128, false};
  p.max_seq_len = 1024;
  return p;
}

Profile Profile::paper() {
  Profile p;
  p.name = "paper";
  p.embed_dim = 2048; // 1B-class backbone width
  p.vocab_size = 8192;
  p.encoder_cfg = {12, 768, 12, 3072, 0.0, true, 9, kInstanceDim, true};
  p.backbone_cfg = {16, 2048, 32, 8192, 0.0, true, 2048, 2048, false};
  p.max_seq_len = 1024;
  return p;
}

Profile Profile::by_name(const std::string& name) {
  if (name == "desk")
    return desk();
  if (name == "paper")
    return paper();
  throw FormatError("unknown profile: " + name);
}

void AdapterParams::init(int d, u64 seed) {
  Rng rng(seed);
  w1.init_randn("adapter.w1", d, kInstanceDim, rng, 0.02, false);
  b1.init_const("adapter.b1", 1, d, 0, false, 1);
  w2.init_randn("adapter.w2", d, d, rng, 0.02, false);
  b2.init_const("adapter.b2", 1, d, 0, false, 1);
}

void HeadParams::init(int d, u64 seed) {
  Rng rng(seed);
  int half = d / 2;
  w1.init_randn("head.w1", d, d, rng, 0.02, false);
  b1.init_const("head.b1", 1, d, 0, false, 1);
  w2.init_randn("head.w2", half, d, rng, 0.02, false);
  b2.init_const("head.b2", 1, half, 0, false, 1);
  w3.init_randn("head.w3", 1, half, rng, 0.02, false);
  b3.init_const("head.b3", 1, 1, 0, false, 1);
}

const std::vector<std::string>& ContextDrops::all_tags() {
  static const std::vector<std::string> tags = {
      "textual-all", "flight-info", "weather-all", "metar",
      "taf",         "notams",      "trajectories-all", "focusing",
      "active",      "prior"};
  return tags;
}

ContextDrops ContextDrops::from_tags(const std::vector<std::string>& tags) {
  ContextDrops d;
  for (const auto& t : tags) {
    if (t == "textual-all")
      d.textual_all = true;
    else if (t == "flight-info")
      d.flight_info = true;
    else if (t == "weather-all")
      d.weather_all = true;
    else if (t == "metar")
      d.metar = true;
    else if (t == "taf")
      d.taf = true;
    else if (t == "notams")
      d.notams = true;
    else if (t == "trajectories-all")
      d.trajectories_all = true;
    else if (t == "focusing")
      d.focusing = true;
    else if (t == "active")
      d.active = true;
    else if (t == "prior")
      d.prior = true;
    else
      throw FormatError("unknown drop tag: " + t);
  }
  return d;
}

Scenario apply_drops(const Scenario& s, const ContextDrops& d) {
  if (!d.any())
    return s;
  Scenario out = s;
  const bool drop_fp = d.textual_all || d.flight_info;
  const bool drop_metar = d.textual_all || d.weather_all || d.metar;
  const bool drop_taf = d.textual_all || d.weather_all || d.taf;
  const bool drop_no = d.textual_all || d.notams;
  if (drop_fp)
    out.prompt_fp = "unavailable";
  if (drop_metar || drop_taf) {
    std::string metar_line = out.prompt_wx;
    std::string taf_line;
    size_t nl = out.prompt_wx.find('\n');
    if (nl != std::string::npos) {
      metar_line = out.prompt_wx.substr(0, nl);
      taf_line = out.prompt_wx.substr(nl + 1);
    }
    if (drop_metar)
      metar_line = "METAR in effect: unavailable";
    if (drop_taf)
      taf_line = "TAF in effect: unavailable";
    out.prompt_wx = metar_line + "\n" + taf_line;
  }
  if (drop_no) {
    out.prompt_no = "Active NOTAMs: none";
    out.notam_texts.clear();
  }
  if (d.trajectories_all || d.focusing)
    out.groups.focusing = TrajGroup{};
  if (d.trajectories_all || d.active)
    out.groups.active = TrajGroup{};
  if (d.trajectories_all || d.prior)
    out.groups.prior = TrajGroup{};
  return out;
}

void FusionModel::init(const Profile& p, u64 seed) {
  profile = p;
  tokenizer.vocab_size = p.vocab_size;
  embedding = EmbeddingTable::seeded(p.vocab_size, p.embed_dim,
                                     mix64(seed, 0xe1b));
  encoder.init(p.encoder_cfg, mix64(seed, 0xa75cc));
  TransformerConfig bb = p.backbone_cfg;
  bb.input_dim = p.embed_dim;
  bb.output_dim = p.embed_dim;
  bb.d_model = p.embed_dim;
  backbone.init(bb, mix64(seed, 0x11b), /*frozen=*/true, "backbone");
  adapter.init(p.embed_dim, mix64(seed, 0xada));
  head.init(p.embed_dim, mix64(seed, 0x4ead));
  const auto& sp = static_guiding_prompts();
  for (size_t i = 0; i < sp.size(); ++i)
    st_ids_[i] = tokenizer.tokenize(sp[i]);
}

std::vector<ParamTensor*> FusionModel::all_params() {
  std::vector<ParamTensor*> out;
  for (auto* p : encoder.tf.params())
    out.push_back(p);
  for (auto* p : backbone.params())
    out.push_back(p);
  for (auto* p : adapter.params())
    out.push_back(p);
  for (auto* p : head.params())
    out.push_back(p);
  return out;
}

std::vector<ParamTensor*> FusionModel::trainable_params() {
  std::vector<ParamTensor*> out;
  for (auto* p : adapter.params())
    out.push_back(p);
  for (auto* p : head.params())
    out.push_back(p);
  return out;
}

namespace {
void mlp_dropout(Mat& m, double rate, bool training, u64 step, u64 unit) {
  if (!training || rate <= 0.0)
    return;
  Real keep_inv = Real(1.0 / (1.0 - rate));
  for (size_t i = 0; i < m.a.size(); ++i)
    m.a[i] = dropout_keep(0x5eed, step, unit, i, rate) ? m.a[i] * keep_inv
                                                       : Real(0);
}

void mlp_dropout_grad(Mat& dm, double rate, bool training, u64 step,
                      u64 unit) {
  if (!training || rate <= 0.0)
    return;
  Real keep_inv = Real(1.0 / (1.0 - rate));
  for (size_t i = 0; i < dm.a.size(); ++i)
    dm.a[i] = dropout_keep(0x5eed, step, unit, i, rate) ? dm.a[i] * keep_inv
                                                        : Real(0);
}
} // namespace

Mat FusionModel::adapt(const Mat& z320, bool training, u64 step,
                       AdapterCache* cache) const {
  if (z320.rows == 0)
    return Mat(0, profile.embed_dim);
  if (z320.cols != kInstanceDim)
    throw ShapeError("adapt: expected 320-d instance embeddings");
  AdapterCache local;
  AdapterCache& c = cache ? *cache : local;
  c.x = z320;
  linear_forward(c.x, adapter.w1, adapter.b1, c.z1);
  gelu_forward(c.z1, c.a1);
  c.a1d = c.a1;
  mlp_dropout(c.a1d, adapter.dropout, training, step, 0);
  linear_forward(c.a1d, adapter.w2, adapter.b2, c.z2);
  gelu_forward(c.z2, c.a2);
  c.out = c.a2;
  mlp_dropout(c.out, adapter.dropout, training, step, 1);
  return c.out;
}

Mat FusionModel::adapt_backward(const AdapterCache& cache, const Mat& dOut,
                                bool training, u64 step) {
  Mat d = dOut;
  mlp_dropout_grad(d, adapter.dropout, training, step, 1);
  Mat dz2;
  gelu_backward(cache.z2, d, dz2);
  Mat da1d(cache.a1d.rows, cache.a1d.cols);
  da1d.zero();
  linear_backward(cache.a1d, adapter.w2, adapter.b2, dz2, &da1d);
  mlp_dropout_grad(da1d, adapter.dropout, training, step, 0);
  Mat dz1;
  gelu_backward(cache.z1, da1d, dz1);
  Mat dx(cache.x.rows, cache.x.cols);
  dx.zero();
  linear_backward(cache.x, adapter.w1, adapter.b1, dz1, &dx);
  return dx;
}

Real FusionModel::head_forward(const Mat& h_row, bool training, u64 step,
                               HeadCache* cache) const {
  HeadCache local;
  HeadCache& c = cache ? *cache : local;
  c.h = h_row;
  linear_forward(c.h, head.w1, head.b1, c.z1);
  gelu_forward(c.z1, c.a1);
  c.a1d = c.a1;
  mlp_dropout(c.a1d, head.dropout, training, step, 2);
  linear_forward(c.a1d, head.w2, head.b2, c.z2);
  gelu_forward(c.z2, c.a2);
  c.a2d = c.a2;
  mlp_dropout(c.a2d, head.dropout, training, step, 3);
  Mat out;
  linear_forward(c.a2d, head.w3, head.b3, out);
  return out.at(0, 0);
}

Mat FusionModel::head_backward(const HeadCache& cache, Real dPred,
                               bool training, u64 step) {
  Mat dOut(1, 1);
  dOut.at(0, 0) = dPred;
  Mat da2d(cache.a2d.rows, cache.a2d.cols);
  da2d.zero();
  linear_backward(cache.a2d, head.w3, head.b3, dOut, &da2d);
  mlp_dropout_grad(da2d, head.dropout, training, step, 3);
  Mat dz2;
  gelu_backward(cache.z2, da2d, dz2);
  Mat da1d(cache.a1d.rows, cache.a1d.cols);
  da1d.zero();
  linear_backward(cache.a1d, head.w2, head.b2, dz2, &da1d);
  mlp_dropout_grad(da1d, head.dropout, training, step, 2);
  Mat dz1;
  gelu_backward(cache.z1, da1d, dz1);
  Mat dh(cache.h.rows, cache.h.cols);
  dh.zero();
  linear_backward(cache.h, head.w1, head.b1, dz1, &dh);
  return dh;
}

AssembledSequence FusionModel::assemble(const std::vector<int>& prompt_ids,
                                        const Mat& zf, const Mat& za,
                                        const Mat& zp) const {
  const int d = profile.embed_dim;
  for (const Mat* z : {&zf, &za, &zp})
    if (z->rows > 0 && z->cols != d)
      throw ShapeError("assemble: trajectory embedding dim mismatch");

  const int L = int(prompt_ids.size());
  const int l1 = int(st_ids_[0].size()), l2 = int(st_ids_[1].size()),
            l3 = int(st_ids_[2].size()), l4 = int(st_ids_[3].size());
  const int total = L + l1 + zf.rows + l2 + za.rows + l3 + zp.rows + l4;

  AssembledSequence seq;
  seq.rows.resize(total, d);
  seq.tags.resize(size_t(total));
  int r = 0;
  auto put_text = [&](const std::vector<int>& ids, RowTag::Kind kind,
                      int static_idx) {
    embedding.embed_into(ids, seq.rows, r);
    for (size_t i = 0; i < ids.size(); ++i)
      seq.tags[size_t(r + int(i))] = {kind, kind == RowTag::PromptText
                                                 ? int(i)
                                                 : static_idx};
    r += int(ids.size());
  };
  auto put_traj = [&](const Mat& z, RowTag::Kind kind) {
    for (int i = 0; i < z.rows; ++i) {
      std::memcpy(seq.rows.row(r), z.row(i), size_t(d) * sizeof(Real));
      seq.tags[size_t(r)] = {kind, i};
      if (r >= seq.suffix_start)
        seq.traj_suffix_rows.push_back(r - seq.suffix_start);
      ++r;
    }
  };

  put_text(prompt_ids, RowTag::PromptText, -1);
  put_text(st_ids_[0], RowTag::StaticText, 1);
  seq.suffix_start = r; // first trainable-dependent row
  put_traj(zf, RowTag::Focusing);
  put_text(st_ids_[1], RowTag::StaticText, 2);
  put_traj(za, RowTag::Active);
  put_text(st_ids_[2], RowTag::StaticText, 3);
  put_traj(zp, RowTag::Prior);
  put_text(st_ids_[3], RowTag::StaticText, 4);
  return seq;
}

FusionModel::GroupEmbeddings
FusionModel::encode_groups(const Scenario& s, EmbeddingCache* cache) const {
  GroupEmbeddings out;
  auto encode_one = [&](const TrajGroup& g, GroupKind kind, Mat& dst) {
    std::vector<std::vector<Real>> rows;
    for (int i = 0; i < g.n; ++i) {
      int len = g.valid_len(i);
      if (len < 1)
        continue;
      i64 key_t = kind == GroupKind::Prior
                      ? g.first_ts[size_t(i)] + len - 1
                      : s.t;
      const std::vector<Real>* hit =
          cache ? cache->find(g.ids[size_t(i)], key_t, kind) : nullptr;
      if (hit) {
        rows.push_back(*hit);
      } else {
        auto emb = encoder.encode_xyz(g.traj(i), len);
        if (cache)
          cache->put(g.ids[size_t(i)], key_t, kind, emb);
        rows.push_back(std::move(emb));
      }
    }
    dst.resize(int(rows.size()), kInstanceDim);
    for (size_t i = 0; i < rows.size(); ++i)
      std::memcpy(dst.row(int(i)), rows[i].data(),
                  size_t(kInstanceDim) * sizeof(Real));
  };
  encode_one(s.groups.focusing, GroupKind::Focusing, out.focusing);
  encode_one(s.groups.active, GroupKind::Active, out.active);
  encode_one(s.groups.prior, GroupKind::Prior, out.prior);
  return out;
}

FusionModel::PreparedScenario
FusionModel::prepare(const Scenario& s, const ContextDrops& drops,
                     EmbeddingCache* cache) const {
  Scenario sc = apply_drops(s, drops);
  const int st_len = int(st_ids_[0].size() + st_ids_[1].size() +
                         st_ids_[2].size() + st_ids_[3].size());
  bool truncated = false;

  auto combined = [&] {
    return combine_prompts(sc.prompt_fp, sc.prompt_wx, sc.prompt_no);
  };
  std::vector<int> ids = tokenizer.tokenize(combined());
  int n_f = sc.groups.focusing.n > 0 && sc.groups.focusing.valid_len(0) > 0
                ? 1
                : 0;
  auto group_rows = [&](const TrajGroup& g) {
    int n = 0;
    for (int i = 0; i < g.n; ++i)
      if (g.valid_len(i) > 0)
        ++n;
    return n;
  };
  int n_a = group_rows(sc.groups.active);
  int n_p = group_rows(sc.groups.prior);

  auto total = [&] {
    return int(ids.size()) + st_len + n_f + n_a + n_p;
  };
  // oldest NOTAM text goes first, then the oldest prior trajectories
  while (total() > profile.max_seq_len && !sc.notam_texts.empty()) {
    sc.notam_texts.erase(sc.notam_texts.begin());
    sc.prompt_no = render_notam_prompt(sc.notam_texts);
    ids = tokenizer.tokenize(combined());
    truncated = true;
  }
  while (total() > profile.max_seq_len && n_p > 0) {
    TrajGroup ng;
    for (int i = 1; i < sc.groups.prior.n; ++i) {
      int len = sc.groups.prior.valid_len(i);
      std::vector<double> rows(sc.groups.prior.traj(i),
                               sc.groups.prior.traj(i) + size_t(len) * 3);
      ng.add(sc.groups.prior.ids[size_t(i)],
             sc.groups.prior.first_ts[size_t(i)], rows);
    }
    ng.finalize();
    sc.groups.prior = std::move(ng);
    n_p -= 1;
    truncated = true;
  }

  PreparedScenario out;
  out.prompt_ids = std::move(ids);
  out.groups = encode_groups(sc, cache);
  out.truncated = truncated;
  return out;
}

Mat FusionModel::backbone_last_hidden(const AssembledSequence& seq,
                                      const KVCache* prefix,
                                      ForwardCache* cache) const {
  Mat suffix;
  if (prefix) {
    const int S = seq.rows.rows - seq.suffix_start;
    suffix.resize(S, seq.rows.cols);
    std::memcpy(suffix.row(0), seq.rows.row(seq.suffix_start),
                size_t(S) * size_t(seq.rows.cols) * sizeof(Real));
  } else {
    suffix = seq.rows;
  }
  Mat H = transformer_hidden(backbone, suffix, nullptr, prefix, nullptr,
                             cache);
  Mat h(1, H.cols);
  std::memcpy(h.row(0), H.row(H.rows - 1), size_t(H.cols) * sizeof(Real));
  return h;
}

KVCache FusionModel::build_prefix(const AssembledSequence& seq) const {
  Mat pre(seq.suffix_start, seq.rows.cols);
  std::memcpy(pre.row(0), seq.rows.row(0),
              size_t(seq.suffix_start) * size_t(seq.rows.cols) * sizeof(Real));
  KVCache kv;
  kv.init(backbone.cfg.n_layers, backbone.cfg.d_model);
  transformer_hidden(backbone, pre, nullptr, nullptr, &kv, nullptr);
  return kv;
}

Real FusionModel::predict_scenario(const Scenario& s, EmbeddingCache* cache,
                                   const ContextDrops& drops) const {
  PreparedScenario ps = prepare(s, drops, cache);
  Mat zf = adapt(ps.groups.focusing, false, 0, nullptr);
  Mat za = adapt(ps.groups.active, false, 0, nullptr);
  Mat zp = adapt(ps.groups.prior, false, 0, nullptr);
  AssembledSequence seq = assemble(ps.prompt_ids, zf, za, zp);
  Mat h = backbone_last_hidden(seq, nullptr, nullptr);
  return head_forward(h, false, 0, nullptr);
}

} // namespace tde
