#include "tde/nn.hpp"

#include <cassert>
#include <cmath>

namespace tde {

namespace {
constexpr double kGeluK = 0.79788456080286535588; // sqrt(2/pi)
constexpr double kGeluC = 0.044715;
constexpr Real kNormFloor = Real(1e-12);

void l2_normalize_rows(Mat& m, std::vector<Real>* norms) {
  if (norms)
    norms->assign(size_t(m.rows), Real(1));
  for (int r = 0; r < m.rows; ++r) {
    Real* p = m.row(r);
    Real n = std::sqrt(dot(p, p, m.cols));
    if (n < kNormFloor)
      n = 1; // zero rows pass through
    if (norms)
      (*norms)[size_t(r)] = n;
    Real inv = Real(1) / n;
    scale(inv, p, m.cols);
  }
}

// dx for y = x / n given normalized y and n
void l2_row_backward(const Real* y, const Real* dy, Real n, Real* dx, int d) {
  Real proj = dot(y, dy, d);
  Real inv = Real(1) / n;
  for (int i = 0; i < d; ++i)
    dx[i] = (dy[i] - y[i] * proj) * inv;
}
} // namespace

Real gelu_tanh(Real x) {
  double xd = double(x);
  double inner = kGeluK * (xd + kGeluC * xd * xd * xd);
  return Real(0.5 * xd * (1.0 + std::tanh(inner)));
}

Real gelu_tanh_grad(Real x) {
  double xd = double(x);
  double inner = kGeluK * (xd + kGeluC * xd * xd * xd);
  double t = std::tanh(inner);
  double din = kGeluK * (1.0 + 3.0 * kGeluC * xd * xd);
  return Real(0.5 * (1.0 + t) + 0.5 * xd * (1.0 - t * t) * din);
}

double gelu_erf_exact(double x) {
  return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0)));
}

void gelu_forward(const Mat& x, Mat& y) {
  y.resize(x.rows, x.cols);
  for (size_t i = 0; i < x.a.size(); ++i)
    y.a[i] = gelu_tanh(x.a[i]);
}

void gelu_backward(const Mat& x, const Mat& dy, Mat& dx) {
  dx.resize(x.rows, x.cols);
  for (size_t i = 0; i < x.a.size(); ++i)
    dx.a[i] = dy.a[i] * gelu_tanh_grad(x.a[i]);
}

void linear_forward(const Mat& X, const ParamTensor& W, const ParamTensor& b,
                    Mat& Y) {
  if (X.cols != W.val.cols)
    throw ShapeError("linear_forward: dim mismatch for " + W.name);
  linear_rows(X, W.val, b.val.a.data(), Y);
}

void linear_backward(const Mat& X, ParamTensor& W, ParamTensor& b,
                     const Mat& dY, Mat* dX) {
  const int in = W.val.cols, out = W.val.rows;
  if (dX) {
    if (dX->rows != X.rows || dX->cols != in)
      dX->resize(X.rows, in);
    for (int r = 0; r < X.rows; ++r) {
      const Real* dyr = dY.row(r);
      Real* dxr = dX->row(r);
      for (int o = 0; o < out; ++o)
        axpy(dyr[o], W.val.row(o), dxr, in);
    }
  }
  if (!W.frozen) {
    W.ensure_grad();
    b.ensure_grad();
    for (int r = 0; r < X.rows; ++r) {
      const Real* dyr = dY.row(r);
      const Real* xr = X.row(r);
      for (int o = 0; o < out; ++o) {
        axpy(dyr[o], xr, W.grad.row(o), in);
        b.grad.a[size_t(o)] += dyr[o];
      }
    }
  }
}

void layernorm_forward(const Mat& x, const ParamTensor& g,
                       const ParamTensor& b, Mat& y, LayerNormCache* cache) {
  const int d = x.cols;
  y.resize(x.rows, d);
  if (cache) {
    cache->mu.assign(size_t(x.rows), 0);
    cache->rstd.assign(size_t(x.rows), 0);
  }
  const Real eps = Real(1e-5);
  for (int r = 0; r < x.rows; ++r) {
    const Real* xr = x.row(r);
    Real mu = 0;
    for (int i = 0; i < d; ++i)
      mu += xr[i];
    mu /= Real(d);
    Real var = 0;
    for (int i = 0; i < d; ++i) {
      Real c = xr[i] - mu;
      var += c * c;
    }
    var /= Real(d);
    Real rstd = Real(1) / std::sqrt(var + eps);
    Real* yr = y.row(r);
    for (int i = 0; i < d; ++i)
      yr[i] = (xr[i] - mu) * rstd * g.val.a[size_t(i)] + b.val.a[size_t(i)];
    if (cache) {
      cache->mu[size_t(r)] = mu;
      cache->rstd[size_t(r)] = rstd;
    }
  }
}

void layernorm_backward(const Mat& x, const LayerNormCache& cache,
                        ParamTensor& g, ParamTensor& b, const Mat& dy,
                        Mat& dx) {
  const int d = x.cols;
  dx.resize(x.rows, d);
  const bool want_pg = !g.frozen;
  if (want_pg) {
    g.ensure_grad();
    b.ensure_grad();
  }
  std::vector<Real> xhat(size_t(d)), dxh(size_t(d));
  for (int r = 0; r < x.rows; ++r) {
    const Real* xr = x.row(r);
    const Real* dyr = dy.row(r);
    Real mu = cache.mu[size_t(r)], rstd = cache.rstd[size_t(r)];
    Real m1 = 0, m2 = 0;
    for (int i = 0; i < d; ++i) {
      xhat[size_t(i)] = (xr[i] - mu) * rstd;
      dxh[size_t(i)] = dyr[i] * g.val.a[size_t(i)];
      m1 += dxh[size_t(i)];
      m2 += dxh[size_t(i)] * xhat[size_t(i)];
    }
    m1 /= Real(d);
    m2 /= Real(d);
    Real* dxr = dx.row(r);
    for (int i = 0; i < d; ++i)
      dxr[i] = rstd * (dxh[size_t(i)] - m1 - xhat[size_t(i)] * m2);
    if (want_pg) {
      for (int i = 0; i < d; ++i) {
        g.grad.a[size_t(i)] += dyr[i] * xhat[size_t(i)];
        b.grad.a[size_t(i)] += dyr[i];
      }
    }
  }
}

void TransformerConfig::validate() const {
  if (d_model <= 0 || n_heads <= 0 || n_layers < 0)
    throw ShapeError("transformer config: non-positive sizes");
  if (d_model % n_heads != 0)
    throw ShapeError("transformer config: d_model must divide by n_heads");
}

void TransformerParams::init(const TransformerConfig& c, u64 seed, bool frozen,
                             const std::string& prefix) {
  c.validate();
  cfg = c;
  Rng rng(seed);
  const double std = 0.02;
  has_in_proj = cfg.input_dim != cfg.d_model;
  has_out_proj = cfg.output_dim != cfg.d_model;
  if (has_in_proj) {
    in_w.init_randn(prefix + ".in_proj.w", cfg.d_model, cfg.input_dim, rng,
                    std, frozen);
    in_b.init_const(prefix + ".in_proj.b", 1, cfg.d_model, 0, frozen, 1);
  }
  blocks.assign(size_t(cfg.n_layers), {});
  for (int l = 0; l < cfg.n_layers; ++l) {
    auto& bl = blocks[size_t(l)];
    std::string base = prefix + ".block" + std::to_string(l);
    bl.ln1_g.init_const(base + ".ln1.g", 1, cfg.d_model, 1, frozen, 1);
    bl.ln1_b.init_const(base + ".ln1.b", 1, cfg.d_model, 0, frozen, 1);
    bl.wq.init_randn(base + ".attn.wq", cfg.d_model, cfg.d_model, rng, std,
                     frozen);
    bl.bq.init_const(base + ".attn.bq", 1, cfg.d_model, 0, frozen, 1);
    bl.wk.init_randn(base + ".attn.wk", cfg.d_model, cfg.d_model, rng, std,
                     frozen);
    bl.bk.init_const(base + ".attn.bk", 1, cfg.d_model, 0, frozen, 1);
    bl.wv.init_randn(base + ".attn.wv", cfg.d_model, cfg.d_model, rng, std,
                     frozen);
    bl.bv.init_const(base + ".attn.bv", 1, cfg.d_model, 0, frozen, 1);
    bl.wo.init_randn(base + ".attn.wo", cfg.d_model, cfg.d_model, rng, std,
                     frozen);
    bl.bo.init_const(base + ".attn.bo", 1, cfg.d_model, 0, frozen, 1);
    bl.ln2_g.init_const(base + ".ln2.g", 1, cfg.d_model, 1, frozen, 1);
    bl.ln2_b.init_const(base + ".ln2.b", 1, cfg.d_model, 0, frozen, 1);
    bl.w1.init_randn(base + ".ffn.w1", cfg.d_ff, cfg.d_model, rng, std,
                     frozen);
    bl.b1.init_const(base + ".ffn.b1", 1, cfg.d_ff, 0, frozen, 1);
    bl.w2.init_randn(base + ".ffn.w2", cfg.d_model, cfg.d_ff, rng, std,
                     frozen);
    bl.b2.init_const(base + ".ffn.b2", 1, cfg.d_model, 0, frozen, 1);
  }
  if (has_out_proj) {
    out_w.init_randn(prefix + ".out_proj.w", cfg.output_dim, cfg.d_model, rng,
                     std, frozen);
    out_b.init_const(prefix + ".out_proj.b", 1, cfg.output_dim, 0, frozen, 1);
  }
}

std::vector<ParamTensor*> TransformerParams::params() {
  std::vector<ParamTensor*> out;
  if (has_in_proj) {
    out.push_back(&in_w);
    out.push_back(&in_b);
  }
  for (auto& bl : blocks)
    for (ParamTensor* p :
         {&bl.ln1_g, &bl.ln1_b, &bl.wq, &bl.bq, &bl.wk, &bl.bk, &bl.wv,
          &bl.bv, &bl.wo, &bl.bo, &bl.ln2_g, &bl.ln2_b, &bl.w1, &bl.b1,
          &bl.w2, &bl.b2})
      out.push_back(p);
  if (has_out_proj) {
    out.push_back(&out_w);
    out.push_back(&out_b);
  }
  return out;
}

std::vector<const ParamTensor*> TransformerParams::params() const {
  auto mut = const_cast<TransformerParams*>(this)->params();
  return {mut.begin(), mut.end()};
}

namespace {

void apply_dropout(Mat& m, double rate, u64 seed, u64 step, u64 unit) {
  if (rate <= 0.0)
    return;
  Real keep_inv = Real(1.0 / (1.0 - rate));
  for (size_t i = 0; i < m.a.size(); ++i)
    m.a[i] = dropout_keep(seed, step, unit, i, rate) ? m.a[i] * keep_inv
                                                     : Real(0);
}

struct AttnDims {
  int heads, dk;
  Real scale;
};

AttnDims attn_dims(const TransformerConfig& cfg) {
  int dk = cfg.d_model / cfg.n_heads;
  return {cfg.n_heads, dk, Real(1.0 / std::sqrt(double(dk)))};
}

} // namespace

Mat transformer_hidden(const TransformerParams& p, const Mat& suffix,
                       const std::vector<char>* suffix_valid,
                       const KVCache* prefix, KVCache* kv_out,
                       ForwardCache* cache, bool training, u64 drop_seed,
                       u64 drop_step) {
  const auto& cfg = p.cfg;
  const int d = cfg.d_model;
  const int Tp = prefix ? prefix->len : 0;
  assert(!(training && cfg.dropout_rate > 0.0 && Tp > 0) &&
         "dropout with prefix reuse is not supported");
  if (kv_out && kv_out->k.size() != size_t(cfg.n_layers))
    kv_out->init(cfg.n_layers, d);

  Mat x;
  if (p.has_in_proj) {
    if (suffix.cols != cfg.input_dim)
      throw ShapeError("transformer: input dim mismatch");
    linear_rows(suffix, p.in_w.val, p.in_b.val.a.data(), x);
    if (cache) {
      cache->x_input = suffix;
      cache->x_proj_raw = x;
    }
    if (cfg.l2_normalize_io)
      l2_normalize_rows(x, cache ? &cache->in_norms : nullptr);
  } else {
    if (suffix.cols != d)
      throw ShapeError("transformer: input dim mismatch");
    x = suffix;
  }

  const int S = x.rows;
  const auto ad = attn_dims(cfg);
  if (cache)
    cache->blocks.assign(size_t(cfg.n_layers), {});

  Mat a, q, k, v, att_out, o, f, h1, g_act, y;
  for (int l = 0; l < cfg.n_layers; ++l) {
    const auto& bl = p.blocks[size_t(l)];
    BlockCache* bc = cache ? &cache->blocks[size_t(l)] : nullptr;
    if (bc)
      bc->x_in = x;

    LayerNormCache lnc1;
    layernorm_forward(x, bl.ln1_g, bl.ln1_b, a, bc ? &bc->ln1 : &lnc1);
    linear_forward(a, bl.wq, bl.bq, q);
    linear_forward(a, bl.wk, bl.bk, k);
    linear_forward(a, bl.wv, bl.bv, v);

    att_out.resize(S, d);
    const Real* kp = prefix && Tp ? prefix->k[size_t(l)].data() : nullptr;
    const Real* vp = prefix && Tp ? prefix->v[size_t(l)].data() : nullptr;
    std::vector<Real>* attw = bc ? &bc->attw : nullptr;
    if (bc) {
      bc->att_off.assign(size_t(S) * size_t(ad.heads), 0);
      bc->att_n.assign(size_t(S) * size_t(ad.heads), 0);
    }
    std::vector<Real> w;
    for (int i = 0; i < S; ++i) {
      int nkeys = Tp + (cfg.causal ? i + 1 : S);
      Real* out_row = att_out.row(i);
      for (int h = 0; h < ad.heads; ++h) {
        const Real* qh = q.row(i) + h * ad.dk;
        w.assign(size_t(nkeys), Real(0));
        Real mx = Real(-1e30);
        for (int j = 0; j < nkeys; ++j) {
          bool valid = j < Tp || !suffix_valid ||
                       (*suffix_valid)[size_t(j - Tp)] != 0;
          if (!valid) {
            w[size_t(j)] = Real(-1e30);
            continue;
          }
          const Real* kh = j < Tp ? kp + size_t(j) * size_t(d) + h * ad.dk
                                  : k.row(j - Tp) + h * ad.dk;
          Real s = dot(qh, kh, ad.dk) * ad.scale;
          w[size_t(j)] = s;
          if (s > mx)
            mx = s;
        }
        Real denom = 0;
        for (int j = 0; j < nkeys; ++j) {
          if (w[size_t(j)] <= Real(-1e30)) {
            w[size_t(j)] = 0;
            continue;
          }
          Real e = std::exp(w[size_t(j)] - mx);
          w[size_t(j)] = e;
          denom += e;
        }
        Real dinv = denom > 0 ? Real(1) / denom : Real(0);
        Real* oh = out_row + h * ad.dk;
        for (int c = 0; c < ad.dk; ++c)
          oh[c] = 0;
        for (int j = 0; j < nkeys; ++j) {
          Real wj = w[size_t(j)] * dinv;
          w[size_t(j)] = wj;
          if (wj == 0)
            continue;
          const Real* vh = j < Tp ? vp + size_t(j) * size_t(d) + h * ad.dk
                                  : v.row(j - Tp) + h * ad.dk;
          axpy(wj, vh, oh, ad.dk);
        }
        if (attw) {
          bc->att_off[size_t(i) * size_t(ad.heads) + size_t(h)] = attw->size();
          bc->att_n[size_t(i) * size_t(ad.heads) + size_t(h)] = nkeys;
          attw->insert(attw->end(), w.begin(), w.end());
        }
      }
    }

    if (kv_out) {
      auto& kk = kv_out->k[size_t(l)];
      auto& vv = kv_out->v[size_t(l)];
      kk.insert(kk.end(), k.a.begin(), k.a.end());
      vv.insert(vv.end(), v.a.begin(), v.a.end());
    }
    if (bc) {
      bc->a = a;
      bc->q = q;
      bc->k = k;
      bc->v = v;
      bc->att_out = att_out;
    }

    linear_forward(att_out, bl.wo, bl.bo, o);
    if (training)
      apply_dropout(o, cfg.dropout_rate, drop_seed, drop_step, u64(l) * 2);
    for (size_t idx = 0; idx < x.a.size(); ++idx)
      x.a[idx] += o.a[idx];
    if (bc)
      bc->x_mid = x;

    LayerNormCache lnc2;
    layernorm_forward(x, bl.ln2_g, bl.ln2_b, f, bc ? &bc->ln2 : &lnc2);
    linear_forward(f, bl.w1, bl.b1, h1);
    gelu_forward(h1, g_act);
    linear_forward(g_act, bl.w2, bl.b2, y);
    if (training)
      apply_dropout(y, cfg.dropout_rate, drop_seed, drop_step, u64(l) * 2 + 1);
    for (size_t idx = 0; idx < x.a.size(); ++idx)
      x.a[idx] += y.a[idx];
    if (bc) {
      bc->f = f;
      bc->h1 = h1;
      bc->g_act = g_act;
    }
  }
  if (kv_out)
    kv_out->len += S;
  if (cache)
    cache->h_final = x;
  return x;
}

Mat project_output(const TransformerParams& p, const Mat& hidden, Mat* raw) {
  if (!p.has_out_proj) {
    if (raw)
      *raw = hidden;
    return hidden;
  }
  Mat out;
  linear_rows(hidden, p.out_w.val, p.out_b.val.a.data(), out);
  if (raw)
    *raw = out;
  if (p.cfg.l2_normalize_io)
    l2_normalize_rows(out, nullptr);
  return out;
}

Mat project_output(const TransformerParams& p, const Mat& hidden) {
  return project_output(p, hidden, nullptr);
}

Mat transformer_forward(const TransformerParams& p, const Mat& X,
                        const std::vector<char>* padding) {
  Mat h = transformer_hidden(p, X, padding, nullptr, nullptr, nullptr);
  return project_output(p, h);
}

void project_output_backward(TransformerParams& p, const Mat& hidden_rows,
                             const Mat& raw, const Mat& dProj, Mat& dHidden) {
  if (!p.has_out_proj) {
    dHidden = dProj;
    return;
  }
  Mat dRaw = dProj;
  if (p.cfg.l2_normalize_io) {
    dRaw.resize(raw.rows, raw.cols);
    std::vector<Real> yrow(size_t(raw.cols));
    for (int r = 0; r < raw.rows; ++r) {
      const Real* xr = raw.row(r);
      Real n = std::sqrt(dot(xr, xr, raw.cols));
      if (n < kNormFloor)
        n = 1;
      for (int c = 0; c < raw.cols; ++c)
        yrow[size_t(c)] = xr[c] / n;
      l2_row_backward(yrow.data(), dProj.row(r), n, dRaw.row(r), raw.cols);
    }
  }
  dHidden.resize(hidden_rows.rows, hidden_rows.cols);
  dHidden.zero();
  linear_backward(hidden_rows, p.out_w, p.out_b, dRaw, &dHidden);
}

Mat transformer_backward(TransformerParams& p, const ForwardCache& cache,
                         const Mat& dH, const KVCache* prefix, bool training,
                         u64 drop_seed, u64 drop_step) {
  const auto& cfg = p.cfg;
  const int d = cfg.d_model;
  const int Tp = prefix ? prefix->len : 0;
  const auto ad = attn_dims(cfg);
  const int S = dH.rows;

  Mat dx = dH;
  Mat dy, dg, dh1, df, dmid, dO, datt, dq, dk, dv, da, dtmp;
  for (int l = cfg.n_layers - 1; l >= 0; --l) {
    auto& bl = p.blocks[size_t(l)];
    const BlockCache& bc = cache.blocks[size_t(l)];

    // ffn branch
    dy = dx;
    if (training && cfg.dropout_rate > 0.0)
      apply_dropout(dy, cfg.dropout_rate, drop_seed, drop_step,
                    u64(l) * 2 + 1);
    dg.resize(S, cfg.d_ff);
    dg.zero();
    linear_backward(bc.g_act, bl.w2, bl.b2, dy, &dg);
    gelu_backward(bc.h1, dg, dh1);
    df.resize(S, d);
    df.zero();
    linear_backward(bc.f, bl.w1, bl.b1, dh1, &df);
    layernorm_backward(bc.x_mid, bc.ln2, bl.ln2_g, bl.ln2_b, df, dmid);
    for (size_t i = 0; i < dx.a.size(); ++i)
      dx.a[i] += dmid.a[i];

    // attention branch
    dO = dx;
    if (training && cfg.dropout_rate > 0.0)
      apply_dropout(dO, cfg.dropout_rate, drop_seed, drop_step, u64(l) * 2);
    datt.resize(S, d);
    datt.zero();
    linear_backward(bc.att_out, bl.wo, bl.bo, dO, &datt);

    dq.resize(S, d);
    dq.zero();
    dk.resize(S, d);
    dk.zero();
    dv.resize(S, d);
    dv.zero();
    const Real* kp = prefix && Tp ? prefix->k[size_t(l)].data() : nullptr;
    for (int i = 0; i < S; ++i) {
      for (int h = 0; h < ad.heads; ++h) {
        size_t cell = size_t(i) * size_t(ad.heads) + size_t(h);
        int nkeys = bc.att_n[cell];
        const Real* w = bc.attw.data() + bc.att_off[cell];
        const Real* doh = datt.row(i) + h * ad.dk;
        Real s = 0;
        // dw_j = do . v_j ; s = sum_j w_j dw_j
        for (int j = 0; j < nkeys; ++j) {
          if (w[j] == 0)
            continue;
          const Real* vrow =
              j < Tp ? (prefix->v[size_t(l)].data() + size_t(j) * size_t(d) +
                        h * ad.dk)
                     : bc.v.row(j - Tp) + h * ad.dk;
          s += w[j] * dot(doh, vrow, ad.dk);
        }
        Real* dqh = dq.row(i) + h * ad.dk;
        for (int j = 0; j < nkeys; ++j) {
          Real wj = w[j];
          if (wj == 0)
            continue;
          const Real* vrow =
              j < Tp ? (prefix->v[size_t(l)].data() + size_t(j) * size_t(d) +
                        h * ad.dk)
                     : bc.v.row(j - Tp) + h * ad.dk;
          const Real* krow = j < Tp ? (kp + size_t(j) * size_t(d) + h * ad.dk)
                                    : bc.k.row(j - Tp) + h * ad.dk;
          Real dwj = dot(doh, vrow, ad.dk);
          Real dlogit = wj * (dwj - s) * ad.scale;
          axpy(dlogit, krow, dqh, ad.dk);
          if (j >= Tp) { // prefix keys/values are constants
            axpy(dlogit, bc.q.row(i) + h * ad.dk, dk.row(j - Tp) + h * ad.dk,
                 ad.dk);
            axpy(wj, doh, dv.row(j - Tp) + h * ad.dk, ad.dk);
          }
        }
      }
    }

    da.resize(S, d);
    da.zero();
    linear_backward(bc.a, bl.wq, bl.bq, dq, &da);
    linear_backward(bc.a, bl.wk, bl.bk, dk, &da);
    linear_backward(bc.a, bl.wv, bl.bv, dv, &da);
    layernorm_backward(bc.x_in, bc.ln1, bl.ln1_g, bl.ln1_b, da, dtmp);
    for (size_t i = 0; i < dx.a.size(); ++i)
      dx.a[i] += dtmp.a[i];
  }

  if (!p.has_in_proj)
    return dx;

  // undo L2 row normalization, then the input projection
  Mat dRaw(S, d);
  if (cfg.l2_normalize_io) {
    std::vector<Real> yrow(size_t(d));
    for (int r = 0; r < S; ++r) {
      const Real* xr = cache.x_proj_raw.row(r);
      Real n = cache.in_norms[size_t(r)];
      for (int c = 0; c < d; ++c)
        yrow[size_t(c)] = xr[c] / n;
      l2_row_backward(yrow.data(), dx.row(r), n, dRaw.row(r), d);
    }
  } else {
    dRaw = dx;
  }
  Mat dIn(S, cfg.input_dim);
  dIn.zero();
  linear_backward(cache.x_input, p.in_w, p.in_b, dRaw, &dIn);
  return dIn;
}

void AdamW::step(const std::vector<ParamTensor*>& params) {
  t += 1;
  const double bc1 = 1.0 - std::pow(beta1, double(t));
  const double bc2 = 1.0 - std::pow(beta2, double(t));
  for (ParamTensor* p : params) {
    if (p->frozen || p->grad.empty())
      continue;
    if (p->adam_m.rows != p->val.rows || p->adam_m.cols != p->val.cols) {
      p->adam_m.resize(p->val.rows, p->val.cols);
      p->adam_v.resize(p->val.rows, p->val.cols);
    }
    for (size_t i = 0; i < p->val.a.size(); ++i) {
      double g = double(p->grad.a[i]);
      double m = beta1 * double(p->adam_m.a[i]) + (1.0 - beta1) * g;
      double v = beta2 * double(p->adam_v.a[i]) + (1.0 - beta2) * g * g;
      p->adam_m.a[i] = Real(m);
      p->adam_v.a[i] = Real(v);
      double mhat = m / bc1;
      double vhat = v / bc2;
      double v0 = double(p->val.a[i]);
      p->val.a[i] = Real(v0 - lr * mhat / (std::sqrt(vhat) + eps) -
                         lr * weight_decay * v0);
    }
  }
}

} // namespace tde
