#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tde/mat.hpp"

namespace tde {

// Named dense parameter with gradient and optimizer state. Frozen tensors
// never change under an optimizer step; their gradients are not allocated
// (flow-through gradients w.r.t. activations are unaffected).
struct ParamTensor {
  std::string name;
  Mat val;
  Mat grad;
  Mat adam_m;
  Mat adam_v;
  bool frozen = false;
  int rank = 2; // 1 for bias vectors (stored 1 x n)

  void init_randn(const std::string& n, int r, int c, Rng& rng, double std,
                  bool froz, int rk = 2) {
    name = n;
    val = Mat::randn(r, c, rng, std);
    frozen = froz;
    rank = rk;
  }
  void init_const(const std::string& n, int r, int c, Real value, bool froz,
                  int rk = 2) {
    name = n;
    val.resize(r, c);
    for (auto& x : val.a)
      x = value;
    frozen = froz;
    rank = rk;
  }
  void ensure_grad() {
    if (!frozen && grad.rows != val.rows)
      grad.resize(val.rows, val.cols);
  }
  void zero_grad() {
    if (!grad.empty())
      grad.zero();
  }
};

// ---- elementwise ops ----

Real gelu_tanh(Real x);
Real gelu_tanh_grad(Real x);
double gelu_erf_exact(double x); // oracle reference

void gelu_forward(const Mat& x, Mat& y);
void gelu_backward(const Mat& x, const Mat& dy, Mat& dx);

// ---- linear ----

void linear_forward(const Mat& X, const ParamTensor& W, const ParamTensor& b,
                    Mat& Y);
// accumulates into dX (when non-null) and into parameter grads (when not frozen)
void linear_backward(const Mat& X, ParamTensor& W, ParamTensor& b,
                     const Mat& dY, Mat* dX);

// ---- layer norm ----

struct LayerNormCache {
  std::vector<Real> mu, rstd;
};

void layernorm_forward(const Mat& x, const ParamTensor& g,
                       const ParamTensor& b, Mat& y, LayerNormCache* cache);
void layernorm_backward(const Mat& x, const LayerNormCache& cache,
                        ParamTensor& g, ParamTensor& b, const Mat& dy,
                        Mat& dx);

// ---- transformer ----

struct TransformerConfig {
  int n_layers = 4;
  int d_model = 128;
  int n_heads = 4;
  int d_ff = 512;
  double dropout_rate = 0.0;
  bool causal = true;
  int input_dim = 128;  // != d_model adds an input projection
  int output_dim = 128; // != d_model adds an output projection
  bool l2_normalize_io = false;

  void validate() const;
};

struct TransformerBlockParams {
  ParamTensor ln1_g, ln1_b;
  ParamTensor wq, bq, wk, bk, wv, bv, wo, bo;
  ParamTensor ln2_g, ln2_b;
  ParamTensor w1, b1, w2, b2;
};

struct TransformerParams {
  TransformerConfig cfg;
  bool has_in_proj = false;
  bool has_out_proj = false;
  ParamTensor in_w, in_b;
  ParamTensor out_w, out_b;
  std::vector<TransformerBlockParams> blocks;

  void init(const TransformerConfig& c, u64 seed, bool frozen,
            const std::string& prefix);
  std::vector<ParamTensor*> params();
  std::vector<const ParamTensor*> params() const;
};

// Per-layer keys/values of already-processed rows. Rows are appended in
// order; truncate() rolls provisional rows back.
struct KVCache {
  int d = 0;
  int len = 0;
  std::vector<std::vector<Real>> k, v; // layer -> len*d

  void init(int layers, int dim) {
    d = dim;
    len = 0;
    k.assign(size_t(layers), {});
    v.assign(size_t(layers), {});
  }
  void truncate(int new_len) {
    for (auto& m : k)
      m.resize(size_t(new_len) * size_t(d));
    for (auto& m : v)
      m.resize(size_t(new_len) * size_t(d));
    len = new_len;
  }
  size_t bytes() const {
    size_t n = 0;
    for (auto& m : k)
      n += m.capacity() * sizeof(Real);
    return 2 * n;
  }
};

struct BlockCache {
  Mat x_in;
  LayerNormCache ln1;
  Mat a;       // normalized input
  Mat q, k, v; // suffix rows
  std::vector<Real> attw;
  std::vector<size_t> att_off; // (row*heads+h) -> offset; weights over keys
  std::vector<int> att_n;      // number of attended keys
  Mat att_out;                 // heads concatenated, before Wo
  Mat x_mid;
  LayerNormCache ln2;
  Mat f; // normalized mid
  Mat h1;
  Mat g_act;
};

struct ForwardCache {
  Mat x_input;    // raw suffix input (kept only when an in-proj exists)
  Mat x_proj_raw; // pre-L2 input projection output (if in-proj present)
  std::vector<Real> in_norms;
  std::vector<BlockCache> blocks;
  Mat h_final;
};

// Runs the block stack over `suffix` rows, optionally attending to a
// constant `prefix` KV (frozen context). When `kv_out` is given the
// suffix keys/values are appended to it. When `cache` is given enough
// activations are kept for a later backward over these rows.
//
// Applies the input projection (+ row L2 normalization when configured)
// but not the output projection; see project_output.
Mat transformer_hidden(const TransformerParams& p, const Mat& suffix,
                       const std::vector<char>* suffix_valid,
                       const KVCache* prefix, KVCache* kv_out,
                       ForwardCache* cache, bool training = false,
                       u64 drop_seed = 0, u64 drop_step = 0);

// Output projection (+ L2 when configured) of selected hidden rows.
// `raw` receives the pre-normalization projection when requested.
Mat project_output(const TransformerParams& p, const Mat& hidden, Mat* raw);
Mat project_output(const TransformerParams& p, const Mat& hidden);

// Full forward including output projection over all rows; zero-layer
// configs degenerate to the projections alone.
Mat transformer_forward(const TransformerParams& p, const Mat& X,
                        const std::vector<char>* padding = nullptr);

// Backward over the rows covered by `cache`. Prefix keys/values are
// treated as constants, so parameter gradients are only exact when the
// forward ran without a prefix (true for every trainable use here).
// Returns gradient w.r.t. the suffix input rows.
Mat transformer_backward(TransformerParams& p, const ForwardCache& cache,
                         const Mat& dH, const KVCache* prefix,
                         bool training = false, u64 drop_seed = 0,
                         u64 drop_step = 0);

// Backward of project_output for a single hidden row.
void project_output_backward(TransformerParams& p, const Mat& hidden_rows,
                             const Mat& projected, const Mat& dProj,
                             Mat& dHidden);

// ---- optimizer ----

struct AdamW {
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-5;
  i64 t = 0;

  void step(const std::vector<ParamTensor*>& params);
};

} // namespace tde
