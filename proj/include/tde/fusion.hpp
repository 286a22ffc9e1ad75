#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tde/nn.hpp"
#include "tde/tokenizer.hpp"
#include "tde/traj_encoder.hpp"
#include "tde/types.hpp"

namespace tde {

// Model size profiles. "desk" runs the full architecture at CPU-test
// scale; "paper" mirrors the published encoder and a 1B-class backbone
// shape (config only, no pretrained weights exist here).
struct Profile {
  std::string name;
  int embed_dim = 128;
  int vocab_size = 8192;
  TransformerConfig encoder_cfg;
  TransformerConfig backbone_cfg;
  int max_seq_len = 1024;

  static Profile desk();
  static Profile paper();
  static Profile by_name(const std::string& name);
};

// Two linear layers, GELU + dropout(0.35) after each activation. Maps
// 320-d instance embeddings into the backbone embedding space.
struct AdapterParams {
  ParamTensor w1, b1, w2, b2;
  double dropout = 0.35;

  void init(int d_model, u64 seed);
  std::vector<ParamTensor*> params() { return {&w1, &b1, &w2, &b2}; }
};

// Three linear layers d -> d -> d/2 -> 1, GELU + dropout(0.3) after the
// first two.
struct HeadParams {
  ParamTensor w1, b1, w2, b2, w3, b3;
  double dropout = 0.3;

  void init(int d_model, u64 seed);
  std::vector<ParamTensor*> params() {
    return {&w1, &b1, &w2, &b2, &w3, &b3};
  }
};

struct RowTag {
  enum Kind { PromptText, StaticText, Focusing, Active, Prior };
  Kind kind = PromptText;
  int group_index = -1; // trajectory index within its group, -1 for text
};

// The concatenated embedding sequence Z = [prompt | st1 | F | st2 | A |
// st3 | P | st4]. Rows before suffix_start depend only on frozen tensors.
struct AssembledSequence {
  Mat rows;
  std::vector<RowTag> tags;
  int suffix_start = 0;
  std::vector<int> traj_suffix_rows; // suffix-relative rows fed by the adapter
  bool truncated = false;

  int total_len() const { return rows.rows; }
};

// Ablation switches (--drop tags).
struct ContextDrops {
  bool textual_all = false;
  bool flight_info = false;
  bool weather_all = false;
  bool metar = false;
  bool taf = false;
  bool notams = false;
  bool trajectories_all = false;
  bool focusing = false;
  bool active = false;
  bool prior = false;

  bool any() const {
    return textual_all || flight_info || weather_all || metar || taf ||
           notams || trajectories_all || focusing || active || prior;
  }
  static ContextDrops from_tags(const std::vector<std::string>& tags);
  static const std::vector<std::string>& all_tags();
};

// Applies drop semantics: text components are replaced by their sentinel,
// trajectory groups lose their embeddings (guiding prompts remain).
Scenario apply_drops(const Scenario& s, const ContextDrops& drops);

class FusionModel {
public:
  Profile profile;
  Tokenizer tokenizer;
  EmbeddingTable embedding; // frozen
  TrajEncoder encoder;      // frozen
  TransformerParams backbone; // frozen
  AdapterParams adapter;    // trainable
  HeadParams head;          // trainable

  void init(const Profile& p, u64 seed);

  std::vector<ParamTensor*> all_params();
  std::vector<ParamTensor*> trainable_params();

  const std::array<std::vector<int>, 4>& static_prompt_ids() const {
    return st_ids_;
  }

  // ---- building blocks ----

  struct AdapterCache {
    Mat x, z1, a1, a1d, z2, a2, out;
  };
  // Z: n x 320 -> n x d. Dropout active only in training mode.
  Mat adapt(const Mat& z320, bool training, u64 step,
            AdapterCache* cache) const;
  // dOut -> dZ (and parameter grads)
  Mat adapt_backward(const AdapterCache& cache, const Mat& dOut, bool training,
                     u64 step);

  struct HeadCache {
    Mat h, z1, a1, a1d, z2, a2, a2d;
  };
  Real head_forward(const Mat& h_row, bool training, u64 step,
                    HeadCache* cache) const;
  // returns gradient w.r.t. the hidden row
  Mat head_backward(const HeadCache& cache, Real dPred, bool training,
                    u64 step);

  // Tokenizes prompts, embeds, and interleaves trajectory tokens between
  // the guiding prompts. Trajectory embeddings must already be adapted
  // (n x d). Oversized sequences are trimmed by dropping the oldest NOTAM
  // texts, then the oldest prior trajectories (handled by the caller via
  // assemble_scenario below).
  AssembledSequence assemble(const std::vector<int>& prompt_ids,
                             const Mat& zf, const Mat& za,
                             const Mat& zp) const;

  // Group embeddings (pre-adapter, n x 320) for one scenario; uses `cache`
  // when provided, encoding on demand otherwise.
  struct GroupEmbeddings {
    Mat focusing, active, prior; // n x 320 each
  };
  GroupEmbeddings encode_groups(const Scenario& s,
                                EmbeddingCache* cache) const;

  // Scenario -> token ids + raw group embeddings, applying drops and the
  // max-sequence truncation rule.
  struct PreparedScenario {
    std::vector<int> prompt_ids;
    GroupEmbeddings groups;
    bool truncated = false;
  };
  PreparedScenario prepare(const Scenario& s, const ContextDrops& drops,
                           EmbeddingCache* cache) const;

  // Frozen-backbone pass; returns the final-position hidden row. When
  // `prefix` is given only suffix rows are computed.
  Mat backbone_last_hidden(const AssembledSequence& seq,
                           const KVCache* prefix,
                           ForwardCache* cache) const;

  // Builds (or reuses) the frozen prefix KV for an assembled sequence.
  KVCache build_prefix(const AssembledSequence& seq) const;

  // Full eval-mode composition: standardized prediction.
  Real predict_scenario(const Scenario& s, EmbeddingCache* cache = nullptr,
                        const ContextDrops& drops = {}) const;

private:
  std::array<std::vector<int>, 4> st_ids_;
};

} // namespace tde
