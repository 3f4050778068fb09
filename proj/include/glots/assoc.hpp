#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glots/mat.hpp"

namespace glots {

struct Embedding {
    std::vector<double> values;
    int frame_index = 0;
    int detection_index = 0;
};

// Weights of one attention layer followed by a 2x-expansion feed-forward,
// both with residual connections. No biases, no layer norm.
struct AttentionBlock {
    Mat wq, wk, wv, wo;  // d x d
    Mat w1;              // d x ff
    Mat w2;              // ff x d
};

// One self-attention encoder layer over the pool, one cross-attention
// decoder layer for current-frame queries, and a learnable empty-slot logit.
struct AssocModel {
    int dim = 64;
    int heads = 4;
    int ff = 128;
    AttentionBlock enc, dec;
    double empty_logit = 0.0;

    static AssocModel init(int dim, int heads, std::uint64_t seed);

    // Named views over the weight matrices, for optimizers / serialization.
    std::vector<std::pair<std::string, Mat*>> mats();
    std::vector<std::pair<std::string, const Mat*>> mats() const;
};

// Column span of one past frame inside the concatenated pool matrix.
struct FrameBlock {
    int frame_index = 0;
    int col_begin = 0;
    int col_count = 0;
};

struct AssocMatrix {
    Mat logits;                     // N x M
    Mat probs;                      // N x M, per-frame softmax including the empty slot
    Mat empty_probs;                // N x F, probability of the empty slot per frame
    std::vector<FrameBlock> frames;
};

// H_t = Encoder(G_t). Throws ShapeError on empty pool or width mismatch.
Mat encode_pool(const AssocModel& model, const Mat& pool_embeddings);

// logits = Decoder(Q_t, H_t) H_t^T, then per-frame softmax with empty slot.
AssocMatrix decode_associations(const AssocModel& model, const Mat& queries, const Mat& memory,
                                const std::vector<FrameBlock>& frames);

// Softmax over {empty, 1..n}; result[0] is the empty slot.
std::vector<double> frame_softmax(const double* logits, int n, double empty_logit);

// Wraps externally produced logits (e.g. the untrained cosine fallback)
// into an AssocMatrix with the usual per-frame softmax.
AssocMatrix assoc_from_logits(Mat logits, std::vector<FrameBlock> frames, double empty_logit);

// Tracklet log-likelihood: for each query and each past frame,
// -log P of the query's tracklet member in that frame, or -log P(empty)
// when the tracklet has no member there.
double tracklet_loss(const AssocMatrix& am, const std::vector<long long>& column_tracklets,
                     const std::vector<long long>& query_tracklets, bool mean_reduce = false);

struct LossGrads {
    AttentionBlock enc, dec;
    double empty_logit = 0.0;
    std::vector<std::pair<std::string, Mat*>> mats();
};

// Self-association training objective: queries = pool. Returns the loss and,
// when grads is non-null, analytic gradients w.r.t. every model parameter.
double self_association_loss(const AssocModel& model, const Mat& pool,
                             const std::vector<FrameBlock>& frames,
                             const std::vector<long long>& tracklets, LossGrads* grads,
                             bool mean_reduce = false);

struct TrainResult {
    AssocModel model;
    std::vector<double> loss_trace;  // loss_trace[0] is the pre-training loss
};

// Plain gradient descent on the self-association loss.
TrainResult train_toy(const AssocModel& model, const Mat& pool,
                      const std::vector<FrameBlock>& frames,
                      const std::vector<long long>& tracklets, int steps, double lr,
                      bool mean_reduce = false);

}  // namespace glots
