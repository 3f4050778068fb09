#include "glots/assoc.hpp"

#include <algorithm>
#include <cmath>

#include "glots/rng.hpp"

namespace glots {

namespace {

Mat init_mat(int r, int c, double bound, Rng& rng) {
    Mat m(r, c);
    for (double& x : m.a) x = rng.uniform(-bound, bound);
    return m;
}

struct BlockCache {
    Mat q, k, v;             // projections
    std::vector<Mat> attn;   // per-head softmax weights
    Mat concat;              // concatenated head outputs
    Mat post_attn;           // input + attention output
    Mat ff_pre;              // pre-relu
    Mat ff_act;              // relu output
    Mat out;
};

// One attention layer + feed-forward, residuals around both.
void block_forward(const AttentionBlock& b, int heads, const Mat& x_q, const Mat& x_kv,
                   BlockCache& c) {
    const int d = b.wq.cols;
    const int dh = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    c.q = kernels::matmul(x_q, b.wq);
    c.k = kernels::matmul(x_kv, b.wk);
    c.v = kernels::matmul(x_kv, b.wv);

    const int nq = x_q.rows, nk = x_kv.rows;
    c.attn.assign(heads, Mat());
    c.concat = Mat(nq, d);
    for (int h = 0; h < heads; ++h) {
        const int o = h * dh;
        Mat& a = c.attn[h];
        a = Mat(nq, nk);
        for (int i = 0; i < nq; ++i) {
            for (int j = 0; j < nk; ++j) {
                double s = 0.0;
                for (int t = 0; t < dh; ++t) s += c.q(i, o + t) * c.k(j, o + t);
                a(i, j) = s * scale;
            }
            softmax_inplace(a.row(i), nk);
        }
        for (int i = 0; i < nq; ++i)
            for (int j = 0; j < nk; ++j) {
                const double w = a(i, j);
                for (int t = 0; t < dh; ++t) c.concat(i, o + t) += w * c.v(j, o + t);
            }
    }

    Mat attn_out = kernels::matmul(c.concat, b.wo);
    c.post_attn = x_q;
    add_inplace(c.post_attn, attn_out);

    c.ff_pre = kernels::matmul(c.post_attn, b.w1);
    c.ff_act = c.ff_pre;
    for (double& x : c.ff_act.a) x = std::max(x, 0.0);
    Mat ff_out = kernels::matmul(c.ff_act, b.w2);
    c.out = c.post_attn;
    add_inplace(c.out, ff_out);
}

// Backward through block_forward. Accumulates parameter grads into g and
// input grads into dx_q / dx_kv (which must be pre-sized, zero or partial).
void block_backward(const AttentionBlock& b, int heads, const Mat& x_q, const Mat& x_kv,
                    const BlockCache& c, const Mat& dout, AttentionBlock& g, Mat& dx_q,
                    Mat& dx_kv) {
    const int d = b.wq.cols;
    const int dh = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    const int nq = x_q.rows, nk = x_kv.rows;

    // feed-forward
    Mat d_post = dout;  // residual path
    add_inplace(g.w2, kernels::matmul_at(c.ff_act, dout));
    Mat d_act = kernels::matmul_bt(dout, b.w2);
    for (size_t i = 0; i < d_act.a.size(); ++i)
        if (c.ff_pre.a[i] <= 0.0) d_act.a[i] = 0.0;
    add_inplace(g.w1, kernels::matmul_at(c.post_attn, d_act));
    add_inplace(d_post, kernels::matmul_bt(d_act, b.w1));

    // attention output projection
    add_inplace(dx_q, d_post);  // residual path
    add_inplace(g.wo, kernels::matmul_at(c.concat, d_post));
    Mat d_concat = kernels::matmul_bt(d_post, b.wo);

    Mat dq(nq, d), dk(nk, d), dv(nk, d);
    for (int h = 0; h < heads; ++h) {
        const int o = h * dh;
        const Mat& a = c.attn[h];
        Mat da(nq, nk);
        for (int i = 0; i < nq; ++i)
            for (int j = 0; j < nk; ++j) {
                double s = 0.0;
                for (int t = 0; t < dh; ++t) s += d_concat(i, o + t) * c.v(j, o + t);
                da(i, j) = s;
                const double w = a(i, j);
                for (int t = 0; t < dh; ++t) dv(j, o + t) += w * d_concat(i, o + t);
            }
        // softmax backward, row-wise
        for (int i = 0; i < nq; ++i) {
            double dot = 0.0;
            for (int j = 0; j < nk; ++j) dot += da(i, j) * a(i, j);
            for (int j = 0; j < nk; ++j) {
                const double ds = a(i, j) * (da(i, j) - dot) * scale;
                for (int t = 0; t < dh; ++t) {
                    dq(i, o + t) += ds * c.k(j, o + t);
                    dk(j, o + t) += ds * c.q(i, o + t);
                }
            }
        }
    }

    add_inplace(g.wq, kernels::matmul_at(x_q, dq));
    add_inplace(dx_q, kernels::matmul_bt(dq, b.wq));
    add_inplace(g.wk, kernels::matmul_at(x_kv, dk));
    add_inplace(dx_kv, kernels::matmul_bt(dk, b.wk));
    add_inplace(g.wv, kernels::matmul_at(x_kv, dv));
    add_inplace(dx_kv, kernels::matmul_bt(dv, b.wv));
}

AttentionBlock zero_block(int d, int ff) {
    AttentionBlock b;
    b.wq = Mat(d, d);
    b.wk = Mat(d, d);
    b.wv = Mat(d, d);
    b.wo = Mat(d, d);
    b.w1 = Mat(d, ff);
    b.w2 = Mat(ff, d);
    return b;
}

void check_width(const Mat& x, int d, const char* what) {
    if (x.cols != d) throw ShapeError(std::string(what) + ": embedding width mismatch");
}

void fill_probs(AssocMatrix& am, double empty_logit) {
    const int n = am.logits.rows;
    am.probs = Mat(n, am.logits.cols);
    am.empty_probs = Mat(n, static_cast<int>(am.frames.size()));
    for (int i = 0; i < n; ++i) {
        for (size_t f = 0; f < am.frames.size(); ++f) {
            const FrameBlock& fb = am.frames[f];
            std::vector<double> p =
                frame_softmax(am.logits.row(i) + fb.col_begin, fb.col_count, empty_logit);
            am.empty_probs(i, static_cast<int>(f)) = p[0];
            for (int j = 0; j < fb.col_count; ++j) am.probs(i, fb.col_begin + j) = p[j + 1];
        }
    }
}

void validate_frames(const std::vector<FrameBlock>& frames, int m) {
    int covered = 0;
    for (const FrameBlock& fb : frames) {
        if (fb.col_begin != covered || fb.col_count < 0)
            throw ShapeError("frame blocks must partition the pool columns in order");
        covered += fb.col_count;
    }
    if (covered != m) throw ShapeError("frame blocks do not cover all pool columns");
}

}  // namespace

AssocModel AssocModel::init(int dim, int heads, std::uint64_t seed) {
    if (dim <= 0 || heads <= 0 || dim % heads != 0)
        throw ShapeError("AssocModel::init: dim must be a positive multiple of heads");
    AssocModel m;
    m.dim = dim;
    m.heads = heads;
    m.ff = 2 * dim;
    const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    Rng rng(seed);
    auto make = [&](AttentionBlock& b) {
        b.wq = init_mat(dim, dim, bound, rng);
        b.wk = init_mat(dim, dim, bound, rng);
        b.wv = init_mat(dim, dim, bound, rng);
        b.wo = init_mat(dim, dim, bound, rng);
        b.w1 = init_mat(dim, m.ff, bound, rng);
        b.w2 = init_mat(m.ff, dim, bound, rng);
    };
    make(m.enc);
    make(m.dec);
    m.empty_logit = 0.0;
    return m;
}

std::vector<std::pair<std::string, Mat*>> AssocModel::mats() {
    return {{"enc.wq", &enc.wq}, {"enc.wk", &enc.wk}, {"enc.wv", &enc.wv}, {"enc.wo", &enc.wo},
            {"enc.w1", &enc.w1}, {"enc.w2", &enc.w2}, {"dec.wq", &dec.wq}, {"dec.wk", &dec.wk},
            {"dec.wv", &dec.wv}, {"dec.wo", &dec.wo}, {"dec.w1", &dec.w1}, {"dec.w2", &dec.w2}};
}

std::vector<std::pair<std::string, const Mat*>> AssocModel::mats() const {
    auto views = const_cast<AssocModel*>(this)->mats();
    std::vector<std::pair<std::string, const Mat*>> out;
    out.reserve(views.size());
    for (auto& [name, m] : views) out.emplace_back(name, m);
    return out;
}

std::vector<std::pair<std::string, Mat*>> LossGrads::mats() {
    return {{"enc.wq", &enc.wq}, {"enc.wk", &enc.wk}, {"enc.wv", &enc.wv}, {"enc.wo", &enc.wo},
            {"enc.w1", &enc.w1}, {"enc.w2", &enc.w2}, {"dec.wq", &dec.wq}, {"dec.wk", &dec.wk},
            {"dec.wv", &dec.wv}, {"dec.wo", &dec.wo}, {"dec.w1", &dec.w1}, {"dec.w2", &dec.w2}};
}

Mat encode_pool(const AssocModel& model, const Mat& pool_embeddings) {
    if (pool_embeddings.rows == 0) throw ShapeError("encode_pool: empty pool");
    check_width(pool_embeddings, model.dim, "encode_pool");
    BlockCache c;
    block_forward(model.enc, model.heads, pool_embeddings, pool_embeddings, c);
    return c.out;
}

AssocMatrix decode_associations(const AssocModel& model, const Mat& queries, const Mat& memory,
                                const std::vector<FrameBlock>& frames) {
    check_width(queries, model.dim, "decode_associations");
    check_width(memory, model.dim, "decode_associations");
    validate_frames(frames, memory.rows);
    BlockCache c;
    block_forward(model.dec, model.heads, queries, memory, c);
    AssocMatrix am;
    am.logits = kernels::matmul_bt(c.out, memory);
    am.frames = frames;
    fill_probs(am, model.empty_logit);
    return am;
}

AssocMatrix assoc_from_logits(Mat logits, std::vector<FrameBlock> frames, double empty_logit) {
    validate_frames(frames, logits.cols);
    AssocMatrix am;
    am.logits = std::move(logits);
    am.frames = std::move(frames);
    fill_probs(am, empty_logit);
    return am;
}

std::vector<double> frame_softmax(const double* logits, int n, double empty_logit) {
    std::vector<double> p(static_cast<size_t>(n) + 1);
    p[0] = empty_logit;
    for (int i = 0; i < n; ++i) p[i + 1] = logits[i];
    softmax_inplace(p.data(), n + 1);
    return p;
}

double tracklet_loss(const AssocMatrix& am, const std::vector<long long>& column_tracklets,
                     const std::vector<long long>& query_tracklets, bool mean_reduce) {
    const int n = am.logits.rows;
    const int m = am.logits.cols;
    if (static_cast<int>(column_tracklets.size()) != m ||
        static_cast<int>(query_tracklets.size()) != n)
        throw LabelError("tracklet_loss: label count does not match embeddings");

    double loss = 0.0;
    long long terms = 0;
    for (int i = 0; i < n; ++i) {
        for (size_t f = 0; f < am.frames.size(); ++f) {
            const FrameBlock& fb = am.frames[f];
            int target = -1;
            for (int j = 0; j < fb.col_count; ++j)
                if (column_tracklets[fb.col_begin + j] == query_tracklets[i]) target = j;
            const double p = target >= 0 ? am.probs(i, fb.col_begin + target)
                                         : am.empty_probs(i, static_cast<int>(f));
            loss += -std::log(std::max(p, 1e-300));
            ++terms;
        }
    }
    if (mean_reduce && terms > 0) loss /= static_cast<double>(terms);
    return loss;
}

double self_association_loss(const AssocModel& model, const Mat& pool,
                             const std::vector<FrameBlock>& frames,
                             const std::vector<long long>& tracklets, LossGrads* grads,
                             bool mean_reduce) {
    if (pool.rows == 0) throw ShapeError("self_association_loss: empty pool");
    check_width(pool, model.dim, "self_association_loss");
    validate_frames(frames, pool.rows);
    if (static_cast<int>(tracklets.size()) != pool.rows)
        throw LabelError("self_association_loss: label count does not match embeddings");

    BlockCache enc_c, dec_c;
    block_forward(model.enc, model.heads, pool, pool, enc_c);
    const Mat& mem = enc_c.out;
    block_forward(model.dec, model.heads, pool, mem, dec_c);

    AssocMatrix am;
    am.logits = kernels::matmul_bt(dec_c.out, mem);
    am.frames = frames;
    fill_probs(am, model.empty_logit);

    const int n = am.logits.rows;
    double loss = 0.0;
    long long terms = 0;
    Mat dlogits(n, am.logits.cols);
    double dempty = 0.0;
    for (int i = 0; i < n; ++i) {
        for (size_t f = 0; f < am.frames.size(); ++f) {
            const FrameBlock& fb = am.frames[f];
            int target = -1;
            for (int j = 0; j < fb.col_count; ++j)
                if (tracklets[fb.col_begin + j] == tracklets[i]) target = j;
            const double p = target >= 0 ? am.probs(i, fb.col_begin + target)
                                         : am.empty_probs(i, static_cast<int>(f));
            loss += -std::log(std::max(p, 1e-300));
            ++terms;
            if (grads) {
                dempty += am.empty_probs(i, static_cast<int>(f)) - (target < 0 ? 1.0 : 0.0);
                for (int j = 0; j < fb.col_count; ++j)
                    dlogits(i, fb.col_begin + j) +=
                        am.probs(i, fb.col_begin + j) - (j == target ? 1.0 : 0.0);
            }
        }
    }
    const double norm = (mean_reduce && terms > 0) ? 1.0 / static_cast<double>(terms) : 1.0;
    loss *= norm;
    if (!grads) return loss;

    if (norm != 1.0) {
        for (double& x : dlogits.a) x *= norm;
        dempty *= norm;
    }
    grads->enc = zero_block(model.dim, model.ff);
    grads->dec = zero_block(model.dim, model.ff);
    grads->empty_logit = dempty;

    // logits = dec_out * mem^T
    Mat d_dec_out = kernels::matmul(dlogits, mem);
    Mat d_mem = kernels::matmul_at(dlogits, dec_c.out);

    Mat d_pool(pool.rows, pool.cols);  // input grads, discarded
    block_backward(model.dec, model.heads, pool, mem, dec_c, d_dec_out, grads->dec, d_pool, d_mem);
    Mat d_pool2(pool.rows, pool.cols);
    block_backward(model.enc, model.heads, pool, pool, enc_c, d_mem, grads->enc, d_pool2, d_pool2);
    return loss;
}

TrainResult train_toy(const AssocModel& model, const Mat& pool,
                      const std::vector<FrameBlock>& frames,
                      const std::vector<long long>& tracklets, int steps, double lr,
                      bool mean_reduce) {
    TrainResult r;
    r.model = model;
    r.loss_trace.reserve(static_cast<size_t>(steps) + 1);
    double loss = self_association_loss(r.model, pool, frames, tracklets, nullptr, mean_reduce);
    r.loss_trace.push_back(loss);
    for (int s = 0; s < steps; ++s) {
        LossGrads g;
        self_association_loss(r.model, pool, frames, tracklets, &g, mean_reduce);
        auto mviews = r.model.mats();
        auto gviews = g.mats();
        for (size_t k = 0; k < mviews.size(); ++k) {
            Mat& w = *mviews[k].second;
            const Mat& gw = *gviews[k].second;
            for (size_t i = 0; i < w.a.size(); ++i) w.a[i] -= lr * gw.a[i];
        }
        r.model.empty_logit -= lr * g.empty_logit;
        loss = self_association_loss(r.model, pool, frames, tracklets, nullptr, mean_reduce);
        if (!std::isfinite(loss)) throw TrainingDiverged("train_toy: loss is not finite");
        r.loss_trace.push_back(loss);
    }
    return r;
}

}  // namespace glots
