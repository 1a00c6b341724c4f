#include "ogs/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace ogs {

namespace {

double softplus(double x) { return x > 35.0 ? x : std::log1p(std::exp(x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Z[b][o] = sum_i X[b][i] * W[o][i] + bias[o]; bias-free layers have empty b
void dense_forward(const Dense& d, const std::vector<double>& x, std::size_t batch,
                   std::vector<double>& z) {
    const auto in = static_cast<std::size_t>(d.in);
    const auto out = static_cast<std::size_t>(d.out);
    z.assign(batch * out, 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
        const double* xr = &x[b * in];
        double* zr = &z[b * out];
        for (std::size_t o = 0; o < out; ++o) {
            const double* wr = &d.w[o * in];
            double acc = d.b.empty() ? 0.0 : d.b[o];
            for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xr[i];
            zr[o] = acc;
        }
    }
}

// dX += dZ * W ; dW += dZ^T * X ; db += sum_b dZ
void dense_backward(const Dense& d, const std::vector<double>& x, const std::vector<double>& dz,
                    std::size_t batch, std::vector<double>& dx, std::vector<double>& dw,
                    std::vector<double>& db) {
    const auto in = static_cast<std::size_t>(d.in);
    const auto out = static_cast<std::size_t>(d.out);
    for (std::size_t b = 0; b < batch; ++b) {
        const double* xr = &x[b * in];
        const double* dzr = &dz[b * out];
        double* dxr = &dx[b * in];
        for (std::size_t o = 0; o < out; ++o) {
            const double g = dzr[o];
            if (g == 0.0) continue;
            const double* wr = &d.w[o * in];
            double* dwr = &dw[o * in];
            if (!db.empty()) db[o] += g;
            for (std::size_t i = 0; i < in; ++i) {
                dxr[i] += g * wr[i];
                dwr[i] += g * xr[i];
            }
        }
    }
}

struct BlockCache {
    std::vector<double> x_in;       // block input (after standardization / previous block)
    std::vector<double> z;          // linear output
    std::vector<double> xhat;       // normalized pre-activation
    std::vector<double> mean, var;  // batch statistics actually used
    std::vector<double> y;          // gamma*xhat + beta (pre-ReLU)
    std::vector<double> drop_mask;  // scaled keep mask (1/(1-p) or 0); empty = no dropout
};

void check_finite(const std::vector<double>& v, const char* layer) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::runtime_error(std::string("mlp: non-finite activation in ") + layer);
}

}  // namespace

BitSequence llrs_to_bits(const LlrFrame& frame) {
    BitSequence bits(frame.llrs.size());
    for (std::size_t i = 0; i < frame.llrs.size(); ++i) bits[i] = frame.llrs[i] >= 0.0 ? 0 : 1;
    return bits;
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& blk : body)
        n += blk.lin.w.size() + blk.lin.b.size() + blk.bn.gamma.size() + blk.bn.beta.size();
    return n + head.w.size() + head.b.size();
}

MlpModel mlp_init(const MlpConfig& cfg, RngSeed seed) {
    // blocks = 0 degenerates to a plain linear map, handy as a baseline
    if (cfg.blocks < 0 || cfg.width < 1) throw std::invalid_argument("mlp_init: bad blocks/width");
    if (cfg.dropout < 0.0 || cfg.dropout >= 1.0) throw std::invalid_argument("mlp_init: dropout must be in [0, 1)");

    Rng rng(derive_seed(seed, "mlp.init"));
    auto make_dense = [&](int in, int out, double gain, bool with_bias) {
        Dense d;
        d.in = in;
        d.out = out;
        d.w.resize(static_cast<std::size_t>(in) * static_cast<std::size_t>(out));
        if (with_bias) d.b.assign(static_cast<std::size_t>(out), 0.0);
        const double sd = gain / std::sqrt(static_cast<double>(in));
        for (auto& w : d.w) w = sd * rng.gaussian();
        return d;
    };
    auto make_bn = [&](int n) {
        BatchNorm bn;
        bn.n = n;
        bn.gamma.assign(static_cast<std::size_t>(n), 1.0);
        bn.beta.assign(static_cast<std::size_t>(n), 0.0);
        bn.run_mean.assign(static_cast<std::size_t>(n), 0.0);
        bn.run_var.assign(static_cast<std::size_t>(n), 1.0);
        return bn;
    };

    MlpModel m;
    m.cfg = cfg;
    m.body.resize(static_cast<std::size_t>(cfg.blocks));
    for (int i = 0; i < cfg.blocks; ++i) {
        const int in = (i == 0) ? 2 : cfg.width;
        // bias-free: the following batch-norm's shift makes a bias redundant
        m.body[static_cast<std::size_t>(i)].lin = make_dense(in, cfg.width, std::sqrt(2.0), false);
        m.body[static_cast<std::size_t>(i)].bn = make_bn(cfg.width);
        m.body[static_cast<std::size_t>(i)].skip = (in == cfg.width);
    }
    m.head = make_dense(cfg.blocks > 0 ? cfg.width : 2, 2, 1.0, true);
    return m;
}

namespace {

// Shared forward. train=true uses batch statistics (cached for backward) and
// the dropout stream; train=false uses running moments, no dropout.
std::vector<double> forward_impl(const MlpModel& m, const std::vector<double>& x0,
                                 std::size_t batch, bool train, Rng* dropout_rng,
                                 std::vector<BlockCache>* caches, bool update_running,
                                 MlpModel* mutable_model) {
    const auto width = static_cast<std::size_t>(m.cfg.width);
    std::vector<double> x = x0;
    for (std::size_t bi = 0; bi < m.body.size(); ++bi) {
        const auto& blk = m.body[bi];
        BlockCache local;
        BlockCache& c = caches ? (*caches)[bi] : local;
        c.x_in = x;

        dense_forward(blk.lin, x, batch, c.z);

        const auto n = static_cast<std::size_t>(blk.bn.n);
        c.xhat.resize(batch * n);
        c.y.resize(batch * n);
        if (train) {
            c.mean.assign(n, 0.0);
            c.var.assign(n, 0.0);
            for (std::size_t b = 0; b < batch; ++b)
                for (std::size_t j = 0; j < n; ++j) c.mean[j] += c.z[b * n + j];
            for (std::size_t j = 0; j < n; ++j) c.mean[j] /= static_cast<double>(batch);
            for (std::size_t b = 0; b < batch; ++b)
                for (std::size_t j = 0; j < n; ++j) {
                    const double d = c.z[b * n + j] - c.mean[j];
                    c.var[j] += d * d;
                }
            for (std::size_t j = 0; j < n; ++j) c.var[j] /= static_cast<double>(batch);
            if (update_running && mutable_model) {
                auto& bn = mutable_model->body[bi].bn;
                for (std::size_t j = 0; j < n; ++j) {
                    bn.run_mean[j] = (1.0 - m.cfg.bn_momentum) * bn.run_mean[j] + m.cfg.bn_momentum * c.mean[j];
                    bn.run_var[j] = (1.0 - m.cfg.bn_momentum) * bn.run_var[j] + m.cfg.bn_momentum * c.var[j];
                }
            }
        } else {
            c.mean = blk.bn.run_mean;
            c.var = blk.bn.run_var;
        }
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t j = 0; j < n; ++j) {
                const double inv = 1.0 / std::sqrt(c.var[j] + m.cfg.bn_epsilon);
                const double xh = (c.z[b * n + j] - c.mean[j]) * inv;
                c.xhat[b * n + j] = xh;
                c.y[b * n + j] = blk.bn.gamma[j] * xh + blk.bn.beta[j];
            }

        // ReLU would launder a NaN into 0, so check the pre-activation here
        if (!train) check_finite(c.y, ("block " + std::to_string(bi)).c_str());

        std::vector<double> out(batch * width);
        const bool use_dropout = train && m.cfg.dropout > 0.0 && dropout_rng;
        if (use_dropout) c.drop_mask.resize(batch * width);
        const double keep_scale = 1.0 / (1.0 - m.cfg.dropout);
        for (std::size_t k = 0; k < batch * width; ++k) {
            double a = c.y[k] > 0.0 ? c.y[k] : 0.0;  // ReLU
            if (use_dropout) {
                const double mask = dropout_rng->uniform01() < m.cfg.dropout ? 0.0 : keep_scale;
                c.drop_mask[k] = mask;
                a *= mask;
            }
            out[k] = a + (blk.skip ? x[k] : 0.0);
        }
        x = std::move(out);
    }

    std::vector<double> llrs;
    dense_forward(m.head, x, batch, llrs);
    if (!train) check_finite(llrs, "head");
    if (caches) {
        caches->push_back(BlockCache{});  // extra slot carries the head input
        caches->back().x_in = std::move(x);
    }
    return llrs;
}

std::vector<double> standardize(const MlpModel& m, std::span<const ComplexSample> symbols) {
    std::vector<double> x(2 * symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        x[2 * i] = (symbols[i].real() - m.input_mean[0]) / m.input_std[0];
        x[2 * i + 1] = (symbols[i].imag() - m.input_mean[1]) / m.input_std[1];
    }
    return x;
}

}  // namespace

LlrFrame mlp_forward(const MlpModel& model, std::span<const ComplexSample> symbols) {
    LlrFrame frame;
    frame.llrs.reserve(2 * symbols.size());
    constexpr std::size_t kChunk = 8192;
    for (std::size_t off = 0; off < symbols.size(); off += kChunk) {
        const std::size_t n = std::min(kChunk, symbols.size() - off);
        const auto x0 = standardize(model, symbols.subspan(off, n));
        const auto llrs = forward_impl(model, x0, n, /*train=*/false, nullptr, nullptr, false, nullptr);
        frame.llrs.insert(frame.llrs.end(), llrs.begin(), llrs.end());
    }
    return frame;
}

namespace {

struct FlatParams {
    std::vector<double*> refs;
};

FlatParams parameter_refs(MlpModel& m) {
    FlatParams fp;
    auto add = [&fp](std::vector<double>& v) {
        for (auto& x : v) fp.refs.push_back(&x);
    };
    for (auto& blk : m.body) {
        add(blk.lin.w);
        add(blk.lin.b);
        add(blk.bn.gamma);
        add(blk.bn.beta);
    }
    add(m.head.w);
    add(m.head.b);
    return fp;
}

struct GradBuffers {
    std::vector<std::vector<double>> lin_w, lin_b, bn_gamma, bn_beta;
    std::vector<double> head_w, head_b;

    explicit GradBuffers(const MlpModel& m) {
        for (const auto& blk : m.body) {
            lin_w.emplace_back(blk.lin.w.size(), 0.0);
            lin_b.emplace_back(blk.lin.b.size(), 0.0);
            bn_gamma.emplace_back(blk.bn.gamma.size(), 0.0);
            bn_beta.emplace_back(blk.bn.beta.size(), 0.0);
        }
        head_w.assign(m.head.w.size(), 0.0);
        head_b.assign(m.head.b.size(), 0.0);
    }

    void zero() {
        auto z = [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); };
        for (auto& v : lin_w) z(v);
        for (auto& v : lin_b) z(v);
        for (auto& v : bn_gamma) z(v);
        for (auto& v : bn_beta) z(v);
        z(head_w);
        z(head_b);
    }

    std::vector<double> flatten() const {
        std::vector<double> out;
        for (std::size_t i = 0; i < lin_w.size(); ++i) {
            out.insert(out.end(), lin_w[i].begin(), lin_w[i].end());
            out.insert(out.end(), lin_b[i].begin(), lin_b[i].end());
            out.insert(out.end(), bn_gamma[i].begin(), bn_gamma[i].end());
            out.insert(out.end(), bn_beta[i].begin(), bn_beta[i].end());
        }
        out.insert(out.end(), head_w.begin(), head_w.end());
        out.insert(out.end(), head_b.begin(), head_b.end());
        return out;
    }
};

// Loss over one batch in train mode. Fills grads when requested.
// bits: 2 per symbol, aligned with the batch.
double batch_loss_and_grad(MlpModel& m, const std::vector<double>& x0, std::size_t batch,
                           const std::uint8_t* bits, Rng* dropout_rng, bool update_running,
                           GradBuffers* grads) {
    std::vector<BlockCache> caches(m.body.size());
    const auto llrs = forward_impl(m, x0, batch, /*train=*/true, dropout_rng, &caches,
                                   update_running, &m);
    const std::vector<double>& head_in = caches.back().x_in;

    const double nbits = 2.0 * static_cast<double>(batch);
    double loss = 0.0;
    std::vector<double> dllr(llrs.size());
    for (std::size_t k = 0; k < llrs.size(); ++k) {
        const double sgn = bits[k] ? 1.0 : -1.0;  // (2b - 1)
        loss += softplus(sgn * llrs[k]);
        dllr[k] = sgn * sigmoid(sgn * llrs[k]) / nbits;
    }
    loss /= nbits;
    if (!grads) return loss;

    const auto width = static_cast<std::size_t>(m.cfg.width);
    std::vector<double> dx(head_in.size(), 0.0);
    dense_backward(m.head, head_in, dllr, batch, dx, grads->head_w, grads->head_b);

    for (std::size_t bi = m.body.size(); bi-- > 0;) {
        const auto& blk = m.body[bi];
        const auto& c = caches[bi];
        const auto n = static_cast<std::size_t>(blk.bn.n);

        // through dropout and ReLU
        std::vector<double> dy(batch * n);
        for (std::size_t k = 0; k < batch * n; ++k) {
            double g = dx[k];
            if (!c.drop_mask.empty()) g *= c.drop_mask[k];
            dy[k] = c.y[k] > 0.0 ? g : 0.0;
        }

        // batch-norm backward (biased batch variance)
        std::vector<double> dz(batch * n);
        std::vector<double> sum_dy(n, 0.0), sum_dy_xhat(n, 0.0);
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t j = 0; j < n; ++j) {
                sum_dy[j] += dy[b * n + j];
                sum_dy_xhat[j] += dy[b * n + j] * c.xhat[b * n + j];
            }
        for (std::size_t j = 0; j < n; ++j) {
            grads->bn_beta[bi][j] += sum_dy[j];
            grads->bn_gamma[bi][j] += sum_dy_xhat[j];
        }
        const double inv_b = 1.0 / static_cast<double>(batch);
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t j = 0; j < n; ++j) {
                const double inv_sd = 1.0 / std::sqrt(c.var[j] + m.cfg.bn_epsilon);
                const double t = dy[b * n + j] - inv_b * sum_dy[j] -
                                 c.xhat[b * n + j] * inv_b * sum_dy_xhat[j];
                dz[b * n + j] = blk.bn.gamma[j] * inv_sd * t;
            }

        std::vector<double> dx_in(c.x_in.size(), 0.0);
        dense_backward(blk.lin, c.x_in, dz, batch, dx_in, grads->lin_w[bi], grads->lin_b[bi]);
        if (blk.skip)
            for (std::size_t k = 0; k < batch * width; ++k) dx_in[k] += dx[k];
        dx = std::move(dx_in);
    }
    return loss;
}

void set_standardization(MlpModel& m, std::span<const ComplexSample> symbols) {
    double mr = 0.0, mi = 0.0;
    for (const auto& s : symbols) {
        mr += s.real();
        mi += s.imag();
    }
    const auto n = static_cast<double>(symbols.size());
    mr /= n;
    mi /= n;
    double vr = 0.0, vi = 0.0;
    for (const auto& s : symbols) {
        vr += (s.real() - mr) * (s.real() - mr);
        vi += (s.imag() - mi) * (s.imag() - mi);
    }
    m.input_mean = {mr, mi};
    m.input_std = {std::max(std::sqrt(vr / n), 1e-12), std::max(std::sqrt(vi / n), 1e-12)};
}

std::vector<double> snapshot_params(MlpModel& m) {
    const auto fp = parameter_refs(m);
    std::vector<double> s(fp.refs.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = *fp.refs[i];
    return s;
}

void restore_params(MlpModel& m, const std::vector<double>& s) {
    const auto fp = parameter_refs(m);
    for (std::size_t i = 0; i < s.size(); ++i) *fp.refs[i] = s[i];
}

double infer_loss(const MlpModel& m, std::span<const ComplexSample> symbols, const BitSequence& bits) {
    const auto frame = mlp_forward(m, symbols);
    double loss = 0.0;
    for (std::size_t k = 0; k < frame.llrs.size(); ++k) {
        const double sgn = bits[k] ? 1.0 : -1.0;
        loss += softplus(sgn * frame.llrs[k]);
    }
    return loss / static_cast<double>(frame.llrs.size());
}

}  // namespace

TrainResult mlp_train(MlpModel& model, std::span<const ComplexSample> symbols,
                      const BitSequence& true_bits, const TrainConfig& cfg,
                      std::span<const ComplexSample> test_symbols, const BitSequence& test_bits) {
    if (true_bits.size() != 2 * symbols.size())
        throw std::invalid_argument("mlp_train: need exactly 2 bits per symbol");
    if (!test_symbols.empty() && test_bits.size() != 2 * test_symbols.size())
        throw std::invalid_argument("mlp_train: test bits/symbols mismatch");
    if (cfg.batch_size < 2) throw std::invalid_argument("mlp_train: batch_size must be >= 2");
    if (symbols.empty()) throw std::invalid_argument("mlp_train: empty training set");

    set_standardization(model, symbols);
    const auto x_all = standardize(model, symbols);

    auto fp = parameter_refs(model);
    const std::size_t np = fp.refs.size();
    std::vector<double> adam_m(np, 0.0), adam_v(np, 0.0);
    GradBuffers grads(model);

    Rng shuffle_rng(derive_seed(cfg.seed, "mlp.shuffle"));
    Rng dropout_rng(derive_seed(cfg.seed, "mlp.dropout"));

    std::vector<std::size_t> order(symbols.size());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    std::vector<double> last_finite = snapshot_params(model);
    long t = 0;

    const auto bsz = static_cast<std::size_t>(cfg.batch_size);
    std::vector<double> xb(bsz * 2);
    BitSequence bb(bsz * 2);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with our own stream, so shuffles are reproducible
        for (std::size_t i = order.size(); i-- > 1;)
            std::swap(order[i], order[shuffle_rng.bounded(i + 1)]);

        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t off = 0; off + 2 <= order.size(); off += bsz) {
            const std::size_t n = std::min(bsz, order.size() - off);
            if (n < 2) break;  // batch-norm needs at least two samples
            xb.resize(n * 2);
            bb.resize(n * 2);
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t idx = order[off + k];
                xb[2 * k] = x_all[2 * idx];
                xb[2 * k + 1] = x_all[2 * idx + 1];
                bb[2 * k] = true_bits[2 * idx];
                bb[2 * k + 1] = true_bits[2 * idx + 1];
            }

            grads.zero();
            const double loss = cfg.loss_scale *
                                batch_loss_and_grad(model, xb, n, bb.data(), &dropout_rng,
                                                    /*update_running=*/true, &grads);
            if (!std::isfinite(loss)) {
                restore_params(model, last_finite);
                throw TrainingDivergedError(
                    "mlp_train: non-finite loss at epoch " + std::to_string(epoch) +
                        "; model restored to last finite epoch",
                    epoch);
            }
            epoch_loss += loss;
            ++batches;

            auto g = grads.flatten();
            if (cfg.loss_scale != 1.0)
                for (auto& gi : g) gi *= cfg.loss_scale;
            ++t;
            const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
            const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
            for (std::size_t i = 0; i < np; ++i) {
                adam_m[i] = cfg.beta1 * adam_m[i] + (1.0 - cfg.beta1) * g[i];
                adam_v[i] = cfg.beta2 * adam_v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
                const double mhat = adam_m[i] / bc1;
                const double vhat = adam_v[i] / bc2;
                *fp.refs[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
            }
        }

        bool finite = true;
        for (std::size_t i = 0; i < np && finite; ++i) finite = std::isfinite(*fp.refs[i]);
        if (!finite) {
            restore_params(model, last_finite);
            throw TrainingDivergedError(
                "mlp_train: parameters diverged at epoch " + std::to_string(epoch) +
                    "; model restored to last finite epoch",
                epoch);
        }

        result.train_loss.push_back(batches ? epoch_loss / static_cast<double>(batches) : 0.0);
        if (!test_symbols.empty()) result.test_loss.push_back(infer_loss(model, test_symbols, test_bits));
        last_finite = snapshot_params(model);
    }
    return result;
}

double mlp_gradient_check(MlpModel& model, std::span<const ComplexSample> symbols,
                          const BitSequence& bits, double step) {
    if (bits.size() != 2 * symbols.size())
        throw std::invalid_argument("gradient_check: need 2 bits per symbol");
    if (model.parameter_count() > 10000)
        throw std::invalid_argument("gradient_check: model too large (> 1e4 parameters)");

    const double saved_dropout = model.cfg.dropout;
    model.cfg.dropout = 0.0;  // deterministic loss surface for finite differences

    const auto x0 = standardize(model, symbols);
    const std::size_t batch = symbols.size();

    GradBuffers grads(model);
    batch_loss_and_grad(model, x0, batch, bits.data(), nullptr, /*update_running=*/false, &grads);
    const auto analytic = grads.flatten();

    auto fp = parameter_refs(model);
    double max_rel = 0.0;
    for (std::size_t i = 0; i < fp.refs.size(); ++i) {
        const double orig = *fp.refs[i];
        *fp.refs[i] = orig + step;
        const double lp = batch_loss_and_grad(model, x0, batch, bits.data(), nullptr, false, nullptr);
        *fp.refs[i] = orig - step;
        const double lm = batch_loss_and_grad(model, x0, batch, bits.data(), nullptr, false, nullptr);
        *fp.refs[i] = orig;
        const double fd = (lp - lm) / (2.0 * step);
        const double rel = std::abs(fd - analytic[i]) / std::max({std::abs(fd), std::abs(analytic[i]), 1e-8});
        max_rel = std::max(max_rel, rel);
    }
    model.cfg.dropout = saved_dropout;
    return max_rel;
}

namespace {

constexpr char kMagic[8] = {'O', 'G', 'S', 'M', 'L', 'P', '0', '1'};

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_f64s(std::ostream& os, const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
}
std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
void get_f64s(std::istream& is, std::vector<double>& v, std::size_t n) {
    v.resize(n);
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * 8));
}

}  // namespace

void mlp_save(const MlpModel& model, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("mlp_save: cannot open " + path);
    os.write(kMagic, 8);
    put_u32(os, static_cast<std::uint32_t>(model.cfg.blocks));
    put_u32(os, static_cast<std::uint32_t>(model.cfg.width));
    const double header[7] = {model.cfg.dropout,   model.cfg.bn_epsilon, model.cfg.bn_momentum,
                              model.input_mean[0], model.input_mean[1],  model.input_std[0],
                              model.input_std[1]};
    os.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (const auto& blk : model.body) {
        put_u32(os, static_cast<std::uint32_t>(blk.lin.in));
        put_u32(os, static_cast<std::uint32_t>(blk.lin.out));
        put_f64s(os, blk.lin.w);
        put_f64s(os, blk.lin.b);
        put_f64s(os, blk.bn.gamma);
        put_f64s(os, blk.bn.beta);
        put_f64s(os, blk.bn.run_mean);
        put_f64s(os, blk.bn.run_var);
    }
    put_u32(os, static_cast<std::uint32_t>(model.head.in));
    put_u32(os, static_cast<std::uint32_t>(model.head.out));
    put_f64s(os, model.head.w);
    put_f64s(os, model.head.b);
    if (!os) throw std::runtime_error("mlp_save: write failed for " + path);
}

MlpModel mlp_load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("mlp_load: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("mlp_load: bad magic in " + path);

    MlpModel m;
    m.cfg.blocks = static_cast<int>(get_u32(is));
    m.cfg.width = static_cast<int>(get_u32(is));
    double header[7];
    is.read(reinterpret_cast<char*>(header), sizeof(header));
    m.cfg.dropout = header[0];
    m.cfg.bn_epsilon = header[1];
    m.cfg.bn_momentum = header[2];
    m.input_mean = {header[3], header[4]};
    m.input_std = {header[5], header[6]};

    if (m.cfg.blocks < 0 || m.cfg.blocks > 1024 || m.cfg.width < 1 || m.cfg.width > 65536)
        throw std::runtime_error("mlp_load: implausible layer sizes in " + path);

    m.body.resize(static_cast<std::size_t>(m.cfg.blocks));
    for (auto& blk : m.body) {
        blk.lin.in = static_cast<int>(get_u32(is));
        blk.lin.out = static_cast<int>(get_u32(is));
        const auto in = static_cast<std::size_t>(blk.lin.in);
        const auto out = static_cast<std::size_t>(blk.lin.out);
        get_f64s(is, blk.lin.w, in * out);
        blk.lin.b.clear();  // body layers are bias-free (batch-norm shifts)
        blk.bn.n = blk.lin.out;
        get_f64s(is, blk.bn.gamma, out);
        get_f64s(is, blk.bn.beta, out);
        get_f64s(is, blk.bn.run_mean, out);
        get_f64s(is, blk.bn.run_var, out);
        blk.skip = (blk.lin.in == blk.lin.out);
    }
    m.head.in = static_cast<int>(get_u32(is));
    m.head.out = static_cast<int>(get_u32(is));
    get_f64s(is, m.head.w, static_cast<std::size_t>(m.head.in) * static_cast<std::size_t>(m.head.out));
    get_f64s(is, m.head.b, static_cast<std::size_t>(m.head.out));
    if (!is) throw std::runtime_error("mlp_load: truncated file " + path);
    return m;
}

}  // namespace ogs
