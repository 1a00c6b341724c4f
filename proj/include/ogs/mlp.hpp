#ifndef OGS_MLP_HPP
#define OGS_MLP_HPP

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ogs/signal.hpp"

namespace ogs {

/// Per-symbol soft output: two LLRs per symbol, sign convention
/// L > 0 <=> bit more likely 0. truth_bits may be empty when unknown.
struct LlrFrame {
    std::vector<double> llrs;
    BitSequence truth_bits;

    std::size_t symbol_count() const { return llrs.size() / 2; }
};

/// Hard bits from LLR signs (L >= 0 -> 0).
BitSequence llrs_to_bits(const LlrFrame& frame);

struct MlpConfig {
    int blocks = 3;
    int width = 32;
    double dropout = 0.1;
    double bn_epsilon = 1e-5;
    double bn_momentum = 0.1;
};

struct TrainConfig {
    std::size_t train_bits = 120600;
    std::size_t test_bits = 13400;
    int batch_size = 256;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int epochs = 50;
    RngSeed seed{1};
    /// Multiplies the loss (and so the gradients). With epsilon -> 0 the
    /// adaptive-momentum trajectory is invariant to it; exposed for tests.
    double loss_scale = 1.0;
};

struct Dense {
    int in = 0, out = 0;
    std::vector<double> w;  // row-major [out][in]
    std::vector<double> b;
};

struct BatchNorm {
    int n = 0;
    std::vector<double> gamma, beta;
    std::vector<double> run_mean, run_var;  // used at inference
};

/// linear -> batch-norm -> ReLU -> dropout, with an additive skip around the
/// block whenever input and output widths match (all blocks but the first,
/// which projects the 2 input features up to the working width).
struct MlpBlock {
    Dense lin;
    BatchNorm bn;
    bool skip = false;
};

/// Residual MLP mapping (I, Q) to 2-bit LLRs. Inputs are standardized by the
/// training-set mean/variance stored in the model. Inference is deterministic:
/// dropout off, batch-norm running moments.
struct MlpModel {
    MlpConfig cfg;
    std::vector<MlpBlock> body;
    Dense head;  // width -> 2
    std::array<double, 2> input_mean{0.0, 0.0};
    std::array<double, 2> input_std{1.0, 1.0};

    std::size_t parameter_count() const;
};

MlpModel mlp_init(const MlpConfig& cfg, RngSeed seed);

/// Deterministic inference pass. Throws std::runtime_error naming the layer
/// if any activation goes non-finite.
LlrFrame mlp_forward(const MlpModel& model, std::span<const ComplexSample> symbols);

struct TrainResult {
    std::vector<double> train_loss;  // per epoch
    std::vector<double> test_loss;   // per epoch (empty if no test set)
};

class TrainingDivergedError : public std::runtime_error {
public:
    TrainingDivergedError(const std::string& what, int epoch)
        : std::runtime_error(what), epoch_(epoch) {}
    int epoch() const { return epoch_; }

private:
    int epoch_;
};

/// Minimizes the mean sigmoid cross-entropy softplus((2b-1)*L) over bits with
/// adaptive-momentum updates (bias-corrected first/second moments). Sets the
/// input standardization from the training set. On a non-finite loss the
/// model is restored to the last finite epoch and TrainingDivergedError is
/// thrown.
TrainResult mlp_train(MlpModel& model, std::span<const ComplexSample> symbols,
                      const BitSequence& true_bits, const TrainConfig& cfg,
                      std::span<const ComplexSample> test_symbols = {},
                      const BitSequence& test_bits = {});

/// Central finite differences against the analytic gradient on one fixed
/// batch (train-mode batch statistics, dropout disabled). Returns
/// max over parameters of |g_fd - g_an| / max(|g_fd|, |g_an|, 1e-8).
/// step: FD step size. Models above 1e4 parameters are rejected.
double mlp_gradient_check(MlpModel& model, std::span<const ComplexSample> symbols,
                          const BitSequence& bits, double step = 1e-5);

/// Flat binary model format; save -> load -> inference is bit-identical.
void mlp_save(const MlpModel& model, const std::string& path);
MlpModel mlp_load(const std::string& path);

}  // namespace ogs

#endif
