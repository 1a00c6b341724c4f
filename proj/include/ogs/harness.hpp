#ifndef OGS_HARNESS_HPP
#define OGS_HARNESS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ogs/gateway.hpp"
#include "ogs/metrics.hpp"
#include "ogs/mlp.hpp"
#include "ogs/rx.hpp"

namespace ogs {

struct TxSection {
    double symbol_rate_hz = 10e9;
    int samples_per_symbol = 2;
    double nominal_peak_power_mw = 55.0;  // synthesis power; the EDFA gain moves it to the cell power
};

struct GatewaySection {
    std::string mode = "calibrated";  // "calibrated" | "physical"
    double reference_power_mw = 55.0;
    double reference_phase_rad = 1.5 * M_PI;
    double extra_connection_loss_db = 0.0;
    std::vector<FiberSpec> fibers{hnlf_a(), hnlf_b()};

    XpmModelConfig xpm_config() const;
    FiberCascade cascade() const;
};

struct RxSection {
    double linewidth_hz = 100e3;   // applied in fig3 mode only
    double freq_offset_hz = 0.0;   // applied in fig3 mode only
    std::optional<double> rx_snr_db;  // empty = receiver noise off
    double cpr_loop_gain = 0.01;
    int prefix_symbols = 256;  // known symbols for equalizer pilots and phase alignment
};

struct TrainSection {
    std::size_t train_bits = 120600;
    std::size_t test_bits = 13400;
    int batch_size = 256;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int epochs = 50;
    int blocks = 3;
    int width = 32;
    double dropout = 0.1;
    std::string mode = "per_point";  // "per_point" | "train_once" (mid-SNR model reused)

    TrainConfig train_config(RngSeed seed) const;
    MlpConfig mlp_config() const;
};

struct SweepSection {
    std::vector<double> pam4_snr_db{20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30};
    std::vector<double> peak_power_mw{38.5, 44, 49.5, 55, 60.5};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::size_t payload_bits = 1048576;  // scored bits per cell
    int workers = 0;                     // 0 = hardware concurrency
};

struct ExperimentConfig {
    std::string mode = "fig6";  // "fig6": no rx impairments; "fig3": impairments + receiver noise
    int prbs_order = 23;
    std::string labeling = "gray";  // "gray" | "natural"
    TxSection tx;
    GatewaySection gateway;
    RxSection rx;
    std::vector<std::string> demappers{"hard", "linear", "dnn"};
    TrainSection train;
    SweepSection sweep;
    std::string output_dir = "out";

    BitLabeling bit_labeling() const;
    void validate() const;
};

/// JSON (de)serialization. Loading starts from defaults and patches the keys
/// present in the file, so partial configs are valid.
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);

/// Override one leaf key by dotted path, e.g. "tx.samples_per_symbol=4" or
/// "sweep.pam4_snr_db=20,22,24". The value is parsed with the type the key
/// has in the current config. Unknown keys throw.
void apply_override(ExperimentConfig& cfg, const std::string& dotted_key, const std::string& value);

/// FNV-1a over the canonical (sorted-key) JSON text of the resolved config.
std::string config_hash(const ExperimentConfig& cfg);

struct CellKey {
    double power_mw = 55.0;
    double snr_db = 30.0;
    std::string demapper = "hard";
    std::uint64_t seed = 1;
};

struct SweepRow {
    double snr_db = 0.0;
    double power_mw = 0.0;
    std::string demapper;
    double ber = 0.0, ber_ci_lo = 0.0, ber_ci_hi = 0.0;
    double gmi = 0.0;
    std::size_t n_bits = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
};

struct SymbolDump {
    std::vector<ComplexSample> symbols;
    std::vector<int> levels;
    BitSequence bits;  // 2 per symbol
};

struct CellResult {
    SweepRow row;
    double foc_offset_hz = 0.0;
    std::array<PhaseStats, 4> phase_stats{};
    bool failed = false;
    std::string failure;
};

/// Optional taps into a cell run.
struct CellProbes {
    SymbolDump* dump = nullptr;        // post-DSP payload symbols with labels
    MlpModel* trained_model = nullptr; // freshly trained DNN (per_point path)
    TrainResult* train_curve = nullptr;
};

/// One grid cell end to end: Tx -> gateway -> Rx impairments -> DSP ->
/// demapper -> metrics. Stage errors propagate with the stage name attached.
/// pretrained (optional) supplies the model for the "train_once" variant.
CellResult run_single(const ExperimentConfig& cfg, const CellKey& key,
                      const MlpModel* pretrained = nullptr, CellProbes* probes = nullptr);

struct GridOutput {
    std::vector<CellResult> cells;  // sorted by (power, snr, demapper, seed)
};

/// Full grid over sweep axes x demappers x seeds, cells dispatched to a
/// worker pool; results are deterministic regardless of scheduling.
GridOutput run_sweep(const ExperimentConfig& cfg);

/// Fixed-header CSV of sweep rows.
void write_rows_csv(const std::string& path, const std::vector<CellResult>& cells);

/// Per-cell constellation dumps (i, q, level, bits) for the Fig. 4 grid.
/// Returns the list of files written.
std::vector<std::string> run_fig4(const ExperimentConfig& cfg);

struct CurveCrossing {
    double snr_at_target = std::numeric_limits<double>::quiet_NaN();
    bool bracketed = false;  // false: target not crossed inside the sweep range
};

struct Fig6Output {
    std::vector<CellResult> cells;
    // curve key is "<demapper>@<power_mw>"
    std::map<std::string, std::vector<double>> ber_curves;  // seed-averaged, per SNR point
    std::map<std::string, std::vector<double>> gmi_curves;
    std::map<std::string, CurveCrossing> gmi_crossings;  // at gmi = 0.8
    double dnn_over_linear_gain_db = std::numeric_limits<double>::quiet_NaN();   // at 55 mW
    double shaped_over_unshaped_gain_db = std::numeric_limits<double>::quiet_NaN();  // DNN 38.5 vs 55
};

/// The BER/GMI waterfall study: {linear, dnn} x {55, 38.5} mW over the SNR
/// axis and seeds. Writes fig6_rows.csv, fig6_ber.csv, fig6_gmi.csv and
/// fig6_summary.json under output_dir. Untrainable cells are recorded as
/// failed and the run continues.
Fig6Output run_fig6(const ExperimentConfig& cfg);

struct CalibrationReport {
    std::vector<double> fiber_effective_length_km;
    double cascade_effective_length_km = 0.0;
    // per sweep power: calibrated / physical phase of level 3 and spacing/pi
    std::vector<std::array<double, 4>> per_power;  // {power_mw, calib_phi3, phys_phi3, spacing_over_pi}
};

CalibrationReport calibrate(const ExperimentConfig& cfg);
std::string calibration_text(const CalibrationReport& rep);

/// Deterministic JSON run manifest (resolved config, outputs, per-cell
/// diagnostics such as the FOC residual).
void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    const std::string& command, const std::vector<std::string>& outputs,
                    const std::vector<CellResult>& cells);

}  // namespace ogs

#endif
