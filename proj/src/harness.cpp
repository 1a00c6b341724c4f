#include "ogs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ogs/demap.hpp"
#include "ogs/pam4.hpp"

namespace ogs {

using nlohmann::json;

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string curve_key(const std::string& demapper, double power_mw) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s@%.4g", demapper.c_str(), power_mw);
    return buf;
}

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const TrainingDivergedError&) {
        throw;  // handled by the caller as a failed cell
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(name) + ": " + e.what());
    }
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    int w = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    w = std::max(1, std::min<int>(w, static_cast<int>(n)));
    if (w == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lk(err_mutex);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace

XpmModelConfig GatewaySection::xpm_config() const {
    XpmModelConfig c;
    c.mode = mode == "physical" ? XpmMode::Physical : XpmMode::Calibrated;
    c.reference_power_w = reference_power_mw * 1e-3;
    c.reference_phase_rad = reference_phase_rad;
    return c;
}

FiberCascade GatewaySection::cascade() const { return {fibers, extra_connection_loss_db}; }

TrainConfig TrainSection::train_config(RngSeed seed) const {
    TrainConfig tc;
    tc.train_bits = train_bits;
    tc.test_bits = test_bits;
    tc.batch_size = batch_size;
    tc.learning_rate = learning_rate;
    tc.beta1 = beta1;
    tc.beta2 = beta2;
    tc.epsilon = epsilon;
    tc.epochs = epochs;
    tc.seed = seed;
    return tc;
}

MlpConfig TrainSection::mlp_config() const {
    MlpConfig mc;
    mc.blocks = blocks;
    mc.width = width;
    mc.dropout = dropout;
    return mc;
}

BitLabeling ExperimentConfig::bit_labeling() const {
    return labeling == "natural" ? BitLabeling::Natural : BitLabeling::Gray;
}

void ExperimentConfig::validate() const {
    if (mode != "fig6" && mode != "fig3") throw std::invalid_argument("config: mode must be fig6 or fig3");
    if (labeling != "gray" && labeling != "natural")
        throw std::invalid_argument("config: labeling must be gray or natural");
    prbs_tap_mask(prbs_order);  // throws on unsupported order
    if (tx.samples_per_symbol < 1) throw std::invalid_argument("config: samples_per_symbol must be >= 1");
    if (!(tx.symbol_rate_hz > 0)) throw std::invalid_argument("config: symbol_rate must be > 0");
    if (!(tx.nominal_peak_power_mw > 0)) throw std::invalid_argument("config: nominal peak power must be > 0");
    if (gateway.mode != "calibrated" && gateway.mode != "physical")
        throw std::invalid_argument("config: gateway.mode must be calibrated or physical");
    if (gateway.fibers.empty()) throw std::invalid_argument("config: gateway needs at least one fiber");
    if (!(gateway.reference_power_mw > 0)) throw std::invalid_argument("config: reference power must be > 0");
    if (rx.prefix_symbols < 64) throw std::invalid_argument("config: prefix_symbols must be >= 64");
    if (!(rx.cpr_loop_gain > 0) || rx.cpr_loop_gain > 1)
        throw std::invalid_argument("config: cpr_loop_gain must be in (0, 1]");
    if (demappers.empty()) throw std::invalid_argument("config: at least one demapper");
    for (const auto& d : demappers)
        if (d != "hard" && d != "linear" && d != "dnn")
            throw std::invalid_argument("config: unknown demapper " + d);
    if (train.mode != "per_point" && train.mode != "train_once")
        throw std::invalid_argument("config: train.mode must be per_point or train_once");
    if (train.train_bits % 2 || train.test_bits % 2 || train.train_bits == 0)
        throw std::invalid_argument("config: train/test bits must be even and non-zero");
    if (sweep.pam4_snr_db.empty() || sweep.peak_power_mw.empty() || sweep.seeds.empty())
        throw std::invalid_argument("config: sweep axes must be non-empty");
    if (sweep.payload_bits % 2 || sweep.payload_bits == 0)
        throw std::invalid_argument("config: payload_bits must be even and non-zero");
    for (double p : sweep.peak_power_mw)
        if (!(p > 0)) throw std::invalid_argument("config: sweep powers must be > 0");
}

// -- JSON ------------------------------------------------------------------

namespace {

json fiber_to_json(const FiberSpec& f) {
    return json{{"length_km", f.length_km},
                {"nonlinearity_per_w_km", f.gamma_per_w_km},
                {"dispersion_ps_nm_km", f.dispersion_ps_nm_km},
                {"slope_ps_nm_km2", f.slope_ps_nm_km2},
                {"loss_db_km", f.loss_db_km}};
}

FiberSpec fiber_from_json(const json& j) {
    FiberSpec f;
    f.length_km = j.at("length_km").get<double>();
    f.gamma_per_w_km = j.at("nonlinearity_per_w_km").get<double>();
    f.dispersion_ps_nm_km = j.value("dispersion_ps_nm_km", 0.0);
    f.slope_ps_nm_km2 = j.value("slope_ps_nm_km2", 0.0);
    f.loss_db_km = j.at("loss_db_km").get<double>();
    return f;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["mode"] = c.mode;
    j["prbs_order"] = c.prbs_order;
    j["labeling"] = c.labeling;
    j["tx"] = {{"symbol_rate_hz", c.tx.symbol_rate_hz},
               {"samples_per_symbol", c.tx.samples_per_symbol},
               {"nominal_peak_power_mw", c.tx.nominal_peak_power_mw}};
    json fibers = json::array();
    for (const auto& f : c.gateway.fibers) fibers.push_back(fiber_to_json(f));
    j["gateway"] = {{"mode", c.gateway.mode},
                    {"reference_power_mw", c.gateway.reference_power_mw},
                    {"reference_phase_rad", c.gateway.reference_phase_rad},
                    {"extra_connection_loss_db", c.gateway.extra_connection_loss_db},
                    {"fibers", fibers}};
    j["rx"] = {{"linewidth_hz", c.rx.linewidth_hz},
               {"freq_offset_hz", c.rx.freq_offset_hz},
               {"rx_snr_db", c.rx.rx_snr_db ? json(*c.rx.rx_snr_db) : json(nullptr)},
               {"cpr_loop_gain", c.rx.cpr_loop_gain},
               {"prefix_symbols", c.rx.prefix_symbols}};
    j["demappers"] = c.demappers;
    j["train"] = {{"train_bits", c.train.train_bits},
                  {"test_bits", c.train.test_bits},
                  {"batch_size", c.train.batch_size},
                  {"learning_rate", c.train.learning_rate},
                  {"beta1", c.train.beta1},
                  {"beta2", c.train.beta2},
                  {"epsilon", c.train.epsilon},
                  {"epochs", c.train.epochs},
                  {"blocks", c.train.blocks},
                  {"width", c.train.width},
                  {"dropout", c.train.dropout},
                  {"mode", c.train.mode}};
    j["sweep"] = {{"pam4_snr_db", c.sweep.pam4_snr_db},
                  {"peak_power_mw", c.sweep.peak_power_mw},
                  {"seeds", c.sweep.seeds},
                  {"payload_bits", c.sweep.payload_bits},
                  {"workers", c.sweep.workers}};
    j["output_dir"] = c.output_dir;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;  // defaults
    c.mode = j.value("mode", c.mode);
    c.prbs_order = j.value("prbs_order", c.prbs_order);
    c.labeling = j.value("labeling", c.labeling);
    if (j.contains("tx")) {
        const auto& t = j.at("tx");
        c.tx.symbol_rate_hz = t.value("symbol_rate_hz", c.tx.symbol_rate_hz);
        c.tx.samples_per_symbol = t.value("samples_per_symbol", c.tx.samples_per_symbol);
        c.tx.nominal_peak_power_mw = t.value("nominal_peak_power_mw", c.tx.nominal_peak_power_mw);
    }
    if (j.contains("gateway")) {
        const auto& g = j.at("gateway");
        c.gateway.mode = g.value("mode", c.gateway.mode);
        c.gateway.reference_power_mw = g.value("reference_power_mw", c.gateway.reference_power_mw);
        c.gateway.reference_phase_rad = g.value("reference_phase_rad", c.gateway.reference_phase_rad);
        c.gateway.extra_connection_loss_db =
            g.value("extra_connection_loss_db", c.gateway.extra_connection_loss_db);
        if (g.contains("fibers")) {
            c.gateway.fibers.clear();
            for (const auto& fj : g.at("fibers")) c.gateway.fibers.push_back(fiber_from_json(fj));
        }
    }
    if (j.contains("rx")) {
        const auto& r = j.at("rx");
        c.rx.linewidth_hz = r.value("linewidth_hz", c.rx.linewidth_hz);
        c.rx.freq_offset_hz = r.value("freq_offset_hz", c.rx.freq_offset_hz);
        if (r.contains("rx_snr_db")) {
            if (r.at("rx_snr_db").is_null())
                c.rx.rx_snr_db.reset();
            else
                c.rx.rx_snr_db = r.at("rx_snr_db").get<double>();
        }
        c.rx.cpr_loop_gain = r.value("cpr_loop_gain", c.rx.cpr_loop_gain);
        c.rx.prefix_symbols = r.value("prefix_symbols", c.rx.prefix_symbols);
    }
    if (j.contains("demappers")) c.demappers = j.at("demappers").get<std::vector<std::string>>();
    if (j.contains("train")) {
        const auto& t = j.at("train");
        c.train.train_bits = t.value("train_bits", c.train.train_bits);
        c.train.test_bits = t.value("test_bits", c.train.test_bits);
        c.train.batch_size = t.value("batch_size", c.train.batch_size);
        c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
        c.train.beta1 = t.value("beta1", c.train.beta1);
        c.train.beta2 = t.value("beta2", c.train.beta2);
        c.train.epsilon = t.value("epsilon", c.train.epsilon);
        c.train.epochs = t.value("epochs", c.train.epochs);
        c.train.blocks = t.value("blocks", c.train.blocks);
        c.train.width = t.value("width", c.train.width);
        c.train.dropout = t.value("dropout", c.train.dropout);
        c.train.mode = t.value("mode", c.train.mode);
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        if (s.contains("pam4_snr_db")) c.sweep.pam4_snr_db = s.at("pam4_snr_db").get<std::vector<double>>();
        if (s.contains("peak_power_mw")) c.sweep.peak_power_mw = s.at("peak_power_mw").get<std::vector<double>>();
        if (s.contains("seeds")) c.sweep.seeds = s.at("seeds").get<std::vector<std::uint64_t>>();
        c.sweep.payload_bits = s.value("payload_bits", c.sweep.payload_bits);
        c.sweep.workers = s.value("workers", c.sweep.workers);
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    return c;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
    return config_from_json(json::parse(text));
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
    return config_to_json(cfg).dump(2) + "\n";
}

void apply_override(ExperimentConfig& cfg, const std::string& dotted_key, const std::string& value) {
    json j = config_to_json(cfg);
    std::string path = "/";
    for (char ch : dotted_key) path += ch == '.' ? '/' : ch;
    const json::json_pointer ptr(path);
    if (!j.contains(ptr)) throw std::invalid_argument("unknown config key: " + dotted_key);

    const json& cur = j.at(ptr);
    json parsed;
    auto parse_scalar = [](const json& like, const std::string& v) -> json {
        if (like.is_boolean()) return v == "true" || v == "1";
        if (like.is_number_unsigned()) return static_cast<std::uint64_t>(std::stoull(v));
        if (like.is_number_integer()) return static_cast<std::int64_t>(std::stoll(v));
        if (like.is_number_float()) return std::stod(v);
        return v;  // string
    };
    if (cur.is_array()) {
        parsed = json::array();
        const json like = cur.empty() ? json(0.0) : cur.front();
        std::size_t start = 0;
        while (start <= value.size()) {
            const auto comma = value.find(',', start);
            const auto item = value.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!item.empty()) parsed.push_back(parse_scalar(like, item));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    } else if (cur.is_null()) {
        if (value == "null" || value == "off")
            parsed = json(nullptr);
        else
            parsed = std::stod(value);
    } else if (value == "null" || value == "off") {
        parsed = json(nullptr);  // e.g. disabling rx_snr_db
    } else {
        parsed = parse_scalar(cur, value);
    }
    j[ptr] = parsed;
    cfg = config_from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::uint64_t h = fnv1a64(config_to_json(cfg).dump());
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// -- single cell -----------------------------------------------------------

CellResult run_single(const ExperimentConfig& cfg, const CellKey& key,
                      const MlpModel* pretrained, CellProbes* probes) {
    cfg.validate();
    const bool fig3 = cfg.mode == "fig3";
    const auto labeling = cfg.bit_labeling();
    const double power_w = key.power_mw * 1e-3;
    const double nominal_w = cfg.tx.nominal_peak_power_mw * 1e-3;
    const RngSeed root{key.seed};

    // Stream tags carry the SNR so cells differ, but not the power: all
    // powers of one seed share the transmitter realization (same bits and
    // noise before the EDFA), exactly like retuning the amplifier in place.
    char tag[48];
    std::snprintf(tag, sizeof(tag), "snr=%.6f", key.snr_db);

    const auto prefix_syms = static_cast<std::size_t>(cfg.rx.prefix_symbols);
    const std::size_t train_syms = cfg.train.train_bits / 2;
    const std::size_t heldout_syms = cfg.train.test_bits / 2;
    const std::size_t payload_syms = cfg.sweep.payload_bits / 2;
    const std::size_t total_syms = prefix_syms + train_syms + heldout_syms + payload_syms;

    const auto bits = stage("prbs", [&] {
        return prbs_generate(cfg.prbs_order, 2 * total_syms,
                             derive_seed(root, std::string("bits/") + tag));
    });

    Pam4LevelMap map;
    map.peak_power_w = nominal_w;
    map.labeling = labeling;
    const auto levels = stage("pam4_map", [&] { return map_bits_to_levels(bits, map); });

    TxConfig txc;
    txc.symbol_rate = cfg.tx.symbol_rate_hz;
    txc.samples_per_symbol = cfg.tx.samples_per_symbol;
    txc.pam4_snr_db = key.snr_db;
    txc.edfa_gain_db = 10.0 * std::log10(power_w / nominal_w);
    txc.seed = derive_seed(root, std::string("tx.awgn/") + tag);

    auto pam4 = stage("pam4_tx", [&] {
        auto w = synthesize_pam4(levels, txc, map);
        return apply_gain(w, txc.edfa_gain_db);
    });

    const auto xpm = cfg.gateway.xpm_config();
    const auto cascade = cfg.gateway.cascade();
    auto probe = stage("xpm_gateway", [&] { return convert_pam4_to_qpsk(pam4, xpm, cascade); });
    pam4.samples.clear();
    pam4.samples.shrink_to_fit();

    RxImpairments imp;  // fig6 mode: everything off per the study's simplifications
    if (fig3) {
        imp.linewidth_hz = cfg.rx.linewidth_hz;
        imp.freq_offset_hz = cfg.rx.freq_offset_hz;
        imp.rx_snr_db = cfg.rx.rx_snr_db;
    } else {
        imp.linewidth_hz = 0.0;
        imp.freq_offset_hz = 0.0;
        imp.rx_snr_db.reset();
    }
    const auto received = stage("coherent_rx", [&] {
        return apply_rx_impairments(probe, imp, derive_seed(root, std::string("rx/") + tag));
    });

    const auto ref = stage("reference", [&] {
        return reference_constellation(xpm, cascade, power_w, labeling);
    });

    auto symbols = stage("dsp", [&] {
        auto syms = downsample(received);
        auto foc = foc_estimate_and_correct(syms, cfg.tx.symbol_rate_hz);

        // data-aided warm start for the DD loop from the known prefix head
        std::complex<double> acc{0.0, 0.0};
        const std::size_t warm = std::min<std::size_t>(64, prefix_syms);
        for (std::size_t i = 0; i < warm; ++i)
            acc += foc.symbols[i] * std::conj(ref.points[static_cast<std::size_t>(levels[i])]);

        CprConfig cpr_cfg;
        cpr_cfg.loop_gain = cfg.rx.cpr_loop_gain;
        cpr_cfg.reference = ref;
        cpr_cfg.initial_phase_rad = std::arg(acc);
        auto cpr = cpr_decision_directed(foc.symbols, cpr_cfg);

        auto aligned = align_phase_to_prefix(cpr.symbols,
                                             std::span<const int>(levels).first(prefix_syms), ref);
        return std::pair{std::move(aligned), foc.estimated_offset_hz};
    });

    const std::vector<ComplexSample>& syms = symbols.first;
    const std::size_t payload_off = prefix_syms + train_syms + heldout_syms;
    const std::span<const ComplexSample> prefix_rx(syms.data(), prefix_syms);
    const std::span<const ComplexSample> train_rx(syms.data() + prefix_syms, train_syms);
    const std::span<const ComplexSample> heldout_rx(syms.data() + prefix_syms + train_syms, heldout_syms);
    const std::span<const ComplexSample> payload_rx(syms.data() + payload_off, payload_syms);

    const BitSequence train_bits(bits.begin() + static_cast<std::ptrdiff_t>(2 * prefix_syms),
                                 bits.begin() + static_cast<std::ptrdiff_t>(2 * (prefix_syms + train_syms)));
    const BitSequence heldout_bits(
        bits.begin() + static_cast<std::ptrdiff_t>(2 * (prefix_syms + train_syms)),
        bits.begin() + static_cast<std::ptrdiff_t>(2 * payload_off));
    const BitSequence payload_bits(bits.begin() + static_cast<std::ptrdiff_t>(2 * payload_off), bits.end());
    const std::span<const int> payload_levels(levels.data() + payload_off, payload_syms);

    CellResult result;
    result.row.snr_db = key.snr_db;
    result.row.power_mw = key.power_mw;
    result.row.demapper = key.demapper;
    result.row.seed = key.seed;
    result.row.n_bits = cfg.sweep.payload_bits;
    result.row.config_hash = config_hash(cfg);
    result.foc_offset_hz = symbols.second;
    result.phase_stats = phase_stats_per_level(payload_rx, payload_levels);

    try {
        BerReport ber;
        GmiReport gmi;
        if (key.demapper == "hard") {
            const auto decided = stage("demap.hard", [&] { return hard_decide(payload_rx, ref); });
            ber = ber_count(decided, payload_bits);
            gmi = gmi_from_llrs(saturated_llrs(decided, payload_bits));  // labeled diagnostic
        } else if (key.demapper == "linear") {
            const auto eq = stage("demap.linear", [&] { return linear_equalize(payload_rx, prefix_rx); });
            const auto decided = hard_decide(eq.symbols, unshaped_qpsk(labeling));
            ber = ber_count(decided, payload_bits);
            gmi = gmi_from_llrs(saturated_llrs(decided, payload_bits));
        } else {  // dnn
            LlrFrame frame = stage("demap.dnn", [&] {
                if (pretrained) return mlp_forward(*pretrained, payload_rx);
                MlpModel model = mlp_init(cfg.train.mlp_config(),
                                          derive_seed(root, std::string("mlp/") + tag));
                auto curve = mlp_train(
                    model, train_rx, train_bits,
                    cfg.train.train_config(derive_seed(root, std::string("mlp/") + tag)),
                    heldout_rx, heldout_bits);
                auto out = mlp_forward(model, payload_rx);
                if (probes && probes->train_curve) *probes->train_curve = std::move(curve);
                if (probes && probes->trained_model) *probes->trained_model = std::move(model);
                return out;
            });
            frame.truth_bits = payload_bits;
            ber = ber_count(llrs_to_bits(frame), payload_bits);
            gmi = gmi_from_llrs(frame);
        }
        result.row.ber = ber.ber;
        result.row.ber_ci_lo = ber.ci_lo;
        result.row.ber_ci_hi = ber.ci_hi;
        result.row.gmi = gmi.gmi_per_bit;
    } catch (const TrainingDivergedError& e) {
        result.failed = true;
        result.failure = e.what();
        result.row.ber = result.row.ber_ci_lo = result.row.ber_ci_hi = result.row.gmi =
            std::numeric_limits<double>::quiet_NaN();
    }

    if (probes && probes->dump) {
        probes->dump->symbols.assign(payload_rx.begin(), payload_rx.end());
        probes->dump->levels.assign(payload_levels.begin(), payload_levels.end());
        probes->dump->bits = payload_bits;
    }
    return result;
}

// -- grids -----------------------------------------------------------------

namespace {

bool cell_less(const CellResult& a, const CellResult& b) {
    if (a.row.power_mw != b.row.power_mw) return a.row.power_mw < b.row.power_mw;
    if (a.row.snr_db != b.row.snr_db) return a.row.snr_db < b.row.snr_db;
    if (a.row.demapper != b.row.demapper) return a.row.demapper < b.row.demapper;
    return a.row.seed < b.row.seed;
}

std::vector<CellResult> run_grid(const ExperimentConfig& cfg, const std::vector<CellKey>& keys) {
    // "train_once" variant: one model per (power, seed), trained at the
    // median SNR of the axis, reused across the whole axis.
    std::map<std::pair<double, std::uint64_t>, MlpModel> shared_models;
    const bool wants_dnn = std::any_of(keys.begin(), keys.end(),
                                       [](const CellKey& k) { return k.demapper == "dnn"; });
    if (wants_dnn && cfg.train.mode == "train_once") {
        auto axis = cfg.sweep.pam4_snr_db;
        std::sort(axis.begin(), axis.end());
        const double mid_snr = axis[axis.size() / 2];
        std::vector<std::pair<double, std::uint64_t>> combos;
        for (const auto& k : keys)
            if (k.demapper == "dnn") combos.emplace_back(k.power_mw, k.seed);
        std::sort(combos.begin(), combos.end());
        combos.erase(std::unique(combos.begin(), combos.end()), combos.end());

        std::mutex m;
        parallel_for(combos.size(), cfg.sweep.workers, [&](std::size_t i) {
            // Payload is irrelevant for training; the training segments sit
            // before it in the frame, so shrinking it leaves them untouched.
            ExperimentConfig one = cfg;
            one.sweep.payload_bits = 2;
            CellKey k{combos[i].first, mid_snr, "dnn", combos[i].second};
            MlpModel model;
            CellProbes probes;
            probes.trained_model = &model;
            run_single(one, k, nullptr, &probes);
            std::scoped_lock lk(m);
            shared_models.emplace(combos[i], std::move(model));
        });
    }

    std::vector<CellResult> cells(keys.size());
    parallel_for(keys.size(), cfg.sweep.workers, [&](std::size_t i) {
        const MlpModel* pre = nullptr;
        if (keys[i].demapper == "dnn" && cfg.train.mode == "train_once") {
            const auto it = shared_models.find({keys[i].power_mw, keys[i].seed});
            if (it != shared_models.end()) pre = &it->second;
        }
        cells[i] = run_single(cfg, keys[i], pre);
    });
    std::sort(cells.begin(), cells.end(), cell_less);
    return cells;
}

}  // namespace

GridOutput run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<CellKey> keys;
    for (double p : cfg.sweep.peak_power_mw)
        for (double s : cfg.sweep.pam4_snr_db)
            for (const auto& d : cfg.demappers)
                for (std::uint64_t seed : cfg.sweep.seeds) keys.push_back({p, s, d, seed});
    return {run_grid(cfg, keys)};
}

void write_rows_csv(const std::string& path, const std::vector<CellResult>& cells) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "snr_db,power_mw,demapper,ber,ber_ci_lo,ber_ci_hi,gmi,n_bits,seed,config_hash\n";
    for (const auto& c : cells) {
        os << fmt_g(c.row.snr_db) << ',' << fmt_g(c.row.power_mw) << ',' << c.row.demapper << ','
           << fmt_g(c.row.ber) << ',' << fmt_g(c.row.ber_ci_lo) << ',' << fmt_g(c.row.ber_ci_hi)
           << ',' << fmt_g(c.row.gmi) << ',' << c.row.n_bits << ',' << c.row.seed << ','
           << c.row.config_hash << '\n';
    }
}

std::vector<std::string> run_fig4(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentConfig local = cfg;
    local.sweep.payload_bits = std::min<std::size_t>(local.sweep.payload_bits, 8192);

    const std::vector<double> snrs{20.0, 25.0, 30.0};
    const std::vector<double> powers{38.5, 44.0, 49.5, 55.0, 60.5};
    std::filesystem::create_directories(local.output_dir);

    struct Job {
        double snr, power;
        std::string path;
        SymbolDump dump;
    };
    std::vector<Job> jobs;
    for (double s : snrs)
        for (double p : powers) {
            char name[96];
            std::snprintf(name, sizeof(name), "fig4_snr%.4g_p%.4g.csv", s, p);
            jobs.push_back({s, p, local.output_dir + "/" + name, {}});
        }

    parallel_for(jobs.size(), local.sweep.workers, [&](std::size_t i) {
        CellKey key{jobs[i].power, jobs[i].snr, "hard", local.sweep.seeds.front()};
        CellProbes probes;
        probes.dump = &jobs[i].dump;
        run_single(local, key, nullptr, &probes);
    });

    std::vector<std::string> written;
    for (auto& j : jobs) {
        std::ofstream os(j.path);
        if (!os) throw std::runtime_error("cannot open " + j.path);
        os << "i,q,level,bits\n";
        for (std::size_t k = 0; k < j.dump.symbols.size(); ++k) {
            os << fmt_g(j.dump.symbols[k].real()) << ',' << fmt_g(j.dump.symbols[k].imag()) << ','
               << j.dump.levels[k] << ',' << int(j.dump.bits[2 * k]) << int(j.dump.bits[2 * k + 1])
               << '\n';
        }
        written.push_back(j.path);
    }
    return written;
}

namespace {

CurveCrossing find_crossing(const std::vector<double>& snr, const std::vector<double>& value,
                            double target) {
    CurveCrossing c;
    for (std::size_t i = 0; i < snr.size(); ++i) {
        if (std::isnan(value[i])) continue;
        if (value[i] >= target) {
            if (i == 0 || std::isnan(value[i - 1])) {
                c.snr_at_target = snr[i];
                c.bracketed = (i != 0);
                return c;
            }
            const double g0 = value[i - 1], g1 = value[i];
            c.snr_at_target = snr[i - 1] + (target - g0) * (snr[i] - snr[i - 1]) / (g1 - g0);
            c.bracketed = true;
            return c;
        }
    }
    return c;  // never reaches the target inside the range
}

}  // namespace

Fig6Output run_fig6(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentConfig local = cfg;
    local.sweep.peak_power_mw = {55.0, 38.5};
    local.demappers = {"linear", "dnn"};

    std::vector<CellKey> keys;
    for (double p : local.sweep.peak_power_mw)
        for (double s : local.sweep.pam4_snr_db)
            for (const auto& d : local.demappers)
                for (std::uint64_t seed : local.sweep.seeds) keys.push_back({p, s, d, seed});

    Fig6Output out;
    out.cells = run_grid(local, keys);

    auto axis = local.sweep.pam4_snr_db;
    std::sort(axis.begin(), axis.end());

    for (const auto& d : local.demappers)
        for (double p : local.sweep.peak_power_mw) {
            const auto ckey = curve_key(d, p);
            std::vector<double> ber(axis.size(), std::numeric_limits<double>::quiet_NaN());
            std::vector<double> gmi(axis.size(), std::numeric_limits<double>::quiet_NaN());
            for (std::size_t i = 0; i < axis.size(); ++i) {
                double bsum = 0, gsum = 0;
                int n = 0;
                for (const auto& c : out.cells) {
                    if (c.failed || c.row.demapper != d || c.row.power_mw != p ||
                        c.row.snr_db != axis[i])
                        continue;
                    bsum += c.row.ber;
                    gsum += c.row.gmi;
                    ++n;
                }
                if (n > 0) {
                    ber[i] = bsum / n;
                    gmi[i] = gsum / n;
                }
            }
            out.ber_curves[ckey] = std::move(ber);
            out.gmi_curves[ckey] = std::move(gmi);
            out.gmi_crossings[ckey] = find_crossing(axis, out.gmi_curves[ckey], 0.8);
        }

    const auto& x_lin55 = out.gmi_crossings[curve_key("linear", 55.0)];
    const auto& x_dnn55 = out.gmi_crossings[curve_key("dnn", 55.0)];
    const auto& x_dnn38 = out.gmi_crossings[curve_key("dnn", 38.5)];
    if (x_lin55.bracketed && x_dnn55.bracketed)
        out.dnn_over_linear_gain_db = x_lin55.snr_at_target - x_dnn55.snr_at_target;
    if (x_dnn55.bracketed && x_dnn38.bracketed)
        out.shaped_over_unshaped_gain_db = x_dnn55.snr_at_target - x_dnn38.snr_at_target;

    // outputs
    std::filesystem::create_directories(local.output_dir);
    write_rows_csv(local.output_dir + "/fig6_rows.csv", out.cells);

    const std::vector<std::string> order{curve_key("linear", 55.0), curve_key("linear", 38.5),
                                         curve_key("dnn", 55.0), curve_key("dnn", 38.5)};
    auto write_curves = [&](const std::string& path,
                            const std::map<std::string, std::vector<double>>& curves) {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open " + path);
        os << "snr_db";
        for (const auto& k : order) os << ',' << k;
        os << '\n';
        for (std::size_t i = 0; i < axis.size(); ++i) {
            os << fmt_g(axis[i]);
            for (const auto& k : order) os << ',' << fmt_g(curves.at(k)[i]);
            os << '\n';
        }
    };
    write_curves(local.output_dir + "/fig6_ber.csv", out.ber_curves);
    write_curves(local.output_dir + "/fig6_gmi.csv", out.gmi_curves);

    json summary;
    summary["config_hash"] = config_hash(local);
    for (const auto& k : order) {
        const auto& c = out.gmi_crossings[k];
        summary["gmi_0p8_crossing_snr_db"][k] =
            c.bracketed ? json(c.snr_at_target) : json(nullptr);
    }
    summary["dnn_over_linear_gain_db_at_55mw"] =
        std::isnan(out.dnn_over_linear_gain_db) ? json(nullptr) : json(out.dnn_over_linear_gain_db);
    summary["shaped_over_unshaped_dnn_gain_db"] = std::isnan(out.shaped_over_unshaped_gain_db)
                                                      ? json(nullptr)
                                                      : json(out.shaped_over_unshaped_gain_db);
    std::ofstream os(local.output_dir + "/fig6_summary.json");
    os << summary.dump(2) << '\n';
    return out;
}

CalibrationReport calibrate(const ExperimentConfig& cfg) {
    cfg.validate();
    CalibrationReport rep;
    const auto cascade = cfg.gateway.cascade();
    for (const auto& f : cascade.fibers) rep.fiber_effective_length_km.push_back(effective_length_km(f));
    rep.cascade_effective_length_km = cascade_effective_length_km(cascade);

    XpmModelConfig calib = cfg.gateway.xpm_config();
    calib.mode = XpmMode::Calibrated;
    XpmModelConfig phys = calib;
    phys.mode = XpmMode::Physical;

    for (double p_mw : cfg.sweep.peak_power_mw) {
        const double p_w = p_mw * 1e-3;
        const double c3 = xpm_phase(p_w, calib, cascade);
        const double f3 = xpm_phase(p_w, phys, cascade);
        rep.per_power.push_back({p_mw, c3, f3, (c3 / 3.0) / M_PI});
    }
    return rep;
}

std::string calibration_text(const CalibrationReport& rep) {
    std::string out;
    char line[160];
    for (std::size_t i = 0; i < rep.fiber_effective_length_km.size(); ++i) {
        std::snprintf(line, sizeof(line), "fiber %zu: L_eff = %.4f km\n", i + 1,
                      rep.fiber_effective_length_km[i]);
        out += line;
    }
    std::snprintf(line, sizeof(line), "cascade: L_eff = %.4f km\n", rep.cascade_effective_length_km);
    out += line;
    out += "power_mw  calibrated_dphi3_rad  physical_dphi3_rad  spacing/pi\n";
    for (const auto& row : rep.per_power) {
        std::snprintf(line, sizeof(line), "%8.4g  %20.6f  %18.6f  %10.4f\n", row[0], row[1], row[2],
                      row[3]);
        out += line;
    }
    return out;
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    const std::string& command, const std::vector<std::string>& outputs,
                    const std::vector<CellResult>& cells) {
    json m;
    m["command"] = command;
    m["config"] = json::parse(config_to_json_text(cfg));
    m["config_hash"] = config_hash(cfg);
    m["outputs"] = outputs;
    json cj = json::array();
    for (const auto& c : cells) {
        json one{{"power_mw", c.row.power_mw},
                 {"snr_db", c.row.snr_db},
                 {"demapper", c.row.demapper},
                 {"seed", c.row.seed},
                 {"foc_residual_offset_hz", c.foc_offset_hz},
                 {"failed", c.failed}};
        if (c.failed) one["failure"] = c.failure;
        cj.push_back(one);
    }
    m["cells"] = cj;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << m.dump(2) << '\n';
}

}  // namespace ogs
