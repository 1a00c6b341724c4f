// ogslink command-line front end: calibration, one-shot conversion,
// DNN training, grid sweeps and the BER/GMI waterfall studies.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ogs/demap.hpp"
#include "ogs/harness.hpp"
#include "ogs/pam4.hpp"

using namespace ogs;

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;  // key=value pairs
    std::vector<std::pair<std::string, std::string*>> flag_values;
    bool print_config = false;
};

// One flag per config leaf, named after its dotted JSON path.
void add_config_flags(CLI::App* app, CommonOpts& opts) {
    app->add_option("--config", opts.config_path, "JSON config file (defaults patched by present keys)");
    app->add_option("--set", opts.sets, "override any key, e.g. --set sweep.payload_bits=65536")
        ->take_all();
    app->add_flag("--print-config", opts.print_config, "print the resolved config and exit");

    const nlohmann::json defaults = nlohmann::json::parse(config_to_json_text(ExperimentConfig{}));
    std::function<void(const nlohmann::json&, const std::string&)> walk =
        [&](const nlohmann::json& node, const std::string& prefix) {
            for (auto it = node.begin(); it != node.end(); ++it) {
                const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
                if (it->is_object()) {
                    walk(*it, path);
                } else if (it->is_array() && !it->empty() && it->front().is_object()) {
                    continue;  // fibers: reachable via --set gateway.fibers.0.length_km=...
                } else {
                    auto* storage = new std::string();  // lives for the process
                    opts.flag_values.emplace_back(path, storage);
                    app->add_option("--" + path, *storage,
                                    "override config key " + path);
                }
            }
        };
    walk(defaults, "");
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
    ExperimentConfig cfg;
    if (!opts.config_path.empty()) {
        std::ifstream is(opts.config_path);
        if (!is) throw std::runtime_error("cannot open config file " + opts.config_path);
        std::stringstream ss;
        ss << is.rdbuf();
        cfg = config_from_json_text(ss.str());
    }
    for (const auto& [key, value] : opts.flag_values)
        if (!value->empty()) apply_override(cfg, key, *value);
    for (const auto& kv : opts.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::runtime_error("--set expects key=value, got: " + kv);
        apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

int do_selftest(const ExperimentConfig& base) {
    int failures = 0;
    auto check = [&](bool ok, const std::string& what) {
        std::printf("%s  %s\n", ok ? "ok " : "FAIL", what.c_str());
        if (!ok) ++failures;
    };

    ExperimentConfig cfg = base;
    cfg.sweep.payload_bits = 4096;
    cfg.sweep.pam4_snr_db = {25.0};
    cfg.sweep.peak_power_mw = {55.0};
    cfg.sweep.seeds = {7};
    cfg.demappers = {"hard"};

    const auto rep = calibrate(cfg);
    check(std::abs(rep.per_power[0][1] - 1.5 * M_PI) < 1e-12, "calibrated phase at 55 mW is 3pi/2");

    CellKey key{55.0, 25.0, "hard", 7};
    SymbolDump dump;
    CellProbes probes;
    probes.dump = &dump;
    const auto a = run_single(cfg, key, nullptr, &probes);
    const auto b = run_single(cfg, key);
    check(!a.failed && a.row.ber < 0.05, "hard-decision cell runs with sane BER");
    check(a.row.ber == b.row.ber && a.row.gmi == b.row.gmi, "repeated cell is bit-identical");

    bool unit = true;
    for (const auto& s : dump.symbols) unit = unit && std::abs(std::abs(s) - 1.0) < 1e-9;
    check(unit, "gateway output stays on the unit circle through the clean DSP chain");

    std::printf(failures ? "selftest: %d failure(s)\n" : "selftest: all good\n", failures);
    return failures ? 1 : 0;
}

int do_convert(const ExperimentConfig& cfg, double power_mw, double snr_db, std::size_t symbols,
               std::uint64_t seed, const std::string& out_path) {
    const auto labeling = cfg.bit_labeling();
    Pam4LevelMap map;
    map.peak_power_w = power_mw * 1e-3;
    map.labeling = labeling;

    const auto bits = prbs_generate(cfg.prbs_order, 2 * symbols, RngSeed{seed});
    const auto levels = map_bits_to_levels(bits, map);

    TxConfig txc;
    txc.symbol_rate = cfg.tx.symbol_rate_hz;
    txc.samples_per_symbol = cfg.tx.samples_per_symbol;
    txc.pam4_snr_db = snr_db;
    txc.seed = derive_seed(RngSeed{seed}, "tx.awgn");
    const auto pam4 = synthesize_pam4(levels, txc, map);
    const auto probe = convert_pam4_to_qpsk(pam4, cfg.gateway.xpm_config(), cfg.gateway.cascade());

    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot open " + out_path);
    os << "sample,pam4_i,pam4_q,probe_i,probe_q,level\n";
    char line[200];
    for (std::size_t n = 0; n < probe.samples.size(); ++n) {
        const std::size_t sym = n / static_cast<std::size_t>(txc.samples_per_symbol);
        std::snprintf(line, sizeof(line), "%zu,%.10g,%.10g,%.10g,%.10g,%d\n", n,
                      pam4.samples[n].real(), pam4.samples[n].imag(), probe.samples[n].real(),
                      probe.samples[n].imag(), levels[sym]);
        os << line;
    }
    std::printf("wrote %s (%zu samples)\n", out_path.c_str(), probe.samples.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PAM4-to-QPSK optical format-conversion link simulator"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd;
        CommonOpts opts;
    };
    std::map<std::string, Sub> subs;
    for (const char* name : {"calibrate", "convert", "train-dnn", "sweep", "fig4", "fig6", "selftest"}) {
        Sub s;
        s.cmd = app.add_subcommand(name, "");
        subs.emplace(name, std::move(s));
    }
    subs.at("calibrate").cmd->description("report phase calibration and effective lengths");
    subs.at("convert").cmd->description("one-shot PAM4->QPSK waveform dump");
    subs.at("train-dnn").cmd->description("train one soft demapper and save the model");
    subs.at("sweep").cmd->description("run the (SNR x power x demapper x seed) grid");
    subs.at("fig4").cmd->description("constellation dumps over the SNR x power grid");
    subs.at("fig6").cmd->description("BER/GMI waterfalls for linear vs DNN at 55 and 38.5 mW");
    subs.at("selftest").cmd->description("quick end-to-end sanity run");
    for (auto& [name, sub] : subs) add_config_flags(sub.cmd, sub.opts);

    // convert / train-dnn extras
    double cv_power_mw = 55.0, cv_snr_db = std::numeric_limits<double>::infinity();
    std::size_t cv_symbols = 4096;
    std::uint64_t cv_seed = 1;
    std::string cv_out = "convert.csv";
    auto* convert_cmd = subs.at("convert").cmd;
    convert_cmd->add_option("--power-mw", cv_power_mw, "HNLF input peak power");
    convert_cmd->add_option("--snr-db", cv_snr_db, "PAM4 SNR (default: noiseless)");
    convert_cmd->add_option("--symbols", cv_symbols, "number of PAM4 symbols");
    convert_cmd->add_option("--seed", cv_seed, "PRBS/noise seed");
    convert_cmd->add_option("--out", cv_out, "output CSV path");

    double td_power_mw = 55.0, td_snr_db = 25.0;
    std::string td_out = "model.bin";
    auto* train_cmd = subs.at("train-dnn").cmd;
    train_cmd->add_option("--power-mw", td_power_mw, "operating HNLF input power");
    train_cmd->add_option("--snr-db", td_snr_db, "operating PAM4 SNR");
    train_cmd->add_option("--out", td_out, "model file path");

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string name = app.get_subcommands().front()->get_name();
        auto& sub = subs.at(name);
        ExperimentConfig cfg = resolve_config(sub.opts);
        if (sub.opts.print_config) {
            std::cout << config_to_json_text(cfg);
            return 0;
        }
        std::filesystem::create_directories(cfg.output_dir);

        if (name == "calibrate") {
            const auto rep = calibrate(cfg);
            std::cout << calibration_text(rep);
            nlohmann::json j;
            j["fiber_effective_length_km"] = rep.fiber_effective_length_km;
            j["cascade_effective_length_km"] = rep.cascade_effective_length_km;
            for (const auto& row : rep.per_power)
                j["per_power"].push_back({{"power_mw", row[0]},
                                          {"calibrated_dphi3_rad", row[1]},
                                          {"physical_dphi3_rad", row[2]},
                                          {"spacing_over_pi", row[3]}});
            const auto path = cfg.output_dir + "/calibration.json";
            std::ofstream os(path);
            os << j.dump(2) << '\n';
            write_manifest(cfg.output_dir + "/manifest_calibrate.json", cfg, "calibrate", {path}, {});
            return 0;
        }
        if (name == "convert")
            return do_convert(cfg, cv_power_mw, cv_snr_db, cv_symbols, cv_seed,
                              cfg.output_dir + "/" + cv_out);
        if (name == "train-dnn") {
            ExperimentConfig one = cfg;
            one.sweep.payload_bits = std::min<std::size_t>(one.sweep.payload_bits, 65536);
            CellKey key{td_power_mw, td_snr_db, "dnn", cfg.sweep.seeds.front()};
            MlpModel model;
            TrainResult curve;
            CellProbes probes;
            probes.trained_model = &model;
            probes.train_curve = &curve;
            const auto cell = run_single(one, key, nullptr, &probes);
            if (cell.failed) {
                std::cerr << "training failed: " << cell.failure << "\n";
                return 1;
            }
            const auto path = cfg.output_dir + "/" + td_out;
            mlp_save(model, path);
            std::printf("epochs=%zu first_train_loss=%.6f last_train_loss=%.6f last_test_loss=%.6f\n",
                        curve.train_loss.size(), curve.train_loss.front(), curve.train_loss.back(),
                        curve.test_loss.empty() ? 0.0 : curve.test_loss.back());
            std::printf("holdout check: ber=%.6g gmi=%.6f -> %s\n", cell.row.ber, cell.row.gmi,
                        path.c_str());
            write_manifest(cfg.output_dir + "/manifest_train_dnn.json", cfg, "train-dnn", {path},
                           {cell});
            return 0;
        }
        if (name == "sweep") {
            const auto grid = run_sweep(cfg);
            const auto path = cfg.output_dir + "/sweep_rows.csv";
            write_rows_csv(path, grid.cells);
            write_manifest(cfg.output_dir + "/manifest_sweep.json", cfg, "sweep", {path}, grid.cells);
            std::printf("wrote %s (%zu rows)\n", path.c_str(), grid.cells.size());
            return 0;
        }
        if (name == "fig4") {
            auto files = run_fig4(cfg);
            write_manifest(cfg.output_dir + "/manifest_fig4.json", cfg, "fig4", files, {});
            std::printf("wrote %zu constellation dumps under %s\n", files.size(), cfg.output_dir.c_str());
            return 0;
        }
        if (name == "fig6") {
            const auto out = run_fig6(cfg);
            std::vector<std::string> files{cfg.output_dir + "/fig6_rows.csv",
                                           cfg.output_dir + "/fig6_ber.csv",
                                           cfg.output_dir + "/fig6_gmi.csv",
                                           cfg.output_dir + "/fig6_summary.json"};
            write_manifest(cfg.output_dir + "/manifest_fig6.json", cfg, "fig6", files, out.cells);
            for (const auto& [k, c] : out.gmi_crossings)
                std::printf("GMI 0.8 crossing %-12s : %s dB\n", k.c_str(),
                            c.bracketed ? std::to_string(c.snr_at_target).c_str() : "outside range");
            std::printf("DNN over linear @55mW  : %.3f dB\n", out.dnn_over_linear_gain_db);
            std::printf("DNN 38.5 over 55 mW    : %.3f dB\n", out.shaped_over_unshaped_gain_db);
            return 0;
        }
        if (name == "selftest") return do_selftest(cfg);
        std::cerr << "unknown subcommand\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
