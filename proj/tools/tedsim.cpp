// tedsim — command-line front end: ingest parameter/protocol/sweep files,
// dispatch the simulations, and emit CSV results with a JSON run manifest.
//
// Exit codes: 0 success, 1 invalid config, 2 simulation failure, 3 I/O failure.

#include "ted/circuit.hpp"
#include "ted/io.hpp"
#include "ted/model.hpp"
#include "ted/protocols.hpp"
#include "ted/slh.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <sstream>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace ted;

namespace {

struct CommonArgs {
    std::string params_path;
    std::string protocol_path;
    std::string sweep_path;
    std::string out_dir = ".";
    std::string trunc = "d=3,c=3,w=4";
    double tol = 1e-8;
    int jobs = 1;
    bool quiet = false;
};

std::map<std::string, int> parse_trunc(const std::string& spec) {
    std::map<std::string, int> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("bad --trunc entry '" + item + "', want label=N");
        }
        out[item.substr(0, eq)] = std::stoi(item.substr(eq + 1));
    }
    return out;
}

int trunc_of(const std::map<std::string, int>& t, const std::string& label, int fallback) {
    const auto it = t.find(label);
    return it == t.end() ? fallback : it->second;
}

std::string load_input(const std::string& path) {
    if (path.empty()) throw std::invalid_argument("missing required input file");
    if (!fs::exists(path)) {
        throw std::invalid_argument("input file does not exist: " + path);
    }
    return io::read_file(path);
}

void progress_line(bool quiet, std::size_t i) {
    if (!quiet) std::cerr << "point " << i << " done\n";
}

class Runner {
public:
    Runner(std::string command, CommonArgs args) : command_(std::move(command)), args_(std::move(args)) {
        start_ = std::chrono::steady_clock::now();
    }

    int run() {
        try {
            fs::create_directories(args_.out_dir);
        } catch (const std::exception& e) {
            std::cerr << "error: cannot create output directory: " << e.what() << "\n";
            return 3;
        }
        try {
            dispatch();
        } catch (const io::IoError& e) {
            std::cerr << "I/O error: " << e.what() << "\n";
            return 3;
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        } catch (const std::exception& e) {
            std::cerr << "simulation error: " << e.what() << "\n";
            try {
                write_manifest();  // keep the partial record around for debugging
            } catch (...) {
            }
            return 2;
        }
        try {
            write_manifest();
        } catch (const std::exception& e) {
            std::cerr << "error writing outputs: " << e.what() << "\n";
            return 3;
        }
        return point_errors_.empty() ? 0 : 2;
    }

private:
    void dispatch();
    void write_manifest() {
        io::RunManifest m;
        m.command = command_;
        m.params_json = params_json_;
        m.protocol_json = protocol_json_;
        m.sweep_json = sweep_json_;
        m.truncations = args_.trunc;
        m.tolerance = args_.tol;
        m.jobs = args_.jobs;
        m.point_errors = point_errors_;
        m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
                            .count();
        io::write_file(fs::path(args_.out_dir) / "run-manifest.json", io::manifest_to_json(m));
    }

    void collect_errors(const ResultTable& table) {
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            if (!table.rows[i].ok) {
                point_errors_.push_back("point " + std::to_string(i) + ": " +
                                        table.rows[i].error);
            }
        }
    }

    std::string command_;
    CommonArgs args_;
    std::string params_json_, protocol_json_, sweep_json_;
    std::vector<std::string> point_errors_;
    std::chrono::steady_clock::time_point start_;
};

void Runner::dispatch() {
    const auto trunc = parse_trunc(args_.trunc);
    const fs::path out(args_.out_dir);

    if (command_ == "quantize") {
        params_json_ = load_input(args_.params_path);
        const CircuitParams p = io::circuit_params_from_json(params_json_);
        // flux point from optional fields in the same file; sweeps go
        // through `dispersion`
        const FluxPoint flux = io::flux_from_json(params_json_);
        const QuantizedTed q = quantize(p, flux);
        io::write_file(out / "quantized.json", io::quantized_to_json(q, p, flux));
        return;
    }
    if (command_ == "dispersion") {
        params_json_ = load_input(args_.params_path);
        const CircuitParams p = io::circuit_params_from_json(params_json_);
        std::vector<double> grid;
        const int n = 201;
        for (int i = 0; i < n; ++i) grid.push_back(2.0 * M_PI * i / (n - 1));
        const auto rows = flux_dispersion(p, grid);
        io::write_file(out / "dispersion.csv", io::dispersion_to_csv(rows));
        for (const auto& r : rows) {
            if (!r.valid) point_errors_.push_back("phi=" + std::to_string(r.phi_bar) + ": " + r.error);
        }
        return;
    }
    if (command_ == "scatter") {
        params_json_ = load_input(args_.params_path);
        sweep_json_ = load_input(args_.sweep_path);
        const TedParams ted = io::ted_params_from_json(params_json_);
        const SweepSpec sweep = io::sweep_from_json(sweep_json_);
        if (sweep.axes.size() != 2) {
            throw std::invalid_argument("scatter needs two sweep axes (n_bar, detuning)");
        }
        ScatterOptions opts;
        opts.dim_w = trunc_of(trunc, "w", 4);
        ResultTable table = scattering_sweep(ted, sweep.axes[0].values, sweep.axes[1].values,
                                             opts, args_.jobs);
        io::write_file(out / "scatter.csv", io::result_table_to_csv(table));
        collect_errors(table);
        return;
    }
    if (command_ == "emit") {
        params_json_ = load_input(args_.params_path);
        protocol_json_ = load_input(args_.protocol_path);
        const TedParams ted = io::ted_params_from_json(params_json_);
        const PitchProtocol prot = io::protocol_from_json(protocol_json_, false);
        EffectiveTed eff = make_detection_effective(ted);
        eff.delta = eff.delta_p = 0.0;  // emission carrier is the reset transition
        Vector init(2);
        init << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        const DriveEnvelope env = DriveEnvelope::cosine_squared(
            prot.g_ps_peak, prot.emission_mid, prot.emission_T);
        const EmissionResult res = simulate_emission(eff, env, init, prot.window,
                                                     trunc_of(trunc, "d", 2),
                                                     trunc_of(trunc, "w", 2), args_.tol);
        io::write_file(out / "emission.csv", io::trajectory_to_csv(res.traj));
        ResultTable summary;
        summary.columns = {"residual_d", "leakage_w", "p_emitted", "clipped_fraction"};
        ResultRow row;
        row.values = {res.residual_d, res.leakage_w, res.p_emitted,
                      emission_clipping_estimate(res, ted.gamma)};
        summary.rows.push_back(row);
        io::write_file(out / "emission-summary.csv", io::result_table_to_csv(summary));
        // magnitude spectrum of the output record
        const SpectralRecord spec =
            spectral_record(res.traj.times, res.traj.records.at("a_out"));
        std::ostringstream sp;
        sp << "freq_MHz,magnitude\n";
        for (std::size_t k = 0; k < spec.freq_hz.size(); ++k) {
            sp << io::format_double(spec.freq_hz[k] / 1e6) << ","
               << io::format_double(spec.magnitude[k]) << "\n";
        }
        io::write_file(out / "emission-spectrum.csv", sp.str());
        return;
    }
    if (command_ == "detect") {
        params_json_ = load_input(args_.params_path);
        protocol_json_ = load_input(args_.protocol_path);
        const TedParams ted = io::ted_params_from_json(params_json_);
        const PitchProtocol prot = io::protocol_from_json(protocol_json_);
        const EffectiveTed eff = make_detection_effective(ted);
        SweepSpec sweep;
        if (!args_.sweep_path.empty()) {
            sweep_json_ = load_input(args_.sweep_path);
            sweep = io::sweep_from_json(sweep_json_);
        }
        std::vector<std::string> names;
        for (const auto& a : sweep.axes) names.push_back(a.name);
        ResultTable table = run_sweep(
            sweep, args_.jobs,
            [&](std::size_t i) {
                auto pt = sweep.point(i);
                double n_bar = 0.0, window = prot.window, g_pm = prot.g_pm;
                for (std::size_t k = 0; k < sweep.axes.size(); ++k) {
                    if (sweep.axes[k].name == "n_bar") n_bar = pt[k];
                    else if (sweep.axes[k].name == "window") window = pt[k];
                    else if (sweep.axes[k].name == "g_pm") g_pm = pt[k];
                    else throw std::invalid_argument("detect: unknown axis " + sweep.axes[k].name);
                }
                const DetectionResult r = simulate_detection(
                    eff, n_bar > 0 ? DetectionInput::coherent(n_bar) : DetectionInput::none(),
                    window, g_pm, trunc_of(trunc, "d", 2), trunc_of(trunc, "w", 3), args_.tol,
                    prot.t1_d > 0 ? std::optional<double>(prot.t1_d) : std::nullopt);
                ResultRow row;
                row.values = {r.p_detect, r.n_d_end, r.n_d_reference};
                return row;
            },
            names, {"p_detect", "n_d_end", "n_d_reference"},
            [&](std::size_t i) { progress_line(args_.quiet, i); });
        io::write_file(out / "detect.csv", io::result_table_to_csv(table));
        collect_errors(table);
        return;
    }
    if (command_ == "pitch-detect") {
        params_json_ = load_input(args_.params_path);
        protocol_json_ = load_input(args_.protocol_path);
        const io::NetworkFile net = io::network_from_json(params_json_);
        PitchProtocol prot = io::protocol_from_json(protocol_json_);
        prot.rtol = args_.tol;
        SweepSpec sweep;
        if (!args_.sweep_path.empty()) {
            sweep_json_ = load_input(args_.sweep_path);
            sweep = io::sweep_from_json(sweep_json_);
        }
        const ProductSpace space =
            network_space(trunc_of(trunc, "d_s", 2), trunc_of(trunc, "w_s", 2),
                          trunc_of(trunc, "d_m", 2), trunc_of(trunc, "w_m", 3));
        ResultTable table = pitch_detect(net.spec, prot, sweep, space, args_.jobs,
                                         [&](std::size_t i) { progress_line(args_.quiet, i); });
        io::write_file(out / "pitch-detect.csv", io::result_table_to_csv(table));
        collect_errors(table);
        // trajectory of the nominal (no-excursion) point for plotting
        const PitchPointResult nominal = run_pitch_point(net.spec, prot, space, true);
        io::write_file(out / "pitch-detect-trajectory.csv",
                       io::trajectory_to_csv(nominal.traj));
        return;
    }
    if (command_ == "fock-check") {
        params_json_ = load_input(args_.params_path);
        protocol_json_ = load_input(args_.protocol_path);
        const io::NetworkFile net = io::network_from_json(params_json_);
        const PitchProtocol prot = io::protocol_from_json(protocol_json_);
        const ProductSpace space =
            network_space(trunc_of(trunc, "d_s", 2), trunc_of(trunc, "w_s", 2),
                          trunc_of(trunc, "d_m", 2), trunc_of(trunc, "w_m", 3));
        const auto rows = fock_check_table(net.spec, prot, space, args_.jobs);
        ResultTable table;
        table.axis_names = {"n_ds", "n_dm"};
        table.columns = {"a_power_integral", "b_power_integral"};
        for (const auto& r : rows) {
            ResultRow row;
            row.axis_values = {static_cast<double>(r.n_ds), static_cast<double>(r.n_dm)};
            row.values = {r.a_power_integral, r.b_power_integral};
            table.rows.push_back(row);
        }
        io::write_file(out / "fock-check.csv", io::result_table_to_csv(table));
        return;
    }
    throw std::invalid_argument("unknown command: " + command_);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tedsim — flux-driven transmon emitter/detector simulator"};
    app.require_subcommand(1);

    CommonArgs args;
    for (const char* name : {"quantize", "dispersion", "scatter", "emit", "detect",
                             "pitch-detect", "fock-check", "rerun"}) {
        CLI::App* sub = app.add_subcommand(name);
        if (std::string(name) == "rerun") {
            sub->add_option("--manifest", args.params_path, "manifest of the run to reproduce");
        } else {
            sub->add_option("--params", args.params_path,
                            "parameter JSON (circuit, TED, or network)");
            sub->add_option("--protocol", args.protocol_path, "protocol JSON");
            sub->add_option("--sweep", args.sweep_path, "sweep JSON");
        }
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--trunc", args.trunc, "truncations, e.g. d=3,c=3,w=4");
        sub->add_option("--tol", args.tol, "integrator relative tolerance");
        sub->add_option("--jobs", args.jobs, "sweep worker threads");
        sub->add_flag("--quiet", args.quiet, "suppress progress lines");
    }

    CLI11_PARSE(app, argc, argv);
    std::string command = app.get_subcommands().front()->get_name();

    if (command == "rerun") {
        // reconstruct a run from its manifest
        try {
            const io::RunManifest m = io::manifest_from_json(io::read_file(args.params_path));
            const fs::path tmp = fs::path(args.out_dir) / "rerun-inputs";
            fs::create_directories(tmp);
            CommonArgs inner = args;
            inner.tol = m.tolerance;
            inner.jobs = m.jobs;
            if (!m.truncations.empty()) inner.trunc = m.truncations;
            inner.params_path.clear();
            if (!m.params_json.empty()) {
                io::write_file(tmp / "params.json", m.params_json);
                inner.params_path = (tmp / "params.json").string();
            }
            inner.protocol_path.clear();
            if (!m.protocol_json.empty()) {
                io::write_file(tmp / "protocol.json", m.protocol_json);
                inner.protocol_path = (tmp / "protocol.json").string();
            }
            inner.sweep_path.clear();
            if (!m.sweep_json.empty()) {
                io::write_file(tmp / "sweep.json", m.sweep_json);
                inner.sweep_path = (tmp / "sweep.json").string();
            }
            return Runner(m.command, inner).run();
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    return Runner(command, args).run();
}
