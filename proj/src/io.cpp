#include "ted/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ted::io {

using nlohmann::json;

namespace {

constexpr double TWO_PI = 2.0 * M_PI;
constexpr double GHZ = 1e9 * TWO_PI;  // GHz (ordinary frequency) -> rad/s

double require(const json& j, const std::string& key) {
    if (!j.contains(key)) throw std::invalid_argument("missing field '" + key + "'");
    if (!j.at(key).is_number()) throw std::invalid_argument("field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

double optional_num(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<double>();
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("JSON parse error: ") + e.what());
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

CircuitParams circuit_params_from_json(const std::string& text) {
    const json j = parse(text);
    CircuitParams p;
    p.E_Jd = require(j, "E_Jd_GHz") * 1e9 * constants::h_planck;
    p.E_Jc = require(j, "E_Jc_GHz") * 1e9 * constants::h_planck;
    p.E_Jw = require(j, "E_Jw_GHz") * 1e9 * constants::h_planck;
    p.E_Jcw = require(j, "E_Jcw_GHz") * 1e9 * constants::h_planck;
    p.C_d = require(j, "C_d_fF") * 1e-15;
    p.C_c = require(j, "C_c_fF") * 1e-15;
    p.C_w = require(j, "C_w_fF") * 1e-15;
    p.C_dc = require(j, "C_dc_fF") * 1e-15;
    p.C_cw = require(j, "C_cw_fF") * 1e-15;
    p.C_v = require(j, "C_v_fF") * 1e-15;
    p.M_d = optional_num(j, "M_d_pH", 0.0) * 1e-12;
    p.M_p = optional_num(j, "M_p_pH", 0.0) * 1e-12;
    p.R_load = optional_num(j, "R_load_Ohm", 50.0);
    p.validate();
    return p;
}

std::string circuit_params_to_json(const CircuitParams& p) {
    json j;
    j["E_Jd_GHz"] = p.E_Jd / (1e9 * constants::h_planck);
    j["E_Jc_GHz"] = p.E_Jc / (1e9 * constants::h_planck);
    j["E_Jw_GHz"] = p.E_Jw / (1e9 * constants::h_planck);
    j["E_Jcw_GHz"] = p.E_Jcw / (1e9 * constants::h_planck);
    j["C_d_fF"] = p.C_d * 1e15;
    j["C_c_fF"] = p.C_c * 1e15;
    j["C_w_fF"] = p.C_w * 1e15;
    j["C_dc_fF"] = p.C_dc * 1e15;
    j["C_cw_fF"] = p.C_cw * 1e15;
    j["C_v_fF"] = p.C_v * 1e15;
    j["M_d_pH"] = p.M_d * 1e12;
    j["M_p_pH"] = p.M_p * 1e12;
    j["R_load_Ohm"] = p.R_load;
    return j.dump(2);
}

TedParams ted_params_from_json(const std::string& text) {
    const json j = parse(text);
    TedParams t;
    t.omega_d = require(j, "omega_d_GHz") * GHZ;
    t.omega_c = require(j, "omega_c_GHz") * GHZ;
    t.omega_w = require(j, "omega_w_GHz") * GHZ;
    t.nu_d = require(j, "nu_d_GHz") * GHZ;
    t.nu_c = optional_num(j, "nu_c_GHz", 0.0) * GHZ;
    t.nu_w = require(j, "nu_w_GHz") * GHZ;
    t.g_C = require(j, "g_C_GHz") * GHZ;
    t.gamma = require(j, "gamma_per_s");
    t.n_th = optional_num(j, "n_th", 0.0);
    t.validate();
    return t;
}

std::string quantized_to_json(const QuantizedTed& q, const CircuitParams& p,
                              const FluxPoint& flux) {
    json j;
    j["omega_d_GHz"] = q.omega_d / GHZ;
    j["omega_c_GHz"] = q.omega_c / GHZ;
    j["omega_w_GHz"] = q.omega_w / GHZ;
    j["nu_d_GHz"] = q.nu_d / GHZ;
    j["nu_c_GHz"] = q.nu_c / GHZ;
    j["nu_w_GHz"] = q.nu_w / GHZ;
    j["Z_d_Ohm"] = q.Z_d;
    j["Z_c_Ohm"] = q.Z_c;
    j["Z_w_Ohm"] = q.Z_w;
    j["g_C_GHz"] = q.g_C / GHZ;
    j["g_L0_GHz"] = q.g_L0 / GHZ;
    j["g_L_bar_GHz"] = q.g_L_bar / GHZ;
    j["A_amp_GHz"] = q.A_amp / GHZ;
    j["phi_bar_rad"] = flux.phi_bar;
    j["A_phi"] = flux.amp;
    j["omega_p_GHz"] = flux.omega_p / GHZ;
    j["warnings"] = q.warnings;
    j["inputs"] = json::parse(circuit_params_to_json(p));
    return j.dump(2);
}

NetworkFile network_from_json(const std::string& text) {
    const json j = parse(text);
    NetworkFile f;
    f.spec.eta = optional_num(j, "eta", 0.0);
    f.spec.phi_s = optional_num(j, "phi_s_rad", 0.0);
    f.spec.phi_m = optional_num(j, "phi_m_rad", 0.0);
    if (!j.contains("sted") || !j.contains("mted")) {
        throw std::invalid_argument("network file needs 'sted' and 'mted' parameter blocks");
    }
    f.sted_params = ted_params_from_json(j.at("sted").dump());
    f.mted_params = ted_params_from_json(j.at("mted").dump());

    // sTED in its own emission frame, mTED on the detection carrier
    f.spec.sted = make_detection_effective(f.sted_params);
    f.spec.sted.delta = 0.0;
    f.spec.sted.delta_p = 0.0;
    // common rotating frame at the sTED emission frequency
    f.spec.mted = make_detection_effective(
        f.mted_params, f.mted_params.omega_w - f.sted_params.omega_w);
    f.spec.validate();
    return f;
}

FluxPoint flux_from_json(const std::string& text) {
    const json j = parse(text);
    FluxPoint flux;
    flux.phi_bar = optional_num(j, "phi_bar_rad", 0.0);
    flux.amp = optional_num(j, "A_phi", 0.0);
    flux.omega_p = optional_num(j, "omega_p_GHz", 0.0) * GHZ;
    flux.validate();
    return flux;
}

PitchProtocol protocol_from_json(const std::string& text, bool need_window) {
    const json j = parse(text);
    PitchProtocol p;
    p.t1_d = optional_num(j, "T1_d_us", 0.0) * 1e-6;
    p.t2_d = optional_num(j, "T2_d_us", 0.0) * 1e-6;
    p.rtol = optional_num(j, "rtol", 1e-8);

    if (!j.contains("segments") || !j.at("segments").is_array()) {
        throw std::invalid_argument("protocol file needs a 'segments' array");
    }
    bool saw_window = false, saw_emission = false;
    for (const auto& seg : j.at("segments")) {
        const std::string kind = seg.at("kind").get<std::string>();
        const std::string target =
            seg.contains("target") ? seg.at("target").get<std::string>() : "";
        if (kind == "reset") {
            if (target == "sted") p.initial_excited_s = 0.0;
            if (target == "mted") p.initial_excited_m = 0.0;
        } else if (kind == "pi-pulse") {
            if (target == "sted") p.initial_excited_s = 1.0;
            if (target == "mted") p.initial_excited_m = 1.0;
        } else if (kind == "half-pi-pulse") {
            if (target == "sted") p.superposition_s = true;
            if (target == "mted") p.superposition_m = true;
        } else if (kind == "emission") {
            if (saw_emission) throw std::invalid_argument("protocol: one emission segment only");
            saw_emission = true;
            p.emission_T = require(seg, "duration_us") * 1e-6;
            p.emission_mid = require(seg, "mid_us") * 1e-6;
            p.g_ps_peak = require(seg, "g_p_peak_per_s");
        } else if (kind == "detection-window") {
            if (saw_window) throw std::invalid_argument("protocol: one detection window only");
            saw_window = true;
            p.window = require(seg, "duration_us") * 1e-6;
            p.g_pm = require(seg, "g_p_per_s");
        } else if (kind == "readout") {
            p.readout = require(seg, "duration_us") * 1e-6;
        } else if (kind == "idle") {
            p.readout += require(seg, "duration_us") * 1e-6;
        } else {
            throw std::invalid_argument("protocol: unknown segment kind '" + kind + "'");
        }
    }
    if (!saw_window) {
        if (need_window) {
            throw std::invalid_argument("protocol: a detection-window segment is required");
        }
        if (!saw_emission) {
            throw std::invalid_argument("protocol: need an emission or detection-window segment");
        }
        p.window = p.emission_mid + p.emission_T / 2 + p.readout;
        p.readout = 0.0;
    }
    p.validate();
    return p;
}

SweepSpec sweep_from_json(const std::string& text) {
    const json j = parse(text);
    SweepSpec sweep;
    auto parse_axis = [&](const json& a) {
        SweepAxis axis;
        const std::string name = a.at("name").get<std::string>();
        std::vector<double> values;
        if (a.contains("values")) {
            values = a.at("values").get<std::vector<double>>();
        } else {
            // {min, max, count} grids, linear or log spacing
            const double lo = require(a, "min");
            const double hi = require(a, "max");
            const int count = static_cast<int>(require(a, "count"));
            if (count < 1) throw std::invalid_argument("sweep axis: count must be >= 1");
            const bool log = a.contains("spacing") && a.at("spacing") == "log";
            for (int i = 0; i < count; ++i) {
                const double f = (count == 1) ? 0.0 : static_cast<double>(i) / (count - 1);
                values.push_back(log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
            }
        }
        // unit-suffixed names convert to SI here
        if (name.ends_with("_MHz")) {
            axis.name = name.substr(0, name.size() - 4);
            for (auto& v : values) v *= 1e6 * TWO_PI;
        } else if (name.ends_with("_GHz")) {
            axis.name = name.substr(0, name.size() - 4);
            for (auto& v : values) v *= GHZ;
        } else if (name.ends_with("_us")) {
            axis.name = name.substr(0, name.size() - 3);
            for (auto& v : values) v *= 1e-6;
        } else if (name.ends_with("_per_s")) {
            axis.name = name.substr(0, name.size() - 6);
        } else {
            axis.name = name;  // dimensionless: n_bar, eta, ...
        }
        axis.values = std::move(values);
        return axis;
    };
    if (j.contains("axis1")) sweep.axes.push_back(parse_axis(j.at("axis1")));
    if (j.contains("axis2")) sweep.axes.push_back(parse_axis(j.at("axis2")));
    sweep.validate();
    return sweep;
}

std::string result_table_to_csv(const ResultTable& table) {
    std::ostringstream out;
    for (std::size_t k = 0; k < table.axis_names.size(); ++k) {
        out << table.axis_names[k] << ",";
    }
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
        out << table.columns[k] << (k + 1 < table.columns.size() ? "," : "");
    }
    out << ",status\n";
    for (const auto& row : table.rows) {
        for (const double v : row.axis_values) out << format_double(v) << ",";
        for (std::size_t k = 0; k < row.values.size(); ++k) {
            out << format_double(row.values[k]) << (k + 1 < row.values.size() ? "," : "");
        }
        out << "," << (row.ok ? "ok" : "failed") << "\n";
    }
    return out.str();
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t_s";
    for (const auto& [name, rec] : traj.records) {
        out << ",re_" << name << ",im_" << name;
    }
    out << "\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out << format_double(traj.times[i]);
        for (const auto& [name, rec] : traj.records) {
            out << "," << format_double(rec[i].real()) << "," << format_double(rec[i].imag());
        }
        out << "\n";
    }
    return out.str();
}

std::string dispersion_to_csv(const std::vector<DispersionRow>& rows) {
    std::ostringstream out;
    out << "phi_bar,omega_d_GHz,omega_c_GHz,omega_w_GHz\n";
    for (const auto& r : rows) {
        out << format_double(r.phi_bar) << "," << format_double(r.omega_d / GHZ) << ","
            << format_double(r.omega_c / GHZ) << "," << format_double(r.omega_w / GHZ) << "\n";
    }
    return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string manifest_to_json(const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["version"] = m.version;
    j["tolerance"] = m.tolerance;
    j["jobs"] = m.jobs;
    j["truncations"] = m.truncations;
    j["wall_time_s"] = m.wall_time_s;
    j["params"] = m.params_json.empty() ? json() : json::parse(m.params_json);
    j["protocol"] = m.protocol_json.empty() ? json() : json::parse(m.protocol_json);
    j["sweep"] = m.sweep_json.empty() ? json() : json::parse(m.sweep_json);
    j["point_errors"] = m.point_errors;
    return j.dump(2);
}

RunManifest manifest_from_json(const std::string& text) {
    const json j = parse(text);
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.version = j.value("version", std::string());
    m.tolerance = j.value("tolerance", 1e-8);
    m.jobs = j.value("jobs", 1);
    m.truncations = j.value("truncations", std::string());
    m.wall_time_s = j.value("wall_time_s", 0.0);
    if (!j.at("params").is_null()) m.params_json = j.at("params").dump(2);
    if (!j.at("protocol").is_null()) m.protocol_json = j.at("protocol").dump(2);
    if (!j.at("sweep").is_null()) m.sweep_json = j.at("sweep").dump(2);
    return m;
}

}  // namespace ted::io
