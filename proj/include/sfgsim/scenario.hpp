#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfgsim/analytic.hpp"
#include "sfgsim/config.hpp"
#include "sfgsim/experiment.hpp"
#include "sfgsim/rng.hpp"
#include "sfgsim/stream.hpp"

namespace sfgsim::scenario {

// A scenario file is flat `dotted.key = value` text, one setting per line,
// with `#` comments. Unknown keys are hard errors so typos cannot silently
// fall back to defaults.
struct Scenario {
    SpectralConfig config;
    std::vector<double> n_values = {1e-3, 1e-2, 1e-1};
    std::optional<DetectorModel> detector;

    experiment::SweepMode sweep_mode = experiment::SweepMode::pump_scaling;
    experiment::Engine engine = experiment::Engine::analytic;
    std::vector<double> drive_values = {1e-3, 1e-2, 1e-1};
    double attenuation_base_n = 0.05;
    std::size_t num_seeds = 8;
    double alpha = 1.0;

    double stream_duration_s = 1.0;
    double conversion_probability = 1.0;
    stream::DelayShape delay_shape = stream::DelayShape::uniform;
    stream::AccidentalAcceptance acceptance = stream::AccidentalAcceptance::analytic;

    int fock_pairs = 2;
    int fock_cutoff = 3;

    std::optional<std::uint64_t> seed;

    // Assembles engine-ready settings; replica seeds are substreams of the
    // master seed so a scenario is reproducible from the single value.
    experiment::SweepSettings sweep_settings(std::uint64_t master_seed) const {
        experiment::SweepSettings s;
        s.config = config;
        s.mode = sweep_mode;
        s.engine = engine;
        s.drives = drive_values;
        s.alpha = alpha;
        s.attenuation_base_n = attenuation_base_n;
        s.stream_duration_s = stream_duration_s;
        s.conversion_probability = conversion_probability;
        s.acceptance = acceptance;
        s.delay_shape = delay_shape;
        s.fock_pairs = fock_pairs;
        s.fock_cutoff = fock_cutoff;
        s.detector = detector;
        s.seeds.resize(num_seeds);
        for (std::size_t i = 0; i < num_seeds; ++i)
            s.seeds[i] = rng::substream_seed(master_seed, "replica", i);
        return s;
    }

    experiment::CrossValidationSettings cross_settings(std::uint64_t master_seed) const {
        experiment::CrossValidationSettings s;
        s.config = config;
        s.n_values = n_values;
        s.stream_duration_s = stream_duration_s;
        s.conversion_probability = conversion_probability;
        s.fock_pairs = fock_pairs;
        s.fock_cutoff = fock_cutoff;
        std::size_t reps = num_seeds < 2 ? 2 : num_seeds;
        s.seeds.resize(reps);
        for (std::size_t i = 0; i < reps; ++i)
            s.seeds[i] = rng::substream_seed(master_seed, "replica", i);
        return s;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct ParseContext {
    std::string file;
    int line = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument(file + ":" + std::to_string(line) + ": " + msg);
    }

    double number(const std::string& v) const {
        char* end = nullptr;
        double x = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0') fail("expected a number, got '" + v + "'");
        return x;
    }

    std::uint64_t integer(const std::string& v) const {
        char* end = nullptr;
        unsigned long long x = std::strtoull(v.c_str(), &end, 10);
        if (end == v.c_str() || *end != '\0' || v.find('-') != std::string::npos)
            fail("expected a non-negative integer, got '" + v + "'");
        return x;
    }

    std::vector<double> number_list(const std::string& v) const {
        std::vector<double> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail("empty entry in list '" + v + "'");
            out.push_back(number(item));
        }
        if (out.empty()) fail("expected a comma-separated list, got '" + v + "'");
        return out;
    }
};

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += format_double(xs[i]);
    }
    return out;
}

}  // namespace detail

inline Scenario parse(std::istream& in, const std::string& filename = "<input>") {
    Scenario sc;
    detail::ParseContext ctx{filename, 0};
    std::vector<std::string> seen;
    // dc bandwidth given in wavelength units needs the final center wavelength,
    // so conversion is deferred until the whole file is read.
    std::optional<double> dc_bandwidth_nm;
    bool touched_detector = false;
    DetectorModel det;

    std::string raw;
    while (std::getline(in, raw)) {
        ++ctx.line;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        auto eq = line.find('=');
        if (eq == std::string::npos) ctx.fail("expected 'key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) ctx.fail("missing key before '='");
        if (value.empty()) ctx.fail("missing value for key '" + key + "'");
        for (const auto& k : seen)
            if (k == key) ctx.fail("duplicate key '" + key + "'");
        seen.push_back(key);

        if (key == "spectral.pump_wavelength_m") {
            sc.config.pump_wavelength_m = ctx.number(value);
        } else if (key == "spectral.pump_bandwidth_hz") {
            sc.config.pump_bandwidth_hz = ctx.number(value);
        } else if (key == "spectral.dc_center_wavelength_m") {
            sc.config.dc_center_wavelength_m = ctx.number(value);
        } else if (key == "spectral.dc_bandwidth_hz") {
            sc.config.dc_bandwidth_hz = ctx.number(value);
        } else if (key == "spectral.dc_bandwidth_nm") {
            dc_bandwidth_nm = ctx.number(value);
        } else if (key == "spectral.uc_bandwidth_hz") {
            sc.config.uc_bandwidth_hz = ctx.number(value);
        } else if (key == "operating.n_values") {
            sc.n_values = ctx.number_list(value);
        } else if (key == "detector.collection_efficiency") {
            det.collection_efficiency = ctx.number(value);
            touched_detector = true;
        } else if (key == "detector.dark_rate_hz") {
            det.dark_rate_hz = ctx.number(value);
            touched_detector = true;
        } else if (key == "detector.integration_time_s") {
            det.integration_time_s = ctx.number(value);
            touched_detector = true;
        } else if (key == "sweep.mode") {
            if (value == "pump") sc.sweep_mode = experiment::SweepMode::pump_scaling;
            else if (value == "atten") sc.sweep_mode = experiment::SweepMode::attenuation;
            else ctx.fail("sweep.mode must be 'pump' or 'atten', got '" + value + "'");
        } else if (key == "sweep.engine") {
            if (value == "analytic") sc.engine = experiment::Engine::analytic;
            else if (value == "fock") sc.engine = experiment::Engine::fock;
            else if (value == "stream") sc.engine = experiment::Engine::stream;
            else ctx.fail("sweep.engine must be analytic|fock|stream, got '" + value + "'");
        } else if (key == "sweep.drive_values") {
            sc.drive_values = ctx.number_list(value);
        } else if (key == "sweep.attenuation_base_n") {
            sc.attenuation_base_n = ctx.number(value);
        } else if (key == "sweep.num_seeds") {
            sc.num_seeds = static_cast<std::size_t>(ctx.integer(value));
            if (sc.num_seeds == 0) ctx.fail("sweep.num_seeds must be >= 1");
        } else if (key == "sweep.alpha") {
            sc.alpha = ctx.number(value);
        } else if (key == "stream.duration_s") {
            sc.stream_duration_s = ctx.number(value);
        } else if (key == "stream.conv_prob") {
            sc.conversion_probability = ctx.number(value);
        } else if (key == "stream.delay_shape") {
            if (value == "uniform") sc.delay_shape = stream::DelayShape::uniform;
            else if (value == "gaussian") sc.delay_shape = stream::DelayShape::gaussian;
            else ctx.fail("stream.delay_shape must be uniform|gaussian, got '" + value + "'");
        } else if (key == "stream.acceptance") {
            if (value == "analytic")
                sc.acceptance = stream::AccidentalAcceptance::analytic;
            else if (value == "sampled")
                sc.acceptance = stream::AccidentalAcceptance::sampled;
            else ctx.fail("stream.acceptance must be analytic|sampled, got '" + value + "'");
        } else if (key == "fock.num_pairs") {
            sc.fock_pairs = static_cast<int>(ctx.integer(value));
        } else if (key == "fock.cutoff") {
            sc.fock_cutoff = static_cast<int>(ctx.integer(value));
        } else if (key == "seed") {
            sc.seed = ctx.integer(value);
        } else {
            ctx.fail("unknown key '" + key + "'");
        }
    }

    if (dc_bandwidth_nm) {
        ctx.line = 0;  // post-pass diagnostics carry the file name only
        sc.config.dc_bandwidth_hz = analytic::bandwidth_nm_to_hz(
            *dc_bandwidth_nm, sc.config.dc_center_wavelength_m);
    }
    if (touched_detector) {
        det.validate();
        sc.detector = det;
    }
    sc.config.validate();
    return sc;
}

inline Scenario load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file '" + path + "'");
    return parse(in, path);
}

// Canonical text form; parse(serialize(sc)) reproduces every field. The dc
// bandwidth is always written in Hz regardless of how it was specified.
inline std::string serialize(const Scenario& sc) {
    using detail::format_double;
    std::string out;
    out += "# sfgsim scenario\n";
    out += "spectral.pump_wavelength_m = " + format_double(sc.config.pump_wavelength_m) + "\n";
    out += "spectral.pump_bandwidth_hz = " + format_double(sc.config.pump_bandwidth_hz) + "\n";
    out += "spectral.dc_center_wavelength_m = " +
           format_double(sc.config.dc_center_wavelength_m) + "\n";
    out += "spectral.dc_bandwidth_hz = " + format_double(sc.config.dc_bandwidth_hz) + "\n";
    out += "spectral.uc_bandwidth_hz = " + format_double(sc.config.uc_bandwidth_hz) + "\n";
    out += "operating.n_values = " + detail::format_list(sc.n_values) + "\n";
    if (sc.detector) {
        out += "detector.collection_efficiency = " +
               format_double(sc.detector->collection_efficiency) + "\n";
        out += "detector.dark_rate_hz = " + format_double(sc.detector->dark_rate_hz) + "\n";
        out += "detector.integration_time_s = " +
               format_double(sc.detector->integration_time_s) + "\n";
    }
    out += std::string("sweep.mode = ") + experiment::to_string(sc.sweep_mode) + "\n";
    out += std::string("sweep.engine = ") + experiment::to_string(sc.engine) + "\n";
    out += "sweep.drive_values = " + detail::format_list(sc.drive_values) + "\n";
    out += "sweep.attenuation_base_n = " + format_double(sc.attenuation_base_n) + "\n";
    out += "sweep.num_seeds = " + std::to_string(sc.num_seeds) + "\n";
    out += "sweep.alpha = " + format_double(sc.alpha) + "\n";
    out += "stream.duration_s = " + format_double(sc.stream_duration_s) + "\n";
    out += "stream.conv_prob = " + format_double(sc.conversion_probability) + "\n";
    out += std::string("stream.delay_shape = ") +
           (sc.delay_shape == stream::DelayShape::uniform ? "uniform" : "gaussian") + "\n";
    out += std::string("stream.acceptance = ") +
           (sc.acceptance == stream::AccidentalAcceptance::analytic ? "analytic"
                                                                    : "sampled") + "\n";
    out += "fock.num_pairs = " + std::to_string(sc.fock_pairs) + "\n";
    out += "fock.cutoff = " + std::to_string(sc.fock_cutoff) + "\n";
    if (sc.seed) out += "seed = " + std::to_string(*sc.seed) + "\n";
    return out;
}

}  // namespace sfgsim::scenario
