// Command line front end: analytic rate tables, power sweeps with any engine,
// truncated-basis summaries, photon stream files, and a self-validation
// battery. Exit codes: 0 success, 1 runtime or consistency failure, 2 usage
// or configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfgsim/analytic.hpp"
#include "sfgsim/experiment.hpp"
#include "sfgsim/fock.hpp"
#include "sfgsim/report_io.hpp"
#include "sfgsim/scenario.hpp"
#include "sfgsim/stream.hpp"
#include "sfgsim/svg.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace sfgsim;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

scenario::Scenario load_scenario(const std::string& path) {
    if (path.empty()) return scenario::Scenario{};
    return scenario::load_file(path);
}

// Randomness-consuming commands demand an explicit seed so results are
// reproducible by construction; --seed beats the scenario file.
std::uint64_t require_seed(const std::optional<std::uint64_t>& cli_seed,
                           const scenario::Scenario& sc) {
    if (cli_seed) return *cli_seed;
    if (sc.seed) return *sc.seed;
    throw CLI::ValidationError(
        "seed", "this command draws random numbers: give --seed or set "
                "'seed = ...' in the scenario file");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

json config_json(const SpectralConfig& cfg) {
    json j;
    j["pump_wavelength_m"] = cfg.pump_wavelength_m;
    j["pump_bandwidth_hz"] = cfg.pump_bandwidth_hz;
    j["dc_center_wavelength_m"] = cfg.dc_center_wavelength_m;
    j["dc_bandwidth_hz"] = cfg.dc_bandwidth_hz;
    j["uc_bandwidth_hz"] = cfg.uc_bandwidth_hz;
    j["mode_count"] = cfg.mode_count();
    return j;
}

int cmd_rates(const scenario::Scenario& sc, double alpha,
              const std::string& out_dir) {
    const auto& cfg = sc.config;
    std::string csv =
        "n,pair_flux_hz,correlated_hz,uncorrelated_hz,classical_hz,ratio,"
        "ratio_bound,loglog_slope\n";
    for (double n : sc.n_values) {
        auto p = analytic::predict(cfg, n, alpha);
        std::string ratio = "inf", bound = "inf";
        if (n > 0.0) {
            auto rr = analytic::rate_ratio(cfg, n);
            ratio = fmt(rr.ratio);
            bound = fmt(rr.bound);
        }
        csv += fmt(n) + "," + fmt(p.flux_hz) + "," + fmt(p.correlated_hz) + "," +
               fmt(p.uncorrelated_hz) + "," + fmt(p.classical_hz) + "," + ratio +
               "," + bound + "," + fmt(p.slope) + "\n";
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(std::filesystem::path(out_dir) / "rates.csv", csv);
    }
    std::fputs(csv.c_str(), stdout);
    return 0;
}

int cmd_sweep(const scenario::Scenario& sc, std::uint64_t master_seed,
              const std::string& out_dir, const std::string& format) {
    auto settings = sc.sweep_settings(master_seed);
    auto curve = experiment::run_sweep(settings);

    std::string csv = report_io::to_csv(curve);
    std::string js = report_io::to_json(curve).dump(2) + "\n";
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(std::filesystem::path(out_dir) / "sweep.csv", csv);
        write_file(std::filesystem::path(out_dir) / "sweep.json", js);
        svg::Series data;
        data.label = std::string(experiment::to_string(curve.engine)) + " engine";
        for (const auto& p : curve.points) data.points.push_back({p.drive, p.mean});
        const char* xl = curve.mode == experiment::SweepMode::pump_scaling
                             ? "mean occupation n"
                             : "transmissivity";
        write_file(std::filesystem::path(out_dir) / "sweep.svg",
                   svg::render_loglog({data}, "sum-frequency rate sweep", xl,
                                      "rate (1/s)"));
    }
    std::fputs(format == "csv" ? csv.c_str() : js.c_str(), stdout);
    return 0;
}

int cmd_fock(const scenario::Scenario& sc, int pairs, int cutoff,
             const std::string& format, const std::string& out_dir) {
    json j;
    j["num_pairs"] = pairs;
    j["cutoff"] = cutoff;
    auto& rows = j["rows"] = json::array();
    std::string csv =
        "n,correlated,uncorrelated,per_pair_correlator,truncation_deficit\n";
    for (double n : sc.n_values) {
        auto state = fock::build_state(n, pairs, cutoff);
        double corr = fock::sfg_rate_correlated(state);
        double unc = pairs >= 2 ? fock::sfg_rate_uncorrelated(state) : 0.0;
        double pp = fock::oracle_expectation(
                        state, fock::pair_correlation_operator(0)).real();
        json row;
        row["n"] = n;
        row["correlated"] = corr;
        row["uncorrelated"] = unc;
        row["per_pair_correlator"] = pp;
        row["truncation_deficit"] = state.truncation_deficit();
        rows.push_back(row);
        csv += fmt(n) + "," + fmt(corr) + "," + fmt(unc) + "," + fmt(pp) + "," +
               fmt(state.truncation_deficit()) + "\n";
    }
    std::string js = j.dump(2) + "\n";
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(std::filesystem::path(out_dir) / "fock.csv", csv);
        write_file(std::filesystem::path(out_dir) / "fock.json", js);
    }
    std::fputs(format == "csv" ? csv.c_str() : js.c_str(), stdout);
    return 0;
}

int cmd_stream_generate(const scenario::Scenario& sc, std::uint64_t seed,
                        double n, double duration, const std::string& out_path) {
    auto st = stream::generate_stream(sc.config, {n, sc.config}, duration, seed,
                                      sc.delay_shape);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    stream::write_stream(out, st);
    std::fprintf(stdout, "wrote %zu events (%s pairs expected) to %s\n",
                 st.events().size(),
                 fmt(0.5 * n * sc.config.dc_bandwidth_hz * duration).c_str(),
                 out_path.c_str());
    return 0;
}

int cmd_stream_count(const std::string& in_path, double conv,
                     const std::string& acceptance) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open stream file '" + in_path + "'");
    auto st = stream::read_stream(in);
    auto mode = acceptance == "sampled" ? stream::AccidentalAcceptance::sampled
                                        : stream::AccidentalAcceptance::analytic;
    auto c = stream::count_sfg(st, st.config(), conv, mode);
    json j;
    j["events"] = st.events().size();
    j["duration_s"] = c.duration_s;
    j["correlated"] = c.correlated;
    j["accidental"] = c.accidental;
    j["base_conversions"] = c.base_conversions;
    j["stimulated_conversions"] = c.stimulated_conversions;
    j["same_pair_coincidences"] = c.same_pair_coincidences;
    j["cross_coincidences"] = c.cross_coincidences;
    j["correlated_rate_hz"] = c.correlated / c.duration_s;
    j["accidental_rate_hz"] = c.accidental / c.duration_s;
    std::fputs((j.dump(2) + "\n").c_str(), stdout);
    return 0;
}

// Deterministic self-checks: closed-form identities plus seeded statistical
// agreement across the three engines. Output bytes depend only on the seed.
int cmd_validate(const scenario::Scenario& sc, bool have_scenario,
                 std::uint64_t seed) {
    // The battery simulates photon streams, so the default layout is the
    // bench-scale one (stream checks at the full source bandwidth would need
    // ~1e10 events); a scenario file overrides it.
    scenario::Scenario defaults;
    defaults.config = desk_scale_config();
    const scenario::Scenario& vsc = have_scenario ? sc : defaults;

    json j;
    j["seed"] = seed;
    j["config"] = config_json(vsc.config);

    bool all_pass = true;
    auto& inv = j["invariants"] = json::array();
    auto check = [&](const std::string& name, double value, bool pass) {
        inv.push_back(json{{"name", name}, {"value", value}, {"pass", pass}});
        all_pass = all_pass && pass;
    };

    const auto& cfg = vsc.config;
    {
        double cross = analytic::crossover_flux(cfg);
        check("analytic.crossover_equals_dc_bandwidth",
              cross / cfg.dc_bandwidth_hz - 1.0, cross == cfg.dc_bandwidth_hz);
        double worst = 0.0;
        bool ok = true;
        for (double n : {1e-4, 1e-2, 0.5, 1.0, 2.0}) {
            auto rr = analytic::rate_ratio(cfg, n);
            worst = std::max(worst, rr.ratio / rr.bound - 1.0);
            ok = ok && rr.ratio <= rr.bound * (1.0 + 1e-12);
        }
        check("analytic.ratio_within_mode_count_bound", worst, ok);
        double s_lo = analytic::loglog_slope(1e-6), s_hi = analytic::loglog_slope(1e3);
        check("analytic.slope_spans_one_to_two", s_hi - s_lo,
              s_lo > 1.0 && s_lo < 1.001 && s_hi > 1.99 && s_hi < 2.0);
    }
    {
        std::vector<double> ns = {0.01, 0.02, 0.05, 0.1}, ys;
        for (double n : ns) ys.push_back(analytic::correlated_rate(cfg, n, 3.25));
        auto af = fit::fit_alpha(ns, ys, cfg, fit::Weighting::poisson);
        check("fit.alpha_identity_on_exact_data", af.alpha - 3.25,
              std::abs(af.alpha - 3.25) < 1e-9);
    }
    {
        auto state = fock::build_state(0.1, 2, 3);
        double direct = fock::sfg_rate_correlated(state);
        double oracle =
            fock::oracle_expectation(state, fock::sfg_correlated_operator(2)).real();
        check("fock.moment_oracle_agreement", direct - oracle,
              std::abs(direct - oracle) < 1e-12);

        double worst = 0.0;
        for (int npairs = 1; npairs <= 4; ++npairs) {
            auto w = fock::build_pair_superposition(0.05, npairs, 1);
            double gain = fock::sfg_rate_correlated(w) /
                          (0.05 * double(npairs));
            worst = std::max(worst, std::abs(gain - double(npairs)));
        }
        check("fock.collective_gain_scales_as_pairs_squared", worst, worst < 1e-12);

        auto lossy = fock::apply_loss(fock::build_state(0.08, 2, 2), {0.7});
        double ratio = fock::sfg_rate_correlated(lossy) /
                       fock::sfg_rate_correlated(fock::build_state(0.08, 2, 2));
        check("fock.loss_scales_rate_by_t_squared", ratio - 0.49,
              std::abs(ratio - 0.49) < 1e-12);
    }
    {
        auto st = stream::generate_stream(cfg, {0.05, cfg}, 0.2,
                                          rng::substream_seed(seed, "validate"));
        auto c = stream::count_sfg(st, cfg, 1.0);
        double capture = c.same_pair_coincidences > 0
                             ? double(c.same_pair_coincidences) /
                                   (0.5 * double(st.events().size()))
                             : 0.0;
        check("stream.same_pair_capture_is_certain", capture - 1.0,
              capture == 1.0);
        auto st2 = stream::generate_stream(cfg, {0.05, cfg}, 0.2,
                                           rng::substream_seed(seed, "validate"));
        bool identical = st.events().size() == st2.events().size();
        for (std::size_t i = 0; identical && i < st.events().size(); ++i)
            identical = st.events()[i].time_s == st2.events()[i].time_s &&
                        st.events()[i].pair_id == st2.events()[i].pair_id;
        check("stream.regeneration_is_bit_identical", identical ? 0.0 : 1.0,
              identical);
        double r = cfg.uc_bandwidth_hz / cfg.dc_bandwidth_hz;
        double p = stream::accidental_acceptance_probability(cfg);
        check("stream.acceptance_matches_triangular_overlap",
              p - r * (1.0 - 0.25 * r), p == r * (1.0 - 0.25 * r));
    }

    experiment::CrossValidationSettings cvs;
    if (have_scenario) {
        cvs = vsc.cross_settings(seed);
    } else {
        cvs.config = cfg;
        cvs.n_values = {0.01, 0.03, 0.1};
        cvs.stream_duration_s = 2.0;
        cvs.seeds.resize(16);
        for (std::size_t i = 0; i < cvs.seeds.size(); ++i)
            cvs.seeds[i] = rng::substream_seed(seed, "replica", i);
    }
    auto report = experiment::cross_validate(cvs);
    j["cross_validation"] = report_io::to_json(report);
    j["consistent"] = all_pass && report.consistent;

    std::fputs((j.dump(2) + "\n").c_str(), stdout);
    return (all_pass && report.consistent) ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "sum-frequency conversion toolkit for broadband photon pair sources"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format = "json";
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "scenario file (key = value lines)");
    app.add_option("--seed", seed, "master seed (overrides the scenario file)");

    auto* rates = app.add_subcommand(
        "rates", "closed-form rate table over the scenario occupations");
    double rates_alpha = 1.0;
    rates->add_option("--alpha", rates_alpha, "overall conversion scale");
    rates->add_option("--out", out_dir, "directory for rates.csv");

    auto* sweep = app.add_subcommand(
        "sweep", "drive sweep with the configured engine and exponent fits");
    sweep->add_option("--out", out_dir, "directory for sweep.{csv,json,svg}");
    sweep->add_option("--format", format, "stdout format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    std::string engine_override, mode_override;
    sweep->add_option("--engine", engine_override, "analytic|fock|stream")
        ->check(CLI::IsMember({"analytic", "fock", "stream"}));
    sweep->add_option("--mode", mode_override, "pump|atten")
        ->check(CLI::IsMember({"pump", "atten"}));

    auto* fock_cmd = app.add_subcommand(
        "fock", "truncated-basis rates over the scenario occupations");
    int pairs = 2, cutoff = 3;
    fock_cmd->add_option("--pairs", pairs, "number of mode pairs")
        ->check(CLI::PositiveNumber);
    fock_cmd->add_option("--cutoff", cutoff, "per-mode excitation cutoff")
        ->check(CLI::PositiveNumber);
    fock_cmd->add_option("--format", format, "stdout format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    fock_cmd->add_option("--out", out_dir, "directory for fock.{csv,json}");

    auto* stream_cmd = app.add_subcommand("stream", "photon stream files");
    stream_cmd->require_subcommand(1);
    auto* gen = stream_cmd->add_subcommand("generate", "simulate and save a stream");
    double gen_n = 0.05, gen_duration = 1.0;
    std::string gen_out = "stream.txt";
    gen->add_option("--n", gen_n, "mean occupation")->check(CLI::NonNegativeNumber);
    gen->add_option("--duration", gen_duration, "seconds of emission")
        ->check(CLI::PositiveNumber);
    gen->add_option("--out", gen_out, "output file");
    auto* count = stream_cmd->add_subcommand("count", "count conversions in a saved stream");
    std::string count_in, acceptance = "analytic";
    double conv = 1.0;
    count->add_option("--in", count_in, "stream file")->required();
    count->add_option("--conv", conv, "conversion probability per coincidence")
        ->check(CLI::Range(0.0, 1.0));
    count->add_option("--acceptance", acceptance, "analytic|sampled")
        ->check(CLI::IsMember({"analytic", "sampled"}));

    auto* validate = app.add_subcommand(
        "validate", "run the deterministic self-check battery");

    // --config / --seed live on the root app; let them appear after the
    // subcommand name as well.
    for (auto* sub : {rates, sweep, fock_cmd, stream_cmd, validate})
        sub->fallthrough();
    gen->fallthrough();
    count->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        scenario::Scenario sc;
        try {
            sc = load_scenario(config_path);
        } catch (const std::invalid_argument& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kExitUsage;
        }

        if (rates->parsed()) return cmd_rates(sc, rates_alpha, out_dir);
        if (fock_cmd->parsed()) return cmd_fock(sc, pairs, cutoff, format, out_dir);
        if (sweep->parsed()) {
            if (engine_override == "analytic") sc.engine = experiment::Engine::analytic;
            else if (engine_override == "fock") sc.engine = experiment::Engine::fock;
            else if (engine_override == "stream") sc.engine = experiment::Engine::stream;
            if (mode_override == "pump") sc.sweep_mode = experiment::SweepMode::pump_scaling;
            else if (mode_override == "atten") sc.sweep_mode = experiment::SweepMode::attenuation;
            std::uint64_t master = 0;
            const bool needs_rng =
                sc.engine == experiment::Engine::stream || sc.detector.has_value();
            if (needs_rng) {
                try {
                    master = require_seed(seed, sc);
                } catch (const CLI::ParseError& e) {
                    std::fprintf(stderr, "error: %s\n", e.what());
                    return kExitUsage;
                }
            } else if (seed) {
                master = *seed;
            } else if (sc.seed) {
                master = *sc.seed;
            }
            return cmd_sweep(sc, master, out_dir, format);
        }
        if (stream_cmd->parsed()) {
            if (gen->parsed()) {
                std::uint64_t master;
                try {
                    master = require_seed(seed, sc);
                } catch (const CLI::ParseError& e) {
                    std::fprintf(stderr, "error: %s\n", e.what());
                    return kExitUsage;
                }
                return cmd_stream_generate(sc, master, gen_n, gen_duration, gen_out);
            }
            return cmd_stream_count(count_in, conv, acceptance);
        }
        if (validate->parsed()) {
            std::uint64_t master;
            try {
                master = require_seed(seed, sc);
            } catch (const CLI::ParseError& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return kExitUsage;
            }
            return cmd_validate(sc, !config_path.empty(), master);
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return 0;
}
