#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "sfgsim/scenario.hpp"

using namespace sfgsim;

namespace {

scenario::Scenario parse_text(const std::string& text) {
    std::istringstream in(text);
    return scenario::parse(in, "test.cfg");
}

bool equal(const scenario::Scenario& a, const scenario::Scenario& b) {
    auto cfg_eq = [](const SpectralConfig& x, const SpectralConfig& y) {
        return x.pump_wavelength_m == y.pump_wavelength_m &&
               x.pump_bandwidth_hz == y.pump_bandwidth_hz &&
               x.dc_center_wavelength_m == y.dc_center_wavelength_m &&
               x.dc_bandwidth_hz == y.dc_bandwidth_hz &&
               x.uc_bandwidth_hz == y.uc_bandwidth_hz;
    };
    if (!cfg_eq(a.config, b.config)) return false;
    if (a.n_values != b.n_values) return false;
    if (a.detector.has_value() != b.detector.has_value()) return false;
    if (a.detector &&
        (a.detector->collection_efficiency != b.detector->collection_efficiency ||
         a.detector->dark_rate_hz != b.detector->dark_rate_hz ||
         a.detector->integration_time_s != b.detector->integration_time_s))
        return false;
    return a.sweep_mode == b.sweep_mode && a.engine == b.engine &&
           a.drive_values == b.drive_values &&
           a.attenuation_base_n == b.attenuation_base_n &&
           a.num_seeds == b.num_seeds && a.alpha == b.alpha &&
           a.stream_duration_s == b.stream_duration_s &&
           a.conversion_probability == b.conversion_probability &&
           a.delay_shape == b.delay_shape && a.acceptance == b.acceptance &&
           a.fock_pairs == b.fock_pairs && a.fock_cutoff == b.fock_cutoff &&
           a.seed == b.seed;
}

}  // namespace

TEST_CASE("scenario parses a full file", "[scenario]") {
    auto sc = parse_text(R"(# example
spectral.pump_wavelength_m = 532e-9
spectral.pump_bandwidth_hz = 2e7      # narrow pump
spectral.dc_center_wavelength_m = 1064e-9
spectral.dc_bandwidth_hz = 8.2e12
spectral.uc_bandwidth_hz = 1e11

operating.n_values = 0.001, 0.01, 0.1
detector.collection_efficiency = 0.06
detector.dark_rate_hz = 50
detector.integration_time_s = 5

sweep.mode = atten
sweep.engine = stream
sweep.drive_values = 0.25, 0.5, 1.0
sweep.attenuation_base_n = 0.08
sweep.num_seeds = 12
sweep.alpha = 0.5
stream.duration_s = 2.5
stream.conv_prob = 0.4
stream.delay_shape = gaussian
stream.acceptance = sampled
fock.num_pairs = 3
fock.cutoff = 4
seed = 424242
)");
    CHECK(sc.config.pump_bandwidth_hz == 2e7);
    CHECK(sc.config.dc_bandwidth_hz == 8.2e12);
    CHECK(sc.n_values == std::vector<double>{0.001, 0.01, 0.1});
    REQUIRE(sc.detector.has_value());
    CHECK(sc.detector->integration_time_s == 5.0);
    CHECK(sc.sweep_mode == experiment::SweepMode::attenuation);
    CHECK(sc.engine == experiment::Engine::stream);
    CHECK(sc.drive_values == std::vector<double>{0.25, 0.5, 1.0});
    CHECK(sc.num_seeds == 12);
    CHECK(sc.alpha == 0.5);
    CHECK(sc.stream_duration_s == 2.5);
    CHECK(sc.conversion_probability == 0.4);
    CHECK(sc.delay_shape == stream::DelayShape::gaussian);
    CHECK(sc.acceptance == stream::AccidentalAcceptance::sampled);
    CHECK(sc.fock_pairs == 3);
    CHECK(sc.fock_cutoff == 4);
    REQUIRE(sc.seed.has_value());
    CHECK(*sc.seed == 424242);
}

TEST_CASE("scenario defaults survive a minimal file", "[scenario]") {
    auto sc = parse_text("seed = 7\n");
    CHECK(sc.config.dc_bandwidth_hz == 8.2e12);
    CHECK_FALSE(sc.detector.has_value());
    CHECK(sc.engine == experiment::Engine::analytic);
    CHECK(sc.num_seeds == 8);
    CHECK(*sc.seed == 7);
}

TEST_CASE("dc bandwidth can be given in wavelength units", "[scenario]") {
    // Conversion must use the center wavelength even when it appears later.
    auto sc = parse_text(
        "spectral.dc_bandwidth_nm = 31\n"
        "spectral.dc_center_wavelength_m = 1064e-9\n");
    CHECK(sc.config.dc_bandwidth_hz ==
          analytic::bandwidth_nm_to_hz(31.0, 1064e-9));
    CHECK(sc.config.dc_bandwidth_hz == Catch::Approx(8.2e12).epsilon(0.02));
}

TEST_CASE("scenario rejects malformed input with file and line", "[scenario]") {
    auto expect_fail = [](const std::string& text, const std::string& needle) {
        std::istringstream in(text);
        try {
            scenario::parse(in, "bad.cfg");
            FAIL("expected parse failure for: " << text);
        } catch (const std::invalid_argument& e) {
            CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring(needle));
        }
    };
    expect_fail("seed = 1\nnot a setting\n", "bad.cfg:2");
    expect_fail("spectral.typo_hz = 1\n", "unknown key 'spectral.typo_hz'");
    expect_fail("seed = 1\nseed = 2\n", "duplicate key 'seed'");
    expect_fail("sweep.mode = sideways\n", "sweep.mode");
    expect_fail("sweep.num_seeds = -3\n", "non-negative integer");
    expect_fail("operating.n_values = 0.1,,0.2\n", "empty entry");
    expect_fail("seed =\n", "missing value");
    expect_fail("spectral.dc_bandwidth_hz = fast\n", "expected a number");
    // semantic failure: uc band wider than dc band
    expect_fail("spectral.uc_bandwidth_hz = 9e12\n", "uc_bandwidth");
}

TEST_CASE("serialize then parse is the identity", "[scenario]") {
    scenario::Scenario sc;
    sc.config = desk_scale_config();
    sc.n_values = {0.02, 0.07};
    sc.detector = DetectorModel{0.11, 12.5, 2.0};
    sc.sweep_mode = experiment::SweepMode::attenuation;
    sc.engine = experiment::Engine::stream;
    sc.drive_values = {0.3, 0.6, 0.9};
    sc.attenuation_base_n = 0.033;
    sc.num_seeds = 5;
    sc.alpha = 1.75;
    sc.stream_duration_s = 0.125;
    sc.conversion_probability = 0.85;
    sc.delay_shape = stream::DelayShape::gaussian;
    sc.acceptance = stream::AccidentalAcceptance::sampled;
    sc.fock_pairs = 4;
    sc.fock_cutoff = 2;
    sc.seed = 99;

    auto round = parse_text(scenario::serialize(sc));
    CHECK(equal(sc, round));

    // and the canonical form is a fixed point
    CHECK(scenario::serialize(round) == scenario::serialize(sc));

    scenario::Scenario plain;  // defaults, no detector, no seed
    CHECK(equal(plain, parse_text(scenario::serialize(plain))));
}

TEST_CASE("scenario assembles engine settings", "[scenario]") {
    scenario::Scenario sc;
    sc.config = desk_scale_config();
    sc.engine = experiment::Engine::stream;
    sc.drive_values = {0.01, 0.1};
    sc.num_seeds = 3;
    sc.stream_duration_s = 0.25;
    sc.conversion_probability = 0.5;

    auto s = sc.sweep_settings(/*master_seed=*/500);
    CHECK(s.engine == experiment::Engine::stream);
    REQUIRE(s.seeds.size() == 3);
    CHECK(s.seeds[0] == rng::substream_seed(500, "replica", 0));
    CHECK(s.seeds[1] != s.seeds[0]);
    CHECK(s.stream_duration_s == 0.25);

    auto cv = sc.cross_settings(500);
    CHECK(cv.seeds.size() == 3);
    CHECK(cv.conversion_probability == 0.5);
    CHECK(cv.n_values == sc.n_values);

    // settings are reproducible from the master seed alone
    auto again = sc.sweep_settings(500);
    CHECK(again.seeds == s.seeds);
}
