#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfgsim/config.hpp"
#include "sfgsim/parallel.hpp"
#include "sfgsim/rng.hpp"

namespace sfgsim::stream {

enum class Channel : std::uint8_t { signal = 0, idler = 1 };

// One detected-band photon. freq_offset is measured from the photon's band
// center; pair partners are anticorrelated up to the pump jitter, so the pair's
// offsets sum to within ±pump_bandwidth/2.
struct PhotonEvent {
    double time_s = 0.0;
    double freq_offset_hz = 0.0;
    Channel channel = Channel::signal;
    std::uint64_t pair_id = 0;
};

enum class DelayShape {
    // Uniform on ±sqrt(3) tau: std exactly tau = 1/(2 dc_bandwidth) and maximum
    // spread 0.866/dc_bandwidth, so an intact pair always falls inside the
    // coincidence window 1/dc_bandwidth. Default.
    uniform,
    // Gaussian with std tau; 4.5% of intact pairs leak outside the window.
    gaussian,
};

// Time-sorted photon record plus the configuration that generated it.
class EventStream {
  public:
    EventStream(SpectralConfig config, double n, double duration_s,
                std::uint64_t seed, std::vector<PhotonEvent> events)
        : config_(config),
          n_(n),
          duration_s_(duration_s),
          seed_(seed),
          events_(std::move(events)) {
        config_.validate();
        if (!(n >= 0.0)) throw std::invalid_argument("EventStream: n must be >= 0");
        if (!(duration_s > 0.0))
            throw std::invalid_argument("EventStream: duration must be > 0");
        for (std::size_t i = 1; i < events_.size(); ++i)
            if (events_[i].time_s < events_[i - 1].time_s)
                throw std::invalid_argument("EventStream: events must be time-sorted");
    }

    const SpectralConfig& config() const { return config_; }
    double n() const { return n_; }
    double duration_s() const { return duration_s_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<PhotonEvent>& events() const { return events_; }

  private:
    SpectralConfig config_;
    double n_;
    double duration_s_;
    std::uint64_t seed_;
    std::vector<PhotonEvent> events_;
};

namespace detail {

struct PairDraw {
    double time;
    double delay;
    double signal_offset;
    double jitter;
};

inline bool event_order(const PhotonEvent& a, const PhotonEvent& b) {
    if (a.time_s != b.time_s) return a.time_s < b.time_s;
    if (a.pair_id != b.pair_id) return a.pair_id < b.pair_id;
    return int(a.channel) < int(b.channel);
}

}  // namespace detail

// Poisson pair process at rate n * dc_bandwidth / 2 (photon flux n * dc_bandwidth).
// Fixed 64-shard layout with one named substream per shard: output is
// byte-identical for a given seed regardless of worker threads. Per-pair draw
// order is fixed (gap, delay, signal offset, pump jitter).
inline EventStream generate_stream(const SpectralConfig& config,
                                   const OperatingPoint& op, double duration_s,
                                   std::uint64_t seed,
                                   DelayShape shape = DelayShape::uniform) {
    config.validate();
    if (!(duration_s > 0.0))
        throw std::invalid_argument("generate_stream: duration must be > 0");

    const double pair_rate = 0.5 * op.n * config.dc_bandwidth_hz;
    const double tau = 0.5 / config.dc_bandwidth_hz;
    const double half_band = 0.5 * config.dc_bandwidth_hz;
    const double half_jitter = 0.5 * config.pump_bandwidth_hz;
    constexpr int num_shards = 64;

    std::vector<std::vector<detail::PairDraw>> shards(num_shards);
    if (pair_rate > 0.0) {
        parallel_for(num_shards, [&](std::size_t k) {
            rng::Stream gen(rng::substream_seed(seed, "stream.gen", k));
            const double start = duration_s * double(k) / num_shards;
            const double end = duration_s * double(k + 1) / num_shards;
            double t = start;
            auto& out = shards[k];
            out.reserve(std::size_t(pair_rate * (end - start) * 1.2) + 4);
            for (;;) {
                t += gen.exponential(1.0 / pair_rate);
                if (t >= end) break;
                detail::PairDraw p;
                p.time = t;
                p.delay = shape == DelayShape::uniform
                              ? gen.uniform(-std::sqrt(3.0) * tau, std::sqrt(3.0) * tau)
                              : tau * gen.normal();
                p.signal_offset = gen.uniform(-half_band, half_band);
                p.jitter = gen.uniform(-half_jitter, half_jitter);
                out.push_back(p);
            }
        });
    }

    std::vector<PhotonEvent> events;
    std::uint64_t pair_id = 0;
    for (const auto& shard : shards)
        for (const auto& p : shard) {
            PhotonEvent s;
            s.time_s = p.time - 0.5 * p.delay;
            s.freq_offset_hz = p.signal_offset;
            s.channel = Channel::signal;
            s.pair_id = pair_id;
            PhotonEvent i;
            i.time_s = p.time + 0.5 * p.delay;
            i.freq_offset_hz = -p.signal_offset + p.jitter;
            i.channel = Channel::idler;
            i.pair_id = pair_id;
            events.push_back(s);
            events.push_back(i);
            ++pair_id;
        }
    std::sort(events.begin(), events.end(), detail::event_order);
    return EventStream(config, op.n, duration_s, seed, std::move(events));
}

// Bernoulli thinning: each photon survives with probability transmissivity,
// decided by a keyed draw on (seed, position), so the same seed always removes
// the same photons. The surviving flux corresponds to occupation t * n.
inline EventStream attenuate_stream(const EventStream& in, double transmissivity,
                                    std::uint64_t seed) {
    if (!(transmissivity >= 0.0 && transmissivity <= 1.0))
        throw std::invalid_argument(
            "attenuate_stream: transmissivity must be in [0, 1]");
    std::uint64_t sub = rng::substream_seed(seed, "stream.attenuate");
    std::vector<PhotonEvent> kept;
    kept.reserve(std::size_t(double(in.events().size()) * transmissivity) + 16);
    for (std::size_t i = 0; i < in.events().size(); ++i)
        if (rng::keyed_uniform01(sub, i) < transmissivity)
            kept.push_back(in.events()[i]);
    return EventStream(in.config(), transmissivity * in.n(), in.duration_s(),
                       in.seed(), std::move(kept));
}

enum class AccidentalAcceptance {
    // Accumulates the exact acceptance probability of the frequency-sum test as a
    // fractional weight per cross coincidence (variance reduction; same mean as
    // `sampled`).
    analytic,
    // Tests the actual frequency sum of the two photons against ±uc_bandwidth/2,
    // then draws the conversion Bernoulli: integer counts with Poisson statistics.
    sampled,
};

struct SfgCounts {
    double correlated = 0.0;       // pair-driven conversions (base + stimulated)
    double accidental = 0.0;       // cross-pair conversions inside the acceptance
    double base_conversions = 0.0;
    double stimulated_conversions = 0.0;
    std::uint64_t same_pair_coincidences = 0;
    std::uint64_t cross_coincidences = 0;
    double duration_s = 0.0;
};

// Exact acceptance of the frequency-sum test for two independent full-band
// offsets: the sum is triangular on ±dc_bandwidth, so
// P(|sum| <= uc/2) = (uc/dc) (1 - uc/(4 dc)).
inline double accidental_acceptance_probability(const SpectralConfig& config) {
    double r = config.uc_bandwidth_hz / config.dc_bandwidth_hz;
    return r * (1.0 - 0.25 * r);
}

// Counts sum-frequency conversions in a stream.
//
// Coincidence window w = 1/dc_bandwidth (the inverse band coherence time);
// conversion pairs one signal-band photon with one idler-band photon.
//   - Same-pair coincidence: both partners survived, |dt| <= w (probability 1 for
//     the uniform delay shape). Converts with probability conversion_probability.
//   - Stimulation: every other intact pair whose midpoint lies within ±w of this
//     pair's midpoint contributes one further conversion chance. The expected
//     overlap count is exactly n, which turns the pair-driven rate into
//     (conversion_probability/2) dc_bandwidth (n + n^2): the linear-plus-quadratic
//     law with equal coefficients.
//   - Cross-pair coincidence: photons from different pairs only convert when
//     their offsets sum inside the receiver acceptance (see AccidentalAcceptance).
// All random decisions are keyed draws on (stream seed, ids), independent of
// iteration order and thread count.
inline SfgCounts count_sfg(const EventStream& stream, const SpectralConfig& config,
                           double conversion_probability,
                           AccidentalAcceptance acceptance =
                               AccidentalAcceptance::analytic) {
    config.validate();
    if (!(conversion_probability >= 0.0 && conversion_probability <= 1.0))
        throw std::invalid_argument(
            "count_sfg: conversion_probability must be in [0, 1]");

    const auto& ev = stream.events();
    const double w = 1.0 / config.dc_bandwidth_hz;
    const double half_acceptance = 0.5 * config.uc_bandwidth_hz;
    const double p_tri = accidental_acceptance_probability(config);
    const std::uint64_t convert_sub =
        rng::substream_seed(stream.seed(), "sfg.convert");
    const std::uint64_t stim_sub = rng::substream_seed(stream.seed(), "sfg.stimulate");
    const std::uint64_t accept_sub = rng::substream_seed(stream.seed(), "sfg.accept");

    SfgCounts out;
    out.duration_s = stream.duration_s();

    struct IntactPair {
        double midpoint;
        std::uint64_t id;
    };
    std::vector<IntactPair> intact;

    for (std::size_t i = 0; i < ev.size(); ++i) {
        for (std::size_t j = i + 1; j < ev.size(); ++j) {
            double dt = ev[j].time_s - ev[i].time_s;
            if (dt > w) break;
            if (ev[i].channel == ev[j].channel) continue;
            if (ev[i].pair_id == ev[j].pair_id) {
                ++out.same_pair_coincidences;
                intact.push_back({0.5 * (ev[i].time_s + ev[j].time_s), ev[i].pair_id});
                if (rng::keyed_bernoulli(convert_sub, ev[i].pair_id, 0,
                                         conversion_probability)) {
                    out.base_conversions += 1.0;
                }
            } else {
                ++out.cross_coincidences;
                if (acceptance == AccidentalAcceptance::analytic) {
                    out.accidental += conversion_probability * p_tri;
                } else {
                    double sum = ev[i].freq_offset_hz + ev[j].freq_offset_hz;
                    if (std::abs(sum) <= half_acceptance &&
                        rng::keyed_bernoulli(accept_sub, i, j,
                                             conversion_probability))
                        out.accidental += 1.0;
                }
            }
        }
    }

    std::sort(intact.begin(), intact.end(),
              [](const IntactPair& a, const IntactPair& b) {
                  if (a.midpoint != b.midpoint) return a.midpoint < b.midpoint;
                  return a.id < b.id;
              });
    std::size_t lo = 0, hi = 0;
    for (std::size_t p = 0; p < intact.size(); ++p) {
        while (lo < intact.size() && intact[lo].midpoint < intact[p].midpoint - w)
            ++lo;
        if (hi < p + 1) hi = p + 1;
        while (hi < intact.size() && intact[hi].midpoint <= intact[p].midpoint + w)
            ++hi;
        for (std::size_t q = lo; q < hi; ++q) {
            if (q == p) continue;
            if (rng::keyed_bernoulli(stim_sub, intact[p].id, intact[q].id,
                                     conversion_probability))
                out.stimulated_conversions += 1.0;
        }
    }

    out.correlated = out.base_conversions + out.stimulated_conversions;
    return out;
}

struct DetectionResult {
    std::uint64_t raw_counts = 0;          // Poisson draw over the integration window
    double dark_subtracted_rate_hz = 0.0;  // (raw - dark * T) / T
};

// Detection chain: Poisson counts at efficiency * rate + dark over the
// integration time, then dark-rate subtraction.
inline DetectionResult detect(double sfg_rate_hz, const DetectorModel& detector,
                              std::uint64_t seed) {
    detector.validate();
    if (!(sfg_rate_hz >= 0.0))
        throw std::invalid_argument("detect: rate must be >= 0");
    rng::Stream gen(rng::substream_seed(seed, "detector"));
    double mean = (detector.collection_efficiency * sfg_rate_hz +
                   detector.dark_rate_hz) *
                  detector.integration_time_s;
    DetectionResult out;
    out.raw_counts = gen.poisson(mean);
    out.dark_subtracted_rate_hz =
        (double(out.raw_counts) -
         detector.dark_rate_hz * detector.integration_time_s) /
        detector.integration_time_s;
    return out;
}

// Text serialization: self-describing header, then one event per line as
// "time freq_offset channel pair_id". %.17g round-trips doubles bit-exactly.
inline void write_stream(std::ostream& os, const EventStream& stream) {
    char buf[128];
    auto emit = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%s %.17g\n", key, v);
        os << buf;
    };
    os << "sfgsim-stream 1\n";
    emit("pump_wavelength_m", stream.config().pump_wavelength_m);
    emit("pump_bandwidth_hz", stream.config().pump_bandwidth_hz);
    emit("dc_center_wavelength_m", stream.config().dc_center_wavelength_m);
    emit("dc_bandwidth_hz", stream.config().dc_bandwidth_hz);
    emit("uc_bandwidth_hz", stream.config().uc_bandwidth_hz);
    emit("n", stream.n());
    emit("duration_s", stream.duration_s());
    os << "seed " << stream.seed() << "\n";
    os << "events " << stream.events().size() << "\n";
    for (const auto& e : stream.events()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %c %llu\n", e.time_s,
                      e.freq_offset_hz, e.channel == Channel::signal ? 's' : 'i',
                      static_cast<unsigned long long>(e.pair_id));
        os << buf;
    }
}

inline EventStream read_stream(std::istream& is) {
    auto fail = [](std::size_t line, const std::string& what) {
        throw std::runtime_error("stream parse error at line " +
                                 std::to_string(line) + ": " + what);
    };
    std::string token;
    std::size_t line = 1;
    if (!(is >> token) || token != "sfgsim-stream") fail(line, "bad magic");
    int version = 0;
    if (!(is >> version) || version != 1) fail(line, "unsupported version");

    SpectralConfig config;
    double n = 0.0, duration = 0.0;
    std::uint64_t seed = 0;
    std::size_t event_count = 0;
    auto read_kv = [&](const char* key, auto& value) {
        ++line;
        if (!(is >> token) || token != key)
            fail(line, std::string("expected key ") + key);
        if (!(is >> value)) fail(line, std::string("bad value for ") + key);
    };
    read_kv("pump_wavelength_m", config.pump_wavelength_m);
    read_kv("pump_bandwidth_hz", config.pump_bandwidth_hz);
    read_kv("dc_center_wavelength_m", config.dc_center_wavelength_m);
    read_kv("dc_bandwidth_hz", config.dc_bandwidth_hz);
    read_kv("uc_bandwidth_hz", config.uc_bandwidth_hz);
    read_kv("n", n);
    read_kv("duration_s", duration);
    read_kv("seed", seed);
    read_kv("events", event_count);

    std::vector<PhotonEvent> events;
    events.reserve(event_count);
    for (std::size_t i = 0; i < event_count; ++i) {
        ++line;
        PhotonEvent e;
        char c = 0;
        if (!(is >> e.time_s >> e.freq_offset_hz >> c >> e.pair_id))
            fail(line, "malformed event record");
        if (c != 's' && c != 'i') fail(line, "channel must be 's' or 'i'");
        e.channel = c == 's' ? Channel::signal : Channel::idler;
        events.push_back(e);
    }
    return EventStream(config, n, duration, seed, std::move(events));
}

}  // namespace sfgsim::stream
