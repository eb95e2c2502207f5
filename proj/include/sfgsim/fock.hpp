#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sfgsim/constants.hpp"

namespace sfgsim::fock {

using cdouble = std::complex<double>;

// Truncated dense Fock basis over 2N modes: signal of pair j is mode 2j, idler is
// mode 2j+1. Occupations 0..cutoff per mode, mixed-radix index with mode 0 least
// significant. Dimension (cutoff+1)^(2N) is capped so dense vectors stay cheap.
struct FockDims {
    int num_pairs = 1;
    int cutoff = 1;

    static constexpr std::size_t max_dimension = 100000;

    FockDims() = default;
    FockDims(int pairs, int cut) : num_pairs(pairs), cutoff(cut) {
        if (pairs < 1) throw std::invalid_argument("FockDims: num_pairs must be >= 1");
        if (cut < 1) throw std::invalid_argument("FockDims: cutoff must be >= 1");
        if (dimension_checked() > max_dimension)
            throw std::invalid_argument("FockDims: basis dimension exceeds 1e5");
    }

    int num_modes() const { return 2 * num_pairs; }
    int signal_mode(int pair) const { return 2 * pair; }
    int idler_mode(int pair) const { return 2 * pair + 1; }

    std::size_t dimension() const {
        std::size_t d = 1;
        for (int m = 0; m < num_modes(); ++m) d *= std::size_t(cutoff + 1);
        return d;
    }

    std::size_t stride(int mode) const {
        std::size_t s = 1;
        for (int m = 0; m < mode; ++m) s *= std::size_t(cutoff + 1);
        return s;
    }

    int occupation(std::size_t index, int mode) const {
        return int((index / stride(mode)) % std::size_t(cutoff + 1));
    }

  private:
    std::size_t dimension_checked() const {
        std::size_t d = 1;
        for (int m = 0; m < num_modes(); ++m) {
            if (d > max_dimension) return max_dimension + 1;
            d *= std::size_t(cutoff + 1);
        }
        return d;
    }
};

// Pure multimode state: dense amplitude vector, normalized to 1. The truncation
// deficit records the squared-norm weight the cutoff discarded before
// renormalization (zero for states that fit the cutoff exactly).
class MultimodeState {
  public:
    MultimodeState(FockDims dims, std::vector<cdouble> amplitudes,
                   double pump_phase = 0.0, double truncation_deficit = 0.0)
        : dims_(dims),
          amplitudes_(std::move(amplitudes)),
          pump_phase_(pump_phase),
          truncation_deficit_(truncation_deficit) {
        if (amplitudes_.size() != dims_.dimension())
            throw std::invalid_argument("MultimodeState: amplitude size mismatch");
    }

    const FockDims& dims() const { return dims_; }
    const std::vector<cdouble>& amplitudes() const { return amplitudes_; }
    double pump_phase() const { return pump_phase_; }
    double truncation_deficit() const { return truncation_deficit_; }

    double squared_norm() const {
        double s = 0.0;
        for (const auto& a : amplitudes_) s += std::norm(a);
        return s;
    }

  private:
    FockDims dims_;
    std::vector<cdouble> amplitudes_;
    double pump_phase_;
    double truncation_deficit_;
};

// Squeezed-vacuum product state: each mode pair carries the geometric amplitude
// ladder c_k = sqrt(n^k / (1+n)^{k+1}) e^{ik(pump_phase + pi/2)} (mean occupation n
// per mode before truncation), independent across pairs. The pi/2 offset is the
// phase the downconversion pump imprints on every pair amplitude. Truncated at the
// cutoff and renormalized; kept weight per pair is 1 - q^{cutoff+1}, q = n/(1+n).
inline MultimodeState build_state(double n, int num_pairs, int cutoff,
                                  double pump_phase = 0.0) {
    if (!(n >= 0.0)) throw std::invalid_argument("build_state: n must be >= 0");
    FockDims dims(num_pairs, cutoff);

    std::vector<cdouble> ladder(std::size_t(cutoff) + 1);
    double kept = 0.0;
    for (int k = 0; k <= cutoff; ++k) {
        double w = std::pow(n, k) / std::pow(1.0 + n, k + 1);
        kept += w;
        double phase = double(k) * (pump_phase + 0.5 * pi);
        ladder[std::size_t(k)] =
            std::sqrt(w) * cdouble(std::cos(phase), std::sin(phase));
    }
    double scale = 1.0 / std::sqrt(kept);
    for (auto& c : ladder) c *= scale;

    std::vector<cdouble> amps(dims.dimension(), cdouble(0.0, 0.0));
    for (std::size_t idx = 0; idx < amps.size(); ++idx) {
        cdouble a(1.0, 0.0);
        bool symmetric = true;
        for (int j = 0; j < num_pairs; ++j) {
            int ks = dims.occupation(idx, dims.signal_mode(j));
            int ki = dims.occupation(idx, dims.idler_mode(j));
            if (ks != ki) {
                symmetric = false;
                break;
            }
            a *= ladder[std::size_t(ks)];
        }
        if (symmetric) amps[idx] = a;
    }

    double deficit = 1.0 - std::pow(kept, num_pairs);
    return MultimodeState(dims, std::move(amps), pump_phase, deficit);
}

// Single-excitation pair superposition: M|vac> + sqrt(n) sum_j e^{i(theta_j)}|1_s 1_i>_j
// with M = sqrt(1 - N n) and theta_j = pump_phase + pi/2 + extra_phases[j]. This is
// the coherent-amplitude limit of the pair source: one conversion amplitude per
// pair, all sharing the pump phase, so the sum-frequency rate is exactly N^2 n
// (and exactly N n on average once the per-pair phases are randomized). Requires
// N n < 1 for the vacuum weight to exist.
inline MultimodeState build_pair_superposition(double n, int num_pairs, int cutoff,
                                               double pump_phase = 0.0,
                                               const std::vector<double>& extra_phases = {}) {
    if (!(n >= 0.0))
        throw std::invalid_argument("build_pair_superposition: n must be >= 0");
    if (!(double(num_pairs) * n < 1.0))
        throw std::invalid_argument(
            "build_pair_superposition: requires num_pairs * n < 1");
    if (!extra_phases.empty() && extra_phases.size() != std::size_t(num_pairs))
        throw std::invalid_argument(
            "build_pair_superposition: phase list size mismatch");
    FockDims dims(num_pairs, cutoff);

    std::vector<cdouble> amps(dims.dimension(), cdouble(0.0, 0.0));
    amps[0] = std::sqrt(1.0 - double(num_pairs) * n);
    double root_n = std::sqrt(n);
    for (int j = 0; j < num_pairs; ++j) {
        double theta = pump_phase + 0.5 * pi +
                       (extra_phases.empty() ? 0.0 : extra_phases[std::size_t(j)]);
        std::size_t idx =
            dims.stride(dims.signal_mode(j)) + dims.stride(dims.idler_mode(j));
        amps[idx] = root_n * cdouble(std::cos(theta), std::sin(theta));
    }
    return MultimodeState(dims, std::move(amps), pump_phase, 0.0);
}

// a_mode applied to a dense vector; exact within the truncated space (lowering
// never leaves it).
inline std::vector<cdouble> apply_annihilation(const FockDims& dims,
                                               const std::vector<cdouble>& in,
                                               int mode) {
    if (mode < 0 || mode >= dims.num_modes())
        throw std::invalid_argument("apply_annihilation: mode out of range");
    std::vector<cdouble> out(in.size(), cdouble(0.0, 0.0));
    std::size_t step = dims.stride(mode);
    for (std::size_t idx = 0; idx < in.size(); ++idx) {
        int k = dims.occupation(idx, mode);
        if (k > 0) out[idx - step] += std::sqrt(double(k)) * in[idx];
    }
    return out;
}

// A|psi> with A = sum_j a_{s_j} a_{i_j}: the collective sum-frequency operator
// feeding the upconverted pump mode.
inline std::vector<cdouble> apply_sum_frequency(const FockDims& dims,
                                                const std::vector<cdouble>& in) {
    std::vector<cdouble> total(in.size(), cdouble(0.0, 0.0));
    for (int j = 0; j < dims.num_pairs; ++j) {
        auto tmp = apply_annihilation(dims, in, dims.idler_mode(j));
        tmp = apply_annihilation(dims, tmp, dims.signal_mode(j));
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += tmp[i];
    }
    return total;
}

// <A†A> = |A psi|^2: pair-driven sum-frequency rate. Cross-pair terms add
// coherently, which is where the N^2 collective gain lives.
inline double sfg_rate_correlated(const MultimodeState& state) {
    auto v = apply_sum_frequency(state.dims(), state.amplitudes());
    double s = 0.0;
    for (const auto& a : v) s += std::norm(a);
    return s;
}

// sum_{j != j'} <n_{s_j} n_{i_j'}>: conversions pairing a signal with a foreign
// idler. Needs at least two pairs to be meaningful.
inline double sfg_rate_uncorrelated(const MultimodeState& state) {
    const auto& dims = state.dims();
    if (dims.num_pairs < 2)
        throw std::invalid_argument(
            "sfg_rate_uncorrelated: needs >= 2 mode pairs");
    const auto& amps = state.amplitudes();
    double total = 0.0;
    for (std::size_t idx = 0; idx < amps.size(); ++idx) {
        double w = std::norm(amps[idx]);
        if (w == 0.0) continue;
        double sum_s = 0.0, sum_i = 0.0, diag = 0.0;
        for (int j = 0; j < dims.num_pairs; ++j) {
            double ks = dims.occupation(idx, dims.signal_mode(j));
            double ki = dims.occupation(idx, dims.idler_mode(j));
            sum_s += ks;
            sum_i += ki;
            diag += ks * ki;
        }
        total += w * (sum_s * sum_i - diag);
    }
    return total;
}

struct LossChannel {
    double transmissivity = 1.0;

    void validate() const {
        if (!(transmissivity >= 0.0 && transmissivity <= 1.0))
            throw std::invalid_argument(
                "LossChannel: transmissivity must be in [0, 1]");
    }
};

// Mixture of pure branches with weights folded into the (unnormalized) branch
// amplitudes; sum of branch squared norms is the trace (1 for a loss ensemble of
// a normalized input).
class MixedState {
  public:
    MixedState(FockDims dims, std::vector<std::vector<cdouble>> branches)
        : dims_(dims), branches_(std::move(branches)) {
        for (const auto& b : branches_)
            if (b.size() != dims_.dimension())
                throw std::invalid_argument("MixedState: branch size mismatch");
    }

    const FockDims& dims() const { return dims_; }
    const std::vector<std::vector<cdouble>>& branches() const { return branches_; }

    double total_weight() const {
        double s = 0.0;
        for (const auto& b : branches_)
            for (const auto& a : b) s += std::norm(a);
        return s;
    }

  private:
    FockDims dims_;
    std::vector<std::vector<cdouble>> branches_;
};

namespace detail {

inline double binomial(int k, int l) {
    double b = 1.0;
    for (int i = 0; i < l; ++i) b = b * double(k - i) / double(i + 1);
    return b;
}

// Beam-splitter Kraus family on one mode: E_l removes l photons with amplitude
// sqrt(C(k,l) t^{k-l} (1-t)^l) from occupation k. sum_l E_l† E_l = I.
inline std::vector<std::vector<cdouble>> split_mode(
    const std::vector<std::vector<cdouble>>& branches, const FockDims& dims,
    int mode, double t) {
    constexpr double weight_floor = 1e-30;
    std::vector<std::vector<cdouble>> out;
    std::size_t step = dims.stride(mode);
    for (const auto& b : branches) {
        for (int l = 0; l <= dims.cutoff; ++l) {
            std::vector<cdouble> v(b.size(), cdouble(0.0, 0.0));
            double norm2 = 0.0;
            for (std::size_t idx = 0; idx < b.size(); ++idx) {
                int k = dims.occupation(idx, mode);
                if (k < l) continue;
                double f2 = binomial(k, l) * std::pow(t, double(k - l)) *
                            std::pow(1.0 - t, double(l));
                if (f2 == 0.0) continue;
                cdouble a = std::sqrt(f2) * b[idx];
                v[idx - std::size_t(l) * step] += a;
                norm2 += std::norm(a);
            }
            if (norm2 > weight_floor) out.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace detail

// Applies an equal-transmissivity beam-splitter loss to every mode, exactly, as a
// branch ensemble. Branch count can reach (cutoff+1)^(2N); the work guard keeps
// dense enumeration tractable.
inline MixedState apply_loss(const MultimodeState& state, const LossChannel& channel) {
    channel.validate();
    const auto& dims = state.dims();
    std::vector<std::vector<cdouble>> branches = {state.amplitudes()};
    for (int mode = 0; mode < dims.num_modes(); ++mode) {
        branches = detail::split_mode(branches, dims, mode, channel.transmissivity);
        if (branches.size() * dims.dimension() > 20000000)
            throw std::length_error("apply_loss: branch ensemble too large");
    }
    return MixedState(dims, std::move(branches));
}

inline double sfg_rate_correlated(const MixedState& state) {
    double total = 0.0;
    for (const auto& b : state.branches()) {
        auto v = apply_sum_frequency(state.dims(), b);
        for (const auto& a : v) total += std::norm(a);
    }
    return total;
}

inline double sfg_rate_uncorrelated(const MixedState& state) {
    const auto& dims = state.dims();
    if (dims.num_pairs < 2)
        throw std::invalid_argument(
            "sfg_rate_uncorrelated: needs >= 2 mode pairs");
    double total = 0.0;
    for (const auto& b : state.branches()) {
        for (std::size_t idx = 0; idx < b.size(); ++idx) {
            double w = std::norm(b[idx]);
            if (w == 0.0) continue;
            double sum_s = 0.0, sum_i = 0.0, diag = 0.0;
            for (int j = 0; j < dims.num_pairs; ++j) {
                double ks = dims.occupation(idx, dims.signal_mode(j));
                double ki = dims.occupation(idx, dims.idler_mode(j));
                sum_s += ks;
                sum_i += ki;
                diag += ks * ki;
            }
            total += w * (sum_s * sum_i - diag);
        }
    }
    return total;
}

// Normally ordered operator term: coefficient * prod a†_{creators} * prod a_{annihilators}.
// Mode indices refer to the flat mode numbering (signal 2j, idler 2j+1).
struct NormalTerm {
    cdouble coefficient{1.0, 0.0};
    std::vector<int> creators;
    std::vector<int> annihilators;
};

using NormalOperator = std::vector<NormalTerm>;

// Generic dense expectation of a normally ordered operator:
// <psi| prod a† prod a |psi> = <(prod a)_creators psi, (prod a)_annihilators psi>.
// Exact on the truncated basis because only lowering operators are ever applied.
inline cdouble oracle_expectation(const MultimodeState& state,
                                  const NormalOperator& op) {
    const auto& dims = state.dims();
    cdouble total(0.0, 0.0);
    for (const auto& term : op) {
        std::vector<cdouble> left = state.amplitudes();
        for (int mode : term.creators) left = apply_annihilation(dims, left, mode);
        std::vector<cdouble> right = state.amplitudes();
        for (int mode : term.annihilators)
            right = apply_annihilation(dims, right, mode);
        cdouble dot(0.0, 0.0);
        for (std::size_t i = 0; i < left.size(); ++i)
            dot += std::conj(left[i]) * right[i];
        total += term.coefficient * dot;
    }
    return total;
}

inline cdouble oracle_expectation(const MixedState& state, const NormalOperator& op) {
    const auto& dims = state.dims();
    cdouble total(0.0, 0.0);
    for (const auto& branch : state.branches()) {
        for (const auto& term : op) {
            std::vector<cdouble> left = branch;
            for (int mode : term.creators) left = apply_annihilation(dims, left, mode);
            std::vector<cdouble> right = branch;
            for (int mode : term.annihilators)
                right = apply_annihilation(dims, right, mode);
            cdouble dot(0.0, 0.0);
            for (std::size_t i = 0; i < left.size(); ++i)
                dot += std::conj(left[i]) * right[i];
            total += term.coefficient * dot;
        }
    }
    return total;
}

// A†A as an explicit normally ordered term list (N^2 terms), for oracle
// cross-checks of sfg_rate_correlated.
inline NormalOperator sfg_correlated_operator(int num_pairs) {
    NormalOperator op;
    for (int j = 0; j < num_pairs; ++j)
        for (int jp = 0; jp < num_pairs; ++jp) {
            NormalTerm t;
            t.creators = {2 * j, 2 * j + 1};
            t.annihilators = {2 * jp, 2 * jp + 1};
            op.push_back(std::move(t));
        }
    return op;
}

// sum_{j != j'} n_{s_j} n_{i_j'} (modes distinct, so the product is already
// normally ordered).
inline NormalOperator sfg_uncorrelated_operator(int num_pairs) {
    NormalOperator op;
    for (int j = 0; j < num_pairs; ++j)
        for (int jp = 0; jp < num_pairs; ++jp) {
            if (j == jp) continue;
            NormalTerm t;
            t.creators = {2 * j, 2 * jp + 1};
            t.annihilators = {2 * j, 2 * jp + 1};
            op.push_back(std::move(t));
        }
    return op;
}

// n_{s_j} n_{i_j} for the pair photon-number correlator.
inline NormalOperator pair_correlation_operator(int pair) {
    NormalTerm t;
    t.creators = {2 * pair, 2 * pair + 1};
    t.annihilators = {2 * pair, 2 * pair + 1};
    return {t};
}

inline NormalOperator number_operator(int mode) {
    NormalTerm t;
    t.creators = {mode};
    t.annihilators = {mode};
    return {t};
}

}  // namespace sfgsim::fock
