#include "nvep/telegraph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "nvep/fft.hpp"
#include "nvep/rng.hpp"

namespace nvep::mc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kBlockSize = 512; // fixed so block boundaries never depend on workers

struct BlockAccum {
    std::vector<std::complex<double>> g_sum;
    double upper_time = 0.0;
    int n = 0;
};

// One trajectory: event-driven jumps, phase linear in t inside each dwell.
void run_trajectory(const TelegraphConfig& cfg, std::uint64_t traj_idx,
                    const std::vector<double>& t, BlockAccum& acc) {
    PhiloxStream rng(cfg.seed, traj_idx);
    const double omega = 2.0 * kPi * cfg.delta_mhz; // rad/us at +delta
    const double p_up = (cfg.w_up_mhz + cfg.w_down_mhz > 0)
                            ? cfg.w_up_mhz / (cfg.w_up_mhz + cfg.w_down_mhz)
                            : 1.0; // both rates zero: forced upper site

    bool upper = rng.u01() <= p_up;
    double t_cur = 0.0;
    double phi_cur = 0.0;
    const size_t n = t.size();
    size_t j = 0;

    while (j < n) {
        const double rate_out = upper ? cfg.w_down_mhz : cfg.w_up_mhz;
        const double dwell = rate_out > 0 ? rng.exponential(1.0 / rate_out)
                                          : std::numeric_limits<double>::infinity();
        const double t_next = t_cur + dwell;
        const double w = upper ? omega : -omega;

        while (j < n && t[j] <= t_next) {
            const double phi = phi_cur + w * (t[j] - t_cur);
            acc.g_sum[j] += std::complex<double>(std::cos(phi), std::sin(phi));
            ++j;
        }
        const double t_stop = std::min(t_next, cfg.t_total_us);
        if (upper && t_stop > t_cur)
            acc.upper_time += t_stop - t_cur;
        if (j >= n)
            break;
        phi_cur += w * dwell;
        t_cur = t_next;
        upper = !upper;
    }
    ++acc.n;
}

void spectrum_from_g(const std::vector<std::complex<double>>& g, double dt, int pad_factor,
                     std::vector<double>& freq, std::vector<double>& spec,
                     double& integral_raw) {
    const size_t n = g.size();
    size_t m = 1;
    while (m < n * static_cast<size_t>(pad_factor))
        m <<= 1;

    std::vector<std::complex<double>> buf(m, {0.0, 0.0});
    std::copy(g.begin(), g.end(), buf.begin());
    fft_radix2(buf);

    // S(f) = 2 Re int_0^inf G(t) e^{-2pi i f t} dt, rectangle rule with the
    // t = 0 sample at half weight.
    const double df = 1.0 / (static_cast<double>(m) * dt);
    freq.resize(m);
    spec.resize(m);
    const double g0 = g[0].real();
    for (size_t k = 0; k < m; ++k) {
        const size_t src = (k + m / 2) % m; // reorder to ascending frequency
        const double f = (static_cast<double>(k) - static_cast<double>(m / 2)) * df;
        freq[k] = f;
        spec[k] = dt * (2.0 * buf[src].real() - g0);
    }
    integral_raw = 0.0;
    for (size_t k = 0; k < m; ++k) {
        if (spec[k] < 0.0)
            spec[k] = 0.0; // noise can push the tails slightly negative
        integral_raw += spec[k] * df;
    }
    if (!(integral_raw > 0))
        throw SimulationError("lineshape: spectrum vanished after clamping");
    for (auto& s : spec)
        s /= integral_raw;
}

double fwhm_linear(const std::vector<double>& freq, const std::vector<double>& spec,
                   size_t peak) {
    const double half = 0.5 * spec[peak];
    size_t lo = peak;
    while (lo > 0 && spec[lo] > half)
        --lo;
    size_t hi = peak;
    while (hi + 1 < spec.size() && spec[hi] > half)
        ++hi;
    if (spec[lo] > half || spec[hi] > half)
        throw SimulationError("lineshape: half maximum not bracketed on the grid");
    const double f_lo =
        freq[lo] + (freq[lo + 1] - freq[lo]) * (half - spec[lo]) / (spec[lo + 1] - spec[lo]);
    const double f_hi =
        freq[hi - 1] +
        (freq[hi] - freq[hi - 1]) * (spec[hi - 1] - half) / (spec[hi - 1] - spec[hi]);
    return f_hi - f_lo;
}

} // namespace

CoherenceResult simulate_coherence(const TelegraphConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_time_samples;
    const int n_blocks = (cfg.n_trajectories + kBlockSize - 1) / kBlockSize;

    CoherenceResult out;
    out.t_us.resize(static_cast<size_t>(n));
    const double dt = cfg.t_total_us / static_cast<double>(n - 1);
    for (int j = 0; j < n; ++j)
        out.t_us[static_cast<size_t>(j)] = dt * j;

    std::vector<BlockAccum> blocks(static_cast<size_t>(n_blocks));
    std::atomic<int> next_block{0};
    auto worker = [&]() {
        for (;;) {
            const int b = next_block.fetch_add(1);
            if (b >= n_blocks)
                return;
            BlockAccum& acc = blocks[static_cast<size_t>(b)];
            acc.g_sum.assign(static_cast<size_t>(n), {0.0, 0.0});
            const int lo = b * kBlockSize;
            const int hi = std::min(lo + kBlockSize, cfg.n_trajectories);
            for (int traj = lo; traj < hi; ++traj)
                run_trajectory(cfg, static_cast<std::uint64_t>(traj), out.t_us, acc);
        }
    };

    int n_workers = cfg.n_workers > 0
                        ? cfg.n_workers
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    n_workers = std::min(n_workers, n_blocks);
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    // Deterministic reduction in block order, whatever the scheduling was.
    out.g.assign(static_cast<size_t>(n), {0.0, 0.0});
    out.block_g.resize(static_cast<size_t>(n_blocks));
    out.block_n.resize(static_cast<size_t>(n_blocks));
    out.block_upper_fraction.resize(static_cast<size_t>(n_blocks));
    double upper_total = 0.0;
    for (int b = 0; b < n_blocks; ++b) {
        BlockAccum& acc = blocks[static_cast<size_t>(b)];
        auto& mean = out.block_g[static_cast<size_t>(b)];
        mean = std::move(acc.g_sum);
        for (auto& z : mean)
            z /= static_cast<double>(acc.n);
        for (int j = 0; j < n; ++j)
            out.g[static_cast<size_t>(j)] +=
                mean[static_cast<size_t>(j)] * static_cast<double>(acc.n);
        out.block_n[static_cast<size_t>(b)] = acc.n;
        out.block_upper_fraction[static_cast<size_t>(b)] =
            acc.upper_time / (static_cast<double>(acc.n) * cfg.t_total_us);
        upper_total += acc.upper_time;
    }
    for (auto& z : out.g)
        z /= static_cast<double>(cfg.n_trajectories);

    out.n_trajectories = cfg.n_trajectories;
    out.seed = cfg.seed;
    out.noise_floor = 1.0 / std::sqrt(static_cast<double>(cfg.n_trajectories));
    out.occupancy_upper =
        upper_total / (static_cast<double>(cfg.n_trajectories) * cfg.t_total_us);
    return out;
}

CoherenceResult coherence_from_samples(std::vector<double> t_us,
                                       std::vector<std::complex<double>> g) {
    if (t_us.size() != g.size() || t_us.size() < 2)
        throw SimulationError("coherence_from_samples: need matching grids, >= 2 samples");
    CoherenceResult out;
    out.t_us = std::move(t_us);
    out.g = std::move(g);
    out.n_trajectories = 0;
    out.noise_floor = 0.0;
    return out;
}

LineshapeResult lineshape_from_coherence(const CoherenceResult& coh,
                                         const LineshapeOptions& opt) {
    const size_t n = coh.g.size();
    if (n < 2 || coh.t_us.size() != n)
        throw SimulationError("lineshape: malformed coherence input");
    const double dt = coh.t_us[1] - coh.t_us[0];
    if (!(dt > 0))
        throw SimulationError("lineshape: time grid must be increasing");

    const double decay_threshold = std::max(1e-3, 3.0 * coh.noise_floor);
    if (std::abs(coh.g.back()) > decay_threshold)
        throw SimulationError("lineshape: |G(t_total)| = " +
                              std::to_string(std::abs(coh.g.back())) +
                              " has not decayed below " + std::to_string(decay_threshold) +
                              "; increase t_total");
    const double f_nyquist = 0.5 / dt;
    if (opt.delta_mhz > 0 && opt.delta_mhz >= f_nyquist)
        throw SimulationError("lineshape: delta exceeds the Nyquist frequency " +
                              std::to_string(f_nyquist) + " MHz; refine the time grid");

    LineshapeResult out;
    spectrum_from_g(coh.g, dt, opt.pad_factor, out.freq_mhz, out.spectrum,
                    out.integral_raw);

    const size_t peak = static_cast<size_t>(
        std::max_element(out.spectrum.begin(), out.spectrum.end()) - out.spectrum.begin());
    out.fwhm_mhz = fwhm_linear(out.freq_mhz, out.spectrum, peak);

    if (peak > 0 && peak + 1 < out.spectrum.size()) {
        const double ym = out.spectrum[peak - 1];
        const double y0 = out.spectrum[peak];
        const double yp = out.spectrum[peak + 1];
        const double denom = ym - 2.0 * y0 + yp;
        const double df = out.freq_mhz[1] - out.freq_mhz[0];
        out.peak_center_mhz =
            out.freq_mhz[peak] + (denom != 0.0 ? 0.5 * df * (ym - yp) / denom : 0.0);
    } else {
        out.peak_center_mhz = out.freq_mhz[peak];
    }

    // Block bootstrap over trajectory blocks for the FWHM standard error.
    const size_t n_blocks = coh.block_g.size();
    if (opt.n_bootstrap > 1 && n_blocks >= 2) {
        std::vector<double> fwhms;
        fwhms.reserve(static_cast<size_t>(opt.n_bootstrap));
        std::vector<std::complex<double>> g_rep(n);
        std::vector<double> freq_rep, spec_rep;
        for (int rep = 0; rep < opt.n_bootstrap; ++rep) {
            PhiloxStream rng(coh.seed ^ 0x626f6f74ULL, static_cast<std::uint64_t>(rep));
            std::fill(g_rep.begin(), g_rep.end(), std::complex<double>{0.0, 0.0});
            double n_tot = 0.0;
            for (size_t d = 0; d < n_blocks; ++d) {
                const size_t b = std::min(
                    n_blocks - 1, static_cast<size_t>(rng.u01() * static_cast<double>(n_blocks)));
                const double wb = static_cast<double>(coh.block_n[b]);
                for (size_t j = 0; j < n; ++j)
                    g_rep[j] += coh.block_g[b][j] * wb;
                n_tot += wb;
            }
            for (auto& z : g_rep)
                z /= n_tot;
            double raw = 0.0;
            try {
                spectrum_from_g(g_rep, dt, opt.pad_factor, freq_rep, spec_rep, raw);
                const size_t pk = static_cast<size_t>(
                    std::max_element(spec_rep.begin(), spec_rep.end()) - spec_rep.begin());
                fwhms.push_back(fwhm_linear(freq_rep, spec_rep, pk));
            } catch (const SimulationError&) {
                // a degenerate replicate contributes no width sample
            }
        }
        if (fwhms.size() >= 2) {
            double mean = 0.0;
            for (double f : fwhms)
                mean += f;
            mean /= static_cast<double>(fwhms.size());
            double var = 0.0;
            for (double f : fwhms)
                var += (f - mean) * (f - mean);
            var /= static_cast<double>(fwhms.size() - 1);
            out.stderr_fwhm_mhz = std::sqrt(var);
        }
    }
    return out;
}

FastExchangeReport validate_fast_exchange(const core::SpinParams& p, double w_down_mhz,
                                          double w_up_mhz, const McSettings& s) {
    const double delta = p.d_perp_mhz;
    if (!(w_down_mhz >= 20.0 * 2.0 * delta))
        throw SimulationError("validate_fast_exchange: regime violation, requires "
                              "w_down >= 20*(2 delta) = " +
                              std::to_string(40.0 * delta) + " MHz");

    const double u = w_up_mhz / w_down_mhz;
    const double beta = core::beta_from_ratio(u);
    const double fwhm_formula = beta * 2.0 * kPi * delta * delta / w_down_mhz;

    TelegraphConfig cfg;
    cfg.delta_mhz = delta;
    cfg.w_down_mhz = w_down_mhz;
    cfg.w_up_mhz = w_up_mhz;
    cfg.t_total_us = s.t_total_factor / fwhm_formula;
    cfg.n_trajectories = s.n_trajectories;
    cfg.n_time_samples = s.n_time_samples;
    cfg.seed = s.seed;
    cfg.n_workers = s.n_workers;

    const CoherenceResult coh = simulate_coherence(cfg);
    LineshapeOptions opt;
    opt.n_bootstrap = s.n_bootstrap;
    opt.delta_mhz = delta;
    const LineshapeResult line = lineshape_from_coherence(coh, opt);

    FastExchangeReport r;
    r.delta_mhz = delta;
    r.w_down_mhz = w_down_mhz;
    r.w_up_mhz = w_up_mhz;
    r.rate_ratio_u = u;
    r.beta = beta;
    r.fwhm_formula_mhz = fwhm_formula;
    r.fwhm_mc_mhz = line.fwhm_mhz;
    r.stderr_fwhm_mhz = line.stderr_fwhm_mhz;
    r.relative_error = (line.fwhm_mhz - fwhm_formula) / fwhm_formula;
    r.ci95_lo_mhz = line.fwhm_mhz - 1.96 * line.stderr_fwhm_mhz;
    r.ci95_hi_mhz = line.fwhm_mhz + 1.96 * line.stderr_fwhm_mhz;
    r.peak_center_mhz = line.peak_center_mhz;
    r.fast_exchange_ratio = w_down_mhz / (2.0 * delta);
    r.occupancy_upper = coh.occupancy_upper;
    r.occupancy_expected = w_up_mhz / (w_up_mhz + w_down_mhz);
    r.site_convention = "telegraph sites at +/- bare D_perp (the narrowing formula "
                        "carries no R(T) factor)";
    return r;
}

} // namespace nvep::mc
