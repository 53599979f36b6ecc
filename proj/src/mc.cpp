#include "divopt/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace divopt {

double default_horizon(double r) { return std::log(1e4) / r; }

namespace {

inline std::uint64_t splitmix64(std::uint64_t& z) {
    z += 0x9e3779b97f4a7c15ULL;
    std::uint64_t t = z;
    t = (t ^ (t >> 30)) * 0xbf58476d1ce4e5b9ULL;
    t = (t ^ (t >> 27)) * 0x94d049bb133111ebULL;
    return t ^ (t >> 31);
}

class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& word : state_) word = splitmix64(z);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

// Ziggurat tables for the standard normal (Doornik's ZIGNOR layout).
constexpr int kZigLayers = 128;
constexpr double kZigR = 3.442619855899;
constexpr double kZigV = 9.91256303526217e-3;

struct ZigTables {
    double x[kZigLayers + 1];
    double ratio[kZigLayers];

    ZigTables() {
        double f = std::exp(-0.5 * kZigR * kZigR);
        x[0] = kZigV / f;
        x[1] = kZigR;
        x[kZigLayers] = 0.0;
        for (int i = 2; i < kZigLayers; ++i) {
            x[i] = std::sqrt(-2.0 * std::log(kZigV / x[i - 1] + f));
            f = std::exp(-0.5 * x[i] * x[i]);
        }
        for (int i = 0; i < kZigLayers; ++i) ratio[i] = x[i + 1] / x[i];
    }
};

const ZigTables& zig_tables() {
    static const ZigTables tables;
    return tables;
}

class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed), tab_(zig_tables()) {}

    double operator()() {
        for (;;) {
            const std::uint64_t bits = rng_.next();
            const int layer = static_cast<int>(bits & 0x7f);
            const double u = 2.0 * uniform_from(bits) - 1.0;
            if (std::abs(u) < tab_.ratio[layer]) return u * tab_.x[layer];
            if (layer == 0) return tail(u < 0.0);
            const double value = u * tab_.x[layer];
            const double f0 = std::exp(-0.5 * (tab_.x[layer] * tab_.x[layer] - value * value));
            const double f1 =
                std::exp(-0.5 * (tab_.x[layer + 1] * tab_.x[layer + 1] - value * value));
            if (f1 + uniform() * (f0 - f1) < 1.0) return value;
        }
    }

private:
    static double uniform_from(std::uint64_t bits) {
        return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    }
    double uniform() { return uniform_from(rng_.next()); }

    double tail(bool negative) {
        double x, y;
        do {
            x = std::log(uniform()) / kZigR;
            y = std::log(uniform());
        } while (-2.0 * y < x * x);
        return negative ? x - kZigR : kZigR - x;
    }

    Xoshiro256pp rng_;
    const ZigTables& tab_;
};

struct OuDrift {
    double k, mu_bar, st;
    double kappa(double mu) const { return k * (mu_bar - mu); }
    double sigma_tilde(double) const { return st; }
    double clamp(double mu) const { return mu; }
};

struct CirDrift {
    double k, mu_bar, st, a;
    double kappa(double mu) const { return k * (mu_bar - mu); }
    double sigma_tilde(double mu) const { return st * std::sqrt(std::max(0.0, mu - a)); }
    double clamp(double mu) const { return std::max(mu, a); }
};

struct GenericDrift {
    const ModelParams* model;
    Interval dom;
    double kappa(double mu) const { return model->kappa(mu); }
    double sigma_tilde(double mu) const { return model->sigma_tilde(mu); }
    double clamp(double mu) const { return std::clamp(mu, dom.lo, dom.hi); }
};

struct FlatBoundaries {
    double mu_front;
    double inv_step;
    int n_cols;
    double mu_star;  // -inf when absent
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<char> retains;
};

FlatBoundaries flatten(const Boundaries& b) {
    FlatBoundaries f;
    f.n_cols = static_cast<int>(b.mus.size());
    f.mu_front = b.mus.front();
    f.inv_step = f.n_cols > 1 ? 1.0 / (b.mus[1] - b.mus[0]) : 0.0;
    f.mu_star = b.mu_star ? *b.mu_star : -std::numeric_limits<double>::infinity();
    f.lower.resize(f.n_cols);
    f.upper.resize(f.n_cols);
    f.retains.resize(f.n_cols);
    for (int j = 0; j < f.n_cols; ++j) {
        f.retains[j] = b.lower[j].has_value() && b.upper[j].has_value();
        f.lower[j] = f.retains[j] ? *b.lower[j] : 0.0;
        f.upper[j] = f.retains[j] ? *b.upper[j] : 0.0;
    }
    return f;
}

enum : std::uint8_t { kLiquidated = 0, kRuined = 1, kCensored = 2 };

template <typename Drift>
void run_paths(const Drift& drift, const FlatBoundaries& fb, const ModelParams& model,
               const SimConfig& cfg, double x0, double mu0, long max_steps, bool antithetic,
               int begin, int end, std::vector<double>& payoffs, std::vector<std::uint8_t>& status) {
    const double dt = cfg.dt;
    const double sqdt = std::sqrt(dt);
    const double dfac = std::exp(-model.r * dt);
    const double sigma = model.sigma;
    const double rho = model.rho;
    const double rho_c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    const double sign = antithetic ? -1.0 : 1.0;

    for (int p = begin; p < end; ++p) {
        std::uint64_t z = cfg.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(p + 1));
        NormalSampler normal(splitmix64(z));

        double x = x0;
        double mu = mu0;
        double disc = 1.0;
        double pay = 0.0;
        std::uint8_t outcome = kCensored;

        for (long s = 0; s < max_steps; ++s) {
            int col = static_cast<int>((mu - fb.mu_front) * fb.inv_step + 0.5);
            col = std::clamp(col, 0, fb.n_cols - 1);
            if (mu <= fb.mu_star || !fb.retains[col] || x < fb.lower[col]) {
                pay += disc * x;  // liquidate: pay out all cash
                outcome = kLiquidated;
                break;
            }
            if (x > fb.upper[col]) {  // discrete reflection at the dividend barrier
                pay += disc * (x - fb.upper[col]);
                x = fb.upper[col];
            }
            const double z1 = sign * normal();
            const double z2 = sign * normal();
            x += mu * dt + sigma * sqdt * z1;
            mu += drift.kappa(mu) * dt + drift.sigma_tilde(mu) * sqdt * (rho * z1 + rho_c * z2);
            mu = drift.clamp(mu);
            disc *= dfac;
            if (x < 0.0) {
                outcome = kRuined;
                break;
            }
        }
        payoffs[p] = pay;
        status[p] = outcome;
    }
}

}  // namespace

McEstimate simulate_policy(const ModelParams& model, const Boundaries& boundaries, double x0,
                           double mu0, const SimConfig& cfg_in, int threads, bool antithetic) {
    SimConfig cfg = cfg_in;
    if (cfg.t_horizon == 0.0) cfg.t_horizon = default_horizon(model.r);
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("mc.dt: must be > 0");
    if (!(cfg.t_horizon >= 100.0 * cfg.dt))
        throw std::invalid_argument("mc.t_horizon: must be >= 100 * dt");
    if (cfg.n_paths < 100) throw std::invalid_argument("mc.n_paths: must be >= 100");
    if (x0 < boundaries.x_min || x0 > boundaries.x_max || mu0 < boundaries.mus.front() ||
        mu0 > boundaries.mus.back())
        throw std::invalid_argument("mc start point outside the grid box");

    const FlatBoundaries fb = flatten(boundaries);
    const long max_steps = static_cast<long>(std::ceil(cfg.t_horizon / cfg.dt));

    std::vector<double> payoffs(cfg.n_paths);
    std::vector<std::uint8_t> status(cfg.n_paths);

    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::clamp(n_threads, 1, cfg.n_paths);

    auto dispatch = [&](auto&& drift) {
        auto worker = [&](int begin, int end) {
            run_paths(drift, fb, model, cfg, x0, mu0, max_steps, antithetic, begin, end, payoffs,
                      status);
        };
        if (n_threads == 1) {
            worker(0, cfg.n_paths);
            return;
        }
        std::vector<std::thread> pool;
        const int chunk = (cfg.n_paths + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const int begin = t * chunk;
            const int end = std::min(cfg.n_paths, begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    };

    if (const auto* ou = std::get_if<OrnsteinUhlenbeck>(&model.drift.variant)) {
        dispatch(OuDrift{ou->k, ou->mu_bar, ou->sigma_tilde});
    } else if (const auto* cir = std::get_if<CoxIngersollRoss>(&model.drift.variant)) {
        dispatch(CirDrift{cir->k, cir->mu_bar, cir->sigma_tilde, cir->a});
    } else {
        dispatch(GenericDrift{&model, model.domain()});
    }

    // Serial reduction in path order keeps results thread-count independent;
    // extended precision keeps degenerate (constant-payoff) estimates exact.
    McEstimate est;
    long double sum = 0.0L;
    for (int p = 0; p < cfg.n_paths; ++p) {
        sum += payoffs[p];
        if (status[p] == kRuined) ++est.n_ruined;
        if (status[p] == kCensored) ++est.n_censored;
    }
    est.mean = static_cast<double>(sum / cfg.n_paths);
    long double ss = 0.0L;
    for (int p = 0; p < cfg.n_paths; ++p) {
        const long double d = payoffs[p] - est.mean;
        ss += d * d;
    }
    est.std_error = static_cast<double>(
        std::sqrt(ss / (static_cast<long double>(cfg.n_paths) * std::max(1, cfg.n_paths - 1))));
    return est;
}

}  // namespace divopt
