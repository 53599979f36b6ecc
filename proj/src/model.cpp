#include "divopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace divopt {

DriftSpec DriftSpec::ou(double k, double mu_bar, double sigma_tilde) {
    if (k <= 0.0) throw std::invalid_argument("drift.k: must be > 0");
    if (sigma_tilde <= 0.0) throw std::invalid_argument("drift.sigma_tilde: must be > 0");
    return DriftSpec{OrnsteinUhlenbeck{k, mu_bar, sigma_tilde}};
}

DriftSpec DriftSpec::cir(double k, double mu_bar, double sigma_tilde, double a) {
    if (k <= 0.0) throw std::invalid_argument("drift.k: must be > 0");
    if (sigma_tilde <= 0.0) throw std::invalid_argument("drift.sigma_tilde: must be > 0");
    return DriftSpec{CoxIngersollRoss{k, mu_bar, sigma_tilde, a}};
}

DriftSpec DriftSpec::custom(std::function<double(double)> kappa,
                            std::function<double(double)> sigma_tilde, Interval domain) {
    if (!kappa || !sigma_tilde) throw std::invalid_argument("custom drift: missing function");
    if (!(domain.lo < domain.hi)) throw std::invalid_argument("custom drift: empty domain");
    return DriftSpec{CustomDrift{std::move(kappa), std::move(sigma_tilde), domain}};
}

Interval DriftSpec::domain() const {
    return std::visit(
        [](const auto& d) -> Interval {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, OrnsteinUhlenbeck>) {
                return Interval{};
            } else if constexpr (std::is_same_v<T, CoxIngersollRoss>) {
                return Interval{d.a, std::numeric_limits<double>::infinity()};
            } else {
                return d.domain;
            }
        },
        variant);
}

ModelParams::ModelParams(double r_, double sigma_, double rho_, DriftSpec drift_)
    : r(r_), sigma(sigma_), rho(rho_), drift(std::move(drift_)) {
    if (!(r > 0.0)) throw std::invalid_argument("model.r: must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("model.sigma: must be > 0");
    if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("model.rho: must be in [-1, 1]");
}

namespace {

void require_in_domain(const DriftSpec& drift, double mu) {
    if (!drift.domain().contains(mu))
        throw std::domain_error("mu outside drift domain: mu=" + std::to_string(mu));
}

}  // namespace

double ModelParams::kappa(double mu) const {
    require_in_domain(drift, mu);
    return std::visit(
        [mu](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, OrnsteinUhlenbeck>) {
                return d.k * (d.mu_bar - mu);
            } else if constexpr (std::is_same_v<T, CoxIngersollRoss>) {
                return d.k * (d.mu_bar - mu);
            } else {
                return d.kappa(mu);
            }
        },
        drift.variant);
}

double ModelParams::sigma_tilde(double mu) const {
    require_in_domain(drift, mu);
    return std::visit(
        [mu](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, OrnsteinUhlenbeck>) {
                return d.sigma_tilde;
            } else if constexpr (std::is_same_v<T, CoxIngersollRoss>) {
                return d.sigma_tilde * std::sqrt(std::max(0.0, mu - d.a));
            } else {
                return d.sigma_tilde(mu);
            }
        },
        drift.variant);
}

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) {
        return c.status != AssumptionCheck::Status::Fail;
    });
}

const AssumptionCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

ValidationReport validate_assumptions(const ModelParams& params, Interval check_interval,
                                      int n_samples) {
    if (n_samples < 2) throw std::invalid_argument("n_samples: must be >= 2");
    if (!params.domain().contains(check_interval))
        throw std::invalid_argument("check_interval: not contained in the drift domain");

    const double lo = check_interval.lo;
    const double hi = check_interval.hi;
    std::vector<double> mus(n_samples);
    for (int s = 0; s < n_samples; ++s)
        mus[s] = lo + (s * (hi - lo)) / (n_samples - 1);

    // Ratios larger than this count as an unbounded proxy.
    constexpr double kRatioBound = 1e8;

    ValidationReport report;

    // (a) mean reversion: -mu/kappa >= 0 and bounded at the largest sampled mu,
    // and the mirrored -kappa/mu check at the most negative sample.
    {
        AssumptionCheck check{"mean_reversion", AssumptionCheck::Status::NotChecked, {}, {}};
        bool evaluated = false;
        if (hi > 0.0) {
            evaluated = true;
            const double mu = mus.back();
            const double kap = params.kappa(mu);
            const double ratio = -mu / kap;
            if (!(kap < 0.0) || !(ratio >= 0.0) || !(ratio <= kRatioBound)) {
                check.status = AssumptionCheck::Status::Fail;
                check.offending_mus.push_back(mu);
                check.note = "-mu/kappa not a nonnegative bounded ratio at mu=" + std::to_string(mu);
            }
        }
        if (lo < 0.0) {
            evaluated = true;
            const double mu = mus.front();
            const double kap = params.kappa(mu);
            const double ratio = -kap / mu;
            if (!(kap > 0.0) || !(ratio >= 0.0) || !(ratio <= kRatioBound)) {
                check.status = AssumptionCheck::Status::Fail;
                check.offending_mus.push_back(mu);
                check.note += std::string(check.note.empty() ? "" : "; ") +
                              "-kappa/mu not a nonnegative bounded ratio at mu=" + std::to_string(mu);
            }
        }
        if (evaluated && check.status == AssumptionCheck::Status::NotChecked)
            check.status = AssumptionCheck::Status::Pass;
        report.checks.push_back(std::move(check));
    }

    // (b) sigma_tilde^2 in O(mu): ratio against |mu| bounded at both extremes.
    {
        AssumptionCheck check{"sigma_growth", AssumptionCheck::Status::Pass, {}, {}};
        for (double mu : {mus.front(), mus.back()}) {
            const double st2 = params.sigma_tilde(mu) * params.sigma_tilde(mu);
            const double ratio = st2 / std::max(1.0, std::abs(mu));
            if (!(ratio <= kRatioBound) || !std::isfinite(st2)) {
                check.status = AssumptionCheck::Status::Fail;
                check.offending_mus.push_back(mu);
                check.note = "sigma_tilde^2 grows faster than O(mu)";
            }
        }
        report.checks.push_back(std::move(check));
    }

    // (c) sigma_tilde > 0 at interior samples; zeros at the interval endpoints
    // are reported but do not fail the check (CIR vanishes exactly at mu = a).
    {
        AssumptionCheck check{"sigma_positive", AssumptionCheck::Status::Pass, {}, {}};
        for (int s = 0; s < n_samples; ++s) {
            const double st = params.sigma_tilde(mus[s]);
            if (st > 0.0) continue;
            check.offending_mus.push_back(mus[s]);
            if (s == 0 || s == n_samples - 1) {
                check.note = "sigma_tilde vanishes at a boundary sample";
            } else {
                check.status = AssumptionCheck::Status::Fail;
                check.note = "sigma_tilde vanishes at an interior sample";
            }
        }
        report.checks.push_back(std::move(check));
    }

    // Feller-type boundary conditions are not numerically checkable from
    // samples; standard variants are known to satisfy them.
    {
        AssumptionCheck check{"boundary_condition", AssumptionCheck::Status::NotChecked, {}, {}};
        if (!params.drift.is_custom()) {
            check.status = AssumptionCheck::Status::Pass;
            check.note = "standard variant";
        } else {
            check.note = "not checked for custom drifts";
        }
        report.checks.push_back(std::move(check));
    }

    return report;
}

}  // namespace divopt
