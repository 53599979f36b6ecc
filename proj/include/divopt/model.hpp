#pragma once

#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace divopt {

/// Closed interval of profitability values; endpoints may be infinite.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double mu) const { return mu >= lo && mu <= hi; }
    bool contains(const Interval& other) const { return other.lo >= lo && other.hi <= hi; }
};

/// dmu = k (mu_bar - mu) dt + sigma_tilde dW~ on the whole real line.
struct OrnsteinUhlenbeck {
    double k;
    double mu_bar;
    double sigma_tilde;
};

/// dmu = k (mu_bar - mu) dt + sigma_tilde sqrt(mu - a) dW~ on [a, inf).
struct CoxIngersollRoss {
    double k;
    double mu_bar;
    double sigma_tilde;
    double a;
};

/// User-supplied drift/volatility functions on an interval.
/// kappa and sigma_tilde^2 must be locally Lipschitz on the interior and
/// sigma_tilde > 0 there; this is sampled, not proven (see validate_assumptions).
struct CustomDrift {
    std::function<double(double)> kappa;
    std::function<double(double)> sigma_tilde;
    Interval domain;
};

struct DriftSpec {
    std::variant<OrnsteinUhlenbeck, CoxIngersollRoss, CustomDrift> variant;

    static DriftSpec ou(double k, double mu_bar, double sigma_tilde);
    static DriftSpec cir(double k, double mu_bar, double sigma_tilde, double a);
    static DriftSpec custom(std::function<double(double)> kappa,
                            std::function<double(double)> sigma_tilde, Interval domain);

    Interval domain() const;
    bool is_custom() const { return std::holds_alternative<CustomDrift>(variant); }
};

/// Global model parameters: discount rate r, cash-flow volatility sigma,
/// correlation rho between the cash and profitability noises, and the
/// profitability dynamics. Immutable after construction; rates are per year.
struct ModelParams {
    double r;
    double sigma;
    double rho;
    DriftSpec drift;

    ModelParams(double r, double sigma, double rho, DriftSpec drift);

    /// Drift rate kappa(mu). Throws std::domain_error outside the drift domain.
    double kappa(double mu) const;
    /// Volatility sigma_tilde(mu). Throws std::domain_error outside the domain.
    double sigma_tilde(double mu) const;
    Interval domain() const { return drift.domain(); }
};

struct AssumptionCheck {
    enum class Status { Pass, Fail, NotChecked };
    std::string name;
    Status status;
    std::vector<double> offending_mus;
    std::string note;
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;

    bool all_passed() const;
    const AssumptionCheck* find(const std::string& name) const;
};

/// Samples kappa and sigma_tilde on [interval.lo, interval.hi] and reports
/// proxies for the standing assumptions: mean reversion at large |mu|,
/// sigma_tilde^2 growing at most linearly, and sigma_tilde > 0 on interior
/// samples. Report-only; never throws for assumption failures.
ValidationReport validate_assumptions(const ModelParams& params, Interval check_interval,
                                      int n_samples);

}  // namespace divopt
