#pragma once

#include <iosfwd>
#include <string>

#include "hedgegap/functions.hpp"
#include "hedgegap/quadrature.hpp"

namespace hedgegap::economy {

/// The single source of truth for an economy instance: horizon, endowment
/// bump f (consumer 1 holds f(B(T)), consumer 2 holds 4 - f(B(T))), the
/// risky payoff g (asset 0 is the unit bond), the felicity, and quadrature
/// settings.
struct MarketModel {
    double horizon = 1.0;
    FunctionSpec endowment = FunctionSpec::gaussian_bump(1.0, 3.5, 0.4);
    FunctionSpec asset1 = FunctionSpec::logistic(1.0);
    FelicitySpec felicity;
    mathkit::QuadratureConfig quadrature;

    /// Checks the construction conditions and throws ModelError naming the
    /// violated one:  f(0) in (3,4) (so both endowments stay positive),
    /// unimodal f with limits equal to its base, and E[f(B(T))] < 2.
    void validate() const;
};

MarketModel default_market();

/// With the exponential risky asset of the unbounded-payoff scenario.
MarketModel default_market_exponential();

/// Human-readable nested key-value config, sections [model],
/// [model.endowment], [model.asset1], [model.felicity], [quadrature].
/// Unknown keys are rejected. Missing keys take the documented defaults.
MarketModel load_market_config(const std::string& path);
MarketModel parse_market_config(std::istream& in, const std::string& origin);
void save_market_config(const MarketModel& model, std::ostream& out);

/// The resolved configuration as "section.key = value" lines; embedded in
/// every report for auditability. Deterministic formatting.
std::string resolved_config_text(const MarketModel& model);

}  // namespace hedgegap::economy
