#include "hedgegap/market.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "hedgegap/common.hpp"
#include "hedgegap/report.hpp"

namespace hedgegap::economy {

void MarketModel::validate() const {
    quadrature.validate();
    if (!(horizon > 0.0)) throw ModelError("model invalid: horizon T must be > 0");
    const double f0 = endowment(0.0);
    if (!(f0 > 3.0 && f0 < 4.0))
        throw ModelError("model invalid: f(0) = " + format_double(f0) +
                         " must lie in (3,4) so that both endowments stay positive");
    const double base = endowment.limit_neg();
    if (endowment.limit_pos() != base)
        throw ModelError("model invalid: endowment limits at -inf and +inf must agree");
    if (!(base > 0.0 && base < f0))
        throw ModelError("model invalid: endowment tail level must lie in (0, f(0))");
    // unimodality: increasing left of 0, decreasing right of 0 (grid check)
    for (int k = 1; k <= 64; ++k) {
        const double step = quadrature.truncation_width * std::sqrt(horizon) / 64.0;
        const double xl = -step * k, xr = step * k;
        if (endowment.derivative(xl) < 0.0 || endowment.derivative(xr) > 0.0)
            throw ModelError("model invalid: endowment must increase on (-inf,0) and decrease on (0,inf)");
    }
    const double g = mathkit::expect_terminal(
        [this](double x) { return endowment(x); }, mathkit::NormalLaw(0.0, horizon), quadrature);
    if (!(g < 2.0))
        throw ModelError("model invalid: mean terminal endowment gamma = " + format_double(g) +
                         " must be < 2");
    if (asset1.family() == FunctionFamily::gaussian_bump ||
        asset1.family() == FunctionFamily::custom_table)
        throw ModelError("model invalid: risky payoff must be strictly increasing (logistic or exponential)");
}

MarketModel default_market() { return MarketModel{}; }

MarketModel default_market_exponential() {
    MarketModel m;
    m.asset1 = FunctionSpec::exponential(1.0, 1.0);
    return m;
}

namespace {

using KvMap = std::map<std::string, std::string>;

KvMap read_kv(std::istream& in, const std::string& origin) {
    KvMap map;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
        map[section.empty() ? key : section + "." + key] = value;
    }
    return map;
}

double parse_double(const KvMap& map, const std::string& key, double fallback, bool* seen = nullptr) {
    auto it = map.find(key);
    if (it == map.end()) return fallback;
    if (seen) *seen = true;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0')
        throw ConfigError("config: key '" + key + "' is not a number: " + it->second);
    return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw ConfigError("config: key '" + key + "' has a non-numeric entry: " + tok);
        out.push_back(v);
    }
    return out;
}

FunctionSpec parse_function(const KvMap& map, const std::string& section,
                            const FunctionSpec& fallback) {
    auto fam_it = map.find(section + ".family");
    if (fam_it == map.end()) return fallback;
    const FunctionFamily fam = function_family_from_string(fam_it->second);
    switch (fam) {
        case FunctionFamily::gaussian_bump:
            return FunctionSpec::gaussian_bump(parse_double(map, section + ".base", 1.0),
                                               parse_double(map, section + ".peak", 3.5),
                                               parse_double(map, section + ".width", 0.4));
        case FunctionFamily::logistic:
            return FunctionSpec::logistic(parse_double(map, section + ".scale", 1.0));
        case FunctionFamily::exponential:
            return FunctionSpec::exponential(parse_double(map, section + ".rate", 1.0),
                                             parse_double(map, section + ".scale", 1.0));
        case FunctionFamily::custom_table: {
            auto xs_it = map.find(section + ".knots_x");
            auto ys_it = map.find(section + ".knots_y");
            if (xs_it == map.end() || ys_it == map.end())
                throw ConfigError("config: custom_table needs knots_x and knots_y in [" + section + "]");
            return FunctionSpec::custom_table(parse_list(xs_it->second, section + ".knots_x"),
                                              parse_list(ys_it->second, section + ".knots_y"));
        }
    }
    return fallback;
}

const char* const kKnownKeys[] = {
    "model.horizon",
    "model.endowment.family", "model.endowment.base", "model.endowment.peak",
    "model.endowment.width", "model.endowment.scale", "model.endowment.rate",
    "model.endowment.knots_x", "model.endowment.knots_y",
    "model.asset1.family", "model.asset1.base", "model.asset1.peak", "model.asset1.width",
    "model.asset1.scale", "model.asset1.rate", "model.asset1.knots_x", "model.asset1.knots_y",
    "model.felicity.family", "model.felicity.eta",
    "quadrature.node_count", "quadrature.truncation_width", "quadrature.absolute_tolerance",
};

}  // namespace

MarketModel parse_market_config(std::istream& in, const std::string& origin) {
    const KvMap map = read_kv(in, origin);
    for (const auto& [key, value] : map) {
        bool known = false;
        for (const char* k : kKnownKeys) known = known || key == k;
        if (!known) throw ConfigError("config: unknown key '" + key + "' in " + origin);
    }
    MarketModel m;
    m.horizon = parse_double(map, "model.horizon", 1.0);
    m.endowment = parse_function(map, "model.endowment", m.endowment);
    m.asset1 = parse_function(map, "model.asset1", m.asset1);
    if (auto it = map.find("model.felicity.family"); it != map.end()) {
        if (it->second == "log") {
            m.felicity.kind = FelicitySpec::Kind::log;
        } else if (it->second == "crra") {
            m.felicity.kind = FelicitySpec::Kind::crra;
            m.felicity.crra_eta = parse_double(map, "model.felicity.eta", 2.0);
            if (!(m.felicity.crra_eta > 0.0))
                throw ConfigError("config: model.felicity.eta must be > 0");
        } else {
            throw ConfigError("config: model.felicity.family must be log or crra");
        }
    }
    m.quadrature.node_count =
        static_cast<int>(parse_double(map, "quadrature.node_count", m.quadrature.node_count));
    m.quadrature.truncation_width =
        parse_double(map, "quadrature.truncation_width", m.quadrature.truncation_width);
    m.quadrature.absolute_tolerance =
        parse_double(map, "quadrature.absolute_tolerance", m.quadrature.absolute_tolerance);
    m.quadrature.validate();
    return m;
}

MarketModel load_market_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open file: " + path);
    return parse_market_config(in, path);
}

namespace {
void write_function(std::ostream& out, const std::string& section, const FunctionSpec& f) {
    out << "[" << section << "]\n";
    out << "family = " << to_string(f.family()) << "\n";
    switch (f.family()) {
        case FunctionFamily::gaussian_bump:
            out << "base = " << format_double(f.base()) << "\n";
            out << "peak = " << format_double(f.peak()) << "\n";
            out << "width = " << format_double(f.width()) << "\n";
            break;
        case FunctionFamily::logistic:
            out << "scale = " << format_double(f.scale()) << "\n";
            break;
        case FunctionFamily::exponential:
            out << "rate = " << format_double(f.rate()) << "\n";
            out << "scale = " << format_double(f.scale()) << "\n";
            break;
        case FunctionFamily::custom_table: {
            out << "knots_x =";
            for (double x : f.knots_x()) out << " " << format_double(x);
            out << "\nknots_y =";
            for (double y : f.knots_y()) out << " " << format_double(y);
            out << "\n";
            break;
        }
    }
}
}  // namespace

void save_market_config(const MarketModel& model, std::ostream& out) {
    out << "[model]\n";
    out << "horizon = " << format_double(model.horizon) << "\n\n";
    write_function(out, "model.endowment", model.endowment);
    out << "\n";
    write_function(out, "model.asset1", model.asset1);
    out << "\n[model.felicity]\n";
    if (model.felicity.kind == FelicitySpec::Kind::log) {
        out << "family = log\n";
    } else {
        out << "family = crra\n";
        out << "eta = " << format_double(model.felicity.crra_eta) << "\n";
    }
    out << "\n[quadrature]\n";
    out << "node_count = " << model.quadrature.node_count << "\n";
    out << "truncation_width = " << format_double(model.quadrature.truncation_width) << "\n";
    out << "absolute_tolerance = " << format_double(model.quadrature.absolute_tolerance) << "\n";
}

std::string resolved_config_text(const MarketModel& model) {
    std::ostringstream os;
    save_market_config(model, os);
    return os.str();
}

}  // namespace hedgegap::economy
