#include "hedgegap/functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hedgegap/roots.hpp"

namespace hedgegap::economy {

std::string to_string(FunctionFamily family) {
    switch (family) {
        case FunctionFamily::gaussian_bump: return "gaussian_bump";
        case FunctionFamily::logistic: return "logistic";
        case FunctionFamily::exponential: return "exponential";
        case FunctionFamily::custom_table: return "custom_table";
    }
    return "?";
}

FunctionFamily function_family_from_string(const std::string& name) {
    if (name == "gaussian_bump") return FunctionFamily::gaussian_bump;
    if (name == "logistic") return FunctionFamily::logistic;
    if (name == "exponential") return FunctionFamily::exponential;
    if (name == "custom_table") return FunctionFamily::custom_table;
    throw std::invalid_argument("unknown function family: " + name);
}

FunctionSpec FunctionSpec::gaussian_bump(double base, double peak, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian_bump: width must be > 0");
    if (!(peak > base)) throw std::invalid_argument("gaussian_bump: peak must exceed base");
    FunctionSpec f;
    f.family_ = FunctionFamily::gaussian_bump;
    f.p0_ = base;
    f.p1_ = peak;
    f.p2_ = width;
    return f;
}

FunctionSpec FunctionSpec::logistic(double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("logistic: scale must be > 0");
    FunctionSpec f;
    f.family_ = FunctionFamily::logistic;
    f.p1_ = scale;
    return f;
}

FunctionSpec FunctionSpec::exponential(double rate, double scale) {
    if (!(rate > 0.0 && scale > 0.0))
        throw std::invalid_argument("exponential: rate and scale must be > 0");
    FunctionSpec f;
    f.family_ = FunctionFamily::exponential;
    f.p0_ = rate;
    f.p1_ = scale;
    return f;
}

FunctionSpec FunctionSpec::custom_table(std::vector<double> xs, std::vector<double> ys) {
    if (xs.empty() || xs.size() != ys.size())
        throw std::invalid_argument("custom_table: need matching non-empty knot vectors");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::invalid_argument("custom_table: knots must be strictly increasing");
    FunctionSpec f;
    f.family_ = FunctionFamily::custom_table;
    f.xs_ = std::move(xs);
    f.ys_ = std::move(ys);
    return f;
}

double FunctionSpec::operator()(double x) const {
    switch (family_) {
        case FunctionFamily::gaussian_bump: {
            const double u = x / p2_;
            return p0_ + (p1_ - p0_) * std::exp(-0.5 * u * u);
        }
        case FunctionFamily::logistic:
            return 1.0 / (1.0 + std::exp(-x / p1_));
        case FunctionFamily::exponential:
            return p1_ * std::exp(p0_ * x);
        case FunctionFamily::custom_table: {
            if (x <= xs_.front()) return ys_.front();
            if (x >= xs_.back()) return ys_.back();
            const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
            const double u = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
            return (1.0 - u) * ys_[i] + u * ys_[i + 1];
        }
    }
    return 0.0;
}

double FunctionSpec::derivative(double x) const {
    switch (family_) {
        case FunctionFamily::gaussian_bump: {
            const double u = x / p2_;
            return -(p1_ - p0_) * (x / (p2_ * p2_)) * std::exp(-0.5 * u * u);
        }
        case FunctionFamily::logistic: {
            const double g = (*this)(x);
            return g * (1.0 - g) / p1_;
        }
        case FunctionFamily::exponential:
            return p0_ * p1_ * std::exp(p0_ * x);
        case FunctionFamily::custom_table: {
            if (x < xs_.front() || x > xs_.back() || xs_.size() == 1) return 0.0;
            auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            std::size_t i = static_cast<std::size_t>(it - xs_.begin());
            if (i == 0) i = 1;
            if (i == xs_.size()) i = xs_.size() - 1;
            return (ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]);
        }
    }
    return 0.0;
}

double FunctionSpec::limit_neg() const {
    switch (family_) {
        case FunctionFamily::gaussian_bump: return p0_;
        case FunctionFamily::logistic: return 0.0;
        case FunctionFamily::exponential: return 0.0;
        case FunctionFamily::custom_table: return ys_.front();
    }
    return 0.0;
}

double FunctionSpec::limit_pos() const {
    switch (family_) {
        case FunctionFamily::gaussian_bump: return p0_;
        case FunctionFamily::logistic: return 1.0;
        case FunctionFamily::exponential: return std::numeric_limits<double>::infinity();
        case FunctionFamily::custom_table: return ys_.back();
    }
    return 0.0;
}

bool FunctionSpec::bounded() const { return std::isfinite(limit_pos()) && std::isfinite(limit_neg()); }

bool FunctionSpec::convex() const { return family_ == FunctionFamily::exponential; }

double FunctionSpec::invert_on(double level, double xlo, double xhi, double tol) const {
    auto shifted = [&](double x) { return (*this)(x)-level; };
    return mathkit::brent_root(shifted, xlo, xhi, tol);
}

double FelicitySpec::marginal(double x) const {
    if (!(x > 0.0)) throw std::domain_error("felicity: marginal utility needs consumption > 0");
    switch (kind) {
        case Kind::log: return 1.0 / x;
        case Kind::crra: return std::pow(x, -crra_eta);
    }
    return 0.0;
}

std::string FelicitySpec::name() const {
    return kind == Kind::log ? "log" : ("crra(" + std::to_string(crra_eta) + ")");
}

}  // namespace hedgegap::economy
