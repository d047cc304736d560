#include "relia/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <limits>

namespace relia {

std::string_view to_string(Arithmetic mode) {
    return mode == Arithmetic::Exact ? "exact" : "float";
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedModel: return "MalformedModel";
        case ErrorCode::DuplicateName: return "DuplicateName";
        case ErrorCode::UnknownStateOrAction: return "UnknownStateOrAction";
        case ErrorCode::EmptyFailureSet: return "EmptyFailureSet";
        case ErrorCode::FailureSetIsAllStates: return "FailureSetIsAllStates";
        case ErrorCode::EmptyActionSet: return "EmptyActionSet";
        case ErrorCode::BadRowSum: return "BadRowSum";
        case ErrorCode::NegativeProbability: return "NegativeProbability";
        case ErrorCode::InvalidPolicy: return "InvalidPolicy";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::ModelMismatch: return "ModelMismatch";
        case ErrorCode::TooManyPolicies: return "TooManyPolicies";
        case ErrorCode::PolicyOutsideClass: return "PolicyOutsideClass";
        case ErrorCode::EmptyGStar: return "EmptyGStar";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
        case ErrorCode::OutOfRangeSolution: return "OutOfRangeSolution";
        case ErrorCode::CoverageMismatch: return "CoverageMismatch";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::IterationBudgetExceeded: return "IterationBudgetExceeded";
        case ErrorCode::NoUniformMinimizer: return "NoUniformMinimizer";
    }
    return "Unknown";
}

nlohmann::ordered_json Error::to_json() const {
    nlohmann::ordered_json out;
    out["code"] = std::string(to_string(code_));
    out["message"] = what();
    if (!details_.is_null()) out["details"] = details_;
    return out;
}

std::size_t StateSet::size() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

StateSet& StateSet::operator|=(const StateSet& other) {
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (other.bits_[i]) bits_[i] = true;
    return *this;
}

StateSet& StateSet::operator-=(const StateSet& other) {
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (other.bits_[i]) bits_[i] = false;
    return *this;
}

StateSet StateSet::complement() const {
    StateSet out(bits_.size());
    for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = !bits_[i];
    return out;
}

bool StateSet::is_subset_of(const StateSet& other) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i] && !other.bits_[i]) return false;
    return true;
}

bool StateSet::intersects(const StateSet& other) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i] && other.bits_[i]) return true;
    return false;
}

std::vector<StateId> StateSet::members() const {
    std::vector<StateId> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) out.push_back(StateId{i});
    return out;
}

std::string Num<double>::format(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string Num<Rational>::format(const Rational& x) {
    return x.get_str();
}

namespace {

[[noreturn]] void bad_literal(std::string_view text) {
    throw Error(ErrorCode::MalformedModel,
                "malformed probability literal '" + std::string(text) + "'",
                {{"literal", std::string(text)}});
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                      [](char c) { return c >= '0' && c <= '9'; });
}

mpz_class parse_integer(std::string_view digits) {
    return mpz_class(std::string(digits), 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const auto original = text;
    text = trim(text);
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    Rational value;
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto num = trim(text.substr(0, slash));
        const auto den = trim(text.substr(slash + 1));
        if (!all_digits(num) || !all_digits(den)) bad_literal(original);
        const mpz_class d = parse_integer(den);
        if (d == 0) bad_literal(original);
        value = Rational(parse_integer(num), d);
        value.canonicalize();
    } else {
        std::string_view mantissa = text;
        long exponent = 0;
        if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
            mantissa = text.substr(0, e);
            auto exp_text = text.substr(e + 1);
            bool exp_negative = false;
            if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
                exp_negative = exp_text.front() == '-';
                exp_text.remove_prefix(1);
            }
            if (!all_digits(exp_text) || exp_text.size() > 6) bad_literal(original);
            std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
            if (exp_negative) exponent = -exponent;
        }
        std::string digits;
        const auto dot = mantissa.find('.');
        if (dot == std::string_view::npos) {
            if (!all_digits(mantissa)) bad_literal(original);
            digits = mantissa;
        } else {
            const auto whole = mantissa.substr(0, dot);
            const auto frac = mantissa.substr(dot + 1);
            if (whole.empty() && frac.empty()) bad_literal(original);
            if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)))
                bad_literal(original);
            digits = std::string(whole) + std::string(frac);
            exponent -= static_cast<long>(frac.size());
        }
        mpz_class num = parse_integer(digits);
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
        if (exponent >= 0) {
            value = Rational(num * scale);
        } else {
            value = Rational(num, scale);
            value.canonicalize();
        }
    }
    return negative ? Rational(-value) : value;
}

double parse_double(std::string_view text) {
    // Syntax check shared with the exact parser.
    const Rational exact = parse_rational(text);
    const auto trimmed = trim(text);
    if (trimmed.find('/') != std::string_view::npos) {
        const mpz_class limit = mpz_class(1) << 53;
        if (abs(exact.get_num()) <= limit && exact.get_den() <= limit)
            return exact.get_num().get_d() / exact.get_den().get_d();
        return exact.get_d();
    }
    auto body = trimmed;
    if (!body.empty() && body.front() == '+') body.remove_prefix(1);
    double out = 0.0;
    std::from_chars(body.data(), body.data() + body.size(), out);
    return out;
}

}  // namespace relia
