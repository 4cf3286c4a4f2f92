#include "distsec/numeric.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <cmath>
#include <cstdlib>

namespace distsec {

double to_double(const Rational& q)
{
    const double t = q.get_d();
    if (!std::isfinite(t))
        return t;
    // get_d rounds toward zero; the nearest double is t or its neighbour away from zero.
    const double away = std::nextafter(t, q.get_num() < 0 ? -INFINITY : INFINITY);
    if (!std::isfinite(away))
        return t;
    const Rational dt = abs(q - Rational(t));
    const Rational da = abs(q - Rational(away));
    if (da < dt)
        return away;
    if (da == dt) {
        // ties to even mantissa
        return (std::bit_cast<std::uint64_t>(t) & 1U) ? away : t;
    }
    return t;
}

std::string to_string(const Rational& q)
{
    return q.get_str();
}

namespace {

bool all_digits(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

std::string_view strip_sign(std::string_view s)
{
    if (!s.empty() && (s.front() == '-' || s.front() == '+'))
        s.remove_prefix(1);
    return s;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

struct DecimalParts {
    bool negative = false;
    std::string digits;   // integer and fractional digits concatenated
    long scale = 0;       // value = digits * 10^scale
};

std::optional<DecimalParts> split_decimal(std::string_view s)
{
    DecimalParts out;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        out.negative = s.front() == '-';
        s.remove_prefix(1);
    }
    std::string_view mantissa = s;
    std::string_view exponent;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = s.substr(0, e);
        exponent = s.substr(e + 1);
        if (!exponent.empty() && (exponent.front() == '-' || exponent.front() == '+')) {
            if (!all_digits(exponent.substr(1)))
                return std::nullopt;
        } else if (!all_digits(exponent)) {
            return std::nullopt;
        }
        if (exponent.size() > 6)
            return std::nullopt;
    }
    std::string_view whole = mantissa, frac;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
        whole = mantissa.substr(0, dot);
        frac = mantissa.substr(dot + 1);
    }
    if (whole.empty() && frac.empty())
        return std::nullopt;
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)))
        return std::nullopt;
    out.digits = std::string(whole) + std::string(frac);
    out.scale = -static_cast<long>(frac.size());
    if (!exponent.empty())
        out.scale += std::strtol(std::string(exponent).c_str(), nullptr, 10);
    return out;
}

} // namespace

LiteralKind classify_literal(std::string_view text)
{
    const auto s = trim(text);
    const auto body = strip_sign(s);
    if (all_digits(body))
        return LiteralKind::integer;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        const auto den = body.substr(slash + 1);
        if (all_digits(body.substr(0, slash)) && all_digits(den) && den.find_first_not_of('0') != std::string_view::npos)
            return LiteralKind::fraction;
        return LiteralKind::invalid;
    }
    return split_decimal(s) ? LiteralKind::decimal : LiteralKind::invalid;
}

std::optional<Rational> parse_rational(std::string_view text)
{
    const auto s = trim(text);
    switch (classify_literal(s)) {
    case LiteralKind::integer:
    case LiteralKind::fraction: {
        std::string str(s.front() == '+' ? s.substr(1) : s);
        Rational q;
        if (q.set_str(str, 10) != 0)
            return std::nullopt;
        q.canonicalize();
        return q;
    }
    case LiteralKind::decimal: {
        const auto parts = split_decimal(s);
        mpz_class num(parts->digits, 10);
        mpz_class pow10;
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(parts->scale)));
        Rational q = parts->scale >= 0 ? Rational(num * pow10) : Rational(num, pow10);
        q.canonicalize();
        if (parts->negative)
            q = -q;
        return q;
    }
    case LiteralKind::invalid:
        break;
    }
    return std::nullopt;
}

std::optional<double> parse_real(std::string_view text)
{
    const auto s = trim(text);
    const auto kind = classify_literal(s);
    if (kind == LiteralKind::invalid)
        return std::nullopt;
    if (kind == LiteralKind::fraction)
        return to_double(*parse_rational(s));
    const std::string str(s);
    char* end = nullptr;
    const double v = std::strtod(str.c_str(), &end);
    if (end != str.c_str() + str.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

} // namespace distsec
