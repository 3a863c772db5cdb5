#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mineplan {

// ---------------------------------------------------------------------------
// Decimal-scaled parsing/formatting.
//
// Grade columns are stored as percent on disk and as mass fraction in memory.
// Multiplying a binary double by 100 and dividing again is not a bitwise
// round trip, so the scaling is done on the decimal text instead: the decimal
// exponent is shifted before the (single) string<->double conversion.
// ---------------------------------------------------------------------------

namespace detail {

struct DecimalParts {
    bool negative = false;
    std::string digits;  // all significant digits, no dot
    long exponent = 0;   // value = digits * 10^exponent
};

inline bool split_decimal(std::string_view text, DecimalParts& out) {
    out = DecimalParts{};
    size_t i = 0;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        out.negative = (text[i] == '-');
        ++i;
    }
    bool any_digit = false;
    long frac_digits = 0;
    bool seen_dot = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c >= '0' && c <= '9') {
            any_digit = true;
            out.digits.push_back(c);
            if (seen_dot) ++frac_digits;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!any_digit) return false;
    long exp10 = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool exp_neg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            exp_neg = (text[i] == '-');
            ++i;
        }
        if (i >= text.size()) return false;
        long v = 0;
        for (; i < text.size(); ++i) {
            char c = text[i];
            if (c < '0' || c > '9') return false;
            v = v * 10 + (c - '0');
            if (v > 100000) return false;
        }
        exp10 = exp_neg ? -v : v;
    }
    if (i != text.size()) return false;
    out.exponent = exp10 - frac_digits;
    // strip leading zeros (keep at least one digit)
    size_t nz = out.digits.find_first_not_of('0');
    if (nz == std::string::npos) {
        out.digits = "0";
        out.exponent = 0;
    } else if (nz > 0) {
        out.digits.erase(0, nz);
    }
    // strip trailing zeros into the exponent
    while (out.digits.size() > 1 && out.digits.back() == '0') {
        out.digits.pop_back();
        ++out.exponent;
    }
    return true;
}

inline std::string render_decimal(const DecimalParts& p) {
    // value = digits * 10^exponent, rendered without information loss
    std::string s;
    if (p.negative && p.digits != "0") s.push_back('-');
    const long n = static_cast<long>(p.digits.size());
    const long point = n + p.exponent;  // digits of integer part
    if (p.digits == "0") return "0";
    if (p.exponent >= 0 && point <= 21) {
        s += p.digits;
        s.append(static_cast<size_t>(p.exponent), '0');
    } else if (point > 0 && point <= n) {
        s += p.digits.substr(0, static_cast<size_t>(point));
        if (point < n) {
            s.push_back('.');
            s += p.digits.substr(static_cast<size_t>(point));
        }
    } else if (point <= 0 && point > -6) {
        s += "0.";
        s.append(static_cast<size_t>(-point), '0');
        s += p.digits;
    } else {
        s += p.digits.substr(0, 1);
        if (n > 1) {
            s.push_back('.');
            s += p.digits.substr(1);
        }
        s.push_back('e');
        s += std::to_string(point - 1);
    }
    return s;
}

}  // namespace detail

// Parse `text * 10^decimal_shift` with a single correctly rounded conversion.
inline double parse_decimal_scaled(std::string_view text, int decimal_shift) {
    detail::DecimalParts p;
    if (!detail::split_decimal(text, p))
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    p.exponent += decimal_shift;
    std::string repr = (p.negative ? "-" : "") + p.digits + "e" + std::to_string(p.exponent);
    double value = 0;
    auto [ptr, ec] = std::from_chars(repr.data(), repr.data() + repr.size(), value);
    if (ec != std::errc{} || ptr != repr.data() + repr.size())
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    return value;
}

// Shortest round-trip representation of `value`, then the decimal point moved
// by `decimal_shift` places (textually, hence exactly).
inline std::string format_decimal_scaled(double value, int decimal_shift) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw std::runtime_error("format_decimal_scaled failed");
    detail::DecimalParts p;
    if (!detail::split_decimal(std::string_view(buf, ptr - buf), p))
        throw std::runtime_error("format_decimal_scaled: unformattable value");
    p.exponent += decimal_shift;
    return detail::render_decimal(p);
}

inline std::string format_double(double value) { return format_decimal_scaled(value, 0); }

// ---------------------------------------------------------------------------
// Standard normal distribution
// ---------------------------------------------------------------------------

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Inverse standard normal CDF. Acklam's rational approximation refined with
// Newton steps on erfc; absolute error well below 1e-9 over (0,1).
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("inverse_normal_cdf: p must be in (0,1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int it = 0; it < 2; ++it) {
        double err = normal_cdf(x) - p;
        double dens = normal_pdf(x);
        if (dens <= 0.0) break;
        x -= err / dens;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Small statistics helpers (population convention, 1/N weights)
// ---------------------------------------------------------------------------

inline double mean_of(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double population_variance(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double m = mean_of(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

inline double population_covariance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("population_covariance: size mismatch");
    if (a.empty()) return 0.0;
    double ma = mean_of(a), mb = mean_of(b);
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / static_cast<double>(a.size());
}

inline double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    double va = population_variance(a), vb = population_variance(b);
    if (va <= 0.0 || vb <= 0.0) return 0.0;
    return population_covariance(a, b) / std::sqrt(va * vb);
}

}  // namespace mineplan
