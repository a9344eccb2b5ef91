#pragma once

#include <numeric>
#include <string>

#include "qsep/matrix.hpp"

namespace qsep {

/// Exact rational arithmetic for criterion weight/exponent bookkeeping.
/// Keeping the ledger exact avoids silent unsoundness from rounding weights like 1/6.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    double to_double() const { return double(num_) / double(den_); }
    bool positive() const { return num_ > 0; }
    std::string str() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Accepts "3", "-1", "3/2".
    static Rational parse(const std::string& s) {
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rational(std::stoll(s));
            return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        } catch (const std::logic_error&) {
            throw invariant_error("malformed rational: " + s);
        }
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw invariant_error("rational division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

private:
    void normalize() {
        if (den_ == 0) throw invariant_error("rational with zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) den_ = 1;
    }

    long long num_, den_;
};

}  // namespace qsep
