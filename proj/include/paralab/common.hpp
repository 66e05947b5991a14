#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace paralab {

using complex = std::complex<double>;

/// Thrown when a caller violates an operation's stated precondition
/// (wrong domain tag, mismatched grids, out-of-range scale, ...).
class contract_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Thrown for invalid configuration values (non-integer period where unit
/// cells are required, grid too coarse for a filter bank, bad exponent
/// triples, ...).
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a requested dense evaluation would exceed the memory budget.
class capacity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a quadrature self-check (resolution doubling) disagrees with
/// the base resolution beyond tolerance. Carries both values in the message.
class accuracy_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lebesgue exponent with a distinguished infinity, so p = infinity is never
/// smuggled around as a large float.
class LpExponent {
public:
    explicit LpExponent(double p) : value_(p), inf_(false) {}

    static LpExponent infinity() { return LpExponent(inf_tag{}); }

    bool is_infinite() const { return inf_; }
    double value() const { return value_; }

    /// 1/p, with 1/inf = 0.
    double reciprocal() const { return inf_ ? 0.0 : 1.0 / value_; }

    bool operator==(const LpExponent& o) const {
        return inf_ == o.inf_ && (inf_ || value_ == o.value_);
    }

    std::string str() const;

private:
    struct inf_tag {};
    explicit LpExponent(inf_tag) : value_(0.0), inf_(true) {}

    double value_;
    bool inf_;
};

}  // namespace paralab
