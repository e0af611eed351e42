#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "valdyn/error.hpp"

namespace valdyn {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

Rat parse_rat(std::string_view text);
std::string to_string(const Rat& x);
double to_double(const Rat& x);
bool is_integer(const Rat& x);
Int floor_rat(const Rat& x);
Int ceil_rat(const Rat& x);
int sgn(const Rat& x);
Rat rat(const Int& p, const Int& q = 1);

bool is_square_free(const Int& n);
// n = f^2 * d with d square-free; returns {f, d}. Requires n > 0.
std::pair<Int, Int> square_free_part(const Int& n);
std::optional<Int> exact_sqrt(const Int& n);

/*
 * Element a + b*sqrt(d) of the real quadratic field Q(sqrt(d)).
 *
 * d is square-free and >= 2.  Values of different fields never mix:
 * any binary operation between elements with distinct d throws.
 */
class QuadElem {
public:
    QuadElem(Int d, Rat a, Rat b = 0);

    static QuadElem parse(std::string_view text, std::optional<Int> d_hint = std::nullopt);

    const Int& d() const { return d_; }
    const Rat& a() const { return a_; }
    const Rat& b() const { return b_; }

    QuadElem conj() const { return QuadElem(d_, a_, -b_, unchecked{}); }
    Rat norm() const { return a_ * a_ - Rat(d_) * b_ * b_; }
    Rat trace() const { return 2 * a_; }
    int sign() const;
    bool is_rational() const { return b_ == 0; }
    bool is_integral() const;
    bool is_unit() const;
    bool is_totally_positive() const;

    QuadElem inverse() const;
    QuadElem pow(unsigned n) const;
    double approx() const;
    std::string str() const;

    friend QuadElem operator+(const QuadElem& x, const QuadElem& y);
    friend QuadElem operator-(const QuadElem& x, const QuadElem& y);
    friend QuadElem operator*(const QuadElem& x, const QuadElem& y);
    friend QuadElem operator/(const QuadElem& x, const QuadElem& y);
    friend QuadElem operator-(const QuadElem& x) { return QuadElem(x.d_, -x.a_, -x.b_, unchecked{}); }
    friend QuadElem operator+(const QuadElem& x, const Rat& q) { return QuadElem(x.d_, x.a_ + q, x.b_, unchecked{}); }
    friend QuadElem operator-(const QuadElem& x, const Rat& q) { return QuadElem(x.d_, x.a_ - q, x.b_, unchecked{}); }
    friend QuadElem operator*(const QuadElem& x, const Rat& q) { return QuadElem(x.d_, x.a_ * q, x.b_ * q, unchecked{}); }
    friend QuadElem operator*(const Rat& q, const QuadElem& x) { return x * q; }
    friend QuadElem operator/(const QuadElem& x, const Rat& q);

    friend bool operator==(const QuadElem& x, const QuadElem& y) {
        return x.d_ == y.d_ && x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator<(const QuadElem& x, const QuadElem& y) { return (x - y).sign() < 0; }
    friend bool operator>(const QuadElem& x, const QuadElem& y) { return (x - y).sign() > 0; }
    friend bool operator<=(const QuadElem& x, const QuadElem& y) { return (x - y).sign() <= 0; }
    friend bool operator>=(const QuadElem& x, const QuadElem& y) { return (x - y).sign() >= 0; }

private:
    struct unchecked {};
    QuadElem(Int d, Rat a, Rat b, unchecked) : d_(std::move(d)), a_(std::move(a)), b_(std::move(b)) {}
    static void same_field(const QuadElem& x, const QuadElem& y);

    Int d_;
    Rat a_;
    Rat b_;
};

QuadElem conj(const QuadElem& x);
Rat field_norm(const QuadElem& x);
int sign(const QuadElem& x);
bool is_integral(const QuadElem& x);
bool is_unit(const QuadElem& x);
bool is_totally_positive(const QuadElem& x);

// Dense exact matrix over Q.  Small sizes only (dual graphs, 2x2 sectors).
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    static Mat identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Rat& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rat& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<Rat> column(std::size_t j) const;
    std::vector<Rat> operator*(const std::vector<Rat>& v) const;
    Mat operator*(const Mat& other) const;
    Mat transpose() const;
    bool operator==(const Mat& other) const = default;

    // Leading principal minors det(A[0..k,0..k]) for k = 1..n, by elimination
    // without pivoting; entries after the first vanishing minor are zero.
    std::vector<Rat> leading_minors() const;
    Rat determinant() const;
    Mat inverse() const;  // throws Error{"singular_matrix"}
    std::vector<Rat> solve(const std::vector<Rat>& rhs) const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rat> data_;
};

Rat dot(const std::vector<Rat>& x, const std::vector<Rat>& y);
// x^T A y
Rat bilinear(const std::vector<Rat>& x, const Mat& a, const std::vector<Rat>& y);

}  // namespace valdyn
