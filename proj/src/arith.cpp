#include "valdyn/arith.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <algorithm>
#include <cctype>

namespace valdyn {

namespace mp = boost::multiprecision;

namespace {

std::string strip(std::string_view text) {
    std::string out;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
}

Int parse_int(const std::string& s, std::string_view context) {
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
    if (i == s.size()) throw Error("parse_error", "expected an integer in '" + std::string(context) + "'");
    for (std::size_t j = i; j < s.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(s[j])))
            throw Error("parse_error", "bad integer '" + s + "' in '" + std::string(context) + "'");
    Int v(s.substr(i));
    return neg ? Int(-v) : v;
}

}  // namespace

Rat parse_rat(std::string_view text) {
    std::string s = strip(text);
    if (s.empty()) throw Error("parse_error", "empty rational");
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(parse_int(s, text));
    Int p = parse_int(s.substr(0, slash), text);
    Int q = parse_int(s.substr(slash + 1), text);
    if (q == 0) throw Error("division_by_zero", "zero denominator in '" + std::string(text) + "'");
    return Rat(p, q);
}

std::string to_string(const Rat& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

double to_double(const Rat& x) {
    using F = mp::cpp_dec_float_50;
    F v = F(numerator(x)) / F(denominator(x));
    return v.convert_to<double>();
}

bool is_integer(const Rat& x) { return denominator(x) == 1; }

Int floor_rat(const Rat& x) {
    Int q = numerator(x) / denominator(x);  // truncates toward zero
    if (x < 0 && Rat(q) != x) q -= 1;
    return q;
}

Int ceil_rat(const Rat& x) {
    Int f = floor_rat(x);
    return Rat(f) == x ? f : Int(f + 1);
}

int sgn(const Rat& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

Rat rat(const Int& p, const Int& q) {
    if (q == 0) throw Error("division_by_zero", "zero denominator");
    return Rat(p, q);
}

bool is_square_free(const Int& n) {
    if (n < 1) return false;
    Int m = n;
    for (Int p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            m /= p;
            if (m % p == 0) return false;
        }
    }
    return true;
}

std::pair<Int, Int> square_free_part(const Int& n) {
    if (n <= 0) throw Error("invalid_input", "square_free_part needs a positive integer");
    Int f = 1, d = 1, m = n;
    for (Int p = 2; p * p <= m; ++p) {
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        for (int i = 0; i < e / 2; ++i) f *= p;
        if (e % 2) d *= p;
    }
    d *= m;
    return {f, d};
}

std::optional<Int> exact_sqrt(const Int& n) {
    if (n < 0) return std::nullopt;
    Int r = mp::sqrt(n);
    if (r * r == n) return r;
    return std::nullopt;
}

// ---------------------------------------------------------------- QuadElem

QuadElem::QuadElem(Int d, Rat a, Rat b) : d_(std::move(d)), a_(std::move(a)), b_(std::move(b)) {
    if (d_ < 2 || !is_square_free(d_))
        throw Error("invalid_field", "sqrt(" + d_.str() + "): d must be square-free and >= 2");
}

void QuadElem::same_field(const QuadElem& x, const QuadElem& y) {
    if (x.d_ != y.d_)
        throw Error("mixed_field", "cannot combine elements of Q(sqrt(" + x.d_.str() + ")) and Q(sqrt(" +
                                       y.d_.str() + "))");
}

QuadElem QuadElem::parse(std::string_view text, std::optional<Int> d_hint) {
    std::string s = strip(text);
    auto pos = s.find("sqrt(");
    if (pos == std::string::npos) {
        if (!d_hint) throw Error("parse_error", "'" + s + "' has no sqrt(d) part and no field is known");
        return QuadElem(*d_hint, parse_rat(s), 0);
    }
    auto close = s.find(')', pos);
    if (close == std::string::npos || close + 1 != s.size())
        throw Error("parse_error", "expected 'a+b*sqrt(d)', got '" + s + "'");
    Int d = parse_int(s.substr(pos + 5, close - pos - 5), text);
    std::string prefix = s.substr(0, pos);
    if (!prefix.empty() && prefix.back() == '*') prefix.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t i = prefix.size(); i-- > 1;) {
        if ((prefix[i] == '+' || prefix[i] == '-') && prefix[i - 1] != '/') {
            split = i;
            break;
        }
    }
    std::string astr = split == std::string::npos ? "" : prefix.substr(0, split);
    std::string bstr = split == std::string::npos ? prefix : prefix.substr(split);
    Rat a = astr.empty() ? Rat(0) : parse_rat(astr);
    Rat b;
    if (bstr.empty() || bstr == "+")
        b = 1;
    else if (bstr == "-")
        b = -1;
    else
        b = parse_rat(bstr);
    if (d_hint && *d_hint != d)
        throw Error("mixed_field", "expected an element of Q(sqrt(" + d_hint->str() + ")), got '" + s + "'");
    return QuadElem(d, a, b);
}

int QuadElem::sign() const {
    int sa = sgn(a_), sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // opposite signs: compare a^2 with d b^2 (never equal since d is square-free)
    return a_ * a_ > Rat(d_) * b_ * b_ ? sa : sb;
}

bool QuadElem::is_integral() const { return is_integer(trace()) && is_integer(norm()); }

bool QuadElem::is_unit() const {
    if (!is_integral()) return false;
    Rat n = norm();
    return n == 1 || n == -1;
}

bool QuadElem::is_totally_positive() const { return sign() > 0 && conj().sign() > 0; }

QuadElem QuadElem::inverse() const {
    Rat n = norm();
    if (n == 0) throw Error("division_by_zero", "inverse of zero in Q(sqrt(" + d_.str() + "))");
    return QuadElem(d_, a_ / n, -b_ / n, unchecked{});
}

QuadElem QuadElem::pow(unsigned n) const {
    QuadElem result(d_, 1, 0, unchecked{});
    QuadElem base = *this;
    while (n) {
        if (n & 1u) result = result * base;
        base = base * base;
        n >>= 1u;
    }
    return result;
}

double QuadElem::approx() const {
    using F = mp::cpp_dec_float_50;
    F a = F(numerator(a_)) / F(denominator(a_));
    F b = F(numerator(b_)) / F(denominator(b_));
    F v = a + b * mp::sqrt(F(d_));
    return v.convert_to<double>();
}

std::string QuadElem::str() const {
    std::string out = to_string(a_);
    if (b_ < 0)
        out += "-" + to_string(-b_);
    else
        out += "+" + to_string(b_);
    return out + "*sqrt(" + d_.str() + ")";
}

QuadElem operator+(const QuadElem& x, const QuadElem& y) {
    QuadElem::same_field(x, y);
    return QuadElem(x.d_, x.a_ + y.a_, x.b_ + y.b_, QuadElem::unchecked{});
}

QuadElem operator-(const QuadElem& x, const QuadElem& y) {
    QuadElem::same_field(x, y);
    return QuadElem(x.d_, x.a_ - y.a_, x.b_ - y.b_, QuadElem::unchecked{});
}

QuadElem operator*(const QuadElem& x, const QuadElem& y) {
    QuadElem::same_field(x, y);
    return QuadElem(x.d_, x.a_ * y.a_ + Rat(x.d_) * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_,
                    QuadElem::unchecked{});
}

QuadElem operator/(const QuadElem& x, const QuadElem& y) {
    QuadElem::same_field(x, y);
    return x * y.inverse();
}

QuadElem operator/(const QuadElem& x, const Rat& q) {
    if (q == 0) throw Error("division_by_zero", "division of " + x.str() + " by zero");
    return QuadElem(x.d_, x.a_ / q, x.b_ / q, QuadElem::unchecked{});
}

QuadElem conj(const QuadElem& x) { return x.conj(); }
Rat field_norm(const QuadElem& x) { return x.norm(); }
int sign(const QuadElem& x) { return x.sign(); }
bool is_integral(const QuadElem& x) { return x.is_integral(); }
bool is_unit(const QuadElem& x) { return x.is_unit(); }
bool is_totally_positive(const QuadElem& x) { return x.is_totally_positive(); }

// --------------------------------------------------------------------- Mat

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

std::vector<Rat> Mat::column(std::size_t j) const {
    std::vector<Rat> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

std::vector<Rat> Mat::operator*(const std::vector<Rat>& v) const {
    std::vector<Rat> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if ((*this)(i, j) != 0 && v[j] != 0) out[i] += (*this)(i, j) * v[j];
    return out;
}

Mat Mat::operator*(const Mat& other) const {
    Mat out(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k)
            for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += (*this)(i, k) * other(k, j);
    return out;
}

Mat Mat::transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

std::vector<Rat> Mat::leading_minors() const {
    std::size_t n = std::min(rows_, cols_);
    Mat a = *this;
    std::vector<Rat> minors(n);
    Rat det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (a(k, k) == 0) break;  // remaining minors stay zero in the report
        det *= a(k, k);
        minors[k] = det;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k) == 0) continue;
            Rat f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return minors;
}

Rat Mat::determinant() const {
    if (rows_ != cols_) throw Error("invalid_input", "determinant of a non-square matrix");
    Mat a = *this;
    std::size_t n = rows_;
    Rat det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a(p, k) == 0) ++p;
        if (p == n) return 0;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(k, j));
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k) == 0) continue;
            Rat f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

Mat Mat::inverse() const {
    if (rows_ != cols_) throw Error("invalid_input", "inverse of a non-square matrix");
    std::size_t n = rows_;
    Mat a = *this, inv = identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a(p, k) == 0) ++p;
        if (p == n) throw Error("singular_matrix", "matrix is singular");
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(p, j), a(k, j));
                std::swap(inv(p, j), inv(k, j));
            }
        Rat piv = a(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            a(k, j) /= piv;
            inv(k, j) /= piv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || a(i, k) == 0) continue;
            Rat f = a(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

std::vector<Rat> Mat::solve(const std::vector<Rat>& rhs) const { return inverse() * rhs; }

Rat dot(const std::vector<Rat>& x, const std::vector<Rat>& y) {
    Rat s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

Rat bilinear(const std::vector<Rat>& x, const Mat& a, const std::vector<Rat>& y) { return dot(x, a * y); }

}  // namespace valdyn
