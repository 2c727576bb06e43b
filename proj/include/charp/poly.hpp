/*
   Copyright 2026 the charp-diffops authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef CHARP_POLY_HPP
#define CHARP_POLY_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "charp/field.hpp"

namespace charp {

enum class TermOrder { grevlex, lex };

inline std::string to_string(TermOrder o) { return o == TermOrder::grevlex ? "grevlex" : "lex"; }

class poly_error : public std::runtime_error {
   public:
    explicit poly_error(const std::string& what) : std::runtime_error(what) {}
};

/// Syntax error in the polynomial / operator grammar; `pos` is a 0-based offset.
class parse_error : public std::runtime_error {
   public:
    parse_error(const std::string& what, std::size_t pos)
        : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"), pos_(pos) {}
    std::size_t pos() const { return pos_; }

   private:
    std::size_t pos_;
};

/// The ambient polynomial ring: F_p with named variables and a term order.
struct Ambient {
    PrimeField field;
    std::vector<std::string> vars;
    TermOrder order;

    Ambient(std::uint32_t p, std::vector<std::string> names, TermOrder ord = TermOrder::grevlex)
        : field(p), vars(std::move(names)), order(ord) {
        for (std::size_t i = 0; i < vars.size(); ++i)
            for (std::size_t j = i + 1; j < vars.size(); ++j)
                if (vars[i] == vars[j]) throw poly_error("duplicate variable name: " + vars[i]);
    }

    std::size_t nvars() const { return vars.size(); }
    std::uint32_t p() const { return field.p(); }

    int var_index(const std::string& name) const {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i] == name) return static_cast<int>(i);
        return -1;
    }

    friend bool operator==(const Ambient& a, const Ambient& b) {
        return a.field == b.field && a.vars == b.vars && a.order == b.order;
    }
};

using AmbientPtr = std::shared_ptr<const Ambient>;

inline AmbientPtr make_ambient(std::uint32_t p, std::vector<std::string> names,
                               TermOrder ord = TermOrder::grevlex) {
    return std::make_shared<const Ambient>(p, std::move(names), ord);
}

inline void require_same_ambient(const AmbientPtr& a, const AmbientPtr& b) {
    if (a.get() == b.get()) return;
    if (!a || !b || !(*a == *b)) throw poly_error("ambient mismatch");
}

/// Exponent vector; length always equals the ambient variable count.
using Monomial = std::vector<std::uint32_t>;

inline std::uint64_t total_degree(const Monomial& m) {
    std::uint64_t d = 0;
    for (auto e : m) d += e;
    return d;
}

inline bool mono_divides(const Monomial& a, const Monomial& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial r(a);
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

inline Monomial mono_div(const Monomial& a, const Monomial& b) {
    Monomial r(a);
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return r;
}

inline Monomial mono_lcm(const Monomial& a, const Monomial& b) {
    Monomial r(a);
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = std::max(r[i], b[i]);
    return r;
}

/// Three-way comparison in the given term order: >0 iff a is the larger monomial.
inline int mono_cmp(const Monomial& a, const Monomial& b, TermOrder ord) {
    if (ord == TermOrder::lex) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] != b[i]) return a[i] > b[i] ? 1 : -1;
        }
        return 0;
    }
    std::uint64_t da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db ? 1 : -1;
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? 1 : -1;
    }
    return 0;
}

struct MonoDescending {
    TermOrder ord = TermOrder::grevlex;
    bool operator()(const Monomial& a, const Monomial& b) const { return mono_cmp(a, b, ord) > 0; }
};

/// Sparse multivariate polynomial over F_p. Terms are kept sorted descending
/// in the ambient term order and never store zero coefficients.
class Polynomial {
   public:
    using TermMap = std::map<Monomial, Fp, MonoDescending>;

    explicit Polynomial(AmbientPtr amb)
        : amb_(std::move(amb)), terms_(MonoDescending{amb_->order}) {}

    static Polynomial zero(const AmbientPtr& amb) { return Polynomial(amb); }

    static Polynomial constant(const AmbientPtr& amb, Fp c) {
        Polynomial f(amb);
        if (c.v != 0) f.terms_.emplace(Monomial(amb->nvars(), 0), c);
        return f;
    }

    static Polynomial constant(const AmbientPtr& amb, std::int64_t c) {
        return constant(amb, amb->field.from_int(c));
    }

    static Polynomial variable(const AmbientPtr& amb, std::size_t i, std::uint32_t e = 1) {
        if (i >= amb->nvars()) throw poly_error("variable index out of range");
        Polynomial f(amb);
        Monomial m(amb->nvars(), 0);
        m[i] = e;
        if (e == 0) return constant(amb, 1);
        f.terms_.emplace(std::move(m), amb->field.one());
        return f;
    }

    static Polynomial monomial(const AmbientPtr& amb, Monomial m, Fp c) {
        if (m.size() != amb->nvars()) throw poly_error("monomial length mismatch");
        Polynomial f(amb);
        if (c.v != 0) f.terms_.emplace(std::move(m), c);
        return f;
    }

    const AmbientPtr& ambient() const { return amb_; }
    const PrimeField& field() const { return amb_->field; }
    const TermMap& terms() const { return terms_; }
    std::size_t nterms() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
    }

    std::uint64_t degree() const {
        std::uint64_t d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, total_degree(m));
        return d;
    }

    const Monomial& leading_monomial() const {
        if (is_zero()) throw poly_error("leading term of zero polynomial");
        return terms_.begin()->first;
    }

    Fp leading_coeff() const {
        if (is_zero()) throw poly_error("leading term of zero polynomial");
        return terms_.begin()->second;
    }

    Fp coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Fp{0} : it->second;
    }

    void add_term(const Monomial& m, Fp c) {
        if (c.v == 0) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second = field().add(it->second, c);
            if (it->second.v == 0) terms_.erase(it);
        }
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        require_same_ambient(a.amb_, b.amb_);
        Polynomial r(a);
        for (const auto& [m, c] : b.terms_) r.add_term(m, c);
        return r;
    }

    friend Polynomial operator-(const Polynomial& a) {
        Polynomial r(a);
        for (auto& [m, c] : r.terms_) c = r.field().neg(c);
        return r;
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        require_same_ambient(a.amb_, b.amb_);
        Polynomial r(a.amb_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_)
                r.add_term(mono_mul(ma, mb), a.field().mul(ca, cb));
        return r;
    }

    Polynomial scaled(Fp c) const {
        Polynomial r(amb_);
        if (c.v == 0) return r;
        for (const auto& [m, k] : terms_) r.terms_.emplace(m, field().mul(k, c));
        return r;
    }

    Polynomial pow(std::uint64_t e) const {
        Polynomial acc = constant(amb_, 1);
        Polynomial base(*this);
        while (e > 0) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        require_same_ambient(a.amb_, b.amb_);
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    /// Substitute images[i] for variable i; images live in `target`.
    Polynomial substitute(const AmbientPtr& target, const std::vector<Polynomial>& images) const {
        if (images.size() != amb_->nvars()) throw poly_error("substitute: wrong image count");
        if (target->p() != amb_->p()) throw poly_error("substitute: characteristic mismatch");
        Polynomial r(target);
        for (const auto& [m, c] : terms_) {
            Polynomial t = constant(target, Fp{c});
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i] > 0) t = t * images[i].pow(m[i]);
            r = r + t;
        }
        return r;
    }

    Fp evaluate(const std::vector<Fp>& point) const {
        if (point.size() != amb_->nvars()) throw poly_error("evaluate: wrong point size");
        const auto& F = field();
        Fp acc = F.zero();
        for (const auto& [m, c] : terms_) {
            Fp t = c;
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i] > 0) t = F.mul(t, F.pow(point[i], m[i]));
            acc = F.add(acc, t);
        }
        return acc;
    }

   private:
    AmbientPtr amb_;
    TermMap terms_;
};

/// Divided-power partial: x^a  ->  C(a_i, k) x^(a - k e_i), termwise.
/// k = 0 is the identity; the binomial is Lucas-exact for exponents >= p.
inline Polynomial divided_partial(std::size_t var, std::uint64_t k, const Polynomial& f) {
    const auto& amb = f.ambient();
    if (var >= amb->nvars()) throw poly_error("divided_partial: variable index out of range");
    if (k == 0) return f;
    Polynomial r(amb);
    for (const auto& [m, c] : f.terms()) {
        if (m[var] < k) continue;
        Fp b = amb->field.binomial(m[var], k);
        if (b.v == 0) continue;
        Monomial mm(m);
        mm[var] -= static_cast<std::uint32_t>(k);
        r.add_term(mm, amb->field.mul(c, b));
    }
    return r;
}

// ---------------------------------------------------------------------------
// printing

namespace detail {

/// Balanced residue: represent v as the integer of least absolute value.
inline std::int64_t balanced(std::uint32_t v, std::uint32_t p) {
    if (v <= p / 2) return static_cast<std::int64_t>(v);
    return static_cast<std::int64_t>(v) - static_cast<std::int64_t>(p);
}

inline void print_mono(std::ostringstream& os, const Monomial& m, const Ambient& amb) {
    bool first = true;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        if (!first) os << '*';
        first = false;
        os << amb.vars[i];
        if (m[i] > 1) os << '^' << m[i];
    }
}

}  // namespace detail

inline std::string to_string(const Polynomial& f) {
    if (f.is_zero()) return "0";
    const auto& amb = *f.ambient();
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : f.terms()) {
        std::int64_t v = detail::balanced(c.v, amb.p());
        if (first) {
            if (v < 0) os << '-';
        } else {
            os << (v < 0 ? " - " : " + ");
        }
        std::int64_t a = v < 0 ? -v : v;
        if (total_degree(m) == 0) {
            os << a;
        } else {
            if (a != 1) os << a << '*';
            detail::print_mono(os, m, amb);
        }
        first = false;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// parsing
//
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ('^' nat)*          -- '^' binds tighter than '*'
//   atom   := nat | var | '(' expr ')'

namespace detail {

class PolyParser {
   public:
    PolyParser(std::string_view text, AmbientPtr amb) : s_(text), amb_(std::move(amb)) {}

    Polynomial parse() {
        Polynomial r = expr();
        skip_ws();
        if (pos_ != s_.size()) throw parse_error("unexpected trailing input", pos_);
        return r;
    }

   private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    Polynomial expr() {
        bool neg = false;
        skip_ws();
        if (eat('-')) neg = true;
        else eat('+');
        Polynomial acc = term();
        if (neg) acc = -acc;
        while (true) {
            skip_ws();
            if (eat('+')) acc = acc + term();
            else if (eat('-')) acc = acc - term();
            else break;
        }
        return acc;
    }

    Polynomial term() {
        Polynomial acc = factor();
        while (eat('*')) acc = acc * factor();
        return acc;
    }

    Polynomial factor() {
        Polynomial base = atom();
        while (eat('^')) base = base.pow(natural());
        return base;
    }

    Polynomial atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw parse_error("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Polynomial r = expr();
            if (!eat(')')) throw parse_error("expected ')'", pos_);
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return Polynomial::constant(amb_, static_cast<std::int64_t>(natural()));
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string name(s_.substr(start, pos_ - start));
            int idx = amb_->var_index(name);
            if (idx < 0) throw parse_error("unknown variable '" + name + "'", start);
            return Polynomial::variable(amb_, static_cast<std::size_t>(idx));
        }
        throw parse_error(std::string("unexpected character '") + c + "'", pos_);
    }

    std::uint64_t natural() {
        skip_ws();
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
            throw parse_error("expected a number", pos_);
        std::uint64_t v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            v = v * 10 + static_cast<std::uint64_t>(s_[pos_] - '0');
            if (v > (1ull << 62)) throw parse_error("number too large", pos_);
            ++pos_;
        }
        return v;
    }

    std::string_view s_;
    AmbientPtr amb_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Polynomial parse_poly(std::string_view text, const AmbientPtr& amb) {
    return detail::PolyParser(text, amb).parse();
}

// ---------------------------------------------------------------------------
// polynomial matrices

/// Rectangular matrix of polynomials sharing one ambient.
class PolyMatrix {
   public:
    PolyMatrix(AmbientPtr amb, std::size_t rows, std::size_t cols)
        : amb_(std::move(amb)), rows_(rows), cols_(cols),
          entries_(rows * cols, Polynomial::zero(amb_)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const AmbientPtr& ambient() const { return amb_; }

    const Polynomial& at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
    Polynomial& at(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }

   private:
    AmbientPtr amb_;
    std::size_t rows_, cols_;
    std::vector<Polynomial> entries_;
};

/// Jacobi matrix of a generator list: entry (i, j) = d f_i / d x_j.
/// An empty list yields the 0 x n matrix.
inline PolyMatrix jacobian(const std::vector<Polynomial>& F, const AmbientPtr& amb) {
    std::size_t n = amb->nvars();
    PolyMatrix J(amb, F.size(), n);
    for (std::size_t i = 0; i < F.size(); ++i) {
        require_same_ambient(F[i].ambient(), amb);
        for (std::size_t j = 0; j < n; ++j) J.at(i, j) = divided_partial(j, 1, F[i]);
    }
    return J;
}

/// Determinant of the submatrix on the given row / column index sequences
/// (columns taken in the order listed, so swaps flip the sign). The empty
/// minor is 1 by convention.
inline Polynomial minor_det(const PolyMatrix& M, const std::vector<std::size_t>& rows,
                            const std::vector<std::size_t>& cols) {
    if (rows.size() != cols.size()) throw poly_error("minor_det: non-square selection");
    std::size_t k = rows.size();
    if (k == 0) return Polynomial::constant(M.ambient(), 1);
    if (k == 1) return M.at(rows[0], cols[0]);
    // Laplace expansion along the first row.
    Polynomial acc = Polynomial::zero(M.ambient());
    std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
    for (std::size_t j = 0; j < k; ++j) {
        const Polynomial& e = M.at(rows[0], cols[j]);
        if (e.is_zero()) continue;
        std::vector<std::size_t> sub_cols;
        sub_cols.reserve(k - 1);
        for (std::size_t t = 0; t < k; ++t)
            if (t != j) sub_cols.push_back(cols[t]);
        Polynomial cof = e * minor_det(M, sub_rows, sub_cols);
        acc = (j % 2 == 0) ? acc + cof : acc - cof;
    }
    return acc;
}

}  // namespace charp

#endif  // CHARP_POLY_HPP
