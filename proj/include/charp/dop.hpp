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

#ifndef CHARP_DOP_HPP
#define CHARP_DOP_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "charp/hs.hpp"

namespace charp {

class dop_error : public std::runtime_error {
   public:
    explicit dop_error(const std::string& what) : std::runtime_error(what) {}
};

inline LocElem pow_loc(const LocElem& a, std::uint32_t e) {
    LocElem acc = LocElem::one(a.ctx());
    for (std::uint32_t t = 0; t < e; ++t) acc = acc * a;
    return acc;
}

// ---------------------------------------------------------------------------
// The divided-power Weyl algebra D(P_n): elements sum a_{ab} x^a D^[b] in
// canonical form. order(u) = max |b|.

class WeylOp {
   public:
    struct KeyLess {
        TermOrder ord = TermOrder::grevlex;
        bool operator()(const std::pair<Monomial, Monomial>& a,
                        const std::pair<Monomial, Monomial>& b) const {
            int c = mono_cmp(a.second, b.second, ord);
            if (c != 0) return c > 0;
            return mono_cmp(a.first, b.first, ord) > 0;
        }
    };
    using TermMap = std::map<std::pair<Monomial, Monomial>, Fp, KeyLess>;

    explicit WeylOp(AmbientPtr amb) : amb_(std::move(amb)), terms_(KeyLess{amb_->order}) {}

    static WeylOp zero(const AmbientPtr& amb) { return WeylOp(amb); }

    static WeylOp identity(const AmbientPtr& amb) {
        WeylOp u(amb);
        u.add_term(Monomial(amb->nvars(), 0), Monomial(amb->nvars(), 0), amb->field.one());
        return u;
    }

    static WeylOp from_poly(const Polynomial& f) {
        WeylOp u(f.ambient());
        Monomial none(f.ambient()->nvars(), 0);
        for (const auto& [m, c] : f.terms()) u.add_term(m, none, c);
        return u;
    }

    /// x^a D^[b]
    static WeylOp term(const AmbientPtr& amb, Monomial a, Monomial b, Fp c) {
        WeylOp u(amb);
        u.add_term(std::move(a), std::move(b), c);
        return u;
    }

    static WeylOp partial(const AmbientPtr& amb, std::size_t var, std::uint32_t k) {
        Monomial b(amb->nvars(), 0);
        b[var] = k;
        return term(amb, Monomial(amb->nvars(), 0), std::move(b), amb->field.one());
    }

    const AmbientPtr& ambient() const { return amb_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    std::uint64_t order() const {
        std::uint64_t d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, total_degree(k.second));
        return d;
    }

    void add_term(Monomial a, Monomial b, Fp c) {
        if (c.v == 0) return;
        auto key = std::make_pair(std::move(a), std::move(b));
        auto [it, inserted] = terms_.emplace(std::move(key), c);
        if (!inserted) {
            it->second = amb_->field.add(it->second, c);
            if (it->second.v == 0) terms_.erase(it);
        }
    }

    friend WeylOp operator+(const WeylOp& u, const WeylOp& v) {
        require_same_ambient(u.amb_, v.amb_);
        WeylOp r(u);
        for (const auto& [k, c] : v.terms_) r.add_term(k.first, k.second, c);
        return r;
    }

    friend WeylOp operator-(const WeylOp& u) {
        WeylOp r(u);
        for (auto& [k, c] : r.terms_) c = r.amb_->field.neg(c);
        return r;
    }

    friend WeylOp operator-(const WeylOp& u, const WeylOp& v) { return u + (-v); }

    WeylOp scaled(Fp c) const {
        WeylOp r(amb_);
        if (c.v == 0) return r;
        for (const auto& [k, q] : terms_) r.terms_.emplace(k, amb_->field.mul(q, c));
        return r;
    }

    friend bool operator==(const WeylOp& u, const WeylOp& v) {
        require_same_ambient(u.amb_, v.amb_);
        return u.terms_ == v.terms_;
    }
    friend bool operator!=(const WeylOp& u, const WeylOp& v) { return !(u == v); }

   private:
    AmbientPtr amb_;
    TermMap terms_;
};

/// Canonical product: commute D^[b] past x^g via
///   D^[b] x^g = sum_t prod_i C(g_i, t_i) x^{g-t} D^[b-t]
/// and merge divided powers with  D^[b] D^[d] = prod_i C(b_i+d_i, d_i) D^[b+d].
inline WeylOp weyl_mul(const WeylOp& u, const WeylOp& v) {
    require_same_ambient(u.ambient(), v.ambient());
    const auto& amb = u.ambient();
    const auto& F = amb->field;
    std::size_t n = amb->nvars();
    WeylOp r(amb);
    for (const auto& [ku, cu] : u.terms()) {
        const Monomial &a = ku.first, &b = ku.second;
        for (const auto& [kv, cv] : v.terms()) {
            const Monomial &g = kv.first, &d = kv.second;
            // enumerate t <= min(b, g) componentwise
            Monomial tmax(n, 0);
            for (std::size_t i = 0; i < n; ++i) tmax[i] = std::min(b[i], g[i]);
            Monomial t(n, 0);
            while (true) {
                Fp coef = F.mul(cu, cv);
                for (std::size_t i = 0; i < n && coef.v != 0; ++i) {
                    coef = F.mul(coef, F.binomial(g[i], t[i]));
                    coef = F.mul(coef, F.binomial(b[i] - t[i] + d[i], d[i]));
                }
                if (coef.v != 0) {
                    Monomial xm(n), dm(n);
                    for (std::size_t i = 0; i < n; ++i) {
                        xm[i] = a[i] + g[i] - t[i];
                        dm[i] = b[i] - t[i] + d[i];
                    }
                    r.add_term(std::move(xm), std::move(dm), coef);
                }
                // advance the odometer
                std::size_t i = 0;
                while (i < n && t[i] == tmax[i]) t[i++] = 0;
                if (i == n) break;
                ++t[i];
            }
        }
    }
    return r;
}

/// The self-duality antiautomorphism: x_i -> x_i, D_i^[k] -> (-1)^k D_i^[k],
/// reversing products.
inline WeylOp weyl_dual(const WeylOp& u) {
    const auto& amb = u.ambient();
    const auto& F = amb->field;
    WeylOp r(amb);
    for (const auto& [k, c] : u.terms()) {
        const Monomial &a = k.first, &b = k.second;
        Fp sign = (total_degree(b) % 2 == 0) ? F.one() : F.neg(F.one());
        // dual(x^a D^[b]) = (-1)^{|b|} D^[b] x^a, then canonicalize
        WeylOp t = weyl_mul(WeylOp::term(amb, Monomial(amb->nvars(), 0), b, F.mul(c, sign)),
                            WeylOp::term(amb, a, Monomial(amb->nvars(), 0), F.one()));
        r = r + t;
    }
    return r;
}

inline Polynomial weyl_apply(const WeylOp& u, const Polynomial& f) {
    require_same_ambient(u.ambient(), f.ambient());
    const auto& amb = u.ambient();
    Polynomial r(amb);
    for (const auto& [k, c] : u.terms()) {
        Polynomial g = f;
        for (std::size_t i = 0; i < amb->nvars(); ++i)
            if (k.second[i] > 0) g = divided_partial(i, k.second[i], g);
        r = r + (Polynomial::monomial(amb, k.first, c) * g);
    }
    return r;
}

inline std::string to_string(const WeylOp& u) {
    if (u.is_zero()) return "0";
    const auto& amb = *u.ambient();
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : u.terms()) {
        std::int64_t v = detail::balanced(c.v, amb.p());
        if (first) {
            if (v < 0) os << '-';
        } else {
            os << (v < 0 ? " - " : " + ");
        }
        std::int64_t a = v < 0 ? -v : v;
        bool trivial_key = total_degree(k.first) == 0 && total_degree(k.second) == 0;
        bool printed = false;
        if (a != 1 || trivial_key) {
            os << a;
            printed = true;
        }
        for (std::size_t i = 0; i < k.first.size(); ++i) {
            if (k.first[i] == 0) continue;
            if (printed) os << '*';
            os << amb.vars[i];
            if (k.first[i] > 1) os << '^' << k.first[i];
            printed = true;
        }
        for (std::size_t i = 0; i < k.second.size(); ++i) {
            if (k.second[i] == 0) continue;
            if (printed) os << '*';
            os << 'D' << (i + 1);
            if (k.second[i] > 1) os << "^[" << k.second[i] << "]";
            printed = true;
        }
        first = false;
    }
    return os.str();
}

// Weyl expression grammar (the normal-form calculator):
//   tokens xI, DI (= D_I^[1]), DI^[k], integers, + - * ^, parentheses;
//   bare ^ is operator power and binds tighter than *.
namespace detail {

class WeylParser {
   public:
    WeylParser(std::string_view s, AmbientPtr amb) : s_(s), amb_(std::move(amb)) {}

    WeylOp parse() {
        WeylOp r = expr();
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

    WeylOp expr() {
        bool neg = false;
        skip_ws();
        if (eat('-')) neg = true;
        else eat('+');
        WeylOp acc = term();
        if (neg) acc = -acc;
        while (true) {
            skip_ws();
            if (eat('+')) acc = acc + term();
            else if (eat('-')) acc = acc - term();
            else break;
        }
        return acc;
    }

    WeylOp term() {
        WeylOp acc = factor();
        while (eat('*')) acc = weyl_mul(acc, factor());
        return acc;
    }

    WeylOp factor() {
        WeylOp base = atom();
        while (true) {
            skip_ws();
            // D1^[k] is consumed inside atom(); a bare ^ here is a power
            if (pos_ < s_.size() && s_[pos_] == '^') {
                ++pos_;
                std::uint64_t e = natural();
                WeylOp acc = WeylOp::identity(amb_);
                for (std::uint64_t t = 0; t < e; ++t) acc = weyl_mul(acc, base);
                base = acc;
            } else {
                break;
            }
        }
        return base;
    }

    WeylOp atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw parse_error("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            WeylOp r = expr();
            if (!eat(')')) throw parse_error("expected ')'", pos_);
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return WeylOp::from_poly(
                Polynomial::constant(amb_, static_cast<std::int64_t>(natural())));
        if (c == 'D') {
            std::size_t start = pos_;
            ++pos_;
            std::size_t idx = var_index();
            std::uint32_t k = 1;
            // divided-power token DI^[k]
            if (pos_ + 1 < s_.size() && s_[pos_] == '^' && s_[pos_ + 1] == '[') {
                pos_ += 2;
                k = static_cast<std::uint32_t>(natural());
                skip_ws();
                if (!eat(']')) throw parse_error("expected ']'", pos_);
            }
            if (idx >= amb_->nvars()) throw parse_error("operator index out of range", start);
            return WeylOp::partial(amb_, idx, k);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string name(s_.substr(start, pos_ - start));
            int idx = amb_->var_index(name);
            if (idx < 0) throw parse_error("unknown variable '" + name + "'", start);
            return WeylOp::from_poly(Polynomial::variable(amb_, static_cast<std::size_t>(idx)));
        }
        throw parse_error(std::string("unexpected character '") + c + "'", pos_);
    }

    std::size_t var_index() {
        skip_ws();
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
            throw parse_error("expected an operator index", pos_);
        return static_cast<std::size_t>(natural()) - 1;  // tokens are 1-based
    }

    std::uint64_t natural() {
        skip_ws();
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
            throw parse_error("expected a number", pos_);
        std::uint64_t v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            v = v * 10 + static_cast<std::uint64_t>(s_[pos_] - '0');
            if (v > (1ull << 32)) throw parse_error("number too large", pos_);
            ++pos_;
        }
        return v;
    }

    std::string_view s_;
    AmbientPtr amb_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline WeylOp parse_weyl(std::string_view text, const AmbientPtr& amb) {
    return detail::WeylParser(text, amb).parse();
}

// ---------------------------------------------------------------------------
// Operators on A_Delta in the canonical basis sum c_k delta^[k] where
// delta^[k] = prod_s delta_{i;j,j_s}^[k_s] over the chart's families.
// Coefficients live in the chart's own localization or, for cross-chart
// work, in a product localization over the same ideal.

class LocalOp {
   public:
    using TermMap = std::map<Monomial, LocElem, MonoDescending>;

    LocalOp(ChartPtr chart, LocCtxPtr ctx)
        : chart_(std::move(chart)), ctx_(std::move(ctx)),
          terms_(MonoDescending{chart_->variety->amb->order}) {}

    static LocalOp zero(const ChartPtr& ch) { return LocalOp(ch, ch->ctx); }
    static LocalOp zero(const ChartPtr& ch, const LocCtxPtr& ctx) { return LocalOp(ch, ctx); }

    /// Multiplication by a localization element (order 0).
    static LocalOp scalar(const ChartPtr& ch, const LocElem& c) {
        LocalOp u(ch, c.ctx());
        u.add_term(Monomial(ch->nfam(), 0), c);
        return u;
    }

    static LocalOp identity(const ChartPtr& ch, const LocCtxPtr& ctx) {
        return scalar_in(ch, ctx, LocElem::one(ctx));
    }

    static LocalOp scalar_in(const ChartPtr& ch, const LocCtxPtr& ctx, const LocElem& c) {
        LocalOp u(ch, ctx);
        u.add_term(Monomial(ch->nfam(), 0), embed(c, ctx));
        return u;
    }

    /// delta_{nu}^[k], or a general monomial delta^[idx].
    static LocalOp delta(const ChartPtr& ch, const LocCtxPtr& ctx, const Monomial& idx) {
        if (idx.size() != ch->nfam()) throw dop_error("multi-index length mismatch");
        LocalOp u(ch, ctx);
        u.add_term(idx, LocElem::one(ctx));
        return u;
    }

    static LocalOp delta(const ChartPtr& ch, std::size_t nu, std::uint32_t k) {
        Monomial idx(ch->nfam(), 0);
        idx.at(nu) = k;
        return delta(ch, ch->ctx, idx);
    }

    const ChartPtr& chart() const { return chart_; }
    const LocCtxPtr& ctx() const { return ctx_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    std::uint64_t order() const {
        std::uint64_t d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, total_degree(m));
        return d;
    }

    LocElem coeff(const Monomial& idx) const {
        auto it = terms_.find(idx);
        return it == terms_.end() ? LocElem::zero(ctx_) : it->second;
    }

    void add_term(const Monomial& idx, const LocElem& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(idx, c);
        if (!inserted) {
            it->second = it->second + c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend LocalOp operator+(const LocalOp& u, const LocalOp& v) {
        u.require_compatible(v);
        LocalOp r(u);
        for (const auto& [m, c] : v.terms_) r.add_term(m, c);
        return r;
    }

    friend LocalOp operator-(const LocalOp& u) {
        LocalOp r(u);
        for (auto& [m, c] : r.terms_) c = -c;
        return r;
    }

    friend LocalOp operator-(const LocalOp& u, const LocalOp& v) { return u + (-v); }

    LocalOp scaled(const LocElem& c) const {
        LocalOp r(chart_, ctx_);
        for (const auto& [m, q] : terms_) r.add_term(m, q * c);
        return r;
    }

    LocalOp scaled(Fp c) const {
        LocalOp r(chart_, ctx_);
        for (const auto& [m, q] : terms_) r.add_term(m, q.scaled(c));
        return r;
    }

    void require_compatible(const LocalOp& v) const {
        if (chart_.get() != v.chart_.get()) throw dop_error("operator base (chart) mismatch");
        if (ctx_.get() != v.ctx_.get() && !(ctx_->den == v.ctx_->den))
            throw dop_error("operator localization context mismatch");
    }

   private:
    ChartPtr chart_;
    LocCtxPtr ctx_;
    TermMap terms_;
};

/// Apply an operator to a localization element.
inline LocElem op_apply(const LocalOp& u, const LocElem& a) {
    LocElem acc = LocElem::zero(u.ctx());
    LocElem arg = embed(a, u.ctx());
    for (const auto& [idx, c] : u.terms()) acc = acc + c * hs_apply_multi(*u.chart(), idx, arg);
    return acc;
}

inline LocElem op_apply(const LocalOp& u, const QuotElem& a) {
    return op_apply(u, LocElem(u.ctx(), a, 0));
}

/// Composition in canonical form via
///   delta^[a] (c .) = sum_{g <= a} delta^[g](c) delta^[a-g] .
/// and the iterative merge delta^[a-g] delta^[b] = prod C(..) delta^[a-g+b].
/// The chart truncation must cover order(u) + order(v).
inline LocalOp local_op_mul(const LocalOp& u, const LocalOp& v) {
    u.require_compatible(v);
    const ChartPtr& ch = u.chart();
    const auto& F = ch->variety->amb->field;
    if (u.order() + v.order() > ch->order)
        throw dop_error("product order exceeds the chart truncation");
    LocalOp r(ch, u.ctx());
    std::size_t nf = ch->nfam();
    for (const auto& [a, cu] : u.terms()) {
        for (const auto& [b, cv] : v.terms()) {
            // enumerate g <= a componentwise
            Monomial g(nf, 0);
            while (true) {
                LocElem dc = hs_apply_multi(*ch, g, cv);
                if (!dc.is_zero()) {
                    Fp merge = F.one();
                    Monomial target(nf, 0);
                    for (std::size_t s = 0; s < nf; ++s) {
                        target[s] = a[s] - g[s] + b[s];
                        merge = F.mul(merge, F.binomial(target[s], b[s]));
                    }
                    if (merge.v != 0) r.add_term(target, (cu * dc).scaled(merge));
                }
                std::size_t s = 0;
                while (s < nf && g[s] == a[s]) g[s++] = 0;
                if (s == nf) break;
                ++g[s];
            }
        }
    }
    return r;
}

/// Canonical-form equality: entrywise loc_equal of coefficients. Sound by
/// the direct-sum decomposition of D(A_Delta).
inline bool op_equal(const LocalOp& u, const LocalOp& v) {
    u.require_compatible(v);
    std::set<Monomial> keys;
    for (const auto& [m, c] : u.terms()) keys.insert(m);
    for (const auto& [m, c] : v.terms()) keys.insert(m);
    for (const auto& m : keys)
        if (!loc_equal(u.coeff(m), v.coeff(m))) return false;
    return true;
}

/// Evaluation-route equality: compare values on all monomials of total
/// degree <= max(order u, order v) over all variables, plus den^{-e} powers
/// up to the same bound (operators are determined by these values).
inline bool op_equal_eval(const LocalOp& u, const LocalOp& v) {
    u.require_compatible(v);
    const auto& var = *u.chart()->variety;
    std::uint32_t bound = static_cast<std::uint32_t>(std::max(u.order(), v.order()));
    for (const auto& m : detail::enumerate_monomials(var.nvars(), bound)) {
        LocElem x(u.ctx(), QuotElem(var.ideal, Polynomial::monomial(var.amb, m, var.amb->field.one())), 0);
        if (!loc_equal(op_apply(u, x), op_apply(v, x))) return false;
    }
    for (std::uint32_t e = 1; e <= bound; ++e) {
        LocElem x = LocElem::den_inv_pow(u.ctx(), e);
        if (!loc_equal(op_apply(u, x), op_apply(v, x))) return false;
    }
    return true;
}

/// Both equality routes, asserting that they agree.
inline bool op_equal_checked(const LocalOp& u, const LocalOp& v) {
    bool canonical = op_equal(u, v);
    bool eval = op_equal_eval(u, v);
    if (canonical != eval) throw dop_error("canonical and evaluation equality disagree");
    return canonical;
}

/// Membership test for D(A): u(x^g) must be denominator-free for every
/// monomial of total degree <= order(u). Exact (Groebner membership).
inline bool in_DA(const LocalOp& u) {
    const auto& var = *u.chart()->variety;
    std::uint32_t bound = static_cast<std::uint32_t>(u.order());
    for (const auto& m : detail::enumerate_monomials(var.nvars(), bound)) {
        LocElem x(u.ctx(), QuotElem(var.ideal, Polynomial::monomial(var.amb, m, var.amb->field.one())), 0);
        if (!op_apply(u, x).in_A()) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// The exponent schedule n(k) = M*k making d^[k] = Delta^{n(k)} delta^[k] a
// genuine operator on A. m(k) records the measured minimal clearing
// exponents (max over the chart's families).

struct ExponentSchedule {
    std::uint32_t K_max = 0;
    std::uint32_t M = 0;
    std::vector<std::uint32_t> m;  // size K_max + 1; m[0] = 0
    bool provisional = false;      // a scan hit its cap

    std::uint32_t n(std::uint32_t k) const { return M * k; }
};

namespace detail {

/// Least s with Delta^s * val in A, or nullopt at the cap.
inline std::optional<std::uint32_t> min_clear_exp(const LocElem& val, std::uint32_t cap) {
    for (std::uint32_t s = 0; s <= cap; ++s)
        if (val.times_den_pow(s).in_A()) return s;
    return std::nullopt;
}

}  // namespace detail

/// Minimal clearing exponent of Delta^s delta_nu^[k] over all monomial
/// arguments of degree <= k (the in_DA test set).
inline std::optional<std::uint32_t> min_clearing_exponent(const Chart& ch, std::size_t nu,
                                                          std::uint32_t k) {
    const auto& var = *ch.variety;
    std::uint32_t cap = static_cast<std::uint32_t>(var.solver.m_scan_cap);
    std::uint32_t worst = 0;
    Monomial idx(ch.nfam(), 0);
    idx.at(nu) = k;
    for (const auto& m : detail::enumerate_monomials(var.nvars(), k)) {
        LocElem x(ch.ctx, QuotElem(var.ideal, Polynomial::monomial(var.amb, m, var.amb->field.one())), 0);
        LocElem val = hs_apply_multi(ch, idx, x);
        auto s = detail::min_clear_exp(val, cap);
        if (!s) return std::nullopt;
        worst = std::max(worst, *s);
    }
    return worst;
}

/// One schedule serving every chart in `charts` (n(k) must work for all
/// bases at once): m(k) is the max over charts and families, and
/// n(k) = k*M with M = max ceil(m(k)/k). Linear schedules are superadditive
/// with n(0) = 0 by construction.
inline ExponentSchedule compute_schedule(const std::vector<ChartPtr>& charts, std::uint32_t K_max) {
    ExponentSchedule sch;
    sch.K_max = K_max;
    sch.m.assign(K_max + 1, 0);
    for (const auto& ch : charts) {
        if (K_max > ch->order) throw dop_error("schedule range exceeds the chart truncation");
        for (std::size_t nu = 0; nu < ch->nfam(); ++nu)
            for (std::uint32_t k = 1; k <= K_max; ++k) {
                auto mk = min_clearing_exponent(*ch, nu, k);
                if (!mk) {
                    sch.provisional = true;
                    continue;
                }
                sch.m[k] = std::max(sch.m[k], *mk);
            }
    }
    for (std::uint32_t k = 1; k <= K_max; ++k)
        sch.M = std::max(sch.M, (sch.m[k] + k - 1) / k);  // ceil(m/k)
    return sch;
}

/// d^[k] = Delta^{n(k)} delta_nu^[k]; d^[0] is the identity.
inline LocalOp build_dk(const ChartPtr& ch, const ExponentSchedule& sch, std::size_t nu,
                        std::uint32_t k, const LocCtxPtr& ctx = nullptr) {
    if (k > sch.K_max) throw dop_error("k exceeds the schedule range");
    LocCtxPtr use = ctx ? ctx : ch->ctx;
    Monomial idx(ch->nfam(), 0);
    idx.at(nu) = k;
    LocalOp u(ch, use);
    u.add_term(idx, embed(LocElem::of(ch->ctx, ch->delta.pow(sch.n(k))), use));
    return u;
}

// ---------------------------------------------------------------------------
// Coefficient tables.

/// Row a(s, t), t = 0..k, of the clearing table:
///   Delta^{-s} delta_nu^[k] Delta^{n(k)+k+s} = sum_t a(s,t) d_nu^[t],
/// with every a(s,t) in A. Failure to clear is a hard error (it would
/// contradict the table's defining property).
inline std::vector<QuotElem> coeff_a(const ChartPtr& ch, const ExponentSchedule& sch,
                                     std::size_t nu, std::uint32_t k, std::uint32_t s) {
    const auto& v = *ch->variety;
    LocalOp lhs = local_op_mul(
        LocalOp::scalar(ch, LocElem::den_inv_pow(ch->ctx, s)),
        local_op_mul(LocalOp::delta(ch, nu, k),
                     LocalOp::scalar(ch, LocElem::of(ch->ctx, ch->delta.pow(sch.n(k) + k + s)))));
    std::vector<QuotElem> row;
    row.reserve(k + 1);
    for (std::uint32_t t = 0; t <= k; ++t) {
        Monomial idx(ch->nfam(), 0);
        idx.at(nu) = t;
        LocElem w = lhs.coeff(idx).over_den_pow(sch.n(t));
        SolveResult sr = w.clear_denominator();
        if (!sr.found())
            throw dop_error("a-table entry failed to clear into A: " + to_string(w));
        row.emplace_back(v.ideal, *sr.q);
    }
    // nothing outside the single family may appear
    for (const auto& [idx, c] : lhs.terms()) {
        for (std::size_t f = 0; f < ch->nfam(); ++f)
            if (f != nu && idx[f] != 0)
                throw dop_error("a-table source operator left the single family");
    }
    return row;
}

/// Cache of a-table rows keyed by (family, k, shift).
struct CoeffTables {
    std::map<std::array<std::uint32_t, 3>, std::vector<QuotElem>> a;

    const std::vector<QuotElem>& row(const ChartPtr& ch, const ExponentSchedule& sch,
                                     std::size_t nu, std::uint32_t k, std::uint32_t s) {
        std::array<std::uint32_t, 3> key{static_cast<std::uint32_t>(nu), k, s};
        auto it = a.find(key);
        if (it == a.end()) it = a.emplace(key, coeff_a(ch, sch, nu, k, s)).first;
        return it->second;
    }
};

/// psi_{j_nu}(u) = sum_j (ad x_{j_nu})^j(u) delta_nu^[j]; terminates because
/// each ad strictly lowers the order. Used as an independent route to the
/// a-table entries.
inline LocalOp psi_map(const ChartPtr& ch, std::size_t nu, const LocalOp& u) {
    const auto& v = *ch->variety;
    LocalOp x = LocalOp::scalar_in(
        ch, u.ctx(),
        LocElem(u.ctx(), QuotElem(v.ideal, Polynomial::variable(v.amb, ch->comp.at(nu))), 0));
    LocalOp acc = LocalOp::zero(ch, u.ctx());
    LocalOp cur = u;
    std::uint32_t j = 0;
    while (!cur.is_zero()) {
        Monomial idx(ch->nfam(), 0);
        idx.at(nu) = j;
        acc = acc + local_op_mul(cur, LocalOp::delta(ch, u.ctx(), idx));
        cur = local_op_mul(x, cur) - local_op_mul(cur, x);  // ad(x)(cur)
        ++j;
        if (j > ch->order + 1) throw dop_error("psi map failed to terminate");
    }
    return acc;
}

struct CoeffBC {
    std::vector<Monomial> indices;  // multi-indices |k| <= l over the base complement
    std::vector<LocElem> b;         // b_{l,k}, in the product localization
    // Clearing exponents: c_{l,k} = Delta^{m_delta} Delta'^{m_prime} b_{l,k}
    // lies in A. Clearing by base-minor powers alone (m_prime = 0) can be
    // unattainable because the b's live in the target localization; the
    // mixed exponent is recorded in that case.
    std::uint32_t m_delta = 0;
    std::uint32_t m_prime = 0;
    bool base_only_clearing = false;  // pure Delta^m sufficed
    std::vector<QuotElem> c;
    bool provisional = false;  // even mixed clearing hit the scan cap
};

/// Express the target family's delta'^[l] in the base chart's canonical
/// basis by triangular extraction on base-complement monomials:
///   delta'^[l](x^g) = sum_{k <= g} b_{l,k} prod_s C(g_s, k_s) x^{g-k}.
/// Coefficients live in A_{Delta*Delta'}; the result is validated by
/// evaluation comparison on all monomials of degree <= l over all variables.
inline CoeffBC coeff_b_c(const ChartPtr& target, std::size_t sigma, const ChartPtr& base,
                         std::uint32_t l, const LocCtxPtr& joint) {
    const auto& v = *base->variety;
    if (target->variety.get() != base->variety.get()) throw dop_error("charts over different ideals");
    const auto& F = v.amb->field;
    CoeffBC out;

    // multi-indices over the base complement, |k| <= l, in increasing degree
    std::vector<Monomial> idxs;
    for (std::uint32_t d = 0; d <= l; ++d)
        for (const auto& m : detail::enumerate_monomials(base->nfam(), d))
            if (total_degree(m) == d) idxs.push_back(m);

    auto base_monomial = [&](const Monomial& g) {
        Monomial full(v.nvars(), 0);
        for (std::size_t s = 0; s < base->nfam(); ++s) full[base->comp[s]] = g[s];
        return QuotElem(v.ideal, Polynomial::monomial(v.amb, full, F.one()));
    };

    std::map<Monomial, LocElem, MonoDescending> bmap{MonoDescending{v.amb->order}};
    for (const auto& g : idxs) {
        // evaluate the target family on the base-complement monomial
        LocElem val = hs_apply(target->families.at(sigma),
                               LocElem::of(target->ctx, base_monomial(g)), l);
        LocElem rhs = embed(val, joint);
        for (const auto& k : idxs) {
            if (k == g || !mono_divides(k, g)) continue;
            Fp merge = F.one();
            for (std::size_t s = 0; s < base->nfam(); ++s)
                merge = F.mul(merge, F.binomial(g[s], k[s]));
            if (merge.v == 0) continue;
            Monomial diff(g);
            for (std::size_t s = 0; s < base->nfam(); ++s) diff[s] -= k[s];
            rhs = rhs - bmap.at(k).scaled(merge) * LocElem(joint, base_monomial(diff), 0);
        }
        bmap.emplace(g, rhs);
    }

    for (const auto& g : idxs) {
        out.indices.push_back(g);
        out.b.push_back(bmap.at(g));
    }

    // validate the expansion by evaluation on all low-degree monomials
    LocalOp expansion = LocalOp::zero(base, joint);
    for (std::size_t t = 0; t < out.indices.size(); ++t)
        expansion.add_term(out.indices[t], out.b[t]);
    for (const auto& m : detail::enumerate_monomials(v.nvars(), l)) {
        QuotElem xm(v.ideal, Polynomial::monomial(v.amb, m, F.one()));
        LocElem direct = embed(hs_apply(target->families.at(sigma),
                                        LocElem::of(target->ctx, xm), l),
                               joint);
        if (!loc_equal(op_apply(expansion, LocElem(joint, xm, 0)), direct))
            throw dop_error("change-of-base expansion failed its evaluation check");
    }

    // Clearing exponents: scan (a, b) by total a + b, preferring pure
    // base-Delta powers; every entry must clear under one common pair.
    std::uint32_t cap = static_cast<std::uint32_t>(v.solver.m_scan_cap);
    LocElem delta_base = embed(LocElem::of(base->ctx, base->delta), joint);
    LocElem delta_target = embed(LocElem::of(target->ctx, target->delta), joint);
    auto clears_all = [&](std::uint32_t a, std::uint32_t bb) {
        LocElem factor = pow_loc(delta_base, a) * pow_loc(delta_target, bb);
        for (const auto& b : out.b)
            if (!(b * factor).in_A()) return false;
        return true;
    };
    bool found = false;
    for (std::uint32_t total = 0; total <= cap && !found; ++total)
        for (std::uint32_t bb = 0; bb <= total && !found; ++bb)
            if (clears_all(total - bb, bb)) {
                out.m_delta = total - bb;
                out.m_prime = bb;
                found = true;
            }
    if (!found) {
        out.provisional = true;
        return out;
    }
    out.base_only_clearing = (out.m_prime == 0);
    LocElem factor = pow_loc(delta_base, out.m_delta) * pow_loc(delta_target, out.m_prime);
    for (const auto& b : out.b) {
        SolveResult sr = (b * factor).clear_denominator();
        if (!sr.found()) {
            out.provisional = true;
            out.c.clear();
            return out;
        }
        out.c.emplace_back(v.ideal, *sr.q);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Relation suites.

struct RelationInstance {
    std::string key;
    bool pass = false;
    std::string note;
};

struct RelationReport {
    std::vector<RelationInstance> instances;

    bool all_pass() const {
        return std::all_of(instances.begin(), instances.end(),
                           [](const RelationInstance& r) { return r.pass; });
    }
    std::size_t count_failed() const {
        return static_cast<std::size_t>(
            std::count_if(instances.begin(), instances.end(),
                          [](const RelationInstance& r) { return !r.pass; }));
    }
};

/// The four defining-relation families of D(A_Delta) in terms of the
/// delta^[k]: commutation, iterativity, the Kronecker commutator with
/// complement variables, and the coefficient commutator with bound ones.
inline RelationReport verify_delta_relations(const ChartPtr& ch, std::uint32_t k_max) {
    const auto& v = *ch->variety;
    const auto& F = v.amb->field;
    RelationReport rep;
    auto xvar = [&](std::size_t c) {
        return LocalOp::scalar(ch, LocElem::of(ch->ctx, QuotElem(v.ideal, Polynomial::variable(v.amb, c))));
    };

    for (std::size_t nu = 0; nu < ch->nfam(); ++nu) {
        for (std::size_t mu = nu + 1; mu < ch->nfam(); ++mu)
            for (std::uint32_t k = 1; k <= k_max; ++k)
                for (std::uint32_t L = 1; L <= k_max; ++L) {
                    LocalOp a = LocalOp::delta(ch, nu, k), b = LocalOp::delta(ch, mu, L);
                    bool ok = op_equal_checked(local_op_mul(a, b), local_op_mul(b, a));
                    rep.instances.push_back({"commute nu=" + std::to_string(nu) + " mu=" +
                                                 std::to_string(mu) + " k=" + std::to_string(k) +
                                                 " l=" + std::to_string(L),
                                             ok, ""});
                }
        for (std::uint32_t k = 1; k <= k_max; ++k)
            for (std::uint32_t L = 1; L <= k_max; ++L) {
                if (k + L > ch->order) continue;
                LocalOp lhs = local_op_mul(LocalOp::delta(ch, nu, k), LocalOp::delta(ch, nu, L));
                LocalOp rhs = LocalOp::delta(ch, nu, k + L).scaled(F.binomial(k + L, k));
                bool ok = op_equal_checked(lhs, rhs);
                rep.instances.push_back({"iterative nu=" + std::to_string(nu) +
                                             " k=" + std::to_string(k) + " l=" + std::to_string(L),
                                         ok, ""});
            }
        for (std::uint32_t k = 1; k <= k_max; ++k) {
            for (std::size_t mu = 0; mu < ch->nfam(); ++mu) {
                LocalOp dk = LocalOp::delta(ch, nu, k);
                LocalOp x = xvar(ch->comp[mu]);
                LocalOp lhs = local_op_mul(dk, x) - local_op_mul(x, dk);
                LocalOp rhs = (mu == nu) ? LocalOp::delta(ch, nu, k - 1) : LocalOp::zero(ch);
                bool ok = op_equal_checked(lhs, rhs);
                rep.instances.push_back({"kronecker nu=" + std::to_string(nu) +
                                             " mu=" + std::to_string(mu) + " k=" + std::to_string(k),
                                         ok, ""});
            }
            for (std::size_t s = 0; s < ch->j.size(); ++s) {
                LocalOp dk = LocalOp::delta(ch, nu, k);
                LocalOp x = xvar(ch->j[s]);
                LocalOp lhs = local_op_mul(dk, x) - local_op_mul(x, dk);
                LocalOp rhs = LocalOp::zero(ch);
                QuotElem xs(v.ideal, Polynomial::variable(v.amb, ch->j[s]));
                for (std::uint32_t t = 1; t <= k; ++t) {
                    LocElem dtx = hs_apply(ch->families[nu], LocElem::of(ch->ctx, xs), t);
                    rhs = rhs + LocalOp::delta(ch, nu, k - t).scaled(dtx);
                }
                bool ok = op_equal_checked(lhs, rhs);
                rep.instances.push_back({"bound-comm nu=" + std::to_string(nu) +
                                             " s=" + std::to_string(s) + " k=" + std::to_string(k),
                                         ok, ""});
            }
        }
    }
    return rep;
}

/// The cleared relation families of the d^[k] over one chart: commutation
/// and iterativity conjugated through the a-tables, plus the Kronecker and
/// bound-variable commutators, for all nu (and pairs nu, mu), k, l <= the
/// given bounds.
inline RelationReport verify_cleared_relations(const ChartPtr& ch, const ExponentSchedule& sch,
                                 std::uint32_t k_max, std::uint32_t l_max,
                                 CoeffTables* tables = nullptr) {
    const auto& v = *ch->variety;
    const auto& F = v.amb->field;
    RelationReport rep;
    CoeffTables local;
    CoeffTables& tab = tables ? *tables : local;
    auto dpow = [&](std::uint32_t e) {
        return LocalOp::scalar(ch, LocElem::of(ch->ctx, ch->delta.pow(e)));
    };
    auto xvar = [&](std::size_t c) {
        return LocalOp::scalar(ch, LocElem::of(ch->ctx, QuotElem(v.ideal, Polynomial::variable(v.amb, c))));
    };
    auto dk = [&](std::size_t nu, std::uint32_t k) { return build_dk(ch, sch, nu, k); };
    auto sum_a_d = [&](std::size_t nu, std::uint32_t k, std::uint32_t s) {
        const std::vector<QuotElem>& row = tab.row(ch, sch, nu, k, s);
        LocalOp acc = LocalOp::zero(ch);
        for (std::uint32_t t = 0; t <= k; ++t)
            acc = acc + local_op_mul(LocalOp::scalar(ch, LocElem::of(ch->ctx, row[t])), dk(nu, t));
        return acc;
    };

    for (std::size_t nu = 0; nu < ch->nfam(); ++nu) {
        // cleared commutation between two families
        for (std::size_t mu = 0; mu < ch->nfam(); ++mu)
            for (std::uint32_t k = 1; k <= k_max; ++k)
                for (std::uint32_t L = 1; L <= l_max; ++L) {
                    LocalOp lhs = local_op_mul(
                        dpow(sch.n(L)),
                        local_op_mul(dk(nu, k), local_op_mul(sum_a_d(mu, L, 0), dpow(sch.n(k) + k))));
                    LocalOp rhs = local_op_mul(
                        dpow(sch.n(k)),
                        local_op_mul(dk(mu, L), local_op_mul(sum_a_d(nu, k, 0), dpow(sch.n(L) + L))));
                    bool ok = op_equal_checked(lhs, rhs);
                    rep.instances.push_back({"cleared-commute nu=" + std::to_string(nu) + " mu=" +
                                                 std::to_string(mu) + " k=" + std::to_string(k) +
                                                 " l=" + std::to_string(L),
                                             ok, ""});
                }
        // cleared iterativity
        for (std::uint32_t k = 1; k <= k_max; ++k)
            for (std::uint32_t L = 1; L <= l_max; ++L) {
                if (k + L > sch.K_max) continue;
                LocalOp lhs =
                    local_op_mul(dpow(sch.n(k + L) - sch.n(k)),
                                 local_op_mul(dk(nu, k), sum_a_d(nu, L, 0)));
                LocalOp rhs =
                    local_op_mul(dk(nu, k + L), dpow(sch.n(L) + L)).scaled(F.binomial(k + L, L));
                bool ok = op_equal_checked(lhs, rhs);
                rep.instances.push_back(
                    {"cleared-iterative nu=" + std::to_string(nu) + " k=" + std::to_string(k) + " l=" + std::to_string(L),
                     ok, ""});
            }
        // Kronecker commutator with complement variables
        for (std::uint32_t k = 1; k <= k_max; ++k)
            for (std::size_t mu = 0; mu < ch->nfam(); ++mu) {
                LocalOp x = xvar(ch->comp[mu]);
                LocalOp lhs = local_op_mul(dk(nu, k), x) - local_op_mul(x, dk(nu, k));
                LocalOp rhs = (mu == nu)
                                  ? local_op_mul(dpow(sch.n(k) - sch.n(k - 1)), dk(nu, k - 1))
                                  : LocalOp::zero(ch);
                bool ok = op_equal_checked(lhs, rhs);
                rep.instances.push_back({"cleared-kronecker nu=" + std::to_string(nu) + " mu=" + std::to_string(mu) +
                                             " k=" + std::to_string(k),
                                         ok, ""});
            }
        // commutator with bound variables
        for (std::uint32_t k = 1; k <= k_max; ++k)
            for (std::size_t s = 0; s < ch->j.size(); ++s) {
                LocalOp x = xvar(ch->j[s]);
                LocalOp lhs = local_op_mul(dk(nu, k), x) - local_op_mul(x, dk(nu, k));
                LocalOp rhs = LocalOp::zero(ch);
                QuotElem xs(v.ideal, Polynomial::variable(v.amb, ch->j[s]));
                for (std::uint32_t t = 1; t <= k; ++t) {
                    LocElem val = op_apply(dk(nu, t), LocElem::of(ch->ctx, xs));
                    SolveResult sr = val.clear_denominator();
                    if (!sr.found()) throw dop_error("d^[t](x_js) failed to clear into A");
                    QuotElem dtx(v.ideal, *sr.q);
                    rhs = rhs + local_op_mul(
                                    dpow(sch.n(k) - sch.n(t) - sch.n(k - t)),
                                    local_op_mul(LocalOp::scalar(ch, LocElem::of(ch->ctx, dtx)),
                                                 dk(nu, k - t)));
                }
                bool ok = op_equal_checked(lhs, rhs);
                rep.instances.push_back({"cleared-bound nu=" + std::to_string(nu) + " s=" + std::to_string(s) +
                                             " k=" + std::to_string(k),
                                         ok, ""});
            }
    }
    return rep;
}

/// The cross-chart change-of-base relation. The target family's d'^[l],
/// expressed in the base canonical basis via the c-table, satisfies
///   Delta^{m(l)} d'^[l] Delta^E
///     = Delta'^{n(l)} sum_k c_{l,k} prod_rho (sum_t a_rho(Sigma_{rho-1}, t) d_rho^[t])
///       * Delta^{E - Sigma(k)}
/// with Sigma_rho(k) the running sums of n(k_s)+k_s and E their maximum over
/// |k| <= l; the trailing balance factor makes the exponent uniform (the
/// per-term telescoping uses k-dependent exponents).
inline RelationReport verify_change_of_base(const ChartPtr& target, const ChartPtr& base,
                                const ExponentSchedule& sch, std::uint32_t l_max,
                                CoeffTables* tables = nullptr) {
    RelationReport rep;
    CoeffTables local;
    CoeffTables& tab = tables ? *tables : local;
    LocCtxPtr joint = (target.get() == base.get()) ? base->ctx
                                                   : make_product_ctx(base->ctx, target->ctx);
    LocElem delta_base = embed(LocElem::of(base->ctx, base->delta), joint);
    LocElem delta_target = embed(LocElem::of(target->ctx, target->delta), joint);

    auto sigma_sum = [&](const Monomial& k, std::size_t upto) {
        std::uint32_t acc = 0;
        for (std::size_t s = 0; s < upto; ++s) acc += sch.n(k[s]) + k[s];
        return acc;
    };

    for (std::size_t sig = 0; sig < target->nfam(); ++sig) {
        for (std::uint32_t l = 1; l <= l_max; ++l) {
            CoeffBC bc = coeff_b_c(target, sig, base, l, joint);
            if (bc.provisional) {
                rep.instances.push_back({"change-of-base sigma=" + std::to_string(sig) + " l=" + std::to_string(l),
                                         false, "clearing undecided at the scan cap"});
                continue;
            }
            std::uint32_t E = 0;
            for (const auto& k : bc.indices)
                E = std::max(E, sigma_sum(k, base->nfam()));

            // LHS: Delta^{m_delta} Delta'^{m_prime} d'^[l] Delta^E with
            // d'^[l] = Delta'^{n(l)} sum_k b_{l,k} delta^[k]
            LocalOp dprime(base, joint);
            for (std::size_t t = 0; t < bc.indices.size(); ++t)
                dprime.add_term(bc.indices[t], bc.b[t]);
            LocalOp lhs = local_op_mul(
                LocalOp::scalar_in(base, joint,
                                   pow_loc(delta_base, bc.m_delta) *
                                       pow_loc(delta_target, bc.m_prime + sch.n(l))),
                local_op_mul(dprime,
                             LocalOp::scalar_in(base, joint, pow_loc(delta_base, E))));

            // RHS
            LocalOp rhs = LocalOp::zero(base, joint);
            for (std::size_t t = 0; t < bc.indices.size(); ++t) {
                const Monomial& kk = bc.indices[t];
                LocalOp term =
                    LocalOp::scalar_in(base, joint, LocElem(joint, bc.c[t], 0));
                for (std::size_t rho = 0; rho < base->nfam(); ++rho) {
                    std::uint32_t shift = sigma_sum(kk, rho);
                    const std::vector<QuotElem>& arow = tab.row(base, sch, rho, kk[rho], shift);
                    LocalOp factor = LocalOp::zero(base, joint);
                    for (std::uint32_t u = 0; u <= kk[rho]; ++u)
                        factor = factor +
                                 local_op_mul(
                                     LocalOp::scalar_in(base, joint,
                                                        embed(LocElem::of(base->ctx, arow[u]), joint)),
                                     build_dk(base, sch, rho, u, joint));
                    term = local_op_mul(term, factor);
                }
                std::uint32_t balance = E - sigma_sum(kk, base->nfam());
                term = local_op_mul(term,
                                    LocalOp::scalar_in(base, joint, pow_loc(delta_base, balance)));
                rhs = rhs + term;
            }
            rhs = local_op_mul(
                LocalOp::scalar_in(base, joint, pow_loc(delta_target, sch.n(l))), rhs);

            bool ok = op_equal_checked(lhs, rhs);
            std::string note = "m_delta=" + std::to_string(bc.m_delta) +
                               " m_prime=" + std::to_string(bc.m_prime) +
                               (bc.base_only_clearing ? "" : " (mixed clearing)");
            rep.instances.push_back(
                {"change-of-base sigma=" + std::to_string(sig) + " l=" + std::to_string(l), ok, note});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// The Jacobian-ideal invariance shadow: d^[k] maps the generators of a_r
// into a_r + I.

inline RelationReport check_jacobian_invariance(const ChartPtr& ch, const ExponentSchedule& sch,
                                                std::uint32_t k_max) {
    const auto& v = *ch->variety;
    RelationReport rep;
    // generators of a_r: all r x r minors
    std::vector<Polynomial> minors;
    for (const auto& rows : detail::combinations(v.jac.rows(), v.rank()))
        for (const auto& cols : detail::combinations(v.jac.cols(), v.rank()))
            minors.push_back(minor_det(v.jac, rows, cols));
    std::vector<Polynomial> aug = v.ideal->generators();
    aug.insert(aug.end(), minors.begin(), minors.end());
    Ideal a_r_plus_I(v.amb, aug);

    for (std::size_t nu = 0; nu < ch->nfam(); ++nu)
        for (std::uint32_t k = 0; k <= k_max; ++k) {
            bool ok = true;
            std::string note;
            for (const auto& g : minors) {
                LocElem val = op_apply(build_dk(ch, sch, nu, k), QuotElem(v.ideal, g));
                SolveResult sr = val.clear_denominator();
                if (!sr.found()) {
                    ok = false;
                    note = "image failed to clear into A";
                    break;
                }
                if (!a_r_plus_I.contains(*sr.q)) {
                    ok = false;
                    note = "image escapes a_r + I: " + to_string(*sr.q);
                    break;
                }
            }
            rep.instances.push_back(
                {"invariance nu=" + std::to_string(nu) + " k=" + std::to_string(k), ok, note});
        }
    return rep;
}

}  // namespace charp

#endif  // CHARP_DOP_HPP
