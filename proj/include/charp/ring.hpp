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

#ifndef CHARP_RING_HPP
#define CHARP_RING_HPP

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "charp/poly.hpp"

namespace charp {

class ring_error : public std::runtime_error {
   public:
    explicit ring_error(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Groebner bases

namespace detail {

/// One full division step set: rewrite f modulo G until no term of the
/// remainder is divisible by a leading monomial of G.
inline Polynomial normal_form_impl(Polynomial f, const std::vector<Polynomial>& G) {
    if (G.empty() || f.is_zero()) return f;
    Polynomial rem(f.ambient());
    const auto& F = f.ambient()->field;
    while (!f.is_zero()) {
        const Monomial& lm = f.leading_monomial();
        Fp lc = f.leading_coeff();
        bool reduced = false;
        for (const Polynomial& g : G) {
            if (g.is_zero()) continue;
            if (!mono_divides(g.leading_monomial(), lm)) continue;
            Fp factor = F.div(lc, g.leading_coeff());
            Monomial shift = mono_div(lm, g.leading_monomial());
            f = f - Polynomial::monomial(f.ambient(), shift, factor) * g;
            reduced = true;
            break;
        }
        if (!reduced) {
            rem.add_term(lm, lc);
            f.add_term(lm, F.neg(lc));
        }
    }
    return rem;
}

inline Polynomial s_polynomial(const Polynomial& f, const Polynomial& g) {
    const auto& F = f.ambient()->field;
    Monomial lcm = mono_lcm(f.leading_monomial(), g.leading_monomial());
    Polynomial a = Polynomial::monomial(f.ambient(), mono_div(lcm, f.leading_monomial()),
                                        F.inv(f.leading_coeff())) *
                   f;
    Polynomial b = Polynomial::monomial(g.ambient(), mono_div(lcm, g.leading_monomial()),
                                        F.inv(g.leading_coeff())) *
                   g;
    return a - b;
}

/// Buchberger with the coprime-lcm criterion, followed by autoreduction to
/// the reduced (monic, minimal) basis.
inline std::vector<Polynomial> buchberger(std::vector<Polynomial> gens, const AmbientPtr& amb) {
    std::vector<Polynomial> G;
    for (auto& g : gens)
        if (!g.is_zero()) G.push_back(g.scaled(amb->field.inv(g.leading_coeff())));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < G.size(); ++i)
        for (std::size_t j = i + 1; j < G.size(); ++j) pairs.emplace_back(i, j);
    while (!pairs.empty()) {
        // normal selection: smallest lcm first
        std::size_t best = 0;
        Monomial best_lcm =
            mono_lcm(G[pairs[0].first].leading_monomial(), G[pairs[0].second].leading_monomial());
        for (std::size_t t = 1; t < pairs.size(); ++t) {
            Monomial l =
                mono_lcm(G[pairs[t].first].leading_monomial(), G[pairs[t].second].leading_monomial());
            if (mono_cmp(l, best_lcm, amb->order) < 0) {
                best_lcm = l;
                best = t;
            }
        }
        auto [i, j] = pairs[best];
        pairs.erase(pairs.begin() + static_cast<std::ptrdiff_t>(best));
        const Monomial &mi = G[i].leading_monomial(), &mj = G[j].leading_monomial();
        if (mono_mul(mi, mj) == mono_lcm(mi, mj)) continue;  // coprime leading terms
        Polynomial s = normal_form_impl(s_polynomial(G[i], G[j]), G);
        if (s.is_zero()) continue;
        s = s.scaled(amb->field.inv(s.leading_coeff()));
        for (std::size_t t = 0; t < G.size(); ++t) pairs.emplace_back(t, G.size());
        G.push_back(std::move(s));
    }
    // autoreduce
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < G.size(); ++i) {
            std::vector<Polynomial> others;
            others.reserve(G.size() - 1);
            for (std::size_t j = 0; j < G.size(); ++j)
                if (j != i) others.push_back(G[j]);
            Polynomial r = normal_form_impl(G[i], others);
            if (r.is_zero()) {
                G.erase(G.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
            r = r.scaled(amb->field.inv(r.leading_coeff()));
            if (!(r == G[i])) {
                G[i] = std::move(r);
                changed = true;
            }
        }
    }
    std::sort(G.begin(), G.end(), [&](const Polynomial& a, const Polynomial& b) {
        return mono_cmp(a.leading_monomial(), b.leading_monomial(), amb->order) > 0;
    });
    return G;
}

}  // namespace detail

/// An ideal of P_n with its reduced Groebner basis, computed eagerly at
/// construction so the object is immutable afterwards (safe for concurrent
/// readers).
class Ideal {
   public:
    Ideal(AmbientPtr amb, std::vector<Polynomial> gens)
        : amb_(std::move(amb)), gens_(std::move(gens)) {
        for (const auto& g : gens_) require_same_ambient(g.ambient(), amb_);
        gb_ = detail::buchberger(gens_, amb_);
    }

    const AmbientPtr& ambient() const { return amb_; }
    const std::vector<Polynomial>& generators() const { return gens_; }
    const std::vector<Polynomial>& gb() const { return gb_; }

    Polynomial normal_form(const Polynomial& f) const {
        require_same_ambient(f.ambient(), amb_);
        return detail::normal_form_impl(f, gb_);
    }

    bool contains(const Polynomial& f) const { return normal_form(f).is_zero(); }

    bool is_unit_ideal() const { return gb_.size() == 1 && gb_[0].is_constant() && !gb_[0].is_zero(); }

    bool is_zero_ideal() const { return gb_.empty(); }

   private:
    AmbientPtr amb_;
    std::vector<Polynomial> gens_;
    std::vector<Polynomial> gb_;
};

using IdealPtr = std::shared_ptr<const Ideal>;

inline IdealPtr make_ideal(AmbientPtr amb, std::vector<Polynomial> gens) {
    return std::make_shared<const Ideal>(std::move(amb), std::move(gens));
}

inline void require_same_ideal(const IdealPtr& a, const IdealPtr& b) {
    if (a.get() != b.get()) throw ring_error("ideal mismatch");
}

// ---------------------------------------------------------------------------
// Elements of A = P_n / I, stored as Groebner normal forms.

class QuotElem {
   public:
    QuotElem(IdealPtr I, const Polynomial& raw) : ideal_(std::move(I)), nf_(ideal_->normal_form(raw)) {}

    static QuotElem zero(const IdealPtr& I) { return QuotElem(I, Polynomial::zero(I->ambient())); }
    static QuotElem one(const IdealPtr& I) { return QuotElem(I, Polynomial::constant(I->ambient(), 1)); }

    const IdealPtr& ideal() const { return ideal_; }
    const Polynomial& nf() const { return nf_; }
    const AmbientPtr& ambient() const { return ideal_->ambient(); }
    bool is_zero() const { return nf_.is_zero(); }

    friend QuotElem operator+(const QuotElem& a, const QuotElem& b) {
        require_same_ideal(a.ideal_, b.ideal_);
        return QuotElem(a.ideal_, a.nf_ + b.nf_);
    }
    friend QuotElem operator-(const QuotElem& a, const QuotElem& b) {
        require_same_ideal(a.ideal_, b.ideal_);
        return QuotElem(a.ideal_, a.nf_ - b.nf_);
    }
    friend QuotElem operator-(const QuotElem& a) { return QuotElem(a.ideal_, -a.nf_); }
    friend QuotElem operator*(const QuotElem& a, const QuotElem& b) {
        require_same_ideal(a.ideal_, b.ideal_);
        return QuotElem(a.ideal_, a.nf_ * b.nf_);
    }

    QuotElem scaled(Fp c) const { return QuotElem(ideal_, nf_.scaled(c)); }

    QuotElem pow(std::uint64_t e) const {
        QuotElem acc = one(ideal_);
        QuotElem base(*this);
        while (e > 0) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    friend bool operator==(const QuotElem& a, const QuotElem& b) {
        require_same_ideal(a.ideal_, b.ideal_);
        return a.nf_ == b.nf_;
    }
    friend bool operator!=(const QuotElem& a, const QuotElem& b) { return !(a == b); }

   private:
    IdealPtr ideal_;
    Polynomial nf_;
};

inline std::string to_string(const QuotElem& a) { return to_string(a.nf()); }

// ---------------------------------------------------------------------------
// Cofactor solver: find q with q * g == b  (mod I).
//
// Membership b in I + (g) is decided exactly by a Groebner basis of the
// augmented ideal; the witness q is then found by linear algebra over F_p on
// a degree-bounded space of standard monomials, escalating the bound.

struct SolverOptions {
    int slack = 4;             // added to the initial degree bound
    int escalation_step = 3;   // bound increase per retry
    int escalation_rounds = 5; // retries after the initial attempt
    std::size_t m_scan_cap = 32;  // cap for minimal-exponent scans
};

enum class SolveStatus { found, not_member, undecided };

struct SolveResult {
    SolveStatus status = SolveStatus::undecided;
    std::optional<Polynomial> q;

    bool found() const { return status == SolveStatus::found; }
};

namespace detail {

inline void enumerate_monomials_rec(std::size_t n, std::uint32_t max_deg, Monomial& cur,
                                    std::size_t idx, std::uint32_t used,
                                    std::vector<Monomial>& out) {
    if (idx == n) {
        out.push_back(cur);
        return;
    }
    for (std::uint32_t e = 0; e + used <= max_deg; ++e) {
        cur[idx] = e;
        enumerate_monomials_rec(n, max_deg, cur, idx + 1, used + e, out);
    }
    cur[idx] = 0;
}

inline std::vector<Monomial> enumerate_monomials(std::size_t n, std::uint32_t max_deg) {
    std::vector<Monomial> out;
    Monomial cur(n, 0);
    enumerate_monomials_rec(n, max_deg, cur, 0, 0, out);
    return out;
}

/// Standard monomials of I (not divisible by any GB leading monomial),
/// up to the given total degree.
inline std::vector<Monomial> standard_monomials(const Ideal& I, std::uint32_t max_deg) {
    std::vector<Monomial> out;
    for (auto& m : enumerate_monomials(I.ambient()->nvars(), max_deg)) {
        bool reducible = false;
        for (const auto& g : I.gb())
            if (mono_divides(g.leading_monomial(), m)) {
                reducible = true;
                break;
            }
        if (!reducible) out.push_back(std::move(m));
    }
    return out;
}

/// Solve the F_p linear system (columns) * x = rhs; any solution.
/// Columns and rhs are sparse polynomials read as coordinate vectors over the
/// union of their supports.
inline std::optional<std::vector<Fp>> solve_linear(const PrimeField& F,
                                                   const std::vector<Polynomial>& columns,
                                                   const Polynomial& rhs) {
    std::map<Monomial, std::size_t> row_of;
    auto touch = [&](const Polynomial& f) {
        for (const auto& [m, c] : f.terms()) row_of.emplace(m, 0);
    };
    for (const auto& col : columns) touch(col);
    touch(rhs);
    std::size_t nrows = 0;
    for (auto& [m, idx] : row_of) idx = nrows++;
    std::size_t ncols = columns.size();

    std::vector<std::vector<std::uint32_t>> M(nrows, std::vector<std::uint32_t>(ncols + 1, 0));
    for (std::size_t j = 0; j < ncols; ++j)
        for (const auto& [m, c] : columns[j].terms()) M[row_of[m]][j] = c.v;
    for (const auto& [m, c] : rhs.terms()) M[row_of[m]][ncols] = c.v;

    std::vector<std::size_t> pivot_col(nrows, SIZE_MAX);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < ncols && rank < nrows; ++col) {
        std::size_t piv = SIZE_MAX;
        for (std::size_t row = rank; row < nrows; ++row)
            if (M[row][col] != 0) {
                piv = row;
                break;
            }
        if (piv == SIZE_MAX) continue;
        std::swap(M[rank], M[piv]);
        Fp inv = F.inv(Fp{M[rank][col]});
        for (std::size_t j = col; j <= ncols; ++j)
            M[rank][j] = F.mul(Fp{M[rank][j]}, inv).v;
        for (std::size_t row = 0; row < nrows; ++row) {
            if (row == rank || M[row][col] == 0) continue;
            Fp f = Fp{M[row][col]};
            for (std::size_t j = col; j <= ncols; ++j)
                M[row][j] = F.sub(Fp{M[row][j]}, F.mul(f, Fp{M[rank][j]})).v;
        }
        pivot_col[rank] = col;
        ++rank;
    }
    for (std::size_t row = rank; row < nrows; ++row)
        if (M[row][ncols] != 0) return std::nullopt;  // inconsistent
    std::vector<Fp> x(ncols, Fp{0});
    for (std::size_t row = 0; row < rank; ++row) x[pivot_col[row]] = Fp{M[row][ncols]};
    return x;
}

}  // namespace detail

/// Find q with q*g == b (mod I). `not_member` is exact (Groebner membership
/// in I + (g)); `undecided` means membership holds but no witness was found
/// within the escalated degree bounds.
inline SolveResult solve_cofactor(const Ideal& I, const Polynomial& g, const Polynomial& b,
                                  const SolverOptions& opts = {}) {
    const auto& amb = I.ambient();
    Polynomial bn = I.normal_form(b);
    if (bn.is_zero()) return {SolveStatus::found, Polynomial::zero(amb)};
    Polynomial gn = I.normal_form(g);
    if (gn.is_zero()) return {SolveStatus::not_member, std::nullopt};

    std::vector<Polynomial> aug = I.generators();
    aug.push_back(gn);
    Ideal Iaug(amb, std::move(aug));
    if (!Iaug.normal_form(bn).is_zero()) return {SolveStatus::not_member, std::nullopt};

    std::uint32_t max_gen_deg = 0;
    for (const auto& f : I.generators())
        max_gen_deg = std::max<std::uint32_t>(max_gen_deg, static_cast<std::uint32_t>(f.degree()));
    std::uint32_t bound = static_cast<std::uint32_t>(bn.degree()) + max_gen_deg +
                          static_cast<std::uint32_t>(std::max(opts.slack, 0));
    for (int round = 0; round <= opts.escalation_rounds; ++round) {
        std::vector<Monomial> basis = detail::standard_monomials(I, bound);
        std::vector<Polynomial> cols;
        cols.reserve(basis.size());
        for (const auto& m : basis)
            cols.push_back(I.normal_form(Polynomial::monomial(amb, m, amb->field.one()) * gn));
        auto sol = detail::solve_linear(amb->field, cols, bn);
        if (sol) {
            Polynomial q(amb);
            for (std::size_t j = 0; j < basis.size(); ++j) q.add_term(basis[j], (*sol)[j]);
            return {SolveStatus::found, std::move(q)};
        }
        bound += static_cast<std::uint32_t>(opts.escalation_step);
    }
    return {SolveStatus::undecided, std::nullopt};
}

/// Exact membership b in (g) + I, without producing a witness.
inline bool in_principal_plus_ideal(const Ideal& I, const Polynomial& g, const Polynomial& b) {
    Polynomial bn = I.normal_form(b);
    if (bn.is_zero()) return true;
    Polynomial gn = I.normal_form(g);
    if (gn.is_zero()) return false;
    std::vector<Polynomial> aug = I.generators();
    aug.push_back(gn);
    Ideal Iaug(I.ambient(), std::move(aug));
    return Iaug.normal_form(bn).is_zero();
}

// ---------------------------------------------------------------------------
// Localization A_d at the powers of a fixed denominator d (a nonzero element
// of A; in practice a minor Delta or a product of two minors).

struct LocCtx;
using LocCtxPtr = std::shared_ptr<const LocCtx>;

struct LocCtx {
    IdealPtr ideal;
    QuotElem den;            // the fixed denominator; nonzero in A
    std::string den_symbol;  // used by printers, e.g. "Delta"
    SolverOptions solver;    // bounds for witness searches in this ring
    // Embeddings of coarser contexts: (source ctx, cofactor c) with
    // source.den * c == den, so  num/src^s  ->  num*c^s / den^s.
    std::vector<std::pair<LocCtxPtr, QuotElem>> parents;

    LocCtx(IdealPtr I, QuotElem d, std::string sym, SolverOptions opts)
        : ideal(std::move(I)), den(std::move(d)), den_symbol(std::move(sym)), solver(opts) {
        if (den.is_zero()) throw ring_error("localization denominator lies in the ideal");
    }
};

inline LocCtxPtr make_loc_ctx(IdealPtr I, QuotElem den, std::string sym = "Delta",
                              SolverOptions opts = {}) {
    return std::make_shared<const LocCtx>(std::move(I), std::move(den), std::move(sym), opts);
}

/// Context for A_{d1*d2}, remembering how to embed elements of A_{d1}, A_{d2}.
inline LocCtxPtr make_product_ctx(const LocCtxPtr& a, const LocCtxPtr& b) {
    require_same_ideal(a->ideal, b->ideal);
    auto ctx = std::make_shared<LocCtx>(a->ideal, a->den * b->den,
                                        a->den_symbol + "*" + b->den_symbol, a->solver);
    ctx->parents.emplace_back(a, b->den);
    ctx->parents.emplace_back(b, a->den);
    return ctx;
}

/// Element num / den^s of the localization. Representations need not be
/// minimal; equality is decided by cross-multiplication, which is sound
/// because A is a domain and den is not in I.
class LocElem {
   public:
    LocElem(LocCtxPtr ctx, QuotElem num, std::uint32_t s)
        : ctx_(std::move(ctx)), num_(std::move(num)), s_(s) {
        require_same_ideal(ctx_->ideal, num_.ideal());
    }

    static LocElem zero(const LocCtxPtr& ctx) { return LocElem(ctx, QuotElem::zero(ctx->ideal), 0); }
    static LocElem one(const LocCtxPtr& ctx) { return LocElem(ctx, QuotElem::one(ctx->ideal), 0); }
    static LocElem of(const LocCtxPtr& ctx, const QuotElem& a) { return LocElem(ctx, a, 0); }
    /// den^{-k}
    static LocElem den_inv_pow(const LocCtxPtr& ctx, std::uint32_t k) {
        return LocElem(ctx, QuotElem::one(ctx->ideal), k);
    }

    const LocCtxPtr& ctx() const { return ctx_; }
    const QuotElem& num() const { return num_; }
    std::uint32_t den_exp() const { return s_; }
    bool is_zero() const { return num_.is_zero(); }

    friend LocElem operator+(const LocElem& a, const LocElem& b) {
        a.require_same_ctx(b);
        std::uint32_t s = std::max(a.s_, b.s_);
        QuotElem num = a.num_ * a.ctx_->den.pow(s - a.s_) + b.num_ * b.ctx_->den.pow(s - b.s_);
        return LocElem(a.ctx_, std::move(num), s);
    }
    friend LocElem operator-(const LocElem& a) { return LocElem(a.ctx_, -a.num_, a.s_); }
    friend LocElem operator-(const LocElem& a, const LocElem& b) { return a + (-b); }
    friend LocElem operator*(const LocElem& a, const LocElem& b) {
        a.require_same_ctx(b);
        return LocElem(a.ctx_, a.num_ * b.num_, a.s_ + b.s_);
    }

    LocElem scaled(Fp c) const { return LocElem(ctx_, num_.scaled(c), s_); }

    /// Multiply by den^k, cancelling against the stored exponent.
    LocElem times_den_pow(std::uint32_t k) const {
        if (k <= s_) return LocElem(ctx_, num_, s_ - k);
        return LocElem(ctx_, num_ * ctx_->den.pow(k - s_), 0);
    }

    /// Divide by den^k.
    LocElem over_den_pow(std::uint32_t k) const { return LocElem(ctx_, num_, s_ + k); }

    friend bool loc_equal(const LocElem& a, const LocElem& b) {
        a.require_same_ctx(b);
        std::uint32_t s = std::max(a.s_, b.s_);
        return a.num_ * a.ctx_->den.pow(s - a.s_) == b.num_ * b.ctx_->den.pow(s - b.s_);
    }

    /// Exact: does this element lie in A (image of the natural map)?
    bool in_A() const {
        if (s_ == 0 || num_.is_zero()) return true;
        return in_principal_plus_ideal(*ctx_->ideal, ctx_->den.pow(s_).nf(), num_.nf());
    }

    /// Witness for membership in A: w with w * den^s == num (mod I).
    SolveResult clear_denominator() const {
        if (s_ == 0 || num_.is_zero()) return {SolveStatus::found, num_.nf()};
        return solve_cofactor(*ctx_->ideal, ctx_->den.pow(s_).nf(), num_.nf(), ctx_->solver);
    }

    /// Lower the stored exponent as far as single-step division succeeds.
    LocElem reduced() const {
        LocElem r(*this);
        while (r.s_ > 0) {
            if (r.num_.is_zero()) return LocElem(ctx_, r.num_, 0);
            SolveResult step =
                solve_cofactor(*ctx_->ideal, ctx_->den.nf(), r.num_.nf(), ctx_->solver);
            if (!step.found()) break;
            r = LocElem(ctx_, QuotElem(ctx_->ideal, *step.q), r.s_ - 1);
        }
        return r;
    }

   private:
    void require_same_ctx(const LocElem& b) const {
        if (ctx_.get() == b.ctx_.get()) return;
        if (ctx_->ideal.get() == b.ctx_->ideal.get() && ctx_->den == b.ctx_->den) return;
        throw ring_error("localization context mismatch");
    }

    LocCtxPtr ctx_;
    QuotElem num_;
    std::uint32_t s_;
};

/// Embed an element into a finer context (target.den = a.den * cofactor).
inline LocElem embed(const LocElem& a, const LocCtxPtr& target) {
    if (a.ctx().get() == target.get() ||
        (a.ctx()->ideal.get() == target->ideal.get() && a.ctx()->den == target->den))
        return LocElem(target, a.num(), a.den_exp());
    if (a.den_exp() == 0) return LocElem(target, a.num(), 0);
    for (const auto& [src, cof] : target->parents) {
        if (src.get() == a.ctx().get() || src->den == a.ctx()->den)
            return LocElem(target, a.num() * cof.pow(a.den_exp()), a.den_exp());
    }
    throw ring_error("no embedding into the requested localization context");
}

inline std::string to_string(const LocElem& a) {
    if (a.den_exp() == 0) return to_string(a.num());
    std::string num = a.num().nf().nterms() > 1 ? "(" + to_string(a.num()) + ")" : to_string(a.num());
    std::string den = a.ctx()->den_symbol;
    if (a.ctx()->den_symbol.find('*') != std::string::npos) den = "(" + den + ")";
    if (a.den_exp() > 1) den += "^" + std::to_string(a.den_exp());
    return num + "/" + den;
}

// ---------------------------------------------------------------------------
// Rank, non-singular tuples, the critical set, and the Jacobian criterion.

using IndexTuple = std::vector<std::size_t>;  // strictly increasing, 0-based

struct TupleSets {
    std::size_t r = 0;
    std::vector<IndexTuple> Ir;   // non-singular row tuples
    std::vector<IndexTuple> Jr;   // non-singular column tuples
    std::vector<IndexTuple> Jr1;  // critical (r+1)-column tuples
};

namespace detail {

inline void combinations_rec(std::size_t n, std::size_t k, std::size_t start, IndexTuple& cur,
                             std::vector<IndexTuple>& out) {
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = start; i + (k - cur.size()) <= n; ++i) {
        cur.push_back(i);
        combinations_rec(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

inline std::vector<IndexTuple> combinations(std::size_t n, std::size_t k) {
    std::vector<IndexTuple> out;
    IndexTuple cur;
    combinations_rec(n, k, 0, cur, out);
    return out;
}

}  // namespace detail

/// Largest size of a square minor of the Jacobi matrix not lying in I.
/// Equals the rank over Frac(A) because A is a domain.
inline std::size_t jacobian_rank(const PolyMatrix& J, const Ideal& I) {
    std::size_t bound = std::min(J.rows(), J.cols());
    for (std::size_t k = bound; k >= 1; --k) {
        for (const auto& rows : detail::combinations(J.rows(), k))
            for (const auto& cols : detail::combinations(J.cols(), k))
                if (!I.contains(minor_det(J, rows, cols))) return k;
    }
    return 0;
}

inline TupleSets nonsingular_tuples(const PolyMatrix& J, const Ideal& I, std::size_t r) {
    TupleSets T;
    T.r = r;
    for (const auto& rows : detail::combinations(J.rows(), r)) {
        for (const auto& cols : detail::combinations(J.cols(), r))
            if (!I.contains(minor_det(J, rows, cols))) {
                T.Ir.push_back(rows);
                break;
            }
    }
    for (const auto& cols : detail::combinations(J.cols(), r)) {
        for (const auto& rows : detail::combinations(J.rows(), r))
            if (!I.contains(minor_det(J, rows, cols))) {
                T.Jr.push_back(cols);
                break;
            }
    }
    // Lemma: (i in I_r, j in J_r)  <=>  Delta(i, j) != 0.  Asserted here.
    for (const auto& rows : T.Ir)
        for (const auto& cols : T.Jr)
            if (I.contains(minor_det(J, rows, cols)))
                throw ring_error("non-singular tuple pair with vanishing minor");
    return T;
}

/// All (r+1)-column tuples with at least one deletion landing in Jr.
inline std::vector<IndexTuple> critical_set(const PolyMatrix& J, const TupleSets& T) {
    std::vector<IndexTuple> out;
    auto in_Jr = [&](const IndexTuple& t) {
        return std::find(T.Jr.begin(), T.Jr.end(), t) != T.Jr.end();
    };
    for (const auto& cols : detail::combinations(J.cols(), T.r + 1)) {
        bool critical = false;
        for (std::size_t del = 0; del < cols.size() && !critical; ++del) {
            IndexTuple sub;
            for (std::size_t t = 0; t < cols.size(); ++t)
                if (t != del) sub.push_back(cols[t]);
            critical = in_Jr(sub);
        }
        if (critical) out.push_back(cols);
    }
    return out;
}

struct RegularityResult {
    bool regular = false;
    std::vector<Polynomial> certificate;  // reduced GB of I + a_r
};

/// Jacobian criterion: A is regular iff 1 lies in I plus all r x r minors.
inline RegularityResult regular_check(const PolyMatrix& J, const Ideal& I, std::size_t r) {
    std::vector<Polynomial> gens = I.generators();
    for (const auto& rows : detail::combinations(J.rows(), r))
        for (const auto& cols : detail::combinations(J.cols(), r))
            gens.push_back(minor_det(J, rows, cols));
    Ideal aug(I.ambient(), std::move(gens));
    return {aug.is_unit_ideal(), aug.gb()};
}

// ---------------------------------------------------------------------------
// A fully analyzed variety: ideal, Jacobi data, tuple sets, regularity.

struct Variety {
    AmbientPtr amb;
    IdealPtr ideal;
    PolyMatrix jac;
    TupleSets tuples;
    RegularityResult reg;
    SolverOptions solver;

    std::size_t nvars() const { return amb->nvars(); }
    std::size_t rank() const { return tuples.r; }

    /// Minor with columns taken in the listed order (sign-sensitive).
    QuotElem minor(const IndexTuple& rows, const IndexTuple& cols) const {
        return QuotElem(ideal, minor_det(jac, rows, cols));
    }

    bool has_row_tuple(const IndexTuple& i) const {
        return std::find(tuples.Ir.begin(), tuples.Ir.end(), i) != tuples.Ir.end();
    }
    bool has_col_tuple(const IndexTuple& j) const {
        return std::find(tuples.Jr.begin(), tuples.Jr.end(), j) != tuples.Jr.end();
    }
    bool has_critical_tuple(const IndexTuple& j) const {
        return std::find(tuples.Jr1.begin(), tuples.Jr1.end(), j) != tuples.Jr1.end();
    }

    /// Complement of a column r-tuple in {0, ..., n-1}, increasing.
    IndexTuple complement(const IndexTuple& j) const {
        IndexTuple out;
        for (std::size_t c = 0; c < nvars(); ++c)
            if (std::find(j.begin(), j.end(), c) == j.end()) out.push_back(c);
        return out;
    }
};

using VarietyPtr = std::shared_ptr<const Variety>;

inline VarietyPtr make_variety(AmbientPtr amb, std::vector<Polynomial> gens,
                               SolverOptions solver = {}) {
    IdealPtr I = make_ideal(amb, std::move(gens));
    if (I->is_unit_ideal()) throw ring_error("the ideal is the unit ideal; A would be zero");
    PolyMatrix J = jacobian(I->generators(), amb);
    std::size_t r = jacobian_rank(J, *I);
    TupleSets T = nonsingular_tuples(J, *I, r);
    T.Jr1 = critical_set(J, T);
    RegularityResult reg = regular_check(J, *I, r);
    return std::make_shared<const Variety>(
        Variety{std::move(amb), std::move(I), std::move(J), std::move(T), std::move(reg), solver});
}

}  // namespace charp

#endif  // CHARP_RING_HPP
