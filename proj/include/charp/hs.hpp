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

#ifndef CHARP_HS_HPP
#define CHARP_HS_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "charp/der.hpp"
#include "charp/ring.hpp"

namespace charp {

class hs_error : public std::runtime_error {
   public:
    explicit hs_error(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Truncated power series with coefficients in a localization A_d.
// All arithmetic is exact modulo t^{N+1}.

class TruncSeries {
   public:
    TruncSeries(LocCtxPtr ctx, std::uint32_t order)
        : ctx_(std::move(ctx)), coeffs_(order + 1, LocElem::zero(ctx_)) {}

    static TruncSeries constant(const LocCtxPtr& ctx, std::uint32_t order, const LocElem& c) {
        TruncSeries s(ctx, order);
        s.coeffs_[0] = c;
        return s;
    }

    const LocCtxPtr& ctx() const { return ctx_; }
    std::uint32_t order() const { return static_cast<std::uint32_t>(coeffs_.size() - 1); }
    const LocElem& coeff(std::uint32_t k) const {
        if (k >= coeffs_.size()) throw hs_error("series coefficient beyond truncation order");
        return coeffs_[k];
    }
    void set_coeff(std::uint32_t k, LocElem c) {
        if (k >= coeffs_.size()) throw hs_error("series coefficient beyond truncation order");
        coeffs_[k] = std::move(c);
    }

    friend TruncSeries operator+(const TruncSeries& a, const TruncSeries& b) {
        TruncSeries r(a.ctx_, std::min(a.order(), b.order()));
        for (std::uint32_t k = 0; k <= r.order(); ++k) r.coeffs_[k] = a.coeffs_[k] + b.coeffs_[k];
        return r;
    }

    friend TruncSeries operator-(const TruncSeries& a, const TruncSeries& b) {
        TruncSeries r(a.ctx_, std::min(a.order(), b.order()));
        for (std::uint32_t k = 0; k <= r.order(); ++k) r.coeffs_[k] = a.coeffs_[k] - b.coeffs_[k];
        return r;
    }

    friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
        TruncSeries r(a.ctx_, std::min(a.order(), b.order()));
        for (std::uint32_t i = 0; i <= r.order(); ++i) {
            if (a.coeffs_[i].is_zero()) continue;
            for (std::uint32_t j = 0; i + j <= r.order(); ++j) {
                if (b.coeffs_[j].is_zero()) continue;
                r.coeffs_[i + j] = r.coeffs_[i + j] + a.coeffs_[i] * b.coeffs_[j];
            }
        }
        return r;
    }

    TruncSeries scaled(const LocElem& c) const {
        TruncSeries r(ctx_, order());
        for (std::uint32_t k = 0; k <= order(); ++k) r.coeffs_[k] = coeffs_[k] * c;
        return r;
    }

    TruncSeries pow(std::uint32_t e) const {
        TruncSeries acc = constant(ctx_, order(), LocElem::one(ctx_));
        TruncSeries base(*this);
        while (e > 0) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    /// Multiplicative inverse mod t^{N+1}; requires an invertible constant
    /// term (a unit of A_d, i.e. a divisor of a power of d up to units).
    TruncSeries inverse() const;

    friend bool series_equal(const TruncSeries& a, const TruncSeries& b) {
        if (a.order() != b.order()) return false;
        for (std::uint32_t k = 0; k <= a.order(); ++k)
            if (!loc_equal(a.coeffs_[k], b.coeffs_[k])) return false;
        return true;
    }

   private:
    LocCtxPtr ctx_;
    std::vector<LocElem> coeffs_;
};

/// Inverse of a localization element, found by scanning d-power targets:
/// q * num == d^e (mod I) gives (num/d^s)^{-1} = q d^s / d^e.
inline std::optional<LocElem> loc_inverse(const LocElem& a) {
    if (a.num().is_zero()) return std::nullopt;
    const auto& ctx = a.ctx();
    const SolverOptions& opts = ctx->solver;
    for (std::uint32_t e = 0; e <= opts.m_scan_cap; ++e) {
        SolveResult sr = solve_cofactor(*ctx->ideal, a.num().nf(), ctx->den.pow(e).nf(), opts);
        if (sr.found())
            return LocElem(ctx, QuotElem(ctx->ideal, *sr.q), e).times_den_pow(a.den_exp());
        if (sr.status == SolveStatus::undecided) break;
    }
    return std::nullopt;
}

inline TruncSeries TruncSeries::inverse() const {
    auto c0 = loc_inverse(coeffs_[0]);
    if (!c0) throw hs_error("series inversion: non-unit constant term");
    TruncSeries r(ctx_, order());
    r.coeffs_[0] = *c0;
    for (std::uint32_t k = 1; k <= order(); ++k) {
        LocElem acc = LocElem::zero(ctx_);
        for (std::uint32_t i = 1; i <= k; ++i) acc = acc + coeffs_[i] * r.coeffs_[k - i];
        r.coeffs_[k] = -(acc * *c0);
    }
    return r;
}

/// Evaluate a polynomial at series arguments (one series per variable).
inline TruncSeries substitute_series(const Polynomial& f, const std::vector<TruncSeries>& images,
                                     const LocCtxPtr& ctx, std::uint32_t order) {
    TruncSeries acc(ctx, order);
    // power cache per variable
    std::vector<std::vector<TruncSeries>> pows(images.size());
    auto power = [&](std::size_t v, std::uint32_t e) -> const TruncSeries& {
        auto& table = pows[v];
        if (table.empty()) table.push_back(TruncSeries::constant(ctx, order, LocElem::one(ctx)));
        while (table.size() <= e) table.push_back(table.back() * images[v]);
        return table[e];
    };
    for (const auto& [m, c] : f.terms()) {
        TruncSeries term =
            TruncSeries::constant(ctx, order, LocElem::of(ctx, QuotElem(ctx->ideal, Polynomial::constant(f.ambient(), c))));
        for (std::size_t v = 0; v < m.size(); ++v)
            if (m[v] > 0) term = term * power(v, m[v]);
        acc = acc + term;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Truncated iterative higher derivations of A_Delta, stored as the algebra
// map e: x_c -> sum delta^[k](x_c) t^k (one TruncSeries per variable).

struct HSFamily {
    VarietyPtr variety;
    IndexTuple i, j;      // base tuples (rows, columns)
    std::size_t nu;       // position into the complement of j
    std::uint32_t order;  // truncation N
    LocCtxPtr ctx;        // A_Delta
    QuotElem delta;
    std::vector<TruncSeries> images;  // e(x_c), one per variable

    std::size_t distinguished_var() const { return variety->complement(j)[nu]; }
};

inline constexpr std::uint32_t kMaxTruncationOrder = 64;

namespace detail {

/// Adjugate of a square QuotElem matrix (cofactor transpose).
inline std::vector<std::vector<QuotElem>> adjugate(const std::vector<std::vector<QuotElem>>& B,
                                                   const IdealPtr& I) {
    std::size_t r = B.size();
    std::vector<std::vector<QuotElem>> adj(r, std::vector<QuotElem>(r, QuotElem::zero(I)));
    // determinant of a minor of B with row a and column b removed
    auto minor_of = [&](std::size_t a, std::size_t b) {
        std::vector<std::size_t> rows, cols;
        for (std::size_t t = 0; t < r; ++t) {
            if (t != a) rows.push_back(t);
            if (t != b) cols.push_back(t);
        }
        // recursive cofactor determinant over QuotElem
        std::function<QuotElem(std::vector<std::size_t>, std::vector<std::size_t>)> det =
            [&](std::vector<std::size_t> rs, std::vector<std::size_t> cs) -> QuotElem {
            if (rs.empty()) return QuotElem::one(I);
            QuotElem acc = QuotElem::zero(I);
            std::vector<std::size_t> sub_rows(rs.begin() + 1, rs.end());
            for (std::size_t t = 0; t < cs.size(); ++t) {
                std::vector<std::size_t> sub_cols;
                for (std::size_t u = 0; u < cs.size(); ++u)
                    if (u != t) sub_cols.push_back(cs[u]);
                QuotElem cof = B[rs[0]][cs[t]] * det(sub_rows, sub_cols);
                acc = (t % 2 == 0) ? acc + cof : acc - cof;
            }
            return acc;
        };
        return det(rows, cols);
    };
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) {
            QuotElem c = minor_of(a, b);
            if ((a + b) % 2 != 0) c = -c;
            adj[b][a] = c;  // transpose
        }
    return adj;
}

}  // namespace detail

/// Lift the derivation Delta^{-1} del_{i; j, j_nu} to a truncated iterative
/// higher derivation of A_Delta. Complement variables get the exact images
/// x + delta_{nu,mu} t; the bound variables are solved order by order from
/// f_{i_a}(e(x)) == 0, a linear system whose matrix is the r x r Jacobian
/// block with determinant Delta (so division happens only by Delta).
/// `row_perm`, when given, permutes the equations before solving; the result
/// is independent of it (uniqueness of the lift).
inline HSFamily hs_lift(const VarietyPtr& v, const IndexTuple& i, const IndexTuple& j,
                        std::size_t nu, std::uint32_t N,
                        const std::vector<std::size_t>& row_perm = {}) {
    std::size_t r = v->rank();
    if (i.size() != r || j.size() != r) throw hs_error("base tuples must have length r");
    if (N > kMaxTruncationOrder) throw hs_error("truncation order exceeds the hard cap");
    IndexTuple comp = v->complement(j);
    if (nu >= comp.size()) throw hs_error("complement position out of range");
    QuotElem delta = v->minor(i, j);
    if (delta.is_zero()) throw hs_error("base minor lies in the ideal");
    LocCtxPtr ctx = make_loc_ctx(v->ideal, delta, "Delta", v->solver);

    std::vector<std::size_t> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    if (!row_perm.empty()) {
        if (row_perm.size() != r) throw hs_error("row permutation has wrong length");
        perm = row_perm;
    }

    std::vector<TruncSeries> images;
    images.reserve(v->nvars());
    for (std::size_t c = 0; c < v->nvars(); ++c) {
        TruncSeries s = TruncSeries::constant(
            ctx, N, LocElem::of(ctx, QuotElem(v->ideal, Polynomial::variable(v->amb, c))));
        images.push_back(std::move(s));
    }
    if (N >= 1) images[comp[nu]].set_coeff(1, LocElem::one(ctx));

    if (r > 0 && N >= 1) {
        // Jacobian block on rows perm(i), columns j.
        std::vector<std::vector<QuotElem>> B(r, std::vector<QuotElem>(r, QuotElem::zero(v->ideal)));
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = 0; b < r; ++b)
                B[a][b] = QuotElem(v->ideal, v->jac.at(i[perm[a]], j[b]));
        auto adj = detail::adjugate(B, v->ideal);
        // det(B) = sign(perm) * Delta; divide by Delta and carry the sign
        IndexTuple rows_perm;
        for (std::size_t a = 0; a < r; ++a) rows_perm.push_back(i[perm[a]]);
        QuotElem detB = v->minor(rows_perm, j);
        bool flip;
        if (detB == delta) flip = false;
        else if (detB == -delta) flip = true;
        else throw hs_error("permuted block determinant is not +-Delta");

        const auto& gens = v->ideal->generators();
        for (std::uint32_t k = 1; k <= N; ++k) {
            // residual t^k coefficients with the unknowns still set to zero
            std::vector<LocElem> w;
            w.reserve(r);
            for (std::size_t a = 0; a < r; ++a) {
                TruncSeries fe = substitute_series(gens[i[perm[a]]], images, ctx, k);
                w.push_back(fe.coeff(k));
            }
            for (std::size_t b = 0; b < r; ++b) {
                LocElem acc = LocElem::zero(ctx);
                for (std::size_t a = 0; a < r; ++a)
                    acc = acc + w[a] * LocElem::of(ctx, adj[b][a]);
                if (!flip) acc = -acc;
                images[j[b]].set_coeff(k, acc.over_den_pow(1));
            }
        }
    }

    return HSFamily{v, i, j, nu, N, std::move(ctx), std::move(delta), std::move(images)};
}

/// e is an algebra map: every ideal generator must vanish identically
/// mod t^{N+1} under substitution.
inline bool hom_validate(const HSFamily& H) {
    for (const auto& f : H.variety->ideal->generators()) {
        TruncSeries fe = substitute_series(f, H.images, H.ctx, H.order);
        for (std::uint32_t k = 0; k <= H.order; ++k)
            if (!fe.coeff(k).is_zero()) return false;
    }
    return true;
}

/// delta^[k](a) for a in any localization context over the same ideal whose
/// denominator contains Delta as a factor (embedding handled by the context).
inline LocElem hs_apply(const HSFamily& H, const LocElem& a, std::uint32_t k) {
    if (k > H.order) throw hs_error("application order exceeds the truncation");
    const LocCtxPtr& tctx = a.ctx();
    std::vector<TruncSeries> images;
    if (tctx.get() == H.ctx.get() ||
        (tctx->ideal.get() == H.ctx->ideal.get() && tctx->den == H.ctx->den)) {
        images = H.images;
    } else {
        images.reserve(H.images.size());
        for (const auto& s : H.images) {
            TruncSeries t(tctx, s.order());
            for (std::uint32_t c = 0; c <= s.order(); ++c) t.set_coeff(c, embed(s.coeff(c), tctx));
            images.push_back(std::move(t));
        }
    }
    TruncSeries num = substitute_series(a.num().nf(), images, tctx, k);
    if (a.den_exp() == 0) return num.coeff(k);
    TruncSeries den = substitute_series(tctx->den.nf(), images, tctx, k);
    return (num * den.inverse().pow(a.den_exp())).coeff(k);
}

inline LocElem hs_apply(const HSFamily& H, const QuotElem& a, std::uint32_t k) {
    return hs_apply(H, LocElem::of(H.ctx, a), k);
}

// ---------------------------------------------------------------------------
// A chart: one base (i, j) with all of its lifted families.

struct Chart {
    VarietyPtr variety;
    IndexTuple i, j;
    IndexTuple comp;  // complement of j, increasing
    QuotElem delta;
    LocCtxPtr ctx;
    std::uint32_t order;
    std::vector<HSFamily> families;  // per complement position

    std::size_t nfam() const { return families.size(); }
};

using ChartPtr = std::shared_ptr<const Chart>;

inline ChartPtr make_chart(const VarietyPtr& v, const IndexTuple& i, const IndexTuple& j,
                           std::uint32_t N) {
    IndexTuple comp = v->complement(j);
    std::vector<HSFamily> fams;
    fams.reserve(comp.size());
    LocCtxPtr ctx;
    for (std::size_t nu = 0; nu < comp.size(); ++nu) {
        HSFamily H = hs_lift(v, i, j, nu, N);
        if (!hom_validate(H)) throw hs_error("lifted family fails the homomorphism check");
        if (!ctx) ctx = H.ctx;
        else {
            // share one context across the chart
            HSFamily shared{H.variety, H.i, H.j, H.nu, H.order, ctx, H.delta, {}};
            for (const auto& s : H.images) {
                TruncSeries t(ctx, s.order());
                for (std::uint32_t c = 0; c <= s.order(); ++c)
                    t.set_coeff(c, LocElem(ctx, s.coeff(c).num(), s.coeff(c).den_exp()));
                shared.images.push_back(std::move(t));
            }
            H = std::move(shared);
        }
        fams.push_back(std::move(H));
    }
    if (!ctx) ctx = make_loc_ctx(v->ideal, v->minor(i, j), "Delta", v->solver);
    QuotElem delta = v->minor(i, j);
    return std::make_shared<const Chart>(
        Chart{v, i, j, std::move(comp), std::move(delta), std::move(ctx), N, std::move(fams)});
}

/// delta^[k] for a multi-index k over the chart's complement positions,
/// applied componentwise (the families commute).
inline LocElem hs_apply_multi(const Chart& ch, const Monomial& k, const LocElem& a) {
    LocElem v = a;
    for (std::size_t nu = 0; nu < k.size(); ++nu)
        if (k[nu] > 0) v = hs_apply(ch.families[nu], v, k[nu]);
    return v;
}

// ---------------------------------------------------------------------------
// Checks

/// delta^[a] delta^[b] = C(a+b, a) delta^[a+b], verified on all monomials of
/// total degree <= sample_deg.
inline bool check_iterative(const HSFamily& H, std::uint32_t a, std::uint32_t b,
                            std::uint32_t sample_deg = 2) {
    if (a + b > H.order) throw hs_error("iterativity check exceeds the truncation order");
    const auto& v = *H.variety;
    Fp bin = v.amb->field.binomial(a + b, a);
    for (const auto& m : detail::enumerate_monomials(v.nvars(), sample_deg)) {
        LocElem x = LocElem::of(H.ctx, QuotElem(v.ideal, Polynomial::monomial(v.amb, m, v.amb->field.one())));
        LocElem lhs = hs_apply(H, hs_apply(H, x, b), a);
        LocElem rhs = hs_apply(H, x, a + b).scaled(bin);
        if (!loc_equal(lhs, rhs)) return false;
    }
    return true;
}

/// (delta^[i])^p = 0.
inline bool check_nilpotent(const HSFamily& H, std::uint32_t i, std::uint32_t sample_deg = 2) {
    std::uint32_t p = H.variety->amb->p();
    if (static_cast<std::uint64_t>(p) * i > H.order)
        throw hs_error("nilpotency check exceeds the truncation order");
    const auto& v = *H.variety;
    for (const auto& m : detail::enumerate_monomials(v.nvars(), sample_deg)) {
        LocElem x = LocElem::of(H.ctx, QuotElem(v.ideal, Polynomial::monomial(v.amb, m, v.amb->field.one())));
        for (std::uint32_t t = 0; t < p; ++t) x = hs_apply(H, x, i);
        if (!x.is_zero() && !loc_equal(x, LocElem::zero(H.ctx))) return false;
    }
    return true;
}

/// Families attached to the same base commute.
inline bool check_commute(const HSFamily& A, const HSFamily& B, std::uint32_t k, std::uint32_t l,
                          std::uint32_t sample_deg = 2) {
    if (A.i != B.i || A.j != B.j) throw hs_error("commutation check needs a common base");
    if (k + l > std::min(A.order, B.order)) throw hs_error("commutation check exceeds the truncation");
    const auto& v = *A.variety;
    for (const auto& m : detail::enumerate_monomials(v.nvars(), sample_deg)) {
        LocElem x = LocElem::of(A.ctx, QuotElem(v.ideal, Polynomial::monomial(v.amb, m, v.amb->field.one())));
        LocElem lhs = hs_apply(A, hs_apply(B, x, l), k);
        LocElem rhs = hs_apply(B, hs_apply(A, x, k), l);
        if (!loc_equal(lhs, rhs)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Hypersurface closed form: for m = 1, r = 1 the lifted images of the bound
// variable satisfy the recursion
//   delta^[i](x) = -(1/f'(x)) sum_d sum_{i_0+...+i_d = i, i_t != i for t>=1}
//                  del_free^[i_0](g_d) delta^[i_1](x) ... delta^[i_d](x)
// where f = sum_d g_d x^d in the bound variable and f' = Delta.

namespace detail {

inline void compositions_rec(std::uint32_t total, std::size_t parts, std::uint32_t forbidden,
                             std::vector<std::uint32_t>& cur,
                             std::vector<std::vector<std::uint32_t>>& out) {
    if (cur.size() == parts) {
        if (total == 0) out.push_back(cur);
        return;
    }
    for (std::uint32_t e = 0; e <= total; ++e) {
        if (e == forbidden) continue;
        cur.push_back(e);
        compositions_rec(total - e, parts, forbidden, cur, out);
        cur.pop_back();
    }
}

}  // namespace detail

/// delta^[k](bound variable) for k = 0..kmax by the closed hypersurface
/// recursion; must agree with hs_lift (cross-checked in the test suites).
inline std::vector<LocElem> closed_form_images(const VarietyPtr& v, const IndexTuple& i,
                                        const IndexTuple& j, std::size_t nu, std::uint32_t kmax) {
    if (v->ideal->generators().size() != 1 || v->rank() != 1)
        throw hs_error("closed-form extension needs a hypersurface of rank 1");
    const Polynomial& f = v->ideal->generators()[i.at(0)];
    std::size_t bound = j.at(0);
    IndexTuple comp = v->complement(j);
    std::size_t free_var = comp.at(nu);
    QuotElem delta = v->minor(i, j);
    if (delta.is_zero()) throw hs_error("f' lies in the ideal");
    LocCtxPtr ctx = make_loc_ctx(v->ideal, delta, "Delta", v->solver);

    // split f by powers of the bound variable: f = sum g_d * x_b^d
    std::uint32_t s = 0;
    for (const auto& [m, c] : f.terms()) s = std::max(s, m[bound]);
    std::vector<Polynomial> g(s + 1, Polynomial::zero(v->amb));
    for (const auto& [m, c] : f.terms()) {
        Monomial mm(m);
        std::uint32_t d = mm[bound];
        mm[bound] = 0;
        g[d].add_term(mm, c);
    }

    std::vector<LocElem> vals;
    vals.push_back(LocElem::of(ctx, QuotElem(v->ideal, Polynomial::variable(v->amb, bound))));
    for (std::uint32_t k = 1; k <= kmax; ++k) {
        LocElem acc = LocElem::zero(ctx);
        for (std::uint32_t d = 0; d <= s; ++d) {
            if (g[d].is_zero()) continue;
            for (std::uint32_t i0 = 0; i0 <= k; ++i0) {
                Polynomial gi = divided_partial(free_var, i0, g[d]);
                if (gi.is_zero()) continue;
                std::vector<std::vector<std::uint32_t>> comps;
                std::vector<std::uint32_t> cur;
                detail::compositions_rec(k - i0, d, k, cur, comps);
                for (const auto& parts : comps) {
                    LocElem term = LocElem::of(ctx, QuotElem(v->ideal, gi));
                    for (std::uint32_t part : parts) term = term * vals[part];
                    acc = acc + term;
                }
            }
        }
        vals.push_back((-acc).over_den_pow(1));
    }
    return vals;
}

}  // namespace charp

#endif  // CHARP_HS_HPP
