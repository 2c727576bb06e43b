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

#ifndef CHARP_DER_HPP
#define CHARP_DER_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "charp/ring.hpp"

namespace charp {

class der_error : public std::runtime_error {
   public:
    explicit der_error(const std::string& what) : std::runtime_error(what) {}
};

/// A K-derivation of A given by its ambient coefficient vector:
/// D = sum_k coeffs[k] * d/dx_k. Whether D is well defined on A (kills the
/// ideal generators) is a separate check.
struct Derivation {
    VarietyPtr variety;
    std::vector<QuotElem> coeffs;  // one per variable

    Derivation(VarietyPtr v, std::vector<QuotElem> c) : variety(std::move(v)), coeffs(std::move(c)) {
        if (coeffs.size() != variety->nvars()) throw der_error("coefficient count != variable count");
    }

    static Derivation zero(const VarietyPtr& v) {
        return Derivation(v, std::vector<QuotElem>(v->nvars(), QuotElem::zero(v->ideal)));
    }

    bool is_zero() const {
        return std::all_of(coeffs.begin(), coeffs.end(), [](const QuotElem& c) { return c.is_zero(); });
    }

    friend Derivation operator+(const Derivation& a, const Derivation& b) {
        std::vector<QuotElem> c;
        c.reserve(a.coeffs.size());
        for (std::size_t k = 0; k < a.coeffs.size(); ++k) c.push_back(a.coeffs[k] + b.coeffs[k]);
        return Derivation(a.variety, std::move(c));
    }

    Derivation scaled(const QuotElem& h) const {
        std::vector<QuotElem> c;
        c.reserve(coeffs.size());
        for (const auto& x : coeffs) c.push_back(x * h);
        return Derivation(variety, std::move(c));
    }

    friend bool operator==(const Derivation& a, const Derivation& b) {
        return a.coeffs == b.coeffs;
    }
};

/// A derivation of the localization A_Delta: coefficients are fractions.
struct LocDerivation {
    VarietyPtr variety;
    LocCtxPtr ctx;
    std::vector<LocElem> coeffs;

    LocDerivation(VarietyPtr v, LocCtxPtr c, std::vector<LocElem> cs)
        : variety(std::move(v)), ctx(std::move(c)), coeffs(std::move(cs)) {
        if (coeffs.size() != variety->nvars())
            throw der_error("coefficient count != variable count");
    }

    static LocDerivation of(const Derivation& D, const LocCtxPtr& ctx) {
        std::vector<LocElem> cs;
        cs.reserve(D.coeffs.size());
        for (const auto& c : D.coeffs) cs.push_back(LocElem::of(ctx, c));
        return LocDerivation(D.variety, ctx, std::move(cs));
    }

    LocDerivation over_delta() const {
        std::vector<LocElem> cs;
        cs.reserve(coeffs.size());
        for (const auto& c : coeffs) cs.push_back(c.over_den_pow(1));
        return LocDerivation(variety, ctx, std::move(cs));
    }

    friend bool operator==(const LocDerivation& a, const LocDerivation& b) {
        for (std::size_t k = 0; k < a.coeffs.size(); ++k)
            if (!loc_equal(a.coeffs[k], b.coeffs[k])) return false;
        return true;
    }
};

inline LocElem apply_derivation(const LocDerivation& D, const LocElem& a) {
    LocElem acc = LocElem::zero(D.ctx);
    // d/dx_k acts on num/den^s by the quotient rule; den is fixed in A
    const auto& v = *D.variety;
    for (std::size_t k = 0; k < v.nvars(); ++k) {
        if (D.coeffs[k].is_zero()) continue;
        QuotElem dnum(v.ideal, divided_partial(k, 1, a.num().nf()));
        LocElem term = LocElem(D.ctx, dnum, a.den_exp());
        if (a.den_exp() > 0) {
            QuotElem dden(v.ideal, divided_partial(k, 1, D.ctx->den.nf()));
            LocElem correction =
                LocElem(D.ctx, a.num() * dden, a.den_exp() + 1).scaled(
                    v.amb->field.from_int(static_cast<std::int64_t>(a.den_exp())));
            term = term - correction;
        }
        acc = acc + D.coeffs[k] * term;
    }
    return acc;
}

/// Well-definedness on A_Delta: generators still map into the zero class.
inline bool check_descends(const LocDerivation& D) {
    const auto& v = *D.variety;
    for (const auto& f : v.ideal->generators()) {
        LocElem img = LocElem::zero(D.ctx);
        for (std::size_t k = 0; k < v.nvars(); ++k)
            img = img + D.coeffs[k] * LocElem::of(D.ctx, QuotElem(v.ideal, divided_partial(k, 1, f)));
        if (!img.is_zero() && !loc_equal(img, LocElem::zero(D.ctx))) return false;
    }
    return true;
}

/// True iff D maps every ideal generator into I, i.e. D descends to A.
inline bool check_descends(const Derivation& D) {
    const auto& v = *D.variety;
    for (const auto& f : v.ideal->generators()) {
        Polynomial img(v.amb);
        for (std::size_t k = 0; k < v.nvars(); ++k)
            img = img + D.coeffs[k].nf() * divided_partial(k, 1, f);
        if (!v.ideal->contains(img)) return false;
    }
    return true;
}

inline QuotElem apply_derivation(const Derivation& D, const QuotElem& a) {
    const auto& v = *D.variety;
    Polynomial img(v.amb);
    for (std::size_t k = 0; k < v.nvars(); ++k)
        img = img + D.coeffs[k].nf() * divided_partial(k, 1, a.nf());
    return QuotElem(v.ideal, img);
}

/// Determinant derivation for row tuple `rows` (size r) and a column
/// sequence `cols` (size r+1, distinct, order-sensitive): the determinant of
/// the Jacobi block on `rows` x `cols` with a last row of partials, expanded
/// along that last row.
inline Derivation det_derivation_cols(const VarietyPtr& v, const IndexTuple& rows,
                                      const std::vector<std::size_t>& cols) {
    std::size_t r = v->rank();
    if (rows.size() != r || cols.size() != r + 1)
        throw der_error("determinant derivation needs r rows and r+1 columns");
    std::vector<QuotElem> coeffs(v->nvars(), QuotElem::zero(v->ideal));
    for (std::size_t nu = 0; nu <= r; ++nu) {
        std::vector<std::size_t> sub;
        sub.reserve(r);
        for (std::size_t t = 0; t < cols.size(); ++t)
            if (t != nu) sub.push_back(cols[t]);
        QuotElem cof = v->minor(rows, sub);
        if ((r + nu) % 2 != 0) cof = -cof;
        coeffs[cols[nu]] = coeffs[cols[nu]] + cof;
    }
    return Derivation(v, std::move(coeffs));
}

/// The module generators of Theorem-1.1 type: i must be a registered
/// non-singular row tuple, j1 a registered critical column tuple.
inline Derivation build_det_derivation(const VarietyPtr& v, const IndexTuple& i,
                                       const IndexTuple& j1) {
    if (!v->has_row_tuple(i)) throw der_error("row tuple not in the registered set");
    if (!v->has_critical_tuple(j1)) throw der_error("column tuple not in the critical set");
    Derivation D = det_derivation_cols(v, i, j1);
    if (!check_descends(D)) throw der_error("determinant derivation does not descend");
    return D;
}

/// Check one instance of the module relation
///   Delta(i,j) * del_{i',j'} = sum_l (-1)^{r+1+nu_l} Delta(i'; j' \ {j'_{nu_l}}) * del_{i; j, j'_{nu_l}}
/// where the sum runs over the entries of j' not contained in j.
/// Both sides are compared as coefficient vectors over A.
inline bool verify_module_relation(const VarietyPtr& v, const IndexTuple& i, const IndexTuple& ip,
                         const IndexTuple& j, const IndexTuple& jp) {
    if (!v->has_row_tuple(i) || !v->has_row_tuple(ip) || !v->has_col_tuple(j) ||
        !v->has_critical_tuple(jp))
        throw der_error("index-set mismatch in relation instance");
    std::size_t r = v->rank();
    Derivation lhs = det_derivation_cols(v, ip, jp).scaled(v->minor(i, j));
    Derivation rhs = Derivation::zero(v);
    for (std::size_t nu = 0; nu < jp.size(); ++nu) {
        if (std::find(j.begin(), j.end(), jp[nu]) != j.end()) continue;
        IndexTuple jp_del;
        for (std::size_t t = 0; t < jp.size(); ++t)
            if (t != nu) jp_del.push_back(jp[t]);
        QuotElem c = v->minor(ip, jp_del);
        if ((r + nu) % 2 != 0) c = -c;
        std::vector<std::size_t> cols(j.begin(), j.end());
        cols.push_back(jp[nu]);
        rhs = rhs + det_derivation_cols(v, i, cols).scaled(c);
    }
    return lhs == rhs;
}

enum class MembershipStatus { yes, no, undecided };

struct DerMembership {
    MembershipStatus status = MembershipStatus::undecided;
    /// Coefficients a_{j_k} = D(x_{j_k}) over the complement of j, so that
    /// D = Delta^{-1} sum a_{j_k} del_{i; j, j_k} on success.
    std::vector<QuotElem> a;
    std::optional<std::size_t> failing_inclusion;  // 0-based slot when status == no
    std::optional<LocDerivation> decomposition;    // the right side, over A_Delta
};

/// Decide whether D = sum coeffs[k] d/dx_k lies in Der_K(A) presented over
/// the base (i, j): evaluates the complement coefficients and checks the r
/// inclusions  sum_k Delta(i; j with slot nu replaced by j_k) a_{j_k}
/// in A * Delta(i, j). On success the reconstruction identity is asserted.
inline DerMembership membership_der(const Derivation& D, const IndexTuple& i, const IndexTuple& j) {
    const VarietyPtr& v = D.variety;
    if (!v->has_row_tuple(i) || !v->has_col_tuple(j))
        throw der_error("base tuples not in the registered sets");
    std::size_t r = v->rank();
    IndexTuple comp = v->complement(j);
    QuotElem delta = v->minor(i, j);

    DerMembership out;
    if (!check_descends(D)) {
        out.status = MembershipStatus::no;
        return out;
    }
    for (std::size_t k : comp) out.a.push_back(D.coeffs[k]);

    for (std::size_t nu = 0; nu < r; ++nu) {
        QuotElem lhs = QuotElem::zero(v->ideal);
        for (std::size_t t = 0; t < comp.size(); ++t) {
            std::vector<std::size_t> cols(j.begin(), j.end());
            cols[nu] = comp[t];
            lhs = lhs + v->minor(i, cols) * out.a[t];
        }
        SolveResult sr = solve_cofactor(*v->ideal, delta.nf(), lhs.nf(), v->solver);
        if (sr.status == SolveStatus::not_member) {
            out.status = MembershipStatus::no;
            out.failing_inclusion = nu;
            return out;
        }
        if (sr.status == SolveStatus::undecided) {
            out.status = MembershipStatus::undecided;
            out.failing_inclusion = nu;
            return out;
        }
    }

    // Reconstruction: Delta * D == sum_k a_{j_k} del_{i; j, j_k} over A.
    Derivation recon = Derivation::zero(v);
    for (std::size_t t = 0; t < comp.size(); ++t) {
        std::vector<std::size_t> cols(j.begin(), j.end());
        cols.push_back(comp[t]);
        recon = recon + det_derivation_cols(v, i, cols).scaled(out.a[t]);
    }
    if (!(D.scaled(delta) == recon))
        throw der_error("membership inclusions hold but reconstruction failed");
    out.status = MembershipStatus::yes;
    LocCtxPtr ctx = make_loc_ctx(v->ideal, delta, "Delta", v->solver);
    out.decomposition = LocDerivation::of(recon, ctx).over_delta();
    return out;
}

struct RewriteResult {
    /// lambda_k, indexed by the complement of j; all in A.
    std::vector<QuotElem> lambdas;
};

/// Rewrite del_{i',j'} over the base (i, j):
///   del_{i',j'} = Delta(i,j)^{-1} sum_k lambda_k del_{i; j, j_k},
/// with lambda_k = del_{i',j'}(x_{j_k}). The identity is verified by
/// cross-multiplied coefficient comparison over A.
inline RewriteResult rewrite_over_base(const VarietyPtr& v, const IndexTuple& ip, const IndexTuple& jp,
                                const IndexTuple& i, const IndexTuple& j) {
    Derivation target = build_det_derivation(v, ip, jp);
    IndexTuple comp = v->complement(j);
    RewriteResult out;
    for (std::size_t k : comp) out.lambdas.push_back(target.coeffs[k]);

    Derivation rhs = Derivation::zero(v);
    for (std::size_t t = 0; t < comp.size(); ++t) {
        std::vector<std::size_t> cols(j.begin(), j.end());
        cols.push_back(comp[t]);
        rhs = rhs + det_derivation_cols(v, i, cols).scaled(out.lambdas[t]);
    }
    if (!(target.scaled(v->minor(i, j)) == rhs))
        throw der_error("rewrite identity failed coefficientwise");
    return out;
}

}  // namespace charp

#endif  // CHARP_DER_HPP
