#pragma once

// Exact linear solving over the rational-function field.
//
// Rows are cleared of denominators, then reduced by fraction-free
// (Bareiss-style) Gauss-Jordan elimination: every division is exact, so
// intermediate growth stays polynomial and the field is never touched until
// the very end.  After the sweep each pivot row carries a single pivot entry,
// and all pivot entries equal the last pivot, a determinant of the pivot
// submatrix; solutions fall out of one division per unknown instead of a
// cascade of field operations.  Pivot choice: first row with a nonzero entry
// in the current column, preferring the entry with the fewest monomials
// (keeps the exact divisions cheap).
//
// Returns one particular solution (free unknowns set to 0) plus a basis of
// the homogeneous nullspace.  Nullspace vectors are scaled by the pivot
// determinant so their entries are polynomials; callers that need a specific
// normalization rescale the whole vector, which leaves the spanned space
// unchanged.

#include <vector>

#include "hypersum/ratfun.hpp"

namespace hypersum {

struct LinearSolution {
    bool consistent = false;
    std::vector<RatFun> particular;              // size = #unknowns
    std::vector<std::vector<RatFun>> nullspace;  // each of size #unknowns
    std::vector<std::size_t> pivot_columns;
};

inline LinearSolution solve_linear(const std::vector<std::vector<RatFun>>& coeffs,
                                   const std::vector<RatFun>& rhs) {
    const std::size_t rows = coeffs.size();
    const std::size_t cols = rows ? coeffs[0].size() : 0;
    if (rhs.size() != rows) throw DomainViolation("solve_linear: rhs length mismatch");

    // Augmented polynomial matrix, denominators cleared row by row.
    std::vector<std::vector<Poly>> m(rows, std::vector<Poly>(cols + 1));
    for (std::size_t i = 0; i < rows; ++i) {
        if (coeffs[i].size() != cols) throw DomainViolation("solve_linear: ragged matrix");
        Poly common(1);
        auto fold = [&common](const RatFun& f) {
            Poly g = poly_gcd(common, f.den());
            common = detail::exact(common, g) * f.den();
        };
        for (const RatFun& f : coeffs[i]) fold(f);
        fold(rhs[i]);
        for (std::size_t j = 0; j <= cols; ++j) {
            const RatFun& f = j < cols ? coeffs[i][j] : rhs[i];
            m[i][j] = f.num() * detail::exact(common, f.den());
        }
        // Strip the rational content of the row (a unit scale per row keeps
        // the Bareiss divisions exact and the integers small).
        Int g = 0, l = 1;
        for (std::size_t j = 0; j <= cols; ++j) {
            Rat c = m[i][j].int_content();
            if (c == 0) continue;
            g = boost::multiprecision::gcd(g, boost::multiprecision::abs(rat_num(c)));
            l = boost::multiprecision::lcm(l, rat_den(c));
        }
        if (g != 0 && !(g == 1 && l == 1)) {
            Rat inv(l, g);
            for (auto& e : m[i]) e = e.mul_rat(inv);
        }
    }

    // Fraction-free Gauss-Jordan sweep.  Rows above the pivot are updated by
    // the same cross-multiplication as rows below it; dividing by the
    // previous pivot stays exact in both directions, and processing columns
    // left to right keeps everything outside the staircase at zero.
    std::vector<std::size_t> pivot_cols;
    std::vector<std::size_t> pivot_rows;
    Poly prev(1);
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t best = rows;
        std::size_t best_size = ~std::size_t(0);
        for (std::size_t i = row; i < rows; ++i) {
            if (m[i][col].is_zero()) continue;
            std::size_t sz = m[i][col].terms().size();
            if (sz < best_size) { best = i; best_size = sz; }
        }
        if (best == rows) continue;
        std::swap(m[row], m[best]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == row) continue;
            for (std::size_t j = 0; j <= cols; ++j) {
                if (j == col) continue;
                m[i][j] = detail::exact(m[i][j] * m[row][col] - m[i][col] * m[row][j], prev);
            }
            m[i][col] = Poly();
        }
        prev = m[row][col];
        pivot_cols.push_back(col);
        pivot_rows.push_back(row);
        ++row;
    }

    LinearSolution sol;
    for (std::size_t i = row; i < rows; ++i)
        if (!m[i][cols].is_zero()) return sol; // 0 = nonzero: inconsistent
    sol.consistent = true;
    sol.pivot_columns = pivot_cols;

    std::vector<bool> is_pivot(cols, false);
    for (std::size_t c : pivot_cols) is_pivot[c] = true;
    const Poly& det = prev; // every pivot entry equals this after the sweep

    sol.particular.assign(cols, RatFun(0));
    for (std::size_t pi = 0; pi < pivot_cols.size(); ++pi) {
        const Poly& v = m[pivot_rows[pi]][cols];
        if (!v.is_zero()) sol.particular[pivot_cols[pi]] = RatFun(v, det);
    }

    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<RatFun> v(cols, RatFun(0));
        v[f] = RatFun(det);
        for (std::size_t pi = 0; pi < pivot_cols.size(); ++pi) {
            const Poly& e = m[pivot_rows[pi]][f];
            if (!e.is_zero()) v[pivot_cols[pi]] = RatFun(-e);
        }
        sol.nullspace.push_back(std::move(v));
    }
    return sol;
}

} // namespace hypersum
