#include "nibsym/linsolve.hpp"

namespace nibsym {

std::vector<int> rref(RatMat& m) {
    std::vector<int> pivots;
    if (m.empty()) return pivots;
    size_t rows = m.size(), cols = m[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t sel = r;
        while (sel < rows && m[sel][c] == 0) ++sel;
        if (sel == rows) continue;
        std::swap(m[sel], m[r]);
        Rational inv = Rational(1) / m[r][c];
        for (size_t j = c; j < cols; ++j) m[r][j] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational factor = m[i][c];
            for (size_t j = c; j < cols; ++j) m[i][j] -= factor * m[r][j];
        }
        pivots.push_back(static_cast<int>(c));
        ++r;
    }
    return pivots;
}

std::optional<RatVec> solve_linear(const RatMat& a, const RatVec& b) {
    if (a.empty()) return RatVec{};
    size_t rows = a.size(), cols = a[0].size();
    RatMat aug(rows, RatVec(cols + 1, Rational(0)));
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < cols; ++j) aug[i][j] = a[i][j];
        aug[i][cols] = b[i];
    }
    std::vector<int> pivots = rref(aug);
    for (size_t i = pivots.size(); i < rows; ++i)
        if (aug[i][cols] != 0) return std::nullopt;
    for (int p : pivots)
        if (p == static_cast<int>(cols)) return std::nullopt;
    RatVec x(cols, Rational(0));
    for (size_t i = 0; i < pivots.size(); ++i) x[static_cast<size_t>(pivots[i])] = aug[i][cols];
    return x;
}

std::vector<RatVec> nullspace(const RatMat& a) {
    if (a.empty()) return {};
    size_t cols = a[0].size();
    RatMat m = a;
    std::vector<int> pivots = rref(m);
    std::vector<bool> is_pivot(cols, false);
    for (int p : pivots) is_pivot[static_cast<size_t>(p)] = true;
    std::vector<RatVec> basis;
    for (size_t freec = 0; freec < cols; ++freec) {
        if (is_pivot[freec]) continue;
        RatVec v(cols, Rational(0));
        v[freec] = 1;
        for (size_t i = 0; i < pivots.size(); ++i)
            v[static_cast<size_t>(pivots[i])] = -m[i][freec];
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace nibsym
