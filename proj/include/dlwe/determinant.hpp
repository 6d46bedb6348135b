#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dlwe {

/// Dense row-major matrix over an arbitrary ring element type.
template <class T>
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

/// Determinant of the square submatrix on the given rows and columns, by
/// Laplace expansion with memoization over column subsets (iterative DP in
/// increasing subset size). Exact over any commutative ring: T needs +, -, *
/// and a zero default. Intended for the small minors appearing here (n <= 8).
template <class T>
T minor_determinant(const Matrix<T> &a, const std::vector<std::size_t> &rows,
                    const std::vector<std::size_t> &cols) {
    std::size_t n = rows.size();
    if (n != cols.size() || n == 0) throw std::invalid_argument("minor_determinant: bad minor shape");
    if (n > 16) throw std::invalid_argument("minor_determinant: minor too large");
    for (std::size_t i : rows)
        if (i >= a.rows()) throw std::out_of_range("minor_determinant: row index");
    for (std::size_t j : cols)
        if (j >= a.cols()) throw std::out_of_range("minor_determinant: column index");

    std::size_t full = (std::size_t{1} << n) - 1;
    // dp[mask] = det of the minor on rows 0..popcount(mask)-1 and the column
    // subset encoded by mask; submasks are numerically smaller, so a single
    // ascending pass suffices.
    std::vector<T> dp(full + 1, T{});
    for (std::size_t mask = 1; mask <= full; ++mask) {
        std::size_t k = static_cast<std::size_t>(std::popcount(mask));
        std::size_t row = k - 1;
        // cofactor sign along the last row: (-1)^{(k-1) + position}
        int sign = (row % 2 == 0) ? 1 : -1;
        T acc{};
        bool first = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (!(mask & (std::size_t{1} << j))) continue;
            const T &entry = a(rows[row], cols[j]);
            T term = (k == 1) ? entry : entry * dp[mask & ~(std::size_t{1} << j)];
            if (sign < 0) term = T{} - term;
            if (first) {
                acc = std::move(term);
                first = false;
            } else {
                acc = acc + term;
            }
            sign = -sign;
        }
        dp[mask] = std::move(acc);
    }
    return dp[full];
}

template <class T>
T determinant(const Matrix<T> &a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("determinant: matrix not square");
    std::vector<std::size_t> idx(a.rows());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    return minor_determinant(a, idx, idx);
}

}  // namespace dlwe
