#pragma once

#include <cassert>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

namespace flowpool {

/// Anything that exposes a stack of equally long real row vectors.
template <typename M>
concept RowMatrix = requires(M const& m, std::size_t i) {
	{ m.rows() } -> std::convertible_to<std::size_t>;
	{ m.cols() } -> std::convertible_to<std::size_t>;
	{ m.row(i) } -> std::convertible_to<std::span<double const>>;
};

/// Dense row-major real matrix.
class Matrix {
  public:
	Matrix() = default;
	Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : m_rows(rows), m_cols(cols), m_data(rows * cols, fill) {}

	std::size_t rows() const noexcept { return m_rows; }
	std::size_t cols() const noexcept { return m_cols; }

	double& operator()(std::size_t r, std::size_t c) noexcept {
		assert(r < m_rows && c < m_cols);
		return m_data[r * m_cols + c];
	}
	double operator()(std::size_t r, std::size_t c) const noexcept {
		assert(r < m_rows && c < m_cols);
		return m_data[r * m_cols + c];
	}

	std::span<double> row(std::size_t r) noexcept { return {m_data.data() + r * m_cols, m_cols}; }
	std::span<double const> row(std::size_t r) const noexcept { return {m_data.data() + r * m_cols, m_cols}; }

	std::span<double const> data() const noexcept { return m_data; }
	std::span<double> data() noexcept { return m_data; }

  private:
	std::size_t m_rows{};
	std::size_t m_cols{};
	std::vector<double> m_data;
};

static_assert(RowMatrix<Matrix>);

} // namespace flowpool
