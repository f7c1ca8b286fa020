#pragma once

// Brute-force reference implementations for the test suite. Nothing here shares a
// kernel with the main path: plain nested vectors, Gaussian elimination, Jacobi rotations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "error.hpp"

namespace flowpool::oracle {

using Vec = std::vector<double>;
using Rows = std::vector<Vec>;

struct DenseSystem {
	Rows a;
	Vec b;
};

namespace detail {

using Wide = long double;

/// Partial-pivot elimination carried out entirely in extended precision.
inline Vec eliminate(std::vector<std::vector<Wide>> a, std::vector<Wide> b) {
	std::size_t const m = b.size();
	Wide scale = 0.0L;
	for (auto const& row : a) {
		for (Wide v : row) { scale = std::max(scale, std::abs(v)); }
	}
	for (std::size_t col = 0; col < m; ++col) {
		std::size_t pivot = col;
		for (std::size_t r = col + 1; r < m; ++r) {
			if (std::abs(a[r][col]) > std::abs(a[pivot][col])) { pivot = r; }
		}
		if (!(std::abs(a[pivot][col]) > 1e-12L * scale)) { throw Error(ErrorCode::SingularSystem, "pivot below tolerance"); }
		std::swap(a[pivot], a[col]);
		std::swap(b[pivot], b[col]);
		for (std::size_t r = col + 1; r < m; ++r) {
			Wide const f = a[r][col] / a[col][col];
			if (f == 0.0L) { continue; }
			for (std::size_t c = col; c < m; ++c) { a[r][c] -= f * a[col][c]; }
			b[r] -= f * b[col];
		}
	}
	std::vector<Wide> x(m, 0.0L);
	for (std::size_t r = m; r-- > 0;) {
		Wide s = b[r];
		for (std::size_t c = r + 1; c < m; ++c) { s -= a[r][c] * x[c]; }
		x[r] = s / a[r][r];
	}
	return Vec(x.begin(), x.end());
}

} // namespace detail

/// Gaussian elimination with partial pivoting (extended-precision arithmetic).
inline Vec solve_dense(DenseSystem const& sys) {
	std::size_t const m = sys.b.size();
	if (sys.a.size() != m) { throw Error(ErrorCode::LengthMismatch, "system is not square"); }
	std::vector<std::vector<detail::Wide>> a;
	for (auto const& row : sys.a) {
		if (row.size() != m) { throw Error(ErrorCode::LengthMismatch, "system is not square"); }
		a.emplace_back(row.begin(), row.end());
	}
	return detail::eliminate(std::move(a), std::vector<detail::Wide>(sys.b.begin(), sys.b.end()));
}

/// J(d) = lambda/2 |d|^2 + sum_i (d . V_i - e_i)^2
inline double objective(Vec const& d, Rows const& v, Vec const& e, double lambda) {
	double reg = 0.0;
	for (double x : d) { reg += x * x; }
	double fit = 0.0;
	for (std::size_t i = 0; i < v.size(); ++i) {
		double p = 0.0;
		for (std::size_t k = 0; k < d.size(); ++k) { p += d[k] * v[i][k]; }
		fit += (p - e[i]) * (p - e[i]);
	}
	return 0.5 * lambda * reg + fit;
}

/// lambda d + 2 sum_i (d . V_i - e_i) V_i, by direct summation.
inline Vec grad_J(Vec const& d, Rows const& v, Vec const& e, double lambda) {
	Vec g(d.size());
	for (std::size_t k = 0; k < d.size(); ++k) { g[k] = lambda * d[k]; }
	for (std::size_t i = 0; i < v.size(); ++i) {
		double p = 0.0;
		for (std::size_t k = 0; k < d.size(); ++k) { p += d[k] * v[i][k]; }
		double const r = p - e[i];
		for (std::size_t k = 0; k < d.size(); ++k) { g[k] += 2.0 * r * v[i][k]; }
	}
	return g;
}

/// Dense d-dimensional normal equations (lambda/2 I + V^T V) d = V^T e. The system is
/// nearly singular for small lambda, so it is formed and solved in extended precision.
inline Vec ridge_normal_equations(Rows const& v, Vec const& e, double lambda) {
	using detail::Wide;
	std::size_t const dim = v.empty() ? 0 : v[0].size();
	std::vector<std::vector<Wide>> a(dim, std::vector<Wide>(dim, 0.0L));
	std::vector<Wide> b(dim, 0.0L);
	for (std::size_t r = 0; r < dim; ++r) {
		a[r][r] = 0.5L * lambda;
		for (std::size_t c = 0; c < dim; ++c) {
			for (auto const& row : v) { a[r][c] += static_cast<Wide>(row[r]) * row[c]; }
		}
		for (std::size_t i = 0; i < v.size(); ++i) { b[r] += static_cast<Wide>(v[i][r]) * e[i]; }
	}
	return detail::eliminate(std::move(a), std::move(b));
}

struct EigenPair {
	double value{};
	Vec vector;
};

/// Cyclic Jacobi eigensolver for small symmetric matrices; returns the largest eigenpair.
inline EigenPair dominant_eigvec_dense(Rows g) {
	std::size_t const n = g.size();
	double max_abs = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		if (g[i].size() != n) { throw Error(ErrorCode::NotSymmetric, "matrix is not square"); }
		for (std::size_t j = 0; j < n; ++j) { max_abs = std::max(max_abs, std::abs(g[i][j])); }
	}
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = i + 1; j < n; ++j) {
			if (std::abs(g[i][j] - g[j][i]) > 1e-9 * std::max(1.0, max_abs)) { throw Error(ErrorCode::NotSymmetric, "matrix is not symmetric"); }
		}
	}

	Rows q(n, Vec(n, 0.0));
	for (std::size_t i = 0; i < n; ++i) { q[i][i] = 1.0; }

	auto off_norm = [&] {
		double s = 0.0;
		for (std::size_t i = 0; i < n; ++i) {
			for (std::size_t j = 0; j < n; ++j) {
				if (i != j) { s += g[i][j] * g[i][j]; }
			}
		}
		return std::sqrt(s);
	};

	double const target = 1e-12 * std::max(1.0, max_abs);
	for (int sweep = 0; sweep < 100 && off_norm() > target; ++sweep) {
		for (std::size_t p = 0; p < n; ++p) {
			for (std::size_t r = p + 1; r < n; ++r) {
				if (g[p][r] == 0.0) { continue; }
				double const theta = (g[r][r] - g[p][p]) / (2.0 * g[p][r]);
				double const t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
				double const c = 1.0 / std::sqrt(t * t + 1.0);
				double const s = t * c;
				for (std::size_t k = 0; k < n; ++k) {
					double const gkp = g[k][p];
					double const gkr = g[k][r];
					g[k][p] = c * gkp - s * gkr;
					g[k][r] = s * gkp + c * gkr;
				}
				for (std::size_t k = 0; k < n; ++k) {
					double const gpk = g[p][k];
					double const grk = g[r][k];
					g[p][k] = c * gpk - s * grk;
					g[r][k] = s * gpk + c * grk;
				}
				for (std::size_t k = 0; k < n; ++k) {
					double const qkp = q[k][p];
					double const qkr = q[k][r];
					q[k][p] = c * qkp - s * qkr;
					q[k][r] = s * qkp + c * qkr;
				}
			}
		}
	}

	std::size_t best = 0;
	for (std::size_t i = 1; i < n; ++i) {
		if (g[i][i] > g[best][best]) { best = i; }
	}
	EigenPair out{g[best][best], Vec(n)};
	for (std::size_t k = 0; k < n; ++k) { out.vector[k] = q[k][best]; }
	return out;
}

} // namespace flowpool::oracle
