#pragma once

// Summary-image construction: flow profile images (one-step approximate and exact
// least squares), rank-r weight flattening, and the dynamic / eigen / mean / max baselines.
//
// Pooled vectors use the frame vectorization of frame.hpp: row-major, RGB interleaved.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "frame.hpp"
#include "matrix.hpp"
#include "optical_flow.hpp"

namespace flowpool {

/// Per-frame pooling coefficients.
struct WeightVector {
	std::vector<double> weights;

	std::size_t size() const noexcept { return weights.size(); }
	double operator[](std::size_t i) const noexcept { return weights[i]; }
};

/// Flattens the r largest energies to `high` and all others to `low`.
struct RankRConfig {
	int r = 1;
	double high = 1.0;
	double low = 0.0;
};

/// Unscaled pooled vector of length 3 * width * height.
struct RawSummary {
	std::vector<double> d;

	std::size_t size() const noexcept { return d.size(); }
	double operator[](std::size_t i) const noexcept { return d[i]; }
};

struct ExactSolution {
	RawSummary raw;
	/// d^T V_i - target_i for every row.
	std::vector<double> residuals;
	double lambda{};

	double max_abs_residual() const noexcept {
		double m = 0.0;
		for (double r : residuals) { m = std::max(m, std::abs(r)); }
		return m;
	}
};

inline WeightVector fpi_weights(EnergyProfile const& profile, std::optional<RankRConfig> const& rank = std::nullopt) {
	std::size_t const n = profile.size();
	if (n == 0) { throw Error(ErrorCode::InvalidArgument, "empty energy profile"); }
	if (!rank) { return {profile.energies}; }
	if (rank->r < 1 || static_cast<std::size_t>(rank->r) > n) {
		throw Error(ErrorCode::InvalidRank, "r must lie in [1, " + std::to_string(n) + "], got " + std::to_string(rank->r));
	}
	if (!(rank->high > rank->low)) { throw Error(ErrorCode::InvalidArgument, "rank-r high value must exceed low value"); }

	std::vector<std::size_t> order(n);
	std::iota(order.begin(), order.end(), std::size_t{0});
	// Stable: equal energies keep index order, so the earlier frame wins ties.
	std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return profile[a] > profile[b]; });
	WeightVector w{std::vector<double>(n, rank->low)};
	for (int k = 0; k < rank->r; ++k) { w.weights[order[static_cast<std::size_t>(k)]] = rank->high; }
	return w;
}

/// d = sum_i w_i V_i, accumulated for i = 1..n in order so the result is reproducible bit for bit.
template <RowMatrix M>
RawSummary weighted_sum(M const& rows, WeightVector const& w) {
	if (w.size() != rows.rows()) {
		throw Error(ErrorCode::LengthMismatch, "weight vector has " + std::to_string(w.size()) + " entries for " + std::to_string(rows.rows()) + " rows");
	}
	RawSummary raw{std::vector<double>(rows.cols(), 0.0)};
	for (std::size_t i = 0; i < rows.rows(); ++i) {
		std::span<double const> row = rows.row(i);
		double const wi = w[i];
		for (std::size_t k = 0; k < raw.d.size(); ++k) { raw.d[k] += wi * row[k]; }
	}
	return raw;
}

/// Centered rows sum to zero, so the weights may be shifted by any constant. Shifting by
/// the minimum makes equal weights cancel exactly instead of leaving rounding noise,
/// and makes rank-r results depend only on high - low.
inline RawSummary weighted_sum(CenteredFrameMatrix const& rows, WeightVector const& w) {
	if (w.size() != rows.rows()) {
		throw Error(ErrorCode::LengthMismatch, "weight vector has " + std::to_string(w.size()) + " entries for " + std::to_string(rows.rows()) + " rows");
	}
	double const base = *std::min_element(w.weights.begin(), w.weights.end());
	WeightVector shifted{w.weights};
	for (double& x : shifted.weights) { x -= base; }
	return weighted_sum(rows.matrix(), shifted);
}

namespace detail {

inline double dot(std::span<double const> a, std::span<double const> b) noexcept {
	double s = 0.0;
	for (std::size_t k = 0; k < a.size(); ++k) { s += a[k] * b[k]; }
	return s;
}

template <RowMatrix M>
Matrix gram(M const& rows) {
	std::size_t const n = rows.rows();
	Matrix g(n, n);
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = 0; j <= i; ++j) {
			double const v = dot(rows.row(i), rows.row(j));
			g(i, j) = v;
			g(j, i) = v;
		}
	}
	return g;
}

/// In-place Cholesky factor (lower triangle). Returns false on a non-positive pivot.
inline bool cholesky(Matrix& a) {
	std::size_t const n = a.rows();
	for (std::size_t j = 0; j < n; ++j) {
		double diag = a(j, j);
		for (std::size_t k = 0; k < j; ++k) { diag -= a(j, k) * a(j, k); }
		if (!(diag > 0.0)) { return false; }
		a(j, j) = std::sqrt(diag);
		for (std::size_t i = j + 1; i < n; ++i) {
			double s = a(i, j);
			for (std::size_t k = 0; k < j; ++k) { s -= a(i, k) * a(j, k); }
			a(i, j) = s / a(j, j);
		}
	}
	return true;
}

inline std::vector<double> cholesky_solve(Matrix const& l, std::span<double const> b) {
	std::size_t const n = l.rows();
	std::vector<double> x(b.begin(), b.end());
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t k = 0; k < i; ++k) { x[i] -= l(i, k) * x[k]; }
		x[i] /= l(i, i);
	}
	for (std::size_t i = n; i-- > 0;) {
		for (std::size_t k = i + 1; k < n; ++k) { x[i] -= l(k, i) * x[k]; }
		x[i] /= l(i, i);
	}
	return x;
}

template <RowMatrix M>
RawSummary transpose_times(M const& rows, std::span<double const> coeffs) {
	return weighted_sum(rows, WeightVector{{coeffs.begin(), coeffs.end()}});
}

} // namespace detail

inline constexpr double singular_condition_limit = 1e12;

/// 1e-6 * trace(G) / n. A zero matrix yields 1.0, since then every lambda gives d = 0.
template <RowMatrix M>
double default_lambda(M const& rows) {
	double trace = 0.0;
	for (std::size_t i = 0; i < rows.rows(); ++i) { trace += detail::dot(rows.row(i), rows.row(i)); }
	double const lambda = 1e-6 * trace / static_cast<double>(rows.rows());
	return lambda > 0.0 ? lambda : 1.0;
}

/// Minimizer of (lambda/2)|d|^2 + sum_i (d^T V_i - t_i)^2.
///
/// Solved through the n x n system (lambda/2 I + V V^T) a = t, d = V^T a, which is the
/// minimum-norm pseudoinverse solution as lambda -> 0. With lambda = 0 the Gram matrix
/// must be well conditioned; note that a mean-centered matrix always has the all-ones
/// vector in its null space, so centered inputs need lambda > 0.
template <RowMatrix M>
ExactSolution fpi_exact(M const& rows, std::span<double const> targets, double lambda) {
	std::size_t const n = rows.rows();
	if (n == 0) { throw Error(ErrorCode::InvalidArgument, "no rows"); }
	if (targets.size() != n) { throw Error(ErrorCode::LengthMismatch, "target vector length differs from row count"); }
	if (!(lambda >= 0.0) || !std::isfinite(lambda)) { throw Error(ErrorCode::InvalidArgument, "lambda must be finite and non-negative"); }

	Matrix system = detail::gram(rows);
	for (std::size_t i = 0; i < n; ++i) { system(i, i) += 0.5 * lambda; }
	if (!detail::cholesky(system)) { throw Error(ErrorCode::SingularSystem, "Gram system is not positive definite"); }
	if (lambda == 0.0) {
		double lo = system(0, 0);
		double hi = system(0, 0);
		for (std::size_t i = 1; i < n; ++i) {
			lo = std::min(lo, system(i, i));
			hi = std::max(hi, system(i, i));
		}
		double const cond_estimate = (hi / lo) * (hi / lo);
		if (!(cond_estimate <= singular_condition_limit)) {
			throw Error(ErrorCode::SingularSystem, "Gram matrix condition estimate " + std::to_string(cond_estimate) + " exceeds 1e12");
		}
	}
	auto const coeffs = detail::cholesky_solve(system, targets);

	ExactSolution sol;
	sol.lambda = lambda;
	sol.raw = detail::transpose_times(rows, coeffs);
	sol.residuals.resize(n);
	for (std::size_t i = 0; i < n; ++i) { sol.residuals[i] = detail::dot(sol.raw.d, rows.row(i)) - targets[i]; }
	return sol;
}

template <RowMatrix M>
ExactSolution fpi_exact(M const& rows, EnergyProfile const& profile, double lambda) {
	return fpi_exact(rows, std::span<double const>(profile.energies), lambda);
}

inline constexpr double rescale_tie_tolerance = 1e-9;

/// Affine map of [min, max] onto [0, 255], rounded half away from zero. A constant
/// input (including the all-zero pool) maps to uniform 128.

inline SummaryImage rescale_to_image(RawSummary const& raw, std::size_t width, std::size_t height) {
	if (raw.size() != width * height * channels) {
		throw Error(ErrorCode::LengthMismatch, "raw summary has " + std::to_string(raw.size()) + " entries, expected " + std::to_string(width * height * channels));
	}
	SummaryImage img(width, height, std::uint8_t{128});
	auto const [lo_it, hi_it] = std::minmax_element(raw.d.begin(), raw.d.end());
	double const lo = *lo_it;
	double const hi = *hi_it;
	if (!(hi > lo)) { return img; }
	double const span = hi - lo;
	auto out = img.data();
	for (std::size_t k = 0; k < raw.size(); ++k) {
		// Near-ties round up so rounding noise from scaling raw cannot flip them.
		double const t = (raw.d[k] - lo) / span * 255.0;
		double const floor = std::floor(t);
		double const v = t - floor >= 0.5 - rescale_tie_tolerance ? floor + 1.0 : floor;
		out[k] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
	}
	return img;
}

/// Mean-center, weight by flow energy (or rank-r flattened weights), sum, rescale.
inline SummaryImage flow_profile_image(FrameSequence const& seq, EnergyProfile const& profile, std::optional<RankRConfig> const& rank = std::nullopt) {
	if (profile.size() != seq.size()) { throw Error(ErrorCode::LengthMismatch, "energy profile length differs from frame count"); }
	auto const centered = center_frames(seq, compute_mean_frame(seq));
	auto const raw = weighted_sum(centered, fpi_weights(profile, rank));
	return rescale_to_image(raw, seq.width(), seq.height());
}

struct ExactImage {
	SummaryImage image;
	ExactSolution solution;
};

/// Exact least-squares counterpart of flow_profile_image. Without a lambda the
/// default_lambda of the centered matrix is used.
inline ExactImage flow_profile_image_exact(FrameSequence const& seq, EnergyProfile const& profile, std::optional<RankRConfig> const& rank = std::nullopt,
										   std::optional<double> lambda = std::nullopt) {
	if (profile.size() != seq.size()) { throw Error(ErrorCode::LengthMismatch, "energy profile length differs from frame count"); }
	auto const centered = center_frames(seq, compute_mean_frame(seq));
	auto const targets = fpi_weights(profile, rank);
	auto sol = fpi_exact(centered, std::span<double const>(targets.weights), lambda.value_or(default_lambda(centered)));
	auto img = rescale_to_image(sol.raw, seq.width(), seq.height());
	return {std::move(img), std::move(sol)};
}

/// Approximate rank pooling coefficients:
/// alpha_t = 2(T - t + 1) - (T + 1)(H_T - H_{t-1}), with H_k the k-th harmonic number.
inline std::vector<double> dynamic_coefficients(std::size_t frame_count) {
	std::size_t const T = frame_count;
	// Tail sums H_T - H_{t-1} = sum_{j=t..T} 1/j, accumulated from the small end in extended precision.
	std::vector<long double> tail(T + 2, 0.0L);
	for (std::size_t j = T; j >= 1; --j) { tail[j] = tail[j + 1] + 1.0L / static_cast<long double>(j); }
	std::vector<double> alpha(T);
	for (std::size_t t = 1; t <= T; ++t) {
		long double const a = 2.0L * static_cast<long double>(T - t + 1) - static_cast<long double>(T + 1) * tail[t];
		alpha[t - 1] = static_cast<double>(a);
	}
	return alpha;
}

/// Approximate dynamic image on the uncentered frames.
inline SummaryImage dynamic_image(FrameSequence const& seq) {
	if (seq.size() < 2) { throw Error(ErrorCode::TooShort, "dynamic image needs at least 2 frames"); }
	auto const alpha = dynamic_coefficients(seq.size());
	// Frames are taken relative to the first one. With zero-sum coefficients this is the
	// same pool, and the integer differences make static content cancel exactly.
	auto const first = seq[0].data();
	RawSummary raw{std::vector<double>(seq.dimension(), 0.0)};
	for (std::size_t t = 1; t < seq.size(); ++t) {
		auto const px = seq[t].data();
		for (std::size_t k = 0; k < px.size(); ++k) { raw.d[k] += alpha[t] * (static_cast<double>(px[k]) - static_cast<double>(first[k])); }
	}
	return rescale_to_image(raw, seq.width(), seq.height());
}

struct PowerIterationOptions {
	/// Stop once successive unit iterates differ by less than this in Euclidean norm.
	double tolerance = 1e-10;
	int max_iterations = 10'000;
};

/// Projection of the rows onto their dominant temporal eigenvector: raw = V^T w with w
/// the top eigenvector of V V^T found by power iteration. The sign is fixed so that
/// the largest-magnitude entry of raw is positive. A zero matrix yields raw = 0.
template <RowMatrix M>
RawSummary eigen_pool(M const& rows, PowerIterationOptions const& opts = {}) {
	std::size_t const n = rows.rows();
	if (n == 0) { throw Error(ErrorCode::InvalidArgument, "no rows"); }
	Matrix const g = detail::gram(rows);
	double trace = 0.0;
	for (std::size_t i = 0; i < n; ++i) { trace += g(i, i); }
	if (!(trace > 0.0)) { return RawSummary{std::vector<double>(rows.cols(), 0.0)}; }

	auto apply = [&](std::vector<double> const& x) {
		std::vector<double> y(n, 0.0);
		for (std::size_t i = 0; i < n; ++i) { y[i] = detail::dot(g.row(i), x); }
		return y;
	};
	auto norm = [](std::vector<double> const& x) { return std::sqrt(detail::dot(x, x)); };

	// Starts: the uniform vector, then the standard basis in order. For centered rows the
	// uniform vector lies in the null space of G, so the first restart is the usual path.
	std::vector<std::vector<double>> starts;
	starts.emplace_back(n, 1.0 / std::sqrt(static_cast<double>(n)));
	for (std::size_t i = 0; i < n; ++i) {
		starts.emplace_back(n, 0.0);
		starts.back()[i] = 1.0;
	}

	for (auto w : starts) {
		auto y = apply(w);
		double ny = norm(y);
		if (!(ny > 1e-12 * trace)) { continue; }
		for (double& v : y) { v /= ny; }
		w = std::move(y);
		bool converged = false;
		for (int it = 0; it < opts.max_iterations; ++it) {
			y = apply(w);
			ny = norm(y);
			double change = 0.0;
			for (std::size_t i = 0; i < n; ++i) {
				y[i] /= ny;
				change += (y[i] - w[i]) * (y[i] - w[i]);
			}
			w = std::move(y);
			if (std::sqrt(change) < opts.tolerance) {
				converged = true;
				break;
			}
		}
		if (!converged) { throw Error(ErrorCode::NoConvergence, "power iteration did not converge in " + std::to_string(opts.max_iterations) + " iterations"); }

		RawSummary raw = detail::transpose_times(rows, w);
		std::size_t peak = 0;
		for (std::size_t k = 1; k < raw.size(); ++k) {
			if (std::abs(raw.d[k]) > std::abs(raw.d[peak])) { peak = k; }
		}
		if (raw.size() > 0 && raw.d[peak] < 0.0) {
			for (double& v : raw.d) { v = -v; }
		}
		return raw;
	}
	return RawSummary{std::vector<double>(rows.cols(), 0.0)};
}

inline SummaryImage eigen_image(FrameSequence const& seq, PowerIterationOptions const& opts = {}) {
	if (seq.size() < 2) { throw Error(ErrorCode::TooShort, "eigen image needs at least 2 frames"); }
	auto const centered = center_frames(seq, compute_mean_frame(seq));
	return rescale_to_image(eigen_pool(centered, opts), seq.width(), seq.height());
}

/// Per-pixel mean, rounded half away from zero; no rescaling.
inline SummaryImage mean_image(FrameSequence const& seq) {
	std::vector<std::uint32_t> sum(seq.dimension(), 0);
	for (Frame const& f : seq) {
		auto const px = f.data();
		for (std::size_t k = 0; k < px.size(); ++k) { sum[k] += px[k]; }
	}
	SummaryImage img(seq.width(), seq.height());
	auto out = img.data();
	double const n = static_cast<double>(seq.size());
	for (std::size_t k = 0; k < sum.size(); ++k) { out[k] = static_cast<std::uint8_t>(std::round(static_cast<double>(sum[k]) / n)); }
	return img;
}

inline SummaryImage max_image(FrameSequence const& seq) {
	SummaryImage img(seq.width(), seq.height());
	auto out = img.data();
	for (Frame const& f : seq) {
		auto const px = f.data();
		for (std::size_t k = 0; k < px.size(); ++k) { out[k] = std::max(out[k], px[k]); }
	}
	return img;
}

} // namespace flowpool
