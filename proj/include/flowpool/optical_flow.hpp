#pragma once

// Dense optical flow (coarse-to-fine Horn-Schunck) and the per-frame flow energy profile.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "flow_field.hpp"
#include "frame.hpp"

namespace flowpool {

/// Real-valued single-channel raster, row-major.
struct GrayImage {
	std::size_t width{};
	std::size_t height{};
	std::vector<double> data;

	double at(std::size_t x, std::size_t y) const noexcept { return data[y * width + x]; }
	double& at(std::size_t x, std::size_t y) noexcept { return data[y * width + x]; }
};

struct FlowParams {
	/// Horn-Schunck regularization weight (alpha); the update uses alpha^2.
	double smoothness = 15.0;
	int iterations = 100;
	int levels = 3;

	void validate() const {
		if (!(smoothness > 0.0) || !std::isfinite(smoothness)) { throw Error(ErrorCode::InvalidArgument, "smoothness must be positive"); }
		if (iterations < 1) { throw Error(ErrorCode::InvalidArgument, "iterations must be >= 1"); }
		if (levels < 1) { throw Error(ErrorCode::InvalidArgument, "levels must be >= 1"); }
	}
};

/// One non-negative energy per frame.
struct EnergyProfile {
	std::vector<double> energies;

	std::size_t size() const noexcept { return energies.size(); }
	double operator[](std::size_t i) const noexcept { return energies[i]; }
};

/// Rec.601 luma.
inline GrayImage rgb_to_gray(Frame const& frame) {
	GrayImage gray{frame.width(), frame.height(), std::vector<double>(frame.width() * frame.height())};
	auto const px = frame.data();
	for (std::size_t k = 0; k < gray.data.size(); ++k) {
		gray.data[k] = 0.299 * px[3 * k] + 0.587 * px[3 * k + 1] + 0.114 * px[3 * k + 2];
	}
	return gray;
}

namespace detail {

inline double clamped(GrayImage const& img, std::ptrdiff_t x, std::ptrdiff_t y) noexcept {
	x = std::clamp<std::ptrdiff_t>(x, 0, static_cast<std::ptrdiff_t>(img.width) - 1);
	y = std::clamp<std::ptrdiff_t>(y, 0, static_cast<std::ptrdiff_t>(img.height) - 1);
	return img.data[static_cast<std::size_t>(y) * img.width + static_cast<std::size_t>(x)];
}

/// Bilinear sample with replicated edges.
inline double sample(GrayImage const& img, double x, double y) noexcept {
	double const fx = std::floor(x);
	double const fy = std::floor(y);
	double const ax = x - fx;
	double const ay = y - fy;
	auto const x0 = static_cast<std::ptrdiff_t>(fx);
	auto const y0 = static_cast<std::ptrdiff_t>(fy);
	double const top = (1.0 - ax) * clamped(img, x0, y0) + ax * clamped(img, x0 + 1, y0);
	double const bottom = (1.0 - ax) * clamped(img, x0, y0 + 1) + ax * clamped(img, x0 + 1, y0 + 1);
	return (1.0 - ay) * top + ay * bottom;
}

/// 2x2 box average; odd trailing rows/columns are replicated.
inline GrayImage downsample(GrayImage const& img) {
	GrayImage out{(img.width + 1) / 2, (img.height + 1) / 2, {}};
	out.data.resize(out.width * out.height);
	for (std::size_t y = 0; y < out.height; ++y) {
		for (std::size_t x = 0; x < out.width; ++x) {
			auto const sx = static_cast<std::ptrdiff_t>(2 * x);
			auto const sy = static_cast<std::ptrdiff_t>(2 * y);
			out.at(x, y) = 0.25 * (clamped(img, sx, sy) + clamped(img, sx + 1, sy) + clamped(img, sx, sy + 1) + clamped(img, sx + 1, sy + 1));
		}
	}
	return out;
}

struct DenseFlow {
	GrayImage u;
	GrayImage v;
};

/// Resamples a coarse flow onto a finer grid and rescales the displacements.
inline DenseFlow upsample(DenseFlow const& coarse, std::size_t width, std::size_t height) {
	DenseFlow fine{{width, height, std::vector<double>(width * height)}, {width, height, std::vector<double>(width * height)}};
	double const sx = static_cast<double>(width) / static_cast<double>(coarse.u.width);
	double const sy = static_cast<double>(height) / static_cast<double>(coarse.u.height);
	for (std::size_t y = 0; y < height; ++y) {
		for (std::size_t x = 0; x < width; ++x) {
			double const cx = (static_cast<double>(x) + 0.5) / sx - 0.5;
			double const cy = (static_cast<double>(y) + 0.5) / sy - 0.5;
			fine.u.at(x, y) = sx * sample(coarse.u, cx, cy);
			fine.v.at(x, y) = sy * sample(coarse.v, cx, cy);
		}
	}
	return fine;
}

/// Neighbourhood average of the Horn-Schunck Laplacian approximation:
/// 1/6 for edge neighbours, 1/12 for diagonal ones.
inline double local_average(GrayImage const& f, std::ptrdiff_t x, std::ptrdiff_t y) noexcept {
	return (clamped(f, x - 1, y) + clamped(f, x + 1, y) + clamped(f, x, y - 1) + clamped(f, x, y + 1)) / 6.0 +
		   (clamped(f, x - 1, y - 1) + clamped(f, x + 1, y - 1) + clamped(f, x - 1, y + 1) + clamped(f, x + 1, y + 1)) / 12.0;
}

/// Horn-Schunck iterations at one pyramid level, linearized around `init`.
inline DenseFlow refine_level(GrayImage const& prev, GrayImage const& next, DenseFlow const& init, double alpha_sq, int iterations) {
	std::size_t const w = prev.width;
	std::size_t const h = prev.height;

	GrayImage warped{w, h, std::vector<double>(w * h)};
	for (std::size_t y = 0; y < h; ++y) {
		for (std::size_t x = 0; x < w; ++x) {
			warped.at(x, y) = sample(next, static_cast<double>(x) + init.u.at(x, y), static_cast<double>(y) + init.v.at(x, y));
		}
	}

	// Forward differences over the 2x2x2 cube spanned by both frames.
	std::vector<double> ex(w * h);
	std::vector<double> ey(w * h);
	std::vector<double> et(w * h);
	for (std::size_t y = 0; y < h; ++y) {
		for (std::size_t x = 0; x < w; ++x) {
			auto const ix = static_cast<std::ptrdiff_t>(x);
			auto const iy = static_cast<std::ptrdiff_t>(y);
			double const a00 = clamped(prev, ix, iy), a10 = clamped(prev, ix + 1, iy);
			double const a01 = clamped(prev, ix, iy + 1), a11 = clamped(prev, ix + 1, iy + 1);
			double const b00 = clamped(warped, ix, iy), b10 = clamped(warped, ix + 1, iy);
			double const b01 = clamped(warped, ix, iy + 1), b11 = clamped(warped, ix + 1, iy + 1);
			std::size_t const k = y * w + x;
			ex[k] = 0.25 * ((a10 - a00) + (a11 - a01) + (b10 - b00) + (b11 - b01));
			ey[k] = 0.25 * ((a01 - a00) + (a11 - a10) + (b01 - b00) + (b11 - b10));
			et[k] = 0.25 * ((b00 - a00) + (b10 - a10) + (b01 - a01) + (b11 - a11));
		}
	}

	DenseFlow cur = init;
	DenseFlow nxt = init;
	for (int it = 0; it < iterations; ++it) {
		for (std::size_t y = 0; y < h; ++y) {
			for (std::size_t x = 0; x < w; ++x) {
				auto const ix = static_cast<std::ptrdiff_t>(x);
				auto const iy = static_cast<std::ptrdiff_t>(y);
				std::size_t const k = y * w + x;
				double const ubar = local_average(cur.u, ix, iy);
				double const vbar = local_average(cur.v, ix, iy);
				double const t = (ex[k] * (ubar - init.u.data[k]) + ey[k] * (vbar - init.v.data[k]) + et[k]) /
								 (alpha_sq + ex[k] * ex[k] + ey[k] * ey[k]);
				nxt.u.data[k] = ubar - ex[k] * t;
				nxt.v.data[k] = vbar - ey[k] * t;
			}
		}
		std::swap(cur, nxt);
	}
	return cur;
}

} // namespace detail

/// Coarse-to-fine Horn-Schunck. Levels beyond what the image supports (coarsest side
/// at least 4 px) are dropped; the coarsest level starts from zero flow.
inline FlowField estimate_flow(GrayImage const& prev, GrayImage const& next, FlowParams const& params = {}) {
	params.validate();
	if (prev.width != next.width || prev.height != next.height) { throw Error(ErrorCode::DimensionMismatch, "flow inputs differ in size"); }
	if (prev.width < 2 || prev.height < 2) { throw Error(ErrorCode::TooSmall, "flow inputs must be at least 2x2"); }

	std::vector<GrayImage> prev_pyr{prev};
	std::vector<GrayImage> next_pyr{next};
	while (static_cast<int>(prev_pyr.size()) < params.levels) {
		auto const& top = prev_pyr.back();
		if ((top.width + 1) / 2 < 4 || (top.height + 1) / 2 < 4) { break; }
		prev_pyr.push_back(detail::downsample(top));
		next_pyr.push_back(detail::downsample(next_pyr.back()));
	}

	double const alpha_sq = params.smoothness * params.smoothness;
	detail::DenseFlow flow;
	for (std::size_t level = prev_pyr.size(); level-- > 0;) {
		auto const& p = prev_pyr[level];
		if (level + 1 == prev_pyr.size()) {
			flow = {{p.width, p.height, std::vector<double>(p.width * p.height, 0.0)}, {p.width, p.height, std::vector<double>(p.width * p.height, 0.0)}};
		} else {
			flow = detail::upsample(flow, p.width, p.height);
		}
		flow = detail::refine_level(p, next_pyr[level], flow, alpha_sq, params.iterations);
	}

	FlowField field(prev.width, prev.height);
	for (std::size_t y = 0; y < prev.height; ++y) {
		for (std::size_t x = 0; x < prev.width; ++x) {
			field.u(x, y) = static_cast<float>(flow.u.at(x, y));
			field.v(x, y) = static_cast<float>(flow.v.at(x, y));
		}
	}
	return field;
}

inline FlowField estimate_flow(Frame const& prev, Frame const& next, FlowParams const& params = {}) {
	return estimate_flow(rgb_to_gray(prev), rgb_to_gray(next), params);
}

/// Sum over all pixels of u^2 + v^2 (squared norm, no square root, whole frame).
inline double flow_energy(FlowField const& field) noexcept {
	double energy = 0.0;
	for (std::size_t k = 0; k < field.size(); ++k) {
		double const u = field.u()[k];
		double const v = field.v()[k];
		energy += u * u + v * v;
	}
	return energy;
}

/// Flow from frame i to frame i+1 for every consecutive pair (n-1 fields).
inline std::vector<FlowField> sequence_flows(FrameSequence const& seq, FlowParams const& params = {}) {
	params.validate();
	std::vector<FlowField> flows;
	if (seq.size() < 2) { return flows; }
	flows.reserve(seq.size() - 1);
	GrayImage prev = rgb_to_gray(seq[0]);
	for (std::size_t i = 1; i < seq.size(); ++i) {
		GrayImage next = rgb_to_gray(seq[i]);
		flows.push_back(estimate_flow(prev, next, params));
		prev = std::move(next);
	}
	return flows;
}

/// e_i is the energy of the flow from frame i to i+1; the last frame repeats e_{n-1}.
/// A single frame has profile [0].
inline EnergyProfile energy_profile(FrameSequence const& seq, std::span<FlowField const> flows) {
	std::size_t const n = seq.size();
	if (flows.size() + 1 != n) {
		throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(n - 1) + " flow fields, got " + std::to_string(flows.size()));
	}
	EnergyProfile profile;
	profile.energies.reserve(n);
	for (std::size_t i = 0; i < flows.size(); ++i) {
		if (flows[i].width() != seq.width() || flows[i].height() != seq.height()) {
			throw Error(ErrorCode::DimensionMismatch, "flow field " + std::to_string(i + 1) + " does not match frame size");
		}
		profile.energies.push_back(flow_energy(flows[i]));
	}
	profile.energies.push_back(profile.energies.empty() ? 0.0 : profile.energies.back());
	return profile;
}

inline EnergyProfile energy_profile(FrameSequence const& seq, FlowParams const& params = {},
									std::optional<std::span<FlowField const>> external = std::nullopt) {
	if (external) { return energy_profile(seq, *external); }
	auto const flows = sequence_flows(seq, params);
	return energy_profile(seq, std::span<FlowField const>(flows));
}

} // namespace flowpool
