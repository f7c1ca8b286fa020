#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <flowpool/flowpool.hpp>
#include <flowpool/oracle.hpp>

namespace flowpool::test {

inline Frame random_frame(std::mt19937_64& rng, std::size_t w, std::size_t h) {
	std::uniform_int_distribution<int> dist(0, 255);
	std::vector<std::uint8_t> px(w * h * channels);
	for (auto& v : px) { v = static_cast<std::uint8_t>(dist(rng)); }
	return Frame(w, h, std::move(px));
}

inline FrameSequence random_sequence(std::mt19937_64& rng, std::size_t n, std::size_t w, std::size_t h) {
	std::vector<Frame> frames;
	for (std::size_t i = 0; i < n; ++i) { frames.push_back(random_frame(rng, w, h)); }
	return FrameSequence(std::move(frames));
}

inline FrameSequence constant_sequence(std::size_t n, std::size_t w, std::size_t h, std::uint8_t value) {
	return FrameSequence(std::vector<Frame>(n, Frame(w, h, value)));
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double lo = -1.0, double hi = 1.0) {
	std::uniform_real_distribution<double> dist(lo, hi);
	Matrix m(rows, cols);
	for (double& v : m.data()) { v = dist(rng); }
	return m;
}

template <RowMatrix M>
oracle::Rows to_rows(M const& m) {
	oracle::Rows rows;
	for (std::size_t i = 0; i < m.rows(); ++i) {
		auto r = m.row(i);
		rows.emplace_back(r.begin(), r.end());
	}
	return rows;
}

inline double cosine(std::span<double const> a, std::span<double const> b) {
	double ab = 0.0, aa = 0.0, bb = 0.0;
	for (std::size_t k = 0; k < a.size(); ++k) {
		ab += a[k] * b[k];
		aa += a[k] * a[k];
		bb += b[k] * b[k];
	}
	return ab / std::sqrt(aa * bb);
}

/// 8-bit grayscale-as-RGB frame of a Gaussian blob centred at (cx, cy).
inline Frame gaussian_blob(std::size_t w, std::size_t h, double cx, double cy, double sigma = 8.0, double amplitude = 200.0, double base = 20.0) {
	Frame f(w, h);
	for (std::size_t y = 0; y < h; ++y) {
		for (std::size_t x = 0; x < w; ++x) {
			double const dx = static_cast<double>(x) - cx;
			double const dy = static_cast<double>(y) - cy;
			double const v = base + amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
			auto const b = static_cast<std::uint8_t>(std::lround(v));
			for (std::size_t c = 0; c < channels; ++c) { f.at(x, y, c) = b; }
		}
	}
	return f;
}

/// Real-valued luminance version, free of quantization.
inline GrayImage gaussian_blob_gray(std::size_t w, std::size_t h, double cx, double cy, double sigma = 8.0, double amplitude = 200.0, double base = 20.0) {
	GrayImage g{w, h, std::vector<double>(w * h)};
	for (std::size_t y = 0; y < h; ++y) {
		for (std::size_t x = 0; x < w; ++x) {
			double const dx = static_cast<double>(x) - cx;
			double const dy = static_cast<double>(y) - cy;
			g.at(x, y) = base + amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
		}
	}
	return g;
}

/// Deterministic pseudo-random texture in [40, 160] per pixel (gray).
inline Frame textured_background(std::size_t w, std::size_t h, std::uint64_t seed) {
	std::mt19937_64 rng(seed);
	std::uniform_int_distribution<int> dist(40, 160);
	Frame f(w, h);
	for (std::size_t y = 0; y < h; ++y) {
		for (std::size_t x = 0; x < w; ++x) {
			auto const v = static_cast<std::uint8_t>(dist(rng));
			for (std::size_t c = 0; c < channels; ++c) { f.at(x, y, c) = v; }
		}
	}
	return f;
}

/// Bright `side` x `side` square whose top-left corner is at each of `xs` (row `y0`),
/// pasted over a fixed background.
inline FrameSequence moving_square(Frame const& background, std::vector<std::size_t> const& xs, std::size_t y0, std::size_t side, std::uint8_t value = 250) {
	std::vector<Frame> frames;
	for (std::size_t x0 : xs) {
		Frame f = background;
		for (std::size_t y = y0; y < y0 + side && y < f.height(); ++y) {
			for (std::size_t x = x0; x < x0 + side && x < f.width(); ++x) {
				for (std::size_t c = 0; c < channels; ++c) { f.at(x, y, c) = value; }
			}
		}
		frames.push_back(std::move(f));
	}
	return FrameSequence(std::move(frames));
}

inline double mean_endpoint_error(FlowField const& f, double gu, double gv) {
	double sum = 0.0;
	for (std::size_t k = 0; k < f.size(); ++k) {
		double const du = f.u()[k] - gu;
		double const dv = f.v()[k] - gv;
		sum += std::sqrt(du * du + dv * dv);
	}
	return sum / static_cast<double>(f.size());
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
  public:
	explicit TempDir(std::string const& tag) {
		static std::mt19937_64 rng(std::random_device{}());
		m_path = std::filesystem::temp_directory_path() / ("flowpool-" + tag + "-" + std::to_string(rng()));
		std::filesystem::create_directories(m_path);
	}
	~TempDir() {
		std::error_code ec;
		std::filesystem::remove_all(m_path, ec);
	}
	TempDir(TempDir const&) = delete;
	TempDir& operator=(TempDir const&) = delete;

	std::filesystem::path const& path() const noexcept { return m_path; }
	std::filesystem::path operator/(std::string const& name) const { return m_path / name; }

  private:
	std::filesystem::path m_path;
};

inline void write_sequence(FrameSequence const& seq, std::filesystem::path const& dir) {
	std::filesystem::create_directories(dir);
	for (std::size_t i = 0; i < seq.size(); ++i) {
		char name[32];
		std::snprintf(name, sizeof name, "frame_%04zu.png", i + 1);
		write_png(seq[i], dir / name);
	}
}

} // namespace flowpool::test
