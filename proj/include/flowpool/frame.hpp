#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"

namespace flowpool {

/// Vectorization order used everywhere: row-major pixels, channel-interleaved RGB.
/// Entry (x, y, c) lives at index (y * width + x) * 3 + c.
inline constexpr std::size_t channels = 3;

constexpr std::size_t pixel_index(std::size_t width, std::size_t x, std::size_t y, std::size_t c) noexcept {
	return (y * width + x) * channels + c;
}

/// 8-bit RGB raster.
class Frame {
  public:
	Frame() = default;

	Frame(std::size_t width, std::size_t height, std::vector<std::uint8_t> data)
		: m_width(width), m_height(height), m_data(std::move(data)) {
		if (width == 0 || height == 0) { throw Error(ErrorCode::InvalidArgument, "frame must be at least 1x1"); }
		if (m_data.size() != width * height * channels) {
			throw Error(ErrorCode::LengthMismatch, "frame data has " + std::to_string(m_data.size()) + " bytes, expected " +
													   std::to_string(width * height * channels));
		}
	}

	Frame(std::size_t width, std::size_t height, std::uint8_t fill = 0)
		: Frame(width, height, std::vector<std::uint8_t>(width * height * channels, fill)) {}

	std::size_t width() const noexcept { return m_width; }
	std::size_t height() const noexcept { return m_height; }
	std::size_t size() const noexcept { return m_data.size(); }

	std::span<std::uint8_t const> data() const noexcept { return m_data; }
	std::span<std::uint8_t> data() noexcept { return m_data; }

	std::uint8_t& at(std::size_t x, std::size_t y, std::size_t c) noexcept { return m_data[pixel_index(m_width, x, y, c)]; }
	std::uint8_t at(std::size_t x, std::size_t y, std::size_t c) const noexcept { return m_data[pixel_index(m_width, x, y, c)]; }

	bool same_shape(Frame const& other) const noexcept { return m_width == other.m_width && m_height == other.m_height; }

	bool operator==(Frame const&) const = default;

  private:
	std::size_t m_width{};
	std::size_t m_height{};
	std::vector<std::uint8_t> m_data;
};

/// Output of any pooling method; same raster layout as Frame.
class SummaryImage : public Frame {
  public:
	using Frame::Frame;
};

/// Temporally ordered, non-empty list of equally sized frames.
class FrameSequence {
  public:
	explicit FrameSequence(std::vector<Frame> frames) : m_frames(std::move(frames)) {
		if (m_frames.empty()) { throw Error(ErrorCode::InvalidArgument, "frame sequence must not be empty"); }
		for (std::size_t i = 1; i < m_frames.size(); ++i) {
			if (!m_frames[i].same_shape(m_frames[0])) {
				throw Error(ErrorCode::DimensionMismatch, "frame " + std::to_string(i) + " is " + std::to_string(m_frames[i].width()) + "x" +
															  std::to_string(m_frames[i].height()) + ", expected " +
															  std::to_string(m_frames[0].width()) + "x" + std::to_string(m_frames[0].height()));
			}
		}
	}

	std::size_t size() const noexcept { return m_frames.size(); }
	std::size_t width() const noexcept { return m_frames.front().width(); }
	std::size_t height() const noexcept { return m_frames.front().height(); }
	/// Length of one vectorized frame.
	std::size_t dimension() const noexcept { return m_frames.front().size(); }

	Frame const& operator[](std::size_t i) const noexcept { return m_frames[i]; }
	auto begin() const noexcept { return m_frames.begin(); }
	auto end() const noexcept { return m_frames.end(); }

  private:
	std::vector<Frame> m_frames;
};

/// Real-valued per-pixel mean of a sequence, same layout as Frame.
struct MeanFrame {
	std::size_t width{};
	std::size_t height{};
	std::vector<double> data;
};

/// Rows are vec(F_i - mean); they sum to zero.
class CenteredFrameMatrix {
  public:
	CenteredFrameMatrix(std::size_t width, std::size_t height, Matrix rows) : m_width(width), m_height(height), m_rows(std::move(rows)) {}

	std::size_t width() const noexcept { return m_width; }
	std::size_t height() const noexcept { return m_height; }
	std::size_t rows() const noexcept { return m_rows.rows(); }
	std::size_t cols() const noexcept { return m_rows.cols(); }
	std::span<double const> row(std::size_t i) const noexcept { return m_rows.row(i); }
	Matrix const& matrix() const noexcept { return m_rows; }

  private:
	std::size_t m_width{};
	std::size_t m_height{};
	Matrix m_rows;
};

static_assert(RowMatrix<CenteredFrameMatrix>);

inline MeanFrame compute_mean_frame(FrameSequence const& seq) {
	MeanFrame mean{seq.width(), seq.height(), std::vector<double>(seq.dimension(), 0.0)};
	for (Frame const& frame : seq) {
		auto const px = frame.data();
		for (std::size_t k = 0; k < px.size(); ++k) { mean.data[k] += px[k]; }
	}
	double const n = static_cast<double>(seq.size());
	for (double& v : mean.data) { v /= n; }
	return mean;
}

inline CenteredFrameMatrix center_frames(FrameSequence const& seq, MeanFrame const& mean) {
	if (mean.width != seq.width() || mean.height != seq.height() || mean.data.size() != seq.dimension()) {
		throw Error(ErrorCode::DimensionMismatch, "mean frame does not match sequence dimensions");
	}
	Matrix rows(seq.size(), seq.dimension());
	for (std::size_t i = 0; i < seq.size(); ++i) {
		auto const px = seq[i].data();
		auto out = rows.row(i);
		for (std::size_t k = 0; k < px.size(); ++k) { out[k] = static_cast<double>(px[k]) - mean.data[k]; }
	}
	return {seq.width(), seq.height(), std::move(rows)};
}

inline CenteredFrameMatrix center_frames(FrameSequence const& seq) { return center_frames(seq, compute_mean_frame(seq)); }

} // namespace flowpool
