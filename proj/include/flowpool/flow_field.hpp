#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "error.hpp"

namespace flowpool {

/// Dense displacement field in pixels, row-major. Stored in single precision, the
/// precision of the .flo interchange format, so cached and in-memory fields agree.
class FlowField {
  public:
	FlowField() = default;

	FlowField(std::size_t width, std::size_t height) : m_width(width), m_height(height), m_u(width * height, 0.0f), m_v(width * height, 0.0f) {}

	FlowField(std::size_t width, std::size_t height, std::vector<float> u, std::vector<float> v)
		: m_width(width), m_height(height), m_u(std::move(u)), m_v(std::move(v)) {
		if (m_u.size() != width * height || m_v.size() != width * height) {
			throw Error(ErrorCode::LengthMismatch, "flow components must have width*height entries");
		}
		for (std::size_t k = 0; k < m_u.size(); ++k) {
			if (!std::isfinite(m_u[k]) || !std::isfinite(m_v[k])) {
				throw Error(ErrorCode::InvalidArgument, "non-finite flow value at index " + std::to_string(k));
			}
		}
	}

	std::size_t width() const noexcept { return m_width; }
	std::size_t height() const noexcept { return m_height; }
	std::size_t size() const noexcept { return m_u.size(); }

	std::vector<float> const& u() const noexcept { return m_u; }
	std::vector<float> const& v() const noexcept { return m_v; }

	float& u(std::size_t x, std::size_t y) noexcept { return m_u[y * m_width + x]; }
	float& v(std::size_t x, std::size_t y) noexcept { return m_v[y * m_width + x]; }
	float u(std::size_t x, std::size_t y) const noexcept { return m_u[y * m_width + x]; }
	float v(std::size_t x, std::size_t y) const noexcept { return m_v[y * m_width + x]; }

	bool operator==(FlowField const&) const = default;

  private:
	std::size_t m_width{};
	std::size_t m_height{};
	std::vector<float> m_u;
	std::vector<float> m_v;
};

} // namespace flowpool
