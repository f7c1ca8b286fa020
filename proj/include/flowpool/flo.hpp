#pragma once

// Middlebury .flo files:
//   bytes 0..3   float32 magic 202021.25 ("PIEH")
//   bytes 4..7   int32 width
//   bytes 8..11  int32 height
//   then width*height interleaved (u, v) float32 pairs, row-major.
// Everything little-endian regardless of host byte order.

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <span>
#include <vector>

#include "error.hpp"
#include "flow_field.hpp"

namespace flowpool {

inline constexpr float flo_magic = 202021.25f;

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t value) {
	for (int shift = 0; shift < 32; shift += 8) { out.push_back(static_cast<std::uint8_t>(value >> shift)); }
}

inline std::uint32_t get_u32(std::uint8_t const* p) {
	return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

} // namespace detail

inline std::vector<std::uint8_t> encode_flo(FlowField const& field) {
	if (field.width() > std::numeric_limits<std::int32_t>::max() || field.height() > std::numeric_limits<std::int32_t>::max()) {
		throw Error(ErrorCode::InvalidArgument, "flow field too large for .flo");
	}
	std::vector<std::uint8_t> out;
	out.reserve(12 + 8 * field.size());
	detail::put_u32(out, std::bit_cast<std::uint32_t>(flo_magic));
	detail::put_u32(out, static_cast<std::uint32_t>(field.width()));
	detail::put_u32(out, static_cast<std::uint32_t>(field.height()));
	for (std::size_t k = 0; k < field.size(); ++k) {
		detail::put_u32(out, std::bit_cast<std::uint32_t>(field.u()[k]));
		detail::put_u32(out, std::bit_cast<std::uint32_t>(field.v()[k]));
	}
	return out;
}

inline FlowField decode_flo(std::span<std::uint8_t const> bytes) {
	if (bytes.size() < 4) { throw Error(ErrorCode::TruncatedFile, "missing .flo magic"); }
	if (detail::get_u32(bytes.data()) != std::bit_cast<std::uint32_t>(flo_magic)) {
		throw Error(ErrorCode::BadMagic, "magic is " + std::to_string(std::bit_cast<float>(detail::get_u32(bytes.data()))));
	}
	if (bytes.size() < 12) { throw Error(ErrorCode::TruncatedFile, "missing .flo dimensions"); }
	auto const width = static_cast<std::int32_t>(detail::get_u32(bytes.data() + 4));
	auto const height = static_cast<std::int32_t>(detail::get_u32(bytes.data() + 8));
	if (width <= 0 || height <= 0) { throw Error(ErrorCode::DecodeError, "invalid .flo dimensions"); }
	std::size_t const count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
	if ((bytes.size() - 12) / 8 < count) {
		throw Error(ErrorCode::TruncatedFile, "expected " + std::to_string(12 + 8 * count) + " bytes, got " + std::to_string(bytes.size()));
	}
	std::vector<float> u(count);
	std::vector<float> v(count);
	auto const* p = bytes.data() + 12;
	for (std::size_t k = 0; k < count; ++k, p += 8) {
		u[k] = std::bit_cast<float>(detail::get_u32(p));
		v[k] = std::bit_cast<float>(detail::get_u32(p + 4));
	}
	try {
		return FlowField(static_cast<std::size_t>(width), static_cast<std::size_t>(height), std::move(u), std::move(v));
	} catch (Error const& e) { throw Error(ErrorCode::DecodeError, e.detail()); }
}

inline void write_flo(FlowField const& field, std::filesystem::path const& path) {
	auto const bytes = encode_flo(field);
	std::ofstream out(path, std::ios::binary);
	if (!out) { throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing"); }
	out.write(reinterpret_cast<char const*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
	if (!out) { throw Error(ErrorCode::IoError, "write failed: " + path.string()); }
}

inline FlowField read_flo(std::filesystem::path const& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) { throw Error(ErrorCode::IoError, "cannot open " + path.string()); }
	std::vector<std::uint8_t> const bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
	try {
		return decode_flo(bytes);
	} catch (Error const& e) { throw Error(e.code(), path.string() + ": " + e.detail()); }
}

} // namespace flowpool
