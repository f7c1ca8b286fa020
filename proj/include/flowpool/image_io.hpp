#pragma once

// PNG and binary PPM (P6) raster I/O, plus directory loading of frame sequences.
// PNG goes through the libpng simplified API, so consumers link libpng.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fnmatch.h>
#include <fstream>
#include <iterator>
#include <optional>
#include <png.h>
#include <string>
#include <vector>

#include "error.hpp"
#include "frame.hpp"

namespace flowpool {

namespace detail {

inline std::string lower_extension(std::filesystem::path const& path) {
	std::string ext = path.extension().string();
	std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
	return ext;
}

inline std::vector<std::uint8_t> read_bytes(std::filesystem::path const& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) { throw Error(ErrorCode::IoError, "cannot open " + path.string()); }
	return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace detail

inline Frame read_png(std::filesystem::path const& path) {
	auto const bytes = detail::read_bytes(path);
	png_image image{};
	image.version = PNG_IMAGE_VERSION;
	if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
		throw Error(ErrorCode::DecodeError, path.string() + ": " + image.message);
	}
	image.format = PNG_FORMAT_RGB;
	if (image.width == 0 || image.height == 0) {
		png_image_free(&image);
		throw Error(ErrorCode::DecodeError, path.string() + ": empty image");
	}
	std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
	if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
		std::string const msg = image.message;
		png_image_free(&image);
		throw Error(ErrorCode::DecodeError, path.string() + ": " + msg);
	}
	return Frame(image.width, image.height, std::move(pixels));
}

/// Writes an 8-bit RGB PNG without alpha.
inline void write_png(Frame const& frame, std::filesystem::path const& path) {
	png_image image{};
	image.version = PNG_IMAGE_VERSION;
	image.width = static_cast<png_uint_32>(frame.width());
	image.height = static_cast<png_uint_32>(frame.height());
	image.format = PNG_FORMAT_RGB;
	if (!png_image_write_to_file(&image, path.c_str(), 0, frame.data().data(), 0, nullptr)) {
		std::string const msg = image.message;
		png_image_free(&image);
		throw Error(ErrorCode::IoError, path.string() + ": " + msg);
	}
}

inline void write_summary_png(SummaryImage const& img, std::filesystem::path const& path) { write_png(img, path); }

/// Binary PPM (P6). Maxval below 255 is rescaled to the full 8-bit range; 16-bit files are rejected.
inline Frame read_ppm(std::filesystem::path const& path) {
	auto const bytes = detail::read_bytes(path);
	std::size_t pos = 0;
	auto fail = [&](std::string const& why) -> Error { return Error(ErrorCode::DecodeError, path.string() + ": " + why); };
	auto skip_space = [&] {
		while (pos < bytes.size()) {
			if (bytes[pos] == '#') {
				while (pos < bytes.size() && bytes[pos] != '\n') { ++pos; }
			} else if (std::isspace(bytes[pos])) {
				++pos;
			} else {
				break;
			}
		}
	};
	auto read_uint = [&]() -> std::size_t {
		skip_space();
		if (pos >= bytes.size() || !std::isdigit(bytes[pos])) { throw fail("malformed header"); }
		std::size_t value = 0;
		while (pos < bytes.size() && std::isdigit(bytes[pos])) {
			value = value * 10 + static_cast<std::size_t>(bytes[pos++] - '0');
			if (value > (1u << 24)) { throw fail("header value out of range"); }
		}
		return value;
	};

	if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') { throw fail("not a binary PPM (P6)"); }
	pos = 2;
	std::size_t const width = read_uint();
	std::size_t const height = read_uint();
	std::size_t const maxval = read_uint();
	if (width == 0 || height == 0) { throw fail("zero dimension"); }
	if (maxval == 0 || maxval > 255) { throw fail("unsupported maxval " + std::to_string(maxval)); }
	if (pos >= bytes.size() || !std::isspace(bytes[pos])) { throw fail("malformed header"); }
	++pos;
	std::size_t const count = width * height * channels;
	if (bytes.size() - pos < count) { throw fail("truncated pixel data"); }
	std::vector<std::uint8_t> pixels(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.begin() + static_cast<std::ptrdiff_t>(pos + count));
	if (maxval != 255) {
		for (auto& v : pixels) {
			if (v > maxval) { throw fail("sample exceeds maxval"); }
			v = static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
		}
	}
	return Frame(width, height, std::move(pixels));
}

inline void write_ppm(Frame const& frame, std::filesystem::path const& path) {
	std::ofstream out(path, std::ios::binary);
	if (!out) { throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing"); }
	out << "P6\n" << frame.width() << ' ' << frame.height() << "\n255\n";
	out.write(reinterpret_cast<char const*>(frame.data().data()), static_cast<std::streamsize>(frame.size()));
	if (!out) { throw Error(ErrorCode::IoError, "write failed: " + path.string()); }
}

inline bool is_frame_file(std::filesystem::path const& path) {
	auto const ext = detail::lower_extension(path);
	return ext == ".png" || ext == ".ppm";
}

/// Decodes by extension (.png or .ppm, case-insensitive).
inline Frame read_frame(std::filesystem::path const& path) {
	auto const ext = detail::lower_extension(path);
	if (ext == ".png") { return read_png(path); }
	if (ext == ".ppm") { return read_ppm(path); }
	throw Error(ErrorCode::DecodeError, path.string() + ": unsupported extension");
}

/// Frame files of a directory in byte-wise lexicographic filename order. Without a
/// pattern every .png/.ppm file matches; with one, the shell glob is applied to the
/// filename. Zero-pad numeric indices: "frame10" sorts before "frame9".
inline std::vector<std::filesystem::path> list_frame_files(std::filesystem::path const& dir, std::optional<std::string> const& pattern = {}) {
	std::error_code ec;
	if (!std::filesystem::is_directory(dir, ec)) { throw Error(ErrorCode::IoError, dir.string() + " is not a directory"); }
	std::vector<std::filesystem::path> files;
	for (auto const& entry : std::filesystem::directory_iterator(dir)) {
		if (!entry.is_regular_file()) { continue; }
		std::string const name = entry.path().filename().string();
		if (pattern) {
			if (fnmatch(pattern->c_str(), name.c_str(), FNM_PERIOD) != 0) { continue; }
		} else if (!is_frame_file(entry.path())) {
			continue;
		}
		files.push_back(entry.path());
	}
	// std::string comparison is memcmp-like, i.e. unsigned byte order.
	std::sort(files.begin(), files.end(), [](auto const& a, auto const& b) { return a.filename().string() < b.filename().string(); });
	return files;
}

inline FrameSequence load_frame_dir(std::filesystem::path const& dir, std::optional<std::string> const& pattern = {}) {
	auto const files = list_frame_files(dir, pattern);
	if (files.empty()) { throw Error(ErrorCode::EmptyDirectory, "no frame files in " + dir.string()); }
	std::vector<Frame> frames;
	frames.reserve(files.size());
	for (auto const& file : files) {
		frames.push_back(read_frame(file));
		if (!frames.back().same_shape(frames.front())) {
			throw Error(ErrorCode::DimensionMismatch, file.filename().string() + " is " + std::to_string(frames.back().width()) + "x" +
														  std::to_string(frames.back().height()) + ", expected " +
														  std::to_string(frames.front().width()) + "x" + std::to_string(frames.front().height()));
		}
	}
	return FrameSequence(std::move(frames));
}

} // namespace flowpool
