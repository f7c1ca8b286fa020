#pragma once

// Content-addressed cache of flow fields. The key is SHA-256 over both frames' pixels,
// their size and the flow parameters; entries are .flo files renamed into place.

#include <atomic>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unistd.h>
#include <vector>

#include <openssl/evp.h>

#include <flowpool/flo.hpp>
#include <flowpool/frame.hpp>
#include <flowpool/optical_flow.hpp>

namespace flowpool::cli {

inline std::string flow_cache_key(Frame const& prev, Frame const& next, FlowParams const& params) {
	std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
	if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) { throw Error(ErrorCode::IoError, "sha256 unavailable"); }
	auto feed_u64 = [&](std::uint64_t v) {
		std::uint8_t buf[8];
		for (int i = 0; i < 8; ++i) { buf[i] = static_cast<std::uint8_t>(v >> (8 * i)); }
		EVP_DigestUpdate(ctx.get(), buf, sizeof buf);
	};
	static constexpr char tag[] = "flowpool-hs-v1";
	EVP_DigestUpdate(ctx.get(), tag, sizeof tag - 1);
	feed_u64(prev.width());
	feed_u64(prev.height());
	feed_u64(std::bit_cast<std::uint64_t>(params.smoothness));
	feed_u64(static_cast<std::uint64_t>(params.iterations));
	feed_u64(static_cast<std::uint64_t>(params.levels));
	EVP_DigestUpdate(ctx.get(), prev.data().data(), prev.size());
	EVP_DigestUpdate(ctx.get(), next.data().data(), next.size());
	unsigned char digest[EVP_MAX_MD_SIZE];
	unsigned int len = 0;
	EVP_DigestFinal_ex(ctx.get(), digest, &len);
	static constexpr char hex[] = "0123456789abcdef";
	std::string out;
	for (unsigned int i = 0; i < len; ++i) {
		out += hex[digest[i] >> 4];
		out += hex[digest[i] & 0xf];
	}
	return out;
}

class FlowCache {
  public:
	explicit FlowCache(std::filesystem::path dir) : m_dir(std::move(dir)) { std::filesystem::create_directories(m_dir); }

	std::filesystem::path const& dir() const noexcept { return m_dir; }

	std::optional<FlowField> load(std::string const& key) const {
		auto const path = entry(key);
		std::error_code ec;
		if (!std::filesystem::is_regular_file(path, ec)) { return std::nullopt; }
		try {
			return read_flo(path);
		} catch (Error const&) {
			// Unreadable entry: recompute and overwrite.
			return std::nullopt;
		}
	}

	void store(std::string const& key, FlowField const& field) const {
		static std::atomic<unsigned> counter{0};
		auto const tmp = m_dir / (key + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++));
		write_flo(field, tmp);
		std::error_code ec;
		std::filesystem::rename(tmp, entry(key), ec);
		if (ec) {
			std::filesystem::remove(tmp, ec);
			throw Error(ErrorCode::IoError, "cannot publish cache entry " + key);
		}
	}

  private:
	std::filesystem::path entry(std::string const& key) const { return m_dir / (key + ".flo"); }

	std::filesystem::path m_dir;
};

struct FlowStats {
	std::size_t computed = 0;
	std::size_t cached = 0;
};

/// Consecutive-pair flows, served from the cache when one is given.
inline std::vector<FlowField> cached_sequence_flows(FrameSequence const& seq, FlowParams const& params, FlowCache const* cache, FlowStats& stats) {
	params.validate();
	std::vector<FlowField> flows;
	for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
		std::string key;
		if (cache) {
			key = flow_cache_key(seq[i], seq[i + 1], params);
			if (auto hit = cache->load(key)) {
				flows.push_back(std::move(*hit));
				++stats.cached;
				continue;
			}
		}
		flows.push_back(estimate_flow(seq[i], seq[i + 1], params));
		++stats.computed;
		if (cache) { cache->store(key, flows.back()); }
	}
	return flows;
}

} // namespace flowpool::cli
