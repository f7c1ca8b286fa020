#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <flowpool/flowpool.hpp>

#include "flow_cache.hpp"
#include "job.hpp"

namespace flowpool::cli {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_usage = 2 };

/// Explicit flag first, then $FLOWPOOL_CACHE, else no caching.
inline std::optional<FlowCache> open_cache(std::optional<std::filesystem::path> const& flag) {
	if (flag && !flag->empty()) { return FlowCache(*flag); }
	if (char const* env = std::getenv("FLOWPOOL_CACHE"); env && *env) { return FlowCache(env); }
	return std::nullopt;
}

/// flow_000001.flo holds the flow from frame 1 to frame 2.
inline std::string flow_file_name(std::size_t index) {
	char buf[32];
	std::snprintf(buf, sizeof buf, "flow_%06zu.flo", index);
	return buf;
}

inline std::vector<FlowField> read_flow_dir(std::filesystem::path const& dir, std::size_t frame_count) {
	std::vector<FlowField> flows;
	for (std::size_t i = 1; i < frame_count; ++i) {
		auto const path = dir / flow_file_name(i);
		std::error_code ec;
		if (!std::filesystem::is_regular_file(path, ec)) {
			throw Error(ErrorCode::IoError, "missing flow file " + flow_file_name(i) + " in " + dir.string() + " (need " + std::to_string(frame_count - 1) + " files)");
		}
		flows.push_back(read_flo(path));
	}
	return flows;
}

/// Shortest decimal that reads back to the same double.
inline std::string format_shortest(double value) {
	char buf[64];
	auto const [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
	return std::string(buf, ptr);
}

inline std::vector<FlowField> sequence_flows_for(FrameSequence const& seq, FlowParams const& params, std::optional<std::filesystem::path> const& flow_dir,
												 FlowCache const* cache, FlowStats& stats) {
	if (flow_dir) { return read_flow_dir(*flow_dir, seq.size()); }
	return cached_sequence_flows(seq, params, cache, stats);
}

inline void run_flow(std::filesystem::path const& input, std::optional<std::string> const& pattern, FlowParams const& params, std::filesystem::path const& out_dir,
					 FlowCache const* cache, std::ostream& err) {
	auto const seq = load_frame_dir(input, pattern);
	std::filesystem::create_directories(out_dir);
	if (seq.size() < 2) { err << "warning: " << input.string() << " holds a single frame; no flow written\n"; }
	FlowStats stats;
	auto const flows = cached_sequence_flows(seq, params, cache, stats);
	for (std::size_t i = 0; i < flows.size(); ++i) { write_flo(flows[i], out_dir / flow_file_name(i + 1)); }
	err << "flow: computed=" << stats.computed << " cached=" << stats.cached << '\n';
}

inline void write_energy_csv(EnergyProfile const& profile, std::ostream& out) {
	out << "frame,energy\n";
	for (std::size_t i = 0; i < profile.size(); ++i) { out << (i + 1) << ',' << format_shortest(profile[i]) << '\n'; }
}

inline EnergyProfile run_energy(std::filesystem::path const& input, std::optional<std::string> const& pattern, FlowParams const& params,
								std::optional<std::filesystem::path> const& flow_dir, FlowCache const* cache) {
	auto const seq = load_frame_dir(input, pattern);
	FlowStats stats;
	auto const flows = sequence_flows_for(seq, params, flow_dir, cache, stats);
	return energy_profile(seq, std::span<FlowField const>(flows));
}

struct PoolResult {
	std::filesystem::path output;
	std::optional<double> max_residual;
};

inline SummaryImage pool_sequence(JobSpec const& job, FrameSequence const& seq, FlowCache const* cache, std::optional<double>& residual) {
	switch (job.method) {
	case Method::dynamic: return dynamic_image(seq);
	case Method::eigen: return eigen_image(seq);
	case Method::mean: return mean_image(seq);
	case Method::max: return max_image(seq);
	case Method::fpi:
	case Method::fpi_exact: break;
	}
	std::optional<RankRConfig> rank;
	if (job.rank_r) { rank = RankRConfig{*job.rank_r, job.high.value_or(1.0), job.low.value_or(0.0)}; }
	// Reject a bad rank before spending time on flow.
	if (rank && (rank->r < 1 || static_cast<std::size_t>(rank->r) > seq.size())) {
		throw Error(ErrorCode::InvalidRank, "r must lie in [1, " + std::to_string(seq.size()) + "], got " + std::to_string(rank->r));
	}
	FlowStats stats;
	auto const flows = sequence_flows_for(seq, job.flow, job.flow_dir, cache, stats);
	auto const profile = energy_profile(seq, std::span<FlowField const>(flows));
	if (job.method == Method::fpi) { return flow_profile_image(seq, profile, rank); }
	auto exact = flow_profile_image_exact(seq, profile, rank, job.lambda);
	residual = exact.solution.max_abs_residual();
	return std::move(exact.image);
}

inline PoolResult run_job(JobSpec const& job, FlowCache const* cache) {
	job.validate();
	auto const seq = load_frame_dir(job.input_dir, job.pattern);
	PoolResult result{job.output, std::nullopt};
	auto const img = pool_sequence(job, seq, cache, result.max_residual);
	if (job.output.has_parent_path()) { std::filesystem::create_directories(job.output.parent_path()); }
	write_summary_png(img, job.output);
	return result;
}

inline void print_result(PoolResult const& r, std::ostream& out) {
	out << r.output.string();
	if (r.max_residual) { out << " max_residual=" << format_shortest(*r.max_residual); }
	out << '\n';
}

/// Runs every manifest job on up to `jobs` workers. Results print in manifest order.
inline int run_batch(std::filesystem::path const& manifest, unsigned jobs, FlowCache const* cache, std::ostream& out, std::ostream& err) {
	std::ifstream in(manifest);
	if (!in) {
		err << "error: cannot read manifest " << manifest.string() << '\n';
		return exit_usage;
	}
	struct Entry {
		std::size_t line_no{};
		std::string text;
		std::optional<PoolResult> result;
		std::string error;
	};
	std::vector<Entry> entries;
	std::string line;
	for (std::size_t no = 1; std::getline(in, line); ++no) {
		auto const first = line.find_first_not_of(" \t\r");
		if (first == std::string::npos || line[first] == '#') { continue; }
		entries.push_back({no, line, std::nullopt, {}});
	}
	if (in.bad()) {
		err << "error: failed reading manifest " << manifest.string() << '\n';
		return exit_usage;
	}

	auto const base = manifest.parent_path();
	std::atomic<std::size_t> next{0};
	auto worker = [&] {
		for (std::size_t i = next++; i < entries.size(); i = next++) {
			auto& e = entries[i];
			try {
				auto job = parse_manifest_line(e.text, base);
				if (job) { e.result = run_job(*job, cache); }
			} catch (std::exception const& ex) { e.error = ex.what(); }
		}
	};
	unsigned const workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(entries.size(), 1))));
	{
		std::vector<std::jthread> pool;
		for (unsigned w = 1; w < workers; ++w) { pool.emplace_back(worker); }
		worker();
	}

	std::size_t ok = 0;
	std::size_t failed = 0;
	for (auto const& e : entries) {
		if (e.result) {
			print_result(*e.result, out);
			++ok;
		} else if (!e.error.empty()) {
			err << "error: " << manifest.filename().string() << ':' << e.line_no << ": " << e.error << '\n';
			++failed;
		}
	}
	out << "ok=" << ok << " failed=" << failed << '\n';
	return failed == 0 ? exit_ok : exit_failure;
}

} // namespace flowpool::cli
