#pragma once

#include <charconv>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <flowpool/error.hpp>
#include <flowpool/optical_flow.hpp>

namespace flowpool::cli {

enum class Method { fpi, fpi_exact, dynamic, eigen, mean, max };

inline std::optional<Method> parse_method(std::string_view name) {
	if (name == "fpi") { return Method::fpi; }
	if (name == "fpi-exact") { return Method::fpi_exact; }
	if (name == "dynamic") { return Method::dynamic; }
	if (name == "eigen") { return Method::eigen; }
	if (name == "mean") { return Method::mean; }
	if (name == "max") { return Method::max; }
	return std::nullopt;
}

constexpr std::string_view method_name(Method m) noexcept {
	switch (m) {
	case Method::fpi: return "fpi";
	case Method::fpi_exact: return "fpi-exact";
	case Method::dynamic: return "dynamic";
	case Method::eigen: return "eigen";
	case Method::mean: return "mean";
	case Method::max: return "max";
	}
	return "?";
}

constexpr bool uses_flow(Method m) noexcept { return m == Method::fpi || m == Method::fpi_exact; }

struct JobSpec {
	std::filesystem::path input_dir;
	Method method = Method::fpi;
	std::optional<int> rank_r;
	std::optional<double> high;
	std::optional<double> low;
	std::optional<double> lambda;
	FlowParams flow;
	std::optional<std::filesystem::path> flow_dir;
	std::optional<std::string> pattern;
	std::filesystem::path output;

	/// Cross-field rules that a per-option parser cannot express.
	void validate() const {
		if (input_dir.empty()) { throw Error(ErrorCode::InvalidArgument, "missing input directory"); }
		if (output.empty()) { throw Error(ErrorCode::InvalidArgument, "missing output path"); }
		if (!uses_flow(method)) {
			if (rank_r || high || low) { throw Error(ErrorCode::InvalidArgument, "r/high/low apply only to fpi and fpi-exact"); }
			if (flow_dir) { throw Error(ErrorCode::InvalidArgument, "flow_dir applies only to fpi and fpi-exact"); }
		}
		if ((high || low) && !rank_r) { throw Error(ErrorCode::InvalidArgument, "high/low require r"); }
		if (lambda && method != Method::fpi_exact) { throw Error(ErrorCode::InvalidArgument, "lambda applies only to fpi-exact"); }
		flow.validate();
	}
};

namespace detail {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
	T value{};
	auto const* end = text.data() + text.size();
	auto const [ptr, ec] = std::from_chars(text.data(), end, value);
	if (ec != std::errc{} || ptr != end) { throw Error(ErrorCode::InvalidArgument, "bad value for " + std::string(key) + ": '" + std::string(text) + "'"); }
	return value;
}

} // namespace detail

/// Parses one manifest line of space-separated key=value pairs. Returns nullopt for
/// blank lines and `#` comments. Relative paths resolve against `base`.
///
/// Keys: input, method, output, r, high, low, lambda, smoothness, iterations, levels,
/// flow_dir, pattern.
inline std::optional<JobSpec> parse_manifest_line(std::string_view line, std::filesystem::path const& base = {}) {
	if (auto const hash = line.find('#'); hash != std::string_view::npos) { line = line.substr(0, hash); }
	std::istringstream in{std::string(line)};
	std::string token;
	JobSpec job;
	bool any = false;
	bool have_method = false;
	auto resolve = [&](std::string_view p) { return base.empty() ? std::filesystem::path(p) : base / std::filesystem::path(p); };
	while (in >> token) {
		any = true;
		auto const eq = token.find('=');
		if (eq == std::string::npos || eq == 0) { throw Error(ErrorCode::InvalidArgument, "expected key=value, got '" + token + "'"); }
		std::string_view const key = std::string_view(token).substr(0, eq);
		std::string_view const value = std::string_view(token).substr(eq + 1);
		if (key == "input") {
			job.input_dir = resolve(value);
		} else if (key == "output") {
			job.output = resolve(value);
		} else if (key == "method") {
			auto m = parse_method(value);
			if (!m) { throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(value) + "'"); }
			job.method = *m;
			have_method = true;
		} else if (key == "r") {
			job.rank_r = detail::parse_number<int>(key, value);
		} else if (key == "high") {
			job.high = detail::parse_number<double>(key, value);
		} else if (key == "low") {
			job.low = detail::parse_number<double>(key, value);
		} else if (key == "lambda") {
			job.lambda = detail::parse_number<double>(key, value);
		} else if (key == "smoothness") {
			job.flow.smoothness = detail::parse_number<double>(key, value);
		} else if (key == "iterations") {
			job.flow.iterations = detail::parse_number<int>(key, value);
		} else if (key == "levels") {
			job.flow.levels = detail::parse_number<int>(key, value);
		} else if (key == "flow_dir") {
			job.flow_dir = resolve(value);
		} else if (key == "pattern") {
			job.pattern = std::string(value);
		} else {
			throw Error(ErrorCode::InvalidArgument, "unknown key '" + std::string(key) + "'");
		}
	}
	if (!any) { return std::nullopt; }
	if (!have_method) { throw Error(ErrorCode::InvalidArgument, "missing method"); }
	job.validate();
	return job;
}

} // namespace flowpool::cli
