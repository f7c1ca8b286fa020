// flowpool: summary images from frame directories.
//
//   flowpool flow   <input_dir> -o <out_dir>
//   flowpool energy <input_dir> [-o energy.csv] [--flow-dir DIR]
//   flowpool pool   <input_dir> --method fpi|fpi-exact|dynamic|eigen|mean|max -o out.png
//   flowpool batch  <manifest> [--jobs N]
//
// Exit codes: 0 success, 1 job or runtime error, 2 usage or manifest error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

#include "cli/commands.hpp"

namespace {

using namespace flowpool;
using namespace flowpool::cli;

void add_flow_options(CLI::App& cmd, FlowParams& params) {
	cmd.add_option("--smoothness", params.smoothness, "Horn-Schunck smoothness weight")->check(CLI::PositiveNumber)->capture_default_str();
	cmd.add_option("--iterations", params.iterations, "iterations per pyramid level")->check(CLI::PositiveNumber)->capture_default_str();
	cmd.add_option("--levels", params.levels, "pyramid levels")->check(CLI::PositiveNumber)->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"Flow profile images and baseline video pooling"};
	app.require_subcommand(1);

	std::filesystem::path input;
	std::optional<std::string> pattern;
	std::optional<std::filesystem::path> cache_dir;
	FlowParams params;

	auto add_common = [&](CLI::App* cmd) {
		cmd->add_option("input", input, "directory of PNG/PPM frames")->required();
		cmd->add_option("--pattern", pattern, "filename glob selecting frames");
		cmd->add_option("--cache-dir", cache_dir, "flow cache directory (overrides $FLOWPOOL_CACHE)");
	};

	auto* flow_cmd = app.add_subcommand("flow", "write flow_%06d.flo for each consecutive frame pair");
	std::filesystem::path flow_out;
	add_common(flow_cmd);
	add_flow_options(*flow_cmd, params);
	flow_cmd->add_option("-o,--output", flow_out, "output directory")->required();

	auto* energy_cmd = app.add_subcommand("energy", "write the flow energy profile as CSV");
	std::optional<std::filesystem::path> energy_out;
	std::optional<std::filesystem::path> flow_dir;
	add_common(energy_cmd);
	add_flow_options(*energy_cmd, params);
	energy_cmd->add_option("-o,--output", energy_out, "CSV path (default: standard output)");
	energy_cmd->add_option("--flow-dir", flow_dir, "use precomputed flow_%06d.flo files");

	auto* pool_cmd = app.add_subcommand("pool", "compute one summary image");
	JobSpec job;
	std::string method = "fpi";
	add_common(pool_cmd);
	add_flow_options(*pool_cmd, job.flow);
	pool_cmd->add_option("-m,--method", method, "fpi, fpi-exact, dynamic, eigen, mean or max")
		->check(CLI::IsMember({"fpi", "fpi-exact", "dynamic", "eigen", "mean", "max"}))
		->capture_default_str();
	pool_cmd->add_option("-r,--r", job.rank_r, "flatten the r highest energies (fpi, fpi-exact)");
	pool_cmd->add_option("--high", job.high, "rank-r high weight (default 1)");
	pool_cmd->add_option("--low", job.low, "rank-r low weight (default 0)");
	pool_cmd->add_option("--lambda", job.lambda, "ridge weight for fpi-exact (default 1e-6 trace(G)/n)");
	pool_cmd->add_option("--flow-dir", job.flow_dir, "use precomputed flow_%06d.flo files");
	pool_cmd->add_option("-o,--output", job.output, "output PNG")->required();

	auto* batch_cmd = app.add_subcommand("batch", "run a manifest of pool jobs, one key=value line per job");
	std::filesystem::path manifest;
	unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
	batch_cmd->add_option("manifest", manifest, "manifest file")->required();
	batch_cmd->add_option("-j,--jobs", jobs, "concurrent jobs")->check(CLI::PositiveNumber)->capture_default_str();
	batch_cmd->add_option("--cache-dir", cache_dir, "flow cache directory (overrides $FLOWPOOL_CACHE)");

	try {
		app.parse(argc, argv);
	} catch (CLI::ParseError const& e) {
		int const code = app.exit(e);
		return code == 0 ? exit_ok : exit_usage;
	}

	try {
		auto cache = open_cache(cache_dir);
		FlowCache const* cache_ptr = cache ? &*cache : nullptr;

		if (*flow_cmd) {
			run_flow(input, pattern, params, flow_out, cache_ptr, std::cerr);
			return exit_ok;
		}
		if (*energy_cmd) {
			auto const profile = run_energy(input, pattern, params, flow_dir, cache_ptr);
			if (energy_out) {
				std::ofstream out(*energy_out);
				if (!out) { throw Error(ErrorCode::IoError, "cannot open " + energy_out->string()); }
				write_energy_csv(profile, out);
			} else {
				write_energy_csv(profile, std::cout);
			}
			return exit_ok;
		}
		if (*pool_cmd) {
			job.input_dir = input;
			job.pattern = pattern;
			job.method = *parse_method(method);
			try {
				job.validate();
			} catch (Error const& e) {
				std::cerr << "usage error: " << e.detail() << '\n' << pool_cmd->help();
				return exit_usage;
			}
			print_result(run_job(job, cache_ptr), std::cout);
			return exit_ok;
		}
		if (*batch_cmd) { return run_batch(manifest, jobs, cache_ptr, std::cout, std::cerr); }
	} catch (Error const& e) {
		std::cerr << "error: " << e.what() << '\n';
		if (e.code() == ErrorCode::InvalidRank) { std::cerr << "hint: --r must be between 1 and the number of frames\n"; }
		return exit_failure;
	} catch (std::exception const& e) {
		std::cerr << "error: " << e.what() << '\n';
		return exit_failure;
	}
	return exit_usage;
}
