#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

namespace flowpool {
namespace {

Frame pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b) { return Frame(1, 1, std::vector<std::uint8_t>{r, g, b}); }

TEST(RgbToGray, Rec601Weights) {
	EXPECT_NEAR(rgb_to_gray(pixel(255, 255, 255)).data[0], 255.0, 1e-12);
	EXPECT_EQ(rgb_to_gray(pixel(0, 0, 0)).data[0], 0.0);
	EXPECT_NEAR(rgb_to_gray(pixel(100, 0, 0)).data[0], 29.9, 1e-12);
}

TEST(EstimateFlow, IdenticalFramesGiveZeroFlow) {
	std::mt19937_64 rng(21);
	auto const f = test::random_frame(rng, 23, 17);
	auto const flow = estimate_flow(f, f);
	for (std::size_t k = 0; k < flow.size(); ++k) {
		ASSERT_EQ(flow.u()[k], 0.0f);
		ASSERT_EQ(flow.v()[k], 0.0f);
	}
}

TEST(EstimateFlow, UniformFramesGiveZeroFlow) {
	GrayImage a{16, 16, std::vector<double>(256, 30.0)};
	GrayImage b{16, 16, std::vector<double>(256, 200.0)};
	auto const flow = estimate_flow(a, b);
	EXPECT_EQ(flow_energy(flow), 0.0);
}

TEST(EstimateFlow, RecoversBlobTranslation) {
	auto const prev = test::gaussian_blob_gray(64, 64, 31.5, 31.5);
	auto const next = test::gaussian_blob_gray(64, 64, 32.5, 31.5);
	auto const flow = estimate_flow(prev, next);
	EXPECT_LT(test::mean_endpoint_error(flow, 1.0, 0.0), 0.5);
}

TEST(EstimateFlow, RecoversQuantizedBlobTranslation) {
	auto const prev = test::gaussian_blob(64, 64, 31.5, 31.5);
	auto const next = test::gaussian_blob(64, 64, 32.5, 31.5);
	EXPECT_LT(test::mean_endpoint_error(estimate_flow(prev, next), 1.0, 0.0), 0.5);
}

TEST(EstimateFlow, SwappingInputsNegatesFlow) {
	auto const a = test::gaussian_blob_gray(64, 64, 31.5, 31.5);
	auto const b = test::gaussian_blob_gray(64, 64, 32.5, 31.5);
	auto const fwd = estimate_flow(a, b);
	auto const bwd = estimate_flow(b, a);
	double sum = 0.0;
	for (std::size_t k = 0; k < fwd.size(); ++k) { sum += std::hypot(fwd.u()[k] + bwd.u()[k], fwd.v()[k] + bwd.v()[k]); }
	EXPECT_LT(sum / static_cast<double>(fwd.size()), 0.5);
}

TEST(EstimateFlow, Deterministic) {
	std::mt19937_64 rng(22);
	auto const a = test::random_frame(rng, 20, 20);
	auto const b = test::random_frame(rng, 20, 20);
	EXPECT_EQ(estimate_flow(a, b), estimate_flow(a, b));
}

TEST(EstimateFlow, Preconditions) {
	GrayImage const tiny{1, 4, std::vector<double>(4)};
	GrayImage const a{4, 4, std::vector<double>(16)};
	GrayImage const b{5, 4, std::vector<double>(20)};
	try {
		estimate_flow(tiny, tiny);
		FAIL();
	} catch (Error const& e) { EXPECT_EQ(e.code(), ErrorCode::TooSmall); }
	try {
		estimate_flow(a, b);
		FAIL();
	} catch (Error const& e) { EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch); }
	EXPECT_THROW(estimate_flow(a, a, FlowParams{0.0, 10, 1}), Error);
	EXPECT_THROW(estimate_flow(a, a, FlowParams{1.0, 0, 1}), Error);
	EXPECT_THROW(estimate_flow(a, a, FlowParams{1.0, 10, 0}), Error);
	// 2x2 is the smallest accepted size; extra levels are dropped.
	EXPECT_NO_THROW(estimate_flow(GrayImage{2, 2, {0, 1, 2, 3}}, GrayImage{2, 2, {1, 2, 3, 4}}, FlowParams{15.0, 5, 4}));
}

TEST(FlowEnergy, Examples) {
	EXPECT_EQ(flow_energy(FlowField(5, 3)), 0.0);
	EXPECT_EQ(flow_energy(FlowField(2, 2, {1, 1, 1, 1}, {0, 0, 0, 0})), 4.0);
	EXPECT_EQ(flow_energy(FlowField(1, 1, {3}, {4})), 25.0);
}

TEST(FlowEnergy, MatchesPerPixelOracleAndIsHomogeneous) {
	std::mt19937_64 rng(23);
	std::uniform_real_distribution<float> dist(-20.0f, 20.0f);
	for (int trial = 0; trial < 20; ++trial) {
		std::size_t const w = 1 + rng() % 128, h = 1 + rng() % 128;
		FlowField f(w, h);
		for (std::size_t y = 0; y < h; ++y) {
			for (std::size_t x = 0; x < w; ++x) {
				f.u(x, y) = dist(rng);
				f.v(x, y) = dist(rng);
			}
		}
		double naive = 0.0;
		for (std::size_t y = 0; y < h; ++y) {
			for (std::size_t x = 0; x < w; ++x) {
				double const n = std::hypot(static_cast<double>(f.u(x, y)), static_cast<double>(f.v(x, y)));
				naive += n * n;
			}
		}
		double const e = flow_energy(f);
		EXPECT_NEAR(e, naive, 1e-9 * naive);

		float const alpha = 0.5f; // exact in float, so the scaled field is exact too
		FlowField scaled(w, h);
		for (std::size_t y = 0; y < h; ++y) {
			for (std::size_t x = 0; x < w; ++x) {
				scaled.u(x, y) = alpha * f.u(x, y);
				scaled.v(x, y) = alpha * f.v(x, y);
			}
		}
		EXPECT_NEAR(flow_energy(scaled), 0.25 * e, 1e-9 * e);
	}
}

TEST(EnergyProfile, IdenticalFramesAreZero) {
	auto const seq = test::constant_sequence(3, 8, 8, 77);
	auto const p = energy_profile(seq);
	EXPECT_EQ(p.energies, (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(EnergyProfile, SingleFrame) {
	auto const p = energy_profile(test::constant_sequence(1, 4, 4, 1));
	EXPECT_EQ(p.energies, std::vector<double>{0.0});
}

TEST(EnergyProfile, MatchesPairwiseEnergiesAndDuplicatesLast) {
	auto const seq = test::moving_square(test::textured_background(32, 32, 5), {4, 6, 9, 10, 14}, 10, 8);
	FlowParams const params{15.0, 30, 2};
	auto const p = energy_profile(seq, params);
	ASSERT_EQ(p.size(), 5u);
	for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
		double const e = flow_energy(estimate_flow(rgb_to_gray(seq[i]), rgb_to_gray(seq[i + 1]), params));
		EXPECT_NEAR(p[i], e, 1e-9 * std::max(1.0, e));
		EXPECT_GT(p[i], 0.0);
	}
	EXPECT_EQ(p[4], p[3]);
}

TEST(EnergyProfile, ExternalFlows) {
	auto const seq = test::constant_sequence(3, 2, 2, 0);
	std::vector<FlowField> flows{FlowField(2, 2, {1, 1, 1, 1}, {0, 0, 0, 0}), FlowField(1, 1, {3}, {4})};
	EXPECT_THROW(energy_profile(seq, std::span<FlowField const>(flows)), Error);
	flows[1] = FlowField(2, 2, {3, 0, 0, 0}, {4, 0, 0, 0});
	auto const p = energy_profile(seq, FlowParams{}, std::span<FlowField const>(flows));
	EXPECT_EQ(p.energies, (std::vector<double>{4.0, 25.0, 25.0}));
	flows.pop_back();
	try {
		energy_profile(seq, std::span<FlowField const>(flows));
		FAIL();
	} catch (Error const& e) { EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch); }
}

} // namespace
} // namespace flowpool
