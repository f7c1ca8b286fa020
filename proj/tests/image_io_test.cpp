#include <gtest/gtest.h>

#include <fstream>

#include "test_util.hpp"

namespace flowpool {
namespace {

ErrorCode code_of(auto&& fn) {
	try {
		fn();
	} catch (Error const& e) { return e.code(); }
	ADD_FAILURE() << "no error thrown";
	return ErrorCode::InvalidArgument;
}

TEST(LoadFrameDir, OrdersByFilename) {
	test::TempDir dir("order");
	write_png(Frame(2, 2, std::uint8_t{2}), dir / "b.png");
	write_png(Frame(2, 2, std::uint8_t{1}), dir / "a.png");
	auto const seq = load_frame_dir(dir.path());
	ASSERT_EQ(seq.size(), 2u);
	EXPECT_EQ(seq[0].at(0, 0, 0), 1);
	EXPECT_EQ(seq[1].at(0, 0, 0), 2);
}

TEST(LoadFrameDir, ByteOrderNotNumericOrder) {
	test::TempDir dir("bytes");
	// Created out of order; "frame10" < "frame9" byte-wise, "Z" < "a".
	write_png(Frame(1, 1, std::uint8_t{9}), dir / "frame9.png");
	write_png(Frame(1, 1, std::uint8_t{10}), dir / "frame10.png");
	write_png(Frame(1, 1, std::uint8_t{1}), dir / "Zed.png");
	auto const seq = load_frame_dir(dir.path());
	ASSERT_EQ(seq.size(), 3u);
	EXPECT_EQ(seq[0].at(0, 0, 0), 1);
	EXPECT_EQ(seq[1].at(0, 0, 0), 10);
	EXPECT_EQ(seq[2].at(0, 0, 0), 9);
}

TEST(LoadFrameDir, EmptyDirectory) {
	test::TempDir dir("empty");
	std::ofstream(dir / "notes.txt") << "not a frame";
	EXPECT_EQ(code_of([&] { load_frame_dir(dir.path()); }), ErrorCode::EmptyDirectory);
}

TEST(LoadFrameDir, DimensionMismatch) {
	test::TempDir dir("dims");
	write_png(Frame(2, 2), dir / "a.png");
	write_png(Frame(4, 4), dir / "b.png");
	EXPECT_EQ(code_of([&] { load_frame_dir(dir.path()); }), ErrorCode::DimensionMismatch);
}

TEST(LoadFrameDir, CorruptFile) {
	test::TempDir dir("corrupt");
	std::ofstream(dir / "a.png", std::ios::binary) << "\x89PNG garbage";
	EXPECT_EQ(code_of([&] { load_frame_dir(dir.path()); }), ErrorCode::DecodeError);
	std::ofstream(dir / "a.png", std::ios::binary | std::ios::trunc) << "P6\n4 4\n255\nabc";
	EXPECT_EQ(code_of([&] { load_frame_dir(dir.path()); }), ErrorCode::DecodeError);
}

TEST(LoadFrameDir, PatternAndPpm) {
	test::TempDir dir("pattern");
	std::mt19937_64 rng(7);
	auto const f = test::random_frame(rng, 3, 2);
	write_ppm(f, dir / "img_001.ppm");
	write_png(Frame(3, 2), dir / "img_002.png");
	write_png(Frame(5, 5), dir / "other.png");
	auto const seq = load_frame_dir(dir.path(), std::string("img_*"));
	ASSERT_EQ(seq.size(), 2u);
	EXPECT_EQ(seq[0], f);
}

TEST(ReadPpm, CommentsAndLowMaxval) {
	test::TempDir dir("ppm");
	std::ofstream(dir / "a.ppm", std::ios::binary) << "P6\n# comment\n1 1\n15\n" << '\x00' << '\x0f' << '\x07';
	auto const f = read_ppm(dir / "a.ppm");
	EXPECT_EQ(f.at(0, 0, 0), 0);
	EXPECT_EQ(f.at(0, 0, 1), 255);
	EXPECT_EQ(f.at(0, 0, 2), 119);
}

TEST(Png, RoundTripIsExact) {
	test::TempDir dir("png");
	std::mt19937_64 rng(8);
	auto const f = test::random_frame(rng, 2, 2);
	write_summary_png(SummaryImage(2, 2, std::vector<std::uint8_t>(f.data().begin(), f.data().end())), dir / "x.png");
	EXPECT_EQ(read_png(dir / "x.png"), f);

	auto const big = test::random_frame(rng, 37, 19);
	write_png(big, dir / "big.png");
	EXPECT_EQ(read_png(dir / "big.png"), big);
}

TEST(Png, SinglePixel) {
	test::TempDir dir("px");
	SummaryImage img(1, 1, std::vector<std::uint8_t>{0, 128, 255});
	write_summary_png(img, dir / "p.png");
	auto const back = read_png(dir / "p.png");
	EXPECT_EQ(back.at(0, 0, 0), 0);
	EXPECT_EQ(back.at(0, 0, 1), 128);
	EXPECT_EQ(back.at(0, 0, 2), 255);
}

TEST(Png, UnwritablePath) {
	EXPECT_EQ(code_of([] { write_summary_png(SummaryImage(1, 1), "/nonexistent-dir/xyz/out.png"); }), ErrorCode::IoError);
}

} // namespace
} // namespace flowpool
