#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flowpool {

enum class ErrorCode {
	EmptyDirectory,
	DimensionMismatch,
	DecodeError,
	IoError,
	BadMagic,
	TruncatedFile,
	TooSmall,
	TooShort,
	InvalidRank,
	InvalidArgument,
	LengthMismatch,
	SingularSystem,
	NoConvergence,
	NotSymmetric,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
	switch (code) {
	case ErrorCode::EmptyDirectory: return "EmptyDirectory";
	case ErrorCode::DimensionMismatch: return "DimensionMismatch";
	case ErrorCode::DecodeError: return "DecodeError";
	case ErrorCode::IoError: return "IoError";
	case ErrorCode::BadMagic: return "BadMagic";
	case ErrorCode::TruncatedFile: return "TruncatedFile";
	case ErrorCode::TooSmall: return "TooSmall";
	case ErrorCode::TooShort: return "TooShort";
	case ErrorCode::InvalidRank: return "InvalidRank";
	case ErrorCode::InvalidArgument: return "InvalidArgument";
	case ErrorCode::LengthMismatch: return "LengthMismatch";
	case ErrorCode::SingularSystem: return "SingularSystem";
	case ErrorCode::NoConvergence: return "NoConvergence";
	case ErrorCode::NotSymmetric: return "NotSymmetric";
	}
	return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code.
class Error : public std::runtime_error {
  public:
	Error(ErrorCode code, std::string const& what)
		: std::runtime_error(std::string(to_string(code)) + ": " + what), m_code(code), m_detail(what) {}

	ErrorCode code() const noexcept { return m_code; }
	/// Message without the code prefix.
	std::string const& detail() const noexcept { return m_detail; }

  private:
	ErrorCode m_code;
	std::string m_detail;
};

} // namespace flowpool
