#pragma once

#include <iosfwd>

namespace aeca::cli {

// Exit codes of the aeca command.
enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,  // bad flags, missing bindings, invalid thresholds/dims/level
    kIo = 3,
    kInputFormat = 4,  // MissingColumn, ParseError
    kEmptyDataset = 5,
    kSingleGroup = 6,
    kMissingField = 7,
    kBadPiMatrix = 8,  // OutOfRange, DimensionMismatch, DuplicateLabel
    kDegenerate = 9,
    kSvdFailure = 10,
    kServe = 11,
};

/// Entry point shared by the aeca binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aeca::cli
