#include "aeca/error.hpp"

namespace aeca {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::BadGrade: return "BadGrade";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::SingleGroup: return "SingleGroup";
        case ErrorCode::MissingField: return "MissingField";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DuplicateLabel: return "DuplicateLabel";
        case ErrorCode::ZeroWeight: return "ZeroWeight";
        case ErrorCode::DegenerateTable: return "DegenerateTable";
        case ErrorCode::SvdFailure: return "SvdFailure";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace aeca
