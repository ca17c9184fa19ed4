#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nodal {

enum class ErrorKind {
    InvalidConfig,
    InvalidArgument,
    NonFinite,
    NoRootInWindow,
    MultipleRootsAmbiguous,
    NodeCountMismatch,
    DegenerateDenominator,
    InsufficientData,
    SideMismatch,
    AuxInconsistent,
    NoStableShift,
    ThetaOutOfRange,
    NegativeMassSquare,
    Io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NoRootInWindow: return "NoRootInWindow";
    case ErrorKind::MultipleRootsAmbiguous: return "MultipleRootsAmbiguous";
    case ErrorKind::NodeCountMismatch: return "NodeCountMismatch";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::SideMismatch: return "SideMismatch";
    case ErrorKind::AuxInconsistent: return "AuxInconsistent";
    case ErrorKind::NoStableShift: return "NoStableShift";
    case ErrorKind::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorKind::NegativeMassSquare: return "NegativeMassSquare";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure in the library is reported through this type; `kind()`
/// is the stable discriminator, the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace nodal
