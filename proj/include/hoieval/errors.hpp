#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hoieval {

enum class ErrorKind {
  kDegenerateConfiguration,
  kZeroVariance,
  kBehindCamera,
  kEmptyMesh,
  kEmptyCloud,
  kEmptyInput,
  kCountMismatch,
  kInvalidRotation,
  kInvalidArgument,
  kParseError,
  kZeroExtent,
  kEmptyMask,
  kAllZero,
  kNoCurveData,
  kMixedTracks,
  kIoError,
  kInternal,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Failure while scoring one frame. Carries the frame so the CLI can list it.
class FrameError : public Error {
 public:
  FrameError(std::string frame_id, const Error &cause)
      : Error(cause.kind(), "frame '" + frame_id + "': " +
                                std::string(cause.what()).substr(to_string(cause.kind()).size() + 2)),
        frame_id_(std::move(frame_id)) {}

  const std::string &frame_id() const noexcept { return frame_id_; }

 private:
  std::string frame_id_;
};

}  // namespace hoieval
