#ifndef PATHFORGE_ERROR_HPP
#define PATHFORGE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace pathforge {

/// Exception carrying a stable, machine-readable error code next to the
/// human-readable message. The CLI serializes both into its error record.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

namespace errc {
inline constexpr const char* kDegenerateAngle = "degenerate_angle";
inline constexpr const char* kInvalidInput = "invalid_input";
inline constexpr const char* kInvalidEnvironment = "invalid_environment";
inline constexpr const char* kGenerationFailed = "generation_failed";
inline constexpr const char* kClearanceUndefined = "clearance_undefined";
inline constexpr const char* kInsufficientInstances = "insufficient_instances";
inline constexpr const char* kQuotaUnreachable = "quota_unreachable";
inline constexpr const char* kIncompatibleMode = "incompatible_mode";
inline constexpr const char* kIdMismatch = "id_mismatch";
inline constexpr const char* kPathEnvMismatch = "path_env_mismatch";
inline constexpr const char* kParse = "parse_error";
inline constexpr const char* kIo = "io_error";
}  // namespace errc

}  // namespace pathforge

#endif  // PATHFORGE_ERROR_HPP
