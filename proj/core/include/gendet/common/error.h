#ifndef GENDET_COMMON_ERROR_H_
#define GENDET_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace gendet {

// Coarse failure category. The command-line tool maps these onto exit codes.
enum class ErrorKind {
  kInvalidArgument,  // caller passed something outside an operation's contract
  kDataError,        // unreadable or inconsistent data on disk / in a registry
  kTrainingFailure,  // optimisation diverged or produced NaN
  kNotFound,
  kConflict,         // state-machine violation (e.g. out-of-order survey answer)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void Require(bool condition, const std::string& message) {
  if (!condition) Fail(ErrorKind::kInvalidArgument, message);
}

}  // namespace gendet

#endif  // GENDET_COMMON_ERROR_H_
