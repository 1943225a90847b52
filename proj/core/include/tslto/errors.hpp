#pragma once

#include <stdexcept>

namespace tslto {

/// Non-finite values or a numerical procedure that cannot make progress.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tslto
