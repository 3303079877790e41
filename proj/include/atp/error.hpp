#pragma once

#include <stdexcept>
#include <string>

namespace atp {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace atp
