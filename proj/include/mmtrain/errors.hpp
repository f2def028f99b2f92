#ifndef MMTRAIN_ERRORS_HPP
#define MMTRAIN_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mmtrain {

/// Argument outside the mathematical domain of an operation (negative angle, M < 1, ...).
class domain_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Configuration or scenario validation failure. Carries every violation found.
class validation_error : public std::invalid_argument {
public:
  explicit validation_error(std::vector<std::string> violations)
      : std::invalid_argument(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) {
      out += "\n  - ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

/// Work refused because it would exceed an enumeration cap (2^N oracles).
class resource_cap_error : public std::runtime_error {
public:
  resource_cap_error(const std::string& what, std::size_t cap)
      : std::runtime_error(what + " (cap is " + std::to_string(cap) + ")"), cap_(cap) {}

  std::size_t cap() const noexcept { return cap_; }

private:
  std::size_t cap_;
};

/// Unknown flow id.
class lookup_error : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// Operation applied to an object in an inconsistent state.
class state_error : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace mmtrain

#endif  // MMTRAIN_ERRORS_HPP
