#ifndef AGG_ERRORS_HPP
#define AGG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace agg {

// Invalid user-supplied configuration (bad k, alpha out of range, ...).
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Mismatched observation / grid dimensions.
class dimension_error : public std::invalid_argument {
public:
    explicit dimension_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Query point outside the support of the model (Bayes rule undefined).
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace agg

#endif
