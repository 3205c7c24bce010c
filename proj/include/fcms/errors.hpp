#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace fcms {

/// A state entry became (or was handed in) non-finite. Carries the name of
/// the offending field and, for vector states, the first offending index.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::string field, std::string what_arg,
                    std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(std::move(what_arg)),
          field_(std::move(field)),
          index_(index) {}

    const std::string& field() const noexcept { return field_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    std::string field_;
    std::optional<std::size_t> index_;
};

/// An iterative numerical routine failed to meet its residual contract.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration rejected; carries the offending key for field-level messages.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, std::string what_arg)
        : std::runtime_error(std::move(what_arg)), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace fcms
