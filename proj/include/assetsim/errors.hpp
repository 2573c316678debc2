#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace assetsim {

/// Invalid input or violated precondition. The CLI maps it to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File or network failure. The CLI maps it to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Design matrix without full column rank.
class RankError : public ValidationError {
public:
    RankError(const std::string& what, std::vector<std::string> columns)
        : ValidationError(what), columns_(std::move(columns)) {}

    const std::vector<std::string>& columns() const noexcept { return columns_; }

private:
    std::vector<std::string> columns_;
};

/// One or more invalid request fields.
class FieldError : public ValidationError {
public:
    struct Field {
        std::string name;
        std::string message;
    };

    explicit FieldError(std::vector<Field> fields)
        : ValidationError(summary(fields)), fields_(std::move(fields)) {}

    const std::vector<Field>& fields() const noexcept { return fields_; }

private:
    static std::string summary(const std::vector<Field>& fields) {
        std::string out;
        for (const auto& f : fields) {
            if (!out.empty()) out += "; ";
            out += f.name + ": " + f.message;
        }
        return out;
    }

    std::vector<Field> fields_;
};

/// Model fails the stationarity conditions and the caller did not force it.
class NonStationaryError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace assetsim
