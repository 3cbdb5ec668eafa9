#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace cruc {

/// Root of every error the library throws.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// Bad input data: malformed files, inconsistent triples, empty datasets.
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters handed to a model builder or predictor.
class ParameterError : public Error {
public:
    using Error::Error;
};

class DuplicateRating : public DataError {
public:
    DuplicateRating(std::string user, std::string item)
        : DataError("duplicate rating for user '" + user + "', item '" + item + "'"),
          user_(std::move(user)), item_(std::move(item)) {}

    const std::string& user() const noexcept { return user_; }
    const std::string& item() const noexcept { return item_; }

private:
    std::string user_;
    std::string item_;
};

class RatingOutOfScale : public DataError {
public:
    RatingOutOfScale(std::string user, std::string item, double value)
        : DataError("rating " + std::to_string(value) + " for user '" + user + "', item '" + item +
                    "' lies outside the rating scale"),
          user_(std::move(user)), item_(std::move(item)), value_(value) {}

    const std::string& user() const noexcept { return user_; }
    const std::string& item() const noexcept { return item_; }
    double value() const noexcept { return value_; }

private:
    std::string user_;
    std::string item_;
    double value_;
};

class EmptyMatrix : public DataError {
public:
    EmptyMatrix() : DataError("rating matrix is empty") {}
};

class UnknownUser : public DataError {
public:
    explicit UnknownUser(const std::string& user) : DataError("unknown user '" + user + "'") {}
};

class UnknownItem : public DataError {
public:
    explicit UnknownItem(const std::string& item) : DataError("unknown item '" + item + "'") {}
};

class MalformedLine : public DataError {
public:
    MalformedLine(std::size_t line_no, std::string content)
        : DataError("malformed line " + std::to_string(line_no) + ": '" + content + "'"),
          line_no_(line_no), content_(std::move(content)) {}

    std::size_t line_no() const noexcept { return line_no_; }
    const std::string& content() const noexcept { return content_; }

private:
    std::size_t line_no_;
    std::string content_;
};

class IoFailure : public DataError {
public:
    using DataError::DataError;
};

class ZeroTotalDwell : public DataError {
public:
    explicit ZeroTotalDwell(const std::string& user)
        : DataError("user '" + user + "' has zero total dwell time"), user_(user) {}

    const std::string& user() const noexcept { return user_; }

private:
    std::string user_;
};

class TooManyClusters : public ParameterError {
public:
    TooManyClusters(std::size_t clusters, std::size_t members)
        : ParameterError("cannot form " + std::to_string(clusters) + " clusters from " +
                         std::to_string(members) + " users"),
          clusters_(clusters), members_(members) {}

    std::size_t clusters() const noexcept { return clusters_; }
    std::size_t members() const noexcept { return members_; }

private:
    std::size_t clusters_;
    std::size_t members_;
};

class DegenerateSplit : public DataError {
public:
    using DataError::DataError;
};

class EmptyInput : public Error {
public:
    EmptyInput() : Error("metric needs at least one (predicted, actual) pair") {}
};

}  // namespace cruc
