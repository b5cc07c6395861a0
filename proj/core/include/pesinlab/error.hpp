#pragma once

#include <stdexcept>
#include <string>

namespace pesinlab {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input rejected by a precondition check (bad descriptor, out-of-range parameter, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical computation could not be carried out (overflow, degenerate frame, singular map).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Two graph samples were mapped onto the same F-coordinate: the image is not a graph.
class GraphFolded : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A propagated sample left the Bowen ball it was required to stay in.
class BowenBallExit : public Error {
public:
    BowenBallExit(const std::string& what, long step) : Error(what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

}  // namespace pesinlab
