#ifndef ISG_ERROR_HPP
#define ISG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace isg {

/// Base of every exception thrown by the library.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called with a level scheme of the wrong topology.
class scheme_mismatch : public error
{
public:
    using error::error;
};

/// An argument lies outside the domain of the operation.
class domain_error : public error
{
public:
    using error::error;
};

/// A shift or harmonic cannot be represented on the requested grid.
class grid_resolution_error : public error
{
public:
    using error::error;
};

/// A numerical march failed its step-halving or steady-state check.
class convergence_error : public error
{
public:
    using error::error;
};

/// Invalid user configuration (CLI flags or JSON config).
class config_error : public error
{
public:
    using error::error;
};

} // namespace isg

#endif // ISG_ERROR_HPP
